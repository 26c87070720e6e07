"""Named benchmark table presets with their tabulated error values.

Tabulated entries below ``1E-10`` appear as ``None``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .config import RunConfig
from .references import ReferenceStore
from .studies import StudyReport, StudyRow, convergence_study, regime_sweep

__all__ = ["TablePreset", "TABLES", "run_table", "benchmark_value", "paper_1d_config", "honeycomb_config"]

ALL_SCHEMES = ("S1", "S2", "S4", "S4c", "S4RK")
_ = None


def paper_1d_config(**kw) -> RunConfig:
    """1D comparison setup: Omega = (-32, 32), t = 6, reference S4c at h = 1/16, tau = 1e-5."""
    base = dict(a=-32, b=32, M=1024, dim=1, potential="paper-1d", initial="gaussian",
                T_final=6, ref_M=1024, ref_tau=1e-5, tau=1e-5)
    base.update(kw)
    return RunConfig(**base)


def honeycomb_config(**kw) -> RunConfig:
    """2D honeycomb setup: Omega = (-10, 10)^2, t = 2, reference S4c at h = 1/32."""
    base = dict(a=-10, b=10, M=640, dim=2, potential="honeycomb-2d", initial="gaussian",
                T_final=2, ref_M=640, ref_tau=1e-4, tau=1e-4)
    base.update(kw)
    return RunConfig(**base)


@dataclass(frozen=True)
class TablePreset:
    name: str
    title: str
    kind: str                    # "convergence" or "regime"
    axis: str
    ladder: tuple[float, ...]
    quantity: tuple[str, ...]    # which error columns the table shows
    benchmark: dict = field(default_factory=dict)   # quantity -> row label -> values
    schemes: tuple[str, ...] = ("S4c",)
    regime: str | None = None
    values: tuple[float, ...] = ()
    base: RunConfig | None = None
    reduced: dict = field(default_factory=dict)   # overrides for a desk-scale run
    relative: bool = False       # tabulated values are normalized by the reference norm


_TAU_1D = tuple(2.0**-k for k in range(1, 8))
_NR_TAU = tuple(4.0**-k for k in range(6))
_SC_H = tuple(2.0**-k for k in range(7))
_SC_TAU = tuple(2.0**-k for k in range(7))
_EPS_NR = tuple(2.0**-k for k in range(5))
_DELTA = tuple(2.0**-k for k in range(6))
_EPS_SIM = tuple(2.0**-k for k in range(7))


def _rows(values, table):
    return {float(v): tuple(r) for v, r in zip(values, table)}


TABLES: dict[str, TablePreset] = {
    "table2": TablePreset(
        "table2", "1D spatial errors e_Phi(t=6), tau = 1e-5", "convergence", "space", (1.0, 0.5, 0.25, 0.125),
        ("phi",), {"phi": {"S1": (1.01, 5.16e-2, 7.07e-5, _), "S2": (1.01, 5.16e-2, 6.96e-5, 1.92e-10),
                           "S4": (1.01, 5.16e-2, 6.96e-5, 3.52e-10), "S4c": (1.01, 5.16e-2, 6.96e-5, 3.06e-10),
                           "S4RK": (1.01, 5.16e-2, 6.96e-5, 5.15e-10)}},
        schemes=ALL_SCHEMES, base=paper_1d_config(), reduced={"schemes": ("S4c",)}),
    "table3": TablePreset(
        "table3", "1D temporal errors e_Phi(t=6), h = 1/16", "convergence", "time", _TAU_1D, ("phi",),
        {"phi": {"S1": (1.17, 4.71e-1, 2.09e-1, 9.90e-2, 4.82e-2, 2.38e-2, 1.18e-2),
                 "S2": (7.49e-1, 1.87e-1, 4.66e-2, 1.16e-2, 2.91e-3, 7.27e-4, 1.82e-4),
                 "S4": (3.30e-1, 3.73e-2, 3.05e-3, 2.07e-4, 1.32e-5, 8.29e-7, 5.20e-8),
                 "S4c": (1.66e-2, 9.54e-4, 5.90e-5, 3.68e-6, 2.30e-7, 1.43e-8, 8.12e-10),
                 "S4RK": (2.87e-3, 1.78e-4, 1.11e-5, 6.97e-7, 4.34e-8, 2.58e-9, 1.66e-10)}},
        schemes=ALL_SCHEMES, base=paper_1d_config()),
    "table4": TablePreset(
        "table4", "2D honeycomb spatial errors e_Phi(t=2)", "convergence", "space", (0.5, 0.25, 0.125, 0.0625),
        ("phi",), {"phi": {"S4": (1.10, 1.01e-1, 3.83e-4, 7.33e-10), "S4c": (1.10, 1.01e-1, 3.83e-4, 7.33e-10),
                           "S4RK": (1.10, 1.01e-1, 3.83e-4, 7.34e-10)}},
        schemes=("S4", "S4c", "S4RK"), base=honeycomb_config(),
        reduced={"schemes": ("S4c",), "ladder": (0.5, 0.25, 0.125), "tau": 1e-3, "ref_tau": 1e-3}),
    "table5": TablePreset(
        "table5", "2D honeycomb temporal errors e_Phi^r(t=2), h = 1/32", "convergence", "time", _TAU_1D, ("phi",),
        {"phi": {"S4": (4.33e-1, 2.57e-2, 3.53e-3, 2.83e-4, 1.88e-5, 1.20e-6, 7.51e-8),
                 "S4c": (6.75e-2, 3.18e-3, 7.91e-5, 4.70e-6, 2.91e-7, 1.81e-8, 1.13e-9),
                 "S4RK": (8.32e-3, 3.56e-4, 7.42e-6, 4.43e-7, 2.75e-8, 1.71e-9, 1.07e-10)}},
        schemes=("S4", "S4c", "S4RK"), base=honeycomb_config(),
        reduced={"schemes": ("S4c",), "ladder": (0.5, 0.25, 0.125), "ref_tau": 1e-3}, relative=True),
}

_NR_PHI = [(2.24e-1, 5.07e-4, 1.95e-6, 7.63e-9, _, _), (1.18, 1.05e-2, 3.61e-5, 1.40e-7, 5.67e-10, _),
           (1.46, 2.07e-1, 1.69e-3, 6.09e-6, 2.37e-8, _), (1.41, 1.50, 5.88e-2, 3.84e-4, 1.39e-6, 5.40e-9),
           (1.43, 1.47, 6.80e-1, 1.46e-2, 9.33e-5, 3.38e-7)]
_NR_RHO = [(1.71e-1, 3.73e-4, 1.44e-6, 5.62e-9, _, _), (1.31, 7.17e-3, 2.45e-5, 9.50e-8, 3.94e-10, _),
           (8.19e-1, 2.20e-1, 8.16e-4, 2.92e-6, 1.13e-8, _), (8.75e-1, 4.77e-1, 5.76e-2, 1.65e-4, 5.89e-7, 2.29e-9),
           (1.00, 1.12, 2.04e-1, 1.49e-2, 4.03e-5, 1.43e-7)]
_NR_J = [(2.92e-1, 6.76e-4, 2.61e-6, 1.02e-8, _, _), (1.30, 1.98e-2, 6.88e-5, 2.67e-7, 1.06e-9, _),
         (1.29, 2.98e-1, 3.40e-3, 1.23e-5, 4.76e-8, _), (1.21, 1.29, 8.82e-2, 7.85e-4, 2.85e-6, 1.11e-8),
         (1.52, 1.44, 1.30, 2.41e-2, 1.92e-4, 6.98e-7)]
_SCS_PHI = [(8.25e-1, 2.00e-1, 9.52e-3, 6.66e-6, 3.78e-10, _, _), (1.20, 7.40e-1, 5.31e-2, 8.87e-5, 3.43e-10, _, _),
            (1.41, 9.89e-1, 5.12e-1, 3.81e-3, 9.24e-10, _, _), (1.76, 1.21, 7.30e-1, 2.76e-1, 1.91e-5, 4.17e-10, _),
            (1.37, 1.36, 1.36, 5.31e-1, 1.54e-1, 5.31e-10, _), (2.44, 1.92, 1.36, 1.36, 4.36e-1, 5.49e-2, 2.90e-10)]
_SCS_RHO = [(5.83e-1, 1.39e-1, 8.27e-3, 4.36e-6, 4.92e-10, _, _), (1.29, 5.22e-1, 3.71e-2, 5.56e-5, 2.79e-10, _, _),
            (9.22e-1, 7.44e-1, 2.41e-1, 1.54e-3, 6.75e-10, _, _), (1.63, 9.39e-1, 6.11e-1, 6.33e-2, 4.78e-6, 8.19e-10, _),
            (2.04, 1.40, 1.00, 3.57e-1, 1.97e-2, 6.76e-10, _), (5.81, 3.65, 1.07, 1.01, 1.86e-1, 3.35e-3, 5.67e-10)]
_SCS_J = [(8.07e-1, 1.67e-1, 1.05e-2, 5.69e-6, 5.10e-10, _, _), (1.45, 6.89e-1, 4.28e-2, 6.46e-5, 3.06e-10, _, _),
          (1.94, 1.05, 3.52e-1, 2.13e-3, 7.96e-10, _, _), (2.52, 1.03, 7.07e-1, 1.24e-1, 7.75e-6, 8.16e-10, _),
          (2.85, 1.77, 1.10, 5.84e-1, 4.72e-2, 6.75e-10, _), (3.88, 4.06, 1.11, 1.07, 3.81e-1, 1.22e-2, 5.63e-10)]
_SCT_PHI = [(1.60e-1, 1.58e-2, 5.09e-4, 2.08e-5, 1.27e-6, 7.89e-8, 4.94e-9),
            (8.66e-1, 1.48e-1, 7.17e-3, 3.90e-4, 2.41e-5, 1.50e-6, 9.39e-8),
            (1.26, 9.52e-1, 1.38e-1, 7.38e-3, 4.50e-4, 2.80e-5, 1.75e-6),
            (1.45, 1.20, 9.94e-1, 1.62e-1, 9.11e-3, 5.57e-4, 3.46e-5),
            (1.40, 1.44, 1.12, 9.46e-1, 2.62e-1, 1.50e-2, 9.15e-4),
            (1.44, 1.44, 1.42, 1.22, 1.07, 4.43e-1, 2.83e-2)]
_SCT_RHO = [(1.15e-1, 1.23e-2, 4.11e-4, 1.70e-5, 1.03e-6, 6.40e-8, 4.11e-9),
            (5.05e-1, 9.20e-2, 4.93e-3, 2.36e-4, 1.44e-5, 8.98e-7, 5.62e-8),
            (7.69e-1, 4.22e-1, 4.32e-2, 2.85e-3, 1.73e-4, 1.08e-5, 6.72e-7),
            (1.28, 9.03e-1, 5.67e-1, 3.77e-2, 2.03e-3, 1.23e-4, 7.66e-6),
            (8.80e-1, 1.25, 9.86e-1, 7.53e-1, 2.58e-2, 1.35e-3, 8.15e-5),
            (9.60e-1, 9.90e-1, 1.09, 1.08, 8.82e-1, 2.59e-2, 1.16e-3)]
_SCT_J = [(1.98e-1, 2.21e-2, 6.42e-4, 2.34e-5, 1.42e-6, 8.84e-8, 5.55e-9),
          (6.61e-1, 1.93e-1, 8.72e-3, 4.34e-4, 2.67e-5, 1.66e-6, 1.04e-7),
          (1.25, 6.66e-1, 1.46e-1, 8.44e-3, 5.16e-4, 3.21e-5, 2.00e-6),
          (1.57, 1.19, 7.29e-1, 1.23e-1, 7.10e-3, 4.35e-4, 2.71e-5),
          (1.04, 1.47, 1.15, 8.24e-1, 9.50e-2, 5.86e-3, 3.60e-4),
          (1.02, 1.14, 1.19, 1.19, 9.39e-1, 7.34e-2, 5.22e-3)]
_SIM_PHI = [(1.12e-1, 4.20e-3, 2.18e-4, 1.33e-5, 8.30e-7, 5.18e-8, 3.24e-9),
            (4.72e-1, 3.66e-2, 1.17e-3, 6.64e-5, 4.09e-6, 2.55e-7, 1.59e-8),
            (1.14, 2.72e-1, 1.27e-2, 3.64e-4, 2.10e-5, 1.30e-6, 8.08e-8),
            (1.29, 5.84e-1, 1.60e-1, 5.19e-3, 1.41e-4, 8.22e-6, 5.07e-7),
            (1.40, 7.31e-1, 3.40e-1, 9.81e-2, 2.46e-3, 6.16e-5, 3.58e-6),
            (1.39, 1.06, 3.90e-1, 2.09e-1, 6.32e-2, 1.27e-3, 2.84e-5),
            (1.48, 1.48, 5.90e-1, 2.19e-1, 1.32e-1, 4.21e-2, 7.04e-4)]
_SIM_RHO = [(8.62e-2, 3.48e-3, 1.91e-4, 1.17e-5, 7.28e-7, 4.54e-8, 2.82e-9),
            (3.56e-1, 2.97e-2, 7.90e-4, 4.56e-5, 2.82e-6, 1.76e-7, 1.10e-8),
            (9.98e-1, 2.83e-1, 1.22e-2, 2.54e-4, 1.45e-5, 8.95e-7, 5.57e-8),
            (8.15e-1, 5.58e-1, 1.60e-1, 4.18e-3, 9.00e-5, 5.29e-6, 3.27e-7),
            (9.32e-1, 7.05e-1, 3.32e-1, 1.02e-1, 1.69e-3, 3.69e-5, 2.19e-6),
            (1.05, 6.88e-1, 3.28e-1, 2.07e-1, 6.70e-2, 8.68e-4, 1.63e-5),
            (8.39e-1, 8.04e-1, 4.76e-1, 1.72e-1, 1.27e-1, 4.33e-2, 5.49e-4)]
_SIM_J = [(2.03e-1, 7.11e-3, 4.03e-4, 2.47e-5, 1.54e-6, 9.61e-8, 5.98e-9),
          (7.37e-1, 5.58e-2, 1.89e-3, 1.11e-4, 6.84e-6, 4.26e-7, 2.66e-8),
          (1.34, 4.30e-1, 1.81e-2, 5.59e-4, 3.31e-5, 2.05e-6, 1.28e-7),
          (1.20, 7.03e-1, 2.30e-1, 6.14e-3, 1.89e-4, 1.13e-5, 7.00e-7),
          (1.36, 1.04, 4.15e-1, 1.31e-1, 2.52e-3, 7.59e-5, 4.57e-6),
          (1.63, 1.32, 5.79e-1, 2.47e-1, 8.28e-2, 1.27e-3, 3.26e-5),
          (1.38, 1.47, 8.97e-1, 3.04e-1, 1.52e-1, 5.54e-2, 7.52e-4)]

_NR_BASE = RunConfig(a=-32, b=32, M=1024, potential="paper-1d", initial="gaussian", T_final=6, delta=1, nu=1,
                     ref_tau=1e-4)
_SC_BASE = RunConfig(a=-16, b=16, M=4096, potential="paper-1d", initial="wkb", T_final=2, epsilon=1, nu=1,
                     tau=1e-4, ref_tau=1e-4)
_SIM_BASE = RunConfig(a=-128, b=128, M=4096, potential="paper-1d", initial="gaussian", T_final=2, delta=1,
                      ref_tau=1e-4)


def _regime(name, title, regime, axis, ladder, values, quantity, benchmark, base, reduced):
    return TablePreset(name, title, "regime", axis, ladder, quantity, benchmark, ("S4c",), regime, values, base, reduced)


_RED_NR = {"values": (1.0, 0.5, 0.25), "ladder": _NR_TAU[:5]}
_RED_SC_S = {"values": (1.0, 0.5, 0.25), "ladder": _SC_H[:6]}
_RED_SC_T = {"values": (1.0, 0.5, 0.25)}
_RED_SIM = {"values": (1.0, 0.5, 0.25)}

TABLES.update({
    "table6": _regime("table6", "nonrelativistic e_Phi^r(t=6), h = 1/16", "nr", "time", _NR_TAU, _EPS_NR, ("phi",),
                      {"phi": _rows(_EPS_NR, _NR_PHI)}, _NR_BASE, _RED_NR),
    "table7": _regime("table7", "nonrelativistic e_rho^r and e_J^r (t=6)", "nr", "time", _NR_TAU, _EPS_NR,
                      ("rho", "J"), {"rho": _rows(_EPS_NR, _NR_RHO), "J": _rows(_EPS_NR, _NR_J)}, _NR_BASE, _RED_NR),
    "table8": _regime("table8", "semiclassical spatial e_Phi^r(t=2), tau = 1e-4", "sc", "space", _SC_H, _DELTA,
                      ("phi",), {"phi": _rows(_DELTA, _SCS_PHI)}, _SC_BASE, _RED_SC_S),
    "table9": _regime("table9", "semiclassical spatial e_rho^r and e_J^r (t=2)", "sc", "space", _SC_H, _DELTA,
                      ("rho", "J"), {"rho": _rows(_DELTA, _SCS_RHO), "J": _rows(_DELTA, _SCS_J)}, _SC_BASE,
                      _RED_SC_S),
    "table10": _regime("table10", "semiclassical temporal e_rho^r and e_J^r (t=2), h = 1/128", "sc", "time",
                       _SC_TAU, _DELTA, ("rho", "J"), {"rho": _rows(_DELTA, _SCT_RHO), "J": _rows(_DELTA, _SCT_J)},
                       _SC_BASE, _RED_SC_T),
    "table11": _regime("table11", "semiclassical temporal e_Phi^r(t=2), h = 1/128", "sc", "time", _SC_TAU, _DELTA,
                       ("phi",), {"phi": _rows(_DELTA, _SCT_PHI)}, _SC_BASE, _RED_SC_T),
    "table12": _regime("table12", "simultaneous limit e_Phi^r(t=2), h = 1/16", "nrml", "time", _SC_TAU, _EPS_SIM,
                       ("phi",), {"phi": _rows(_EPS_SIM, _SIM_PHI)}, _SIM_BASE, _RED_SIM),
    "table13": _regime("table13", "simultaneous limit e_rho^r and e_J^r (t=2)", "nrml", "time", _SC_TAU, _EPS_SIM,
                       ("rho", "J"), {"rho": _rows(_EPS_SIM, _SIM_RHO), "J": _rows(_EPS_SIM, _SIM_J)}, _SIM_BASE,
                       _RED_SIM),
})


def run_table(name: str, store: ReferenceStore | None = None, reduced: bool = False, workers: int = 1,
              schemes=None) -> tuple[StudyReport, TablePreset]:
    """Run preset ``name``; ``reduced`` applies the desk-scale overrides."""
    if name not in TABLES:
        raise KeyError(f"unknown table {name!r}; choose from {sorted(TABLES)}")
    p = TABLES[name]
    red = p.reduced if reduced else {}
    ladder = red.get("ladder", p.ladder)
    store = store or ReferenceStore()
    if p.kind == "convergence":
        base = p.base
        over = {k: red[k] for k in ("tau", "ref_tau") if k in red}
        if over:
            base = base.replace(**over)
        if p.axis == "time":
            base = base.replace(tau=ladder[0])
        report = convergence_study(base, p.axis, ladder, schemes or red.get("schemes", p.schemes),
                                   relative=p.relative, store=store, workers=workers)
    else:
        values = red.get("values", p.values)
        report = regime_sweep(p.regime, values, ladder, p.axis, base=p.base, store=store, workers=workers)
    report.metadata["table"] = name
    return report, p


def benchmark_value(preset: TablePreset, row: StudyRow, quantity: str = "phi") -> float | None:
    """The tabulated value matching ``row``, or None when absent or below tabulation resolution."""
    table = preset.benchmark.get(quantity)
    if table is None:
        return None
    label = row.scheme if preset.kind == "convergence" else row.param
    x = row.h if preset.axis == "space" else row.tau
    vals = table.get(label)
    if vals is None:
        return None
    for k, ladder_x in enumerate(preset.ladder):
        if abs(ladder_x - x) <= 1e-12 * ladder_x:
            return vals[k] if k < len(vals) else None
    return None
