"""Convergence ladders, parameter-regime sweeps and long-time error histories."""
from __future__ import annotations

import datetime as _dt
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .. import __version__
from ..grid import SpinorField
from ..observables import l2_error
from ..splitting import SchemeId, evolve
from .config import RunConfig
from .references import ReferenceStore

__all__ = [
    "StudyRow",
    "StudyReport",
    "convergence_study",
    "regime_sweep",
    "regime_config",
    "long_time_study",
    "observed_rates",
    "onset_index",
    "REGIMES",
    "ONSET_RATE",
]

ONSET_RATE = 3.5


@dataclass
class StudyRow:
    scheme: str
    h: float
    tau: float
    e_phi: float
    e_rho: float
    e_J: float
    rate: float | None = None
    param_name: str = ""
    param: float | None = None
    t: float | None = None
    onset: bool = False
    wall_s: float = 0.0


@dataclass
class StudyReport:
    rows: list[StudyRow] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    config: RunConfig | None = None

    def column(self, name: str, **where) -> list:
        return [getattr(r, name) for r in self.select(**where)]

    def select(self, **where) -> list[StudyRow]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in where.items())]

    def to_dict(self) -> dict:
        return {"metadata": dict(self.metadata),
                "config": self.config.to_dict() if self.config else None,
                "rows": [asdict(r) for r in self.rows]}


def _metadata(base: RunConfig, **extra) -> dict:
    return {"config_hash": base.config_hash(), "version": __version__,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"), **extra}


def observed_rates(errors: Sequence[float], steps: Sequence[float]) -> list[float | None]:
    """``log(e_k/e_{k+1}) / log(x_k/x_{k+1})`` with a blank first entry."""
    out: list[float | None] = [None]
    for k in range(1, len(errors)):
        e0, e1 = errors[k - 1], errors[k]
        if e0 > 0 and e1 > 0:
            out.append(math.log(e0 / e1) / math.log(steps[k - 1] / steps[k]))
        else:
            out.append(float("nan"))
    return out


def onset_index(rates: Sequence[float | None], threshold: float = ONSET_RATE) -> int | None:
    """First ladder position whose incoming rate reaches ``threshold``."""
    for k, r in enumerate(rates):
        if r is not None and np.isfinite(r) and r >= threshold:
            return k
    return None


def _check_ladder(ladder: Sequence[float]) -> list[float]:
    ladder = [float(x) for x in ladder]
    if not ladder:
        raise ValueError("empty ladder")
    for x0, x1 in zip(ladder, ladder[1:]):
        r = math.log2(x0 / x1) if x1 > 0 and x0 > 0 else -1
        if not (x1 < x0 and abs(r - round(r)) < 1e-9):
            raise ValueError(f"ladder must decrease by powers of two, got {x0} -> {x1}")
    return ladder


def _errors(num: SpinorField, ref_vals: np.ndarray, ref_grid, cfg: RunConfig, relative: bool) -> tuple[float, float, float]:
    ref = SpinorField(ref_grid, ref_vals)
    p = cfg.phys()
    return (l2_error(num, ref, relative, "phi"), l2_error(num, ref, relative, "rho"),
            l2_error(num, ref, relative, "J", p))


def _run(cfg: RunConfig) -> tuple[SpinorField, float]:
    grid = cfg.grid()
    t0 = time.perf_counter()
    res = evolve(cfg.scheme, grid, cfg.phys(), cfg.samples(grid), cfg.initial_field(grid), cfg.tau, cfg.T_final,
                 stride=max(1, round(cfg.T_final / cfg.tau)))
    return res.field, time.perf_counter() - t0


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def convergence_study(base: RunConfig, axis: str, ladder: Sequence[float], schemes: Sequence[str] | None = None,
                      relative: bool = False, store: ReferenceStore | None = None, workers: int = 1,
                      param_name: str = "", param: float | None = None) -> StudyReport:
    """Errors at ``T_final`` over a ladder of mesh sizes (``axis="space"``)
    or time steps (``axis="time"``), against one shared reference."""
    if axis not in ("space", "time"):
        raise ValueError(f"axis must be 'space' or 'time', got {axis!r}")
    ladder = _check_ladder(ladder)
    schemes = [SchemeId.parse(s).value for s in (schemes or [base.scheme])]
    store = store or ReferenceStore()
    if axis == "space":
        cfgs = [base.replace(h=h) for h in ladder]
        ref_grid = base.reference_grid()
        for c in cfgs:
            ref_grid.refines(c.grid())
            if ref_grid.M <= c.M:
                raise ValueError(f"reference grid M={ref_grid.M} is not finer than ladder point M={c.M}")
    else:
        cfgs = [base.replace(tau=t) for t in ladder]
        ref_grid = base.reference_grid()
        ref_grid.refines(base.grid())
        if base.reference != "analytic" and base.ref_tau >= min(ladder):
            raise ValueError(f"reference step {base.ref_tau} is not finer than the ladder")
    if base.reference == "analytic":
        ref_grid = base.grid()
        if axis == "space":
            raise ValueError("analytic references are supported on temporal ladders only")
    ref_vals = store.get(base)

    report = StudyReport(metadata=_metadata(base, study="convergence", axis=axis, relative=relative,
                                            ladder=ladder, schemes=schemes), config=base)
    for s in schemes:
        runs = _map(_run, [c.replace(scheme=s) for c in cfgs], workers)
        rows = []
        for c, (num, wall) in zip(cfgs, runs):
            e = _errors(num, ref_vals, ref_grid, c, relative)
            rows.append(StudyRow(s, c.h, c.tau, *e, param_name=param_name, param=param, t=c.T_final, wall_s=wall))
        for r, rate in zip(rows, observed_rates([r.e_phi for r in rows], ladder)):
            r.rate = rate
        report.rows.extend(rows)
    return report


# ---------------------------------------------------------------------------
# regimes
# ---------------------------------------------------------------------------

REGIMES = {
    "nr": "nonrelativistic",
    "nonrelativistic": "nonrelativistic",
    "sc": "semiclassical",
    "semiclassical": "semiclassical",
    "nrml": "simultaneous",
    "simultaneous": "simultaneous",
}

_REGIME_PARAM = {"nonrelativistic": "epsilon", "semiclassical": "delta", "simultaneous": "epsilon"}


def regime_config(regime: str, value: float, base: RunConfig | None = None) -> RunConfig:
    """Configuration of one regime row; ``base`` may override grid and time settings."""
    regime = REGIMES[regime]
    if regime == "nonrelativistic":
        defaults = dict(a=-32, b=32, M=1024, epsilon=value, delta=1, nu=1, initial="gaussian", T_final=6)
    elif regime == "semiclassical":
        defaults = dict(a=-16, b=16, M=4096, epsilon=1, delta=value, nu=1, initial="wkb", T_final=2)
    else:
        defaults = dict(a=-128, b=128, M=4096, epsilon=value, delta=1, nu=value, initial="gaussian", T_final=2)
    defaults.update(potential="paper-1d", dim=1, scheme="S4c", ref_scheme="S4c")
    if base is None:
        return RunConfig(**defaults, ref_tau=1e-4)
    keep = {k: v for k, v in defaults.items() if k in ("epsilon", "delta", "nu")}
    return base.replace(**keep)


def regime_sweep(regime: str, values: Sequence[float], ladder: Sequence[float], axis: str = "time",
                 base: RunConfig | None = None, store: ReferenceStore | None = None, workers: int = 1,
                 relative: bool = True) -> StudyReport:
    """Relative errors of S4c for each regime parameter value over a ladder.

    Within each parameter row, the first ladder point whose incoming rate is
    at least ``ONSET_RATE`` is flagged as the onset of the asymptotic
    fourth-order (or spectral) regime.
    """
    name = REGIMES[regime]
    pname = _REGIME_PARAM[name]
    report = StudyReport(metadata={}, config=None)
    for v in values:
        cfg = regime_config(name, v, base)
        sub = convergence_study(cfg, axis, ladder, [cfg.scheme], relative, store, workers, pname, float(v))
        k = onset_index([r.rate for r in sub.rows])
        if k is not None:
            sub.rows[k].onset = True
        report.rows.extend(sub.rows)
        report.config = report.config or cfg
    head = report.config or regime_config(name, values[0], base)
    report.metadata = _metadata(head, study="regime", regime=name, axis=axis, parameter=pname,
                                values=[float(v) for v in values], ladder=[float(x) for x in ladder],
                                relative=relative)
    return report


# ---------------------------------------------------------------------------
# long time
# ---------------------------------------------------------------------------

def long_time_study(config: RunConfig, schemes: Sequence[str], T: float = 50.0, sample_dt: float = 0.5,
                    store: ReferenceStore | None = None) -> StudyReport:
    """e_Phi(t) on a uniform time grid for each scheme at ``config.tau``."""
    store = store or ReferenceStore()
    n_samples = round(T / sample_dt)
    times = tuple(k * sample_dt for k in range(n_samples + 1))
    cfg = config.replace(T_final=T)
    ref = store.get(cfg, times)
    ref_grid = cfg.reference_grid()
    grid = cfg.grid()
    stride = round(sample_dt / cfg.tau)
    if abs(stride * cfg.tau - sample_dt) > 1e-9:
        raise ValueError(f"sample spacing {sample_dt} is not a multiple of tau={cfg.tau}")
    report = StudyReport(metadata=_metadata(cfg, study="longtime", T=T, sample_dt=sample_dt,
                                            schemes=list(schemes)), config=cfg)
    samples = cfg.samples(grid)
    for s in schemes:
        s = SchemeId.parse(s).value
        t0 = time.perf_counter()
        res = evolve(s, grid, cfg.phys(), samples, cfg.initial_field(grid), cfg.tau, T, stride=stride,
                     keep_frames=True)
        wall = time.perf_counter() - t0
        for t, frame, rframe in zip(res.times, res.frames, ref):
            e = _errors(SpinorField(grid, frame), rframe, ref_grid, cfg, False)
            report.rows.append(StudyRow(s, cfg.h, cfg.tau, *e, t=t, wall_s=wall))
    return report
