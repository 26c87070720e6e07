"""Command-line entry point: ``diracsplit <subcommand> [options]``.

Every subcommand accepts ``--config FILE`` (INI, see :mod:`.config`) and
per-field overrides such as ``--tau 1/16`` or ``--set ref_tau=1e-4``.
Fractions are accepted wherever a number is.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from ..observables import energy, mass
from ..splitting import evolve
from .checks import commutator_check
from .config import RunConfig
from .references import ReferenceStore
from .report import report_to_csv, report_to_json
from .studies import REGIMES, StudyReport, convergence_study, long_time_study, regime_sweep
from .tables import TABLES, paper_1d_config, benchmark_value, run_table

__all__ = ["main", "build_parser"]

log = logging.getLogger("diracsplit")

_REGIME_TABLE = {("nonrelativistic", "time"): "table6", ("semiclassical", "space"): "table8",
                 ("semiclassical", "time"): "table11", ("simultaneous", "time"): "table12"}


def _number(text: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _numbers(text: str) -> list[float]:
    return [_number(t) for t in text.split(",") if t.strip()]


def _names(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


# flag -> (RunConfig field, type)
_OVERRIDES = {
    "a": float, "b": float, "M": int, "h": _number, "dim": int,
    "epsilon": _number, "delta": _number, "nu": _number,
    "potential": str, "initial": str, "scheme": str,
    "tau": _number, "T_final": _number, "stride": int,
    "reference": str, "ref_scheme": str, "ref_M": int, "ref_h": _number, "ref_tau": _number,
}


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration")
    g.add_argument("--config", type=Path, help="INI configuration file")
    g.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any configuration field (repeatable)")
    for key, typ in _OVERRIDES.items():
        if key == "scheme":
            continue  # subcommands define their own --scheme
        flag = "--T" if key == "T_final" else f"--{key.replace('_', '-')}"
        g.add_argument(flag, dest=f"ov_{key}", type=typ, default=None)
    o = p.add_argument_group("output")
    o.add_argument("--cache-dir", type=Path, help="reference cache (default $DIRACSPLIT_CACHE or ~/.cache/diracsplit)")
    o.add_argument("--workers", type=int, default=1, help="concurrent ladder points")
    o.add_argument("--out", type=Path, help="output file (default: stdout)")
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    o.add_argument("--timings", action="store_true", help="include wall times in CSV output")
    o.add_argument("-v", "--verbose", action="count", default=0)


def _config(args, base: RunConfig | None = None) -> RunConfig:
    cfg = RunConfig.load(args.config, base) if args.config else (base or RunConfig())
    changes = {}
    for key in _OVERRIDES:
        v = getattr(args, f"ov_{key}", None)
        if v is not None:
            changes[key] = v
    for item in args.set:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or key not in _OVERRIDES:
            raise SystemExit(f"--set expects KEY=VALUE with KEY in {sorted(_OVERRIDES)}, got {item!r}")
        changes[key] = _OVERRIDES[key](raw.strip())
    return cfg.replace(**changes) if changes else cfg


def _store(args) -> ReferenceStore:
    return ReferenceStore(args.cache_dir)


def _write(args, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as f:
        f.write(text)
    log.info("wrote %s", args.out)


def _emit(args, report: StudyReport) -> None:
    _write(args, report_to_csv(report, args.timings) if args.format == "csv" else report_to_json(report))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_run(args) -> int:
    cfg = _config(args)
    if args.scheme:
        cfg = cfg.replace(scheme=args.scheme)
    grid, params = cfg.grid(), cfg.phys()
    samples = cfg.samples(grid)
    observers = {"mass": lambda f, t: mass(f), "energy": lambda f, t: energy(f, samples, params)}
    res = evolve(cfg.scheme, grid, params, samples, cfg.initial_field(grid), cfg.tau, cfg.T_final,
                 observers=observers, stride=cfg.stride)
    if args.format == "json":
        payload = {"config": cfg.to_dict(), "config_hash": cfg.config_hash(), "t": res.times, **res.records}
        _write(args, json.dumps(payload, indent=2))
        return 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["t", "mass", "energy"])
    for row in zip(res.times, res.records["mass"], res.records["energy"]):
        w.writerow([repr(float(x)) for x in row])
    _write(args, buf.getvalue())
    return 0


def cmd_converge(args) -> int:
    cfg = _config(args)
    schemes = args.scheme or [cfg.scheme]
    if args.axis == "time":
        cfg = cfg.replace(tau=args.ladder[0])
    report = convergence_study(cfg, args.axis, args.ladder, schemes, relative=args.relative,
                               store=_store(args), workers=args.workers)
    _emit(args, report)
    return 0


def cmd_regime(args) -> int:
    name = REGIMES[args.regime]
    key = (name, args.axis)
    if key not in _REGIME_TABLE:
        raise SystemExit(f"regime {name} has no {args.axis} sweep preset")
    preset = TABLES[_REGIME_TABLE[key]]
    red = preset.reduced if args.reduced else {}
    values = args.values or red.get("values", preset.values)
    ladder = args.ladder or red.get("ladder", preset.ladder)
    base = _config(args, preset.base)
    report = regime_sweep(name, values, ladder, args.axis, base=base, store=_store(args), workers=args.workers)
    _emit(args, report)
    return 0


def cmd_longtime(args) -> int:
    cfg = _config(args, paper_1d_config(tau=0.1, ref_tau=1e-3))
    report = long_time_study(cfg, args.scheme or ["S1", "S2", "S4", "S4c", "S4RK"], T=args.T_end,
                             sample_dt=args.sample_dt, store=_store(args))
    _emit(args, report)
    return 0


def cmd_commutator_check(args) -> int:
    res = commutator_check(args.dim, args.rep, M=args.M_check, variant=args.variant, seed=args.seed)
    status = "PASS" if res.passed else "FAIL"
    level = "symbol" if args.dim == 3 else "field"
    print(f"{status} commutator d={res.dim} rep={res.representation} variant={res.variant} "
          f"{level}-level error={res.error:.3e} tol={res.tolerance:.0e} samples={res.samples}")
    return 0 if res.passed else 1


def cmd_table(args) -> int:
    report, preset = run_table(args.name, _store(args), reduced=args.reduced, workers=args.workers,
                               schemes=args.scheme)
    _emit(args, report)
    if args.compare:
        q = preset.quantity[0]
        print(f"# {preset.name}: {preset.title}", file=sys.stderr)
        for r in report.rows:
            ours = {"phi": r.e_phi, "rho": r.e_rho, "J": r.e_J}[q]
            ref = benchmark_value(preset, r, q)
            label = r.scheme if preset.kind == "convergence" else f"{r.param_name}={r.param:g}"
            ref_s = f"{ref:.3g}" if ref is not None else "-"
            print(f"#  {label:>12s} h={r.h:<8g} tau={r.tau:<10g} e_{q}={ours:.3g} benchmark={ref_s}"
                  f"{'  *' if r.onset else ''}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diracsplit", description="Time-splitting spectral solver for the Dirac equation")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("run", help="single evolution; emits mass and energy time series")
    _common(s)
    s.add_argument("--scheme", help="S1 | S2 | S4 | S4RK | S4c")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("converge", help="convergence study over a mesh or time-step ladder")
    _common(s)
    s.add_argument("--axis", choices=("space", "time"), required=True)
    s.add_argument("--scheme", type=_names, help="comma-separated schemes")
    s.add_argument("--ladder", type=_numbers, required=True, help="e.g. 1/2,1/4,1/8")
    s.add_argument("--relative", action="store_true", help="relative instead of absolute errors")
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("regime", help="parameter-regime sweep")
    _common(s)
    s.add_argument("--regime", choices=sorted(REGIMES), required=True)
    s.add_argument("--axis", choices=("space", "time"), default="time")
    s.add_argument("--values", type=_numbers, help="regime parameter values")
    s.add_argument("--ladder", type=_numbers)
    s.add_argument("--reduced", action="store_true", help="desk-scale parameter and ladder set")
    s.set_defaults(func=cmd_regime)

    s = sub.add_parser("longtime", help="error history up to a long final time")
    _common(s)
    s.add_argument("--scheme", type=_names, help="comma-separated schemes (default: all)")
    s.add_argument("--T-end", dest="T_end", type=_number, default=50.0)
    s.add_argument("--sample-dt", type=_number, default=0.5)
    s.set_defaults(func=cmd_longtime)

    s = sub.add_parser("commutator-check", help="closed-form vs brute-force double commutator")
    s.add_argument("--dim", type=int, choices=(1, 2, 3), required=True)
    s.add_argument("--rep", type=int, choices=(2, 4), default=2)
    s.add_argument("--variant", choices=("corrected", "uncorrected"), default="corrected")
    s.add_argument("--M", dest="M_check", type=int, default=128)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-v", "--verbose", action="count", default=0)
    s.set_defaults(func=cmd_commutator_check)

    s = sub.add_parser("table", help="reproduce a named benchmark table")
    _common(s)
    s.add_argument("name", choices=sorted(TABLES, key=lambda n: int(n[5:])))
    s.add_argument("--reduced", action="store_true", help="desk-scale variant")
    s.add_argument("--scheme", type=_names, help="restrict to these schemes")
    s.add_argument("--compare", action="store_true", help="print our errors next to the benchmark values on stderr")
    s.set_defaults(func=cmd_table)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError, RuntimeError) as exc:
        print(f"diracsplit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
