"""Run configuration and its INI file format.

Schema (all keys optional; defaults shown)::

    [grid]
    a = -32
    b = 32
    M = 1024          ; or h = 0.0625 (M = (b - a)/h must be an even integer)
    dim = 1

    [params]
    epsilon = 1
    delta = 1
    nu = 1

    [potential]
    preset = paper-1d ; paper-1d | honeycomb-2d | magnetic-test-2d | zero | constant(V0, A0)

    [initial]
    preset = gaussian ; gaussian | wkb | plane-wave(l, branch)

    [scheme]
    name = S4c        ; S1 | S2 | S4 | S4RK | S4c
    tau = 0.0078125
    T_final = 6
    stride =          ; empty: automatic

    [study]
    reference = generate   ; generate | load | analytic
    ref_scheme = S4c
    ref_M =                ; empty: same as [grid] M
    ref_tau = 1e-05
"""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
import json
from dataclasses import dataclass
from pathlib import Path

from ..grid import Grid, SpinorField
from ..model import (PhysParams, PotentialSamples, PotentialSpec, initial_preset,
                     potential_preset, sample_potentials)
from ..splitting import SchemeId

__all__ = ["RunConfig", "m_from_h"]

REFERENCE_POLICIES = ("generate", "load", "analytic")

# section -> field names, in file order
_SECTIONS = {
    "grid": ("a", "b", "M", "dim"),
    "params": ("epsilon", "delta", "nu"),
    "potential": ("potential",),
    "initial": ("initial",),
    "scheme": ("scheme", "tau", "T_final", "stride"),
    "study": ("reference", "ref_scheme", "ref_M", "ref_tau"),
}
_KEY_ALIASES = {"potential": "preset", "initial": "preset", "scheme": "name"}


def m_from_h(a: float, b: float, h: float) -> int:
    """Number of modes for mesh size ``h``; rejects non-integral or odd results."""
    ratio = (b - a) / h
    M = round(ratio)
    if abs(ratio - M) > 1e-9 * max(1.0, ratio) or M % 2 or M < 4:
        raise ValueError(f"mesh size h={h} gives (b-a)/h = {ratio}, not an even integer >= 4")
    return int(M)


@dataclass(frozen=True)
class RunConfig:
    a: float = -32.0
    b: float = 32.0
    M: int = 1024
    dim: int = 1
    epsilon: float = 1.0
    delta: float = 1.0
    nu: float = 1.0
    potential: str = "paper-1d"
    initial: str = "gaussian"
    scheme: str = "S4c"
    tau: float = 1 / 128
    T_final: float = 6.0
    stride: int | None = None
    reference: str = "generate"
    ref_scheme: str = "S4c"
    ref_M: int | None = None
    ref_tau: float = 1e-5

    def __post_init__(self):
        for name in ("a", "b", "epsilon", "delta", "nu", "tau", "T_final", "ref_tau"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "M", int(self.M))
        object.__setattr__(self, "dim", int(self.dim))
        if self.ref_M is not None:
            object.__setattr__(self, "ref_M", int(self.ref_M))
        if self.stride is not None:
            object.__setattr__(self, "stride", int(self.stride))
        object.__setattr__(self, "scheme", SchemeId.parse(self.scheme).value)
        object.__setattr__(self, "ref_scheme", SchemeId.parse(self.ref_scheme).value)
        if self.reference not in REFERENCE_POLICIES:
            raise ValueError(f"reference policy must be one of {REFERENCE_POLICIES}, got {self.reference!r}")
        if self.tau <= 0 or self.ref_tau <= 0 or self.T_final < 0:
            raise ValueError("tau, ref_tau must be positive and T_final non-negative")
        self.grid()
        self.phys()

    # -- derived objects ---------------------------------------------------
    @property
    def h(self) -> float:
        return (self.b - self.a) / self.M

    @property
    def reference_M(self) -> int:
        return self.ref_M if self.ref_M is not None else self.M

    def grid(self) -> Grid:
        return Grid(self.a, self.b, self.M, self.dim)

    def reference_grid(self) -> Grid:
        return Grid(self.a, self.b, self.reference_M, self.dim)

    def phys(self) -> PhysParams:
        return PhysParams(self.epsilon, self.delta, self.nu)

    def potential_spec(self) -> PotentialSpec:
        return potential_preset(self.potential, self.dim)

    def samples(self, grid: Grid | None = None) -> PotentialSamples:
        return sample_potentials(self.potential_spec(), grid or self.grid())

    def initial_field(self, grid: Grid | None = None) -> SpinorField:
        g = grid or self.grid()
        return initial_preset(self.initial, g, self.phys(), self.potential_spec())

    def replace(self, **changes) -> "RunConfig":
        if "h" in changes:
            h = changes.pop("h")
            changes["M"] = m_from_h(changes.get("a", self.a), changes.get("b", self.b), h)
        if "ref_h" in changes:
            h = changes.pop("ref_h")
            changes["ref_M"] = m_from_h(changes.get("a", self.a), changes.get("b", self.b), h)
        return dataclasses.replace(self, **changes)

    def reference_config(self) -> "RunConfig":
        """The run that produces this configuration's reference solution."""
        return self.replace(M=self.reference_M, scheme=self.ref_scheme, tau=self.ref_tau,
                            stride=None, ref_M=None)

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        return {sec: {k: getattr(self, k) for k in keys} for sec, keys in _SECTIONS.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        flat = {}
        for sec, keys in _SECTIONS.items():
            for k, v in (d.get(sec) or {}).items():
                if k not in keys:
                    raise ValueError(f"unknown key {k!r} in section [{sec}]")
                flat[k] = v
        unknown = set(d) - set(_SECTIONS)
        if unknown:
            raise ValueError(f"unknown sections {sorted(unknown)}")
        return cls(**flat)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def dumps(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        for sec, values in self.to_dict().items():
            cp[sec] = {}
            for k, v in values.items():
                key = _KEY_ALIASES.get(k, k) if k in ("potential", "initial", "scheme") else k
                cp[sec][key] = "" if v is None else repr(v) if isinstance(v, float) else str(v)
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def loads(cls, text: str, base: "RunConfig | None" = None) -> "RunConfig":
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
        cp.optionxform = str
        cp.read_string(text)
        fields = {f.name: f for f in dataclasses.fields(cls)}
        current = dataclasses.asdict(base or cls())
        h = None
        for sec in cp.sections():
            if sec not in _SECTIONS:
                raise ValueError(f"unknown section [{sec}]")
            for key, raw in cp[sec].items():
                name = key
                if sec in ("potential", "initial", "scheme") and key in ("preset", "name"):
                    name = sec
                if sec == "grid" and key == "h":
                    h = _fraction(raw)
                    continue
                if name not in _SECTIONS[sec]:
                    raise ValueError(f"unknown key {key!r} in section [{sec}]")
                current[name] = _coerce(raw, fields[name].type)
        cfg = cls(**current)
        return cfg.replace(h=h) if h is not None else cfg

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path, base: "RunConfig | None" = None) -> "RunConfig":
        return cls.loads(Path(path).read_text(), base)


def _coerce(raw: str, typ) -> object:
    raw = raw.strip()
    typ = str(typ)
    if "None" in typ and raw in ("", "None", "none"):
        return None
    if typ.startswith("int"):
        return int(raw)
    if typ.startswith("float"):
        return float(_fraction(raw))
    return raw


def _fraction(raw: str) -> float:
    if "/" in raw:
        num, den = raw.split("/", 1)
        return float(num) / float(den)
    return float(raw)
