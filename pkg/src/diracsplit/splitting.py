"""Time-splitting schemes and the evolution driver.

A scheme is a :class:`CompositionPlan`: factors ``exp(c * tau * X)`` with
``X`` one of the flows W, T or W_hat, listed in written (left-to-right)
order and applied right to left.
"""
from __future__ import annotations

import enum
import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .grid import Grid, SpinorField
from .model import PhysParams, PotentialSamples
from .propagators import (apply_pointwise_array, apply_symbol_array,
                          build_t_propagator, build_w_propagator,
                          build_what_propagator)

__all__ = [
    "SchemeId",
    "Flow",
    "CompositionPlan",
    "PropagatorSet",
    "EvolutionState",
    "build_plan",
    "step",
    "inverse_step",
    "evolve",
    "default_stride",
    "EvolutionResult",
]

log = logging.getLogger("diracsplit")


class SchemeId(str, enum.Enum):
    S1 = "S1"
    S2 = "S2"
    S4 = "S4"
    S4RK = "S4RK"
    S4c = "S4c"

    @classmethod
    def parse(cls, value) -> "SchemeId":
        if isinstance(value, cls):
            return value
        for s in cls:
            if s.value.lower() == str(value).lower():
                return s
        raise ValueError(f"unknown scheme {value!r}; choose from {[s.value for s in cls]}")

    @property
    def order(self) -> int:
        return {"S1": 1, "S2": 2}.get(self.value, 4)


class Flow(str, enum.Enum):
    W = "W"
    T = "T"
    WHAT = "W_hat"


# Yoshida triple-jump weights
_CBRT2 = 2.0 ** (1.0 / 3.0)
W1 = 1.0 / (2.0 - _CBRT2)
W2 = -_CBRT2 / (2.0 - _CBRT2)

# 13-factor optimized composition
A1 = 0.0792036964311957
A2 = 0.353172906049774
A3 = -0.0420650803577195
A4 = 1 - 2 * (A1 + A2 + A3)
B1 = 0.209515106613362
B2 = -0.143851773179818
B3 = 0.5 - (B1 + B2)

_COEFFS: dict[SchemeId, list[tuple[Flow, float]]] = {
    SchemeId.S1: [(Flow.T, 1.0), (Flow.W, 1.0)],
    SchemeId.S2: [(Flow.W, 0.5), (Flow.T, 1.0), (Flow.W, 0.5)],
    SchemeId.S4: [(Flow.W, W1 / 2), (Flow.T, W1), (Flow.W, (W1 + W2) / 2), (Flow.T, W2),
                  (Flow.W, (W1 + W2) / 2), (Flow.T, W1), (Flow.W, W1 / 2)],
    SchemeId.S4RK: [(Flow.W, A1), (Flow.T, B1), (Flow.W, A2), (Flow.T, B2), (Flow.W, A3),
                    (Flow.T, B3), (Flow.W, A4), (Flow.T, B3), (Flow.W, A3), (Flow.T, B2),
                    (Flow.W, A2), (Flow.T, B1), (Flow.W, A1)],
    SchemeId.S4c: [(Flow.W, 1 / 6), (Flow.T, 0.5), (Flow.WHAT, 2 / 3), (Flow.T, 0.5), (Flow.W, 1 / 6)],
}

# exact sums in rational arithmetic are 1; floating point rounding is allowed a few ulps
_SUM_TOL = 8 * np.finfo(float).eps


@dataclass(frozen=True)
class CompositionPlan:
    scheme: SchemeId
    tau: float
    dim: int
    factors: tuple[tuple[Flow, float], ...]

    def coefficient_sums(self) -> dict[str, float]:
        w = math.fsum(c for f, c in self.factors if f in (Flow.W, Flow.WHAT))
        t = math.fsum(c for f, c in self.factors if f is Flow.T)
        return {"W": w, "T": t}

    def flow_counts(self) -> dict[str, int]:
        """Number of T and W applications per step (W_hat counts as W)."""
        return {
            "T": sum(f is Flow.T for f, _ in self.factors),
            "W": sum(f is not Flow.T for f, _ in self.factors),
        }


def build_plan(scheme, tau: float, dim: int = 1, magnetic: bool = True) -> CompositionPlan:
    """Composition for one step of size ``tau``.

    ``magnetic=False`` replaces W_hat by W in the compact scheme (the
    commutator vanishes).  Two-dimensional stepping requires ``magnetic=False``.
    """
    scheme = SchemeId.parse(scheme)
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    if dim == 2 and magnetic:
        raise ValueError(
            "2D time stepping with a magnetic potential is not supported: the exact "
            "potential flow would need nonuniform transforms (a method-of-characteristics "
            "step), so every scheme requires A = 0 in 2D"
        )
    factors = [(Flow.W if (f is Flow.WHAT and not magnetic) else f, c) for f, c in _COEFFS[scheme]]
    plan = CompositionPlan(scheme, float(tau), dim, tuple(factors))
    sums = plan.coefficient_sums()
    for k, v in sums.items():
        if abs(v - 1.0) > _SUM_TOL:
            raise AssertionError(f"{scheme.value}: {k}-coefficients sum to {v!r}, not 1")
    return plan


class PropagatorSet:
    """Cache of the flows needed by one or more plans on a fixed grid and potential."""

    def __init__(self, grid: Grid, params: PhysParams, samples: PotentialSamples):
        if samples.grid != grid:
            raise ValueError("potential samples live on a different grid")
        self.grid = grid
        self.params = params
        self.samples = samples
        self._cache: dict[tuple[Flow, float], object] = {}
        self.build_seconds = 0.0

    def get(self, flow: Flow, c: float, tau: float):
        key = (flow, float(c * tau)) if flow is not Flow.WHAT else (flow, float(tau))
        p = self._cache.get(key)
        if p is not None:
            return p
        t0 = time.perf_counter()
        if flow is Flow.W:
            p = build_w_propagator(self.samples, c * tau, self.params)
        elif flow is Flow.T:
            p = build_t_propagator(self.grid, self.params, c * tau)
        else:
            mirror = self._cache.get((flow, -float(tau)))
            # W_hat is even in tau, so the flow at -tau is the inverse of the one at tau
            p = mirror.inverse() if mirror is not None else build_what_propagator(self.samples, self.params, tau)
        self._cache[key] = p
        self.build_seconds += time.perf_counter() - t0
        return p

    def prepare(self, plan: CompositionPlan) -> list:
        """Factors of ``plan`` in application order (rightmost first)."""
        return [(f, self.get(f, c, plan.tau)) for f, c in reversed(plan.factors)]


@dataclass
class EvolutionState:
    field: SpinorField
    n: int
    tau: float
    propagators: PropagatorSet

    @property
    def t(self) -> float:
        return self.n * self.tau


def _advance(values: np.ndarray, ops: list) -> np.ndarray:
    for flow, p in ops:
        values = apply_symbol_array(p, values) if flow is Flow.T else apply_pointwise_array(p, values)
    return values


def step(plan: CompositionPlan, state: EvolutionState) -> EvolutionState:
    """Advance ``state`` by one composition step."""
    ops = state.propagators.prepare(plan)
    vals = _advance(state.field.values, ops)
    return EvolutionState(state.field.with_values(vals), state.n + 1, plan.tau, state.propagators)


def inverse_step(plan: CompositionPlan, state: EvolutionState) -> EvolutionState:
    """Undo one step by applying the conjugate-transposed factors in reverse."""
    ops = state.propagators.prepare(plan)
    inv = [(f, p.inverse()) for f, p in reversed(ops)]
    vals = _advance(state.field.values, inv)
    return EvolutionState(state.field.with_values(vals), state.n - 1, plan.tau, state.propagators)


def default_stride(n_steps: int) -> int:
    return 1 if n_steps <= 100 else math.ceil(n_steps / 1000)


def step_count(T_final: float, tau: float, strict: bool = False) -> int:
    """Number of steps reaching ``T_final``; non-integral ratios are truncated with a warning."""
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    ratio = T_final / tau
    n = round(ratio)
    if abs(ratio - n) <= 1e-9 * max(1.0, ratio):
        return int(n)
    if strict:
        raise ValueError(f"T_final/tau = {ratio} is not an integer")
    n = math.floor(ratio)
    warnings.warn(f"T_final/tau = {ratio:.6g} is not an integer; stopping at t = {n * tau:.6g}", RuntimeWarning)
    return n


Observer = Callable[[SpinorField, float], float]


@dataclass
class EvolutionResult:
    state: EvolutionState
    times: list[float] = field(default_factory=list)
    records: dict[str, list[float]] = field(default_factory=dict)
    frames: list[np.ndarray] = field(default_factory=list)
    build_seconds: float = 0.0
    loop_seconds: float = 0.0

    @property
    def field(self) -> SpinorField:
        return self.state.field


def evolve(scheme, grid: Grid, params: PhysParams, potentials: PotentialSamples, phi0: SpinorField,
           tau: float, T_final: float, observers: Mapping[str, Observer] | None = None,
           stride: int | None = None, keep_frames: bool = False,
           propagators: PropagatorSet | None = None) -> EvolutionResult:
    """Integrate from ``t = 0`` to ``T_final`` with ``n = T_final/tau`` steps.

    Observers (and, with ``keep_frames``, copies of the field) are sampled at
    ``t = 0``, every ``stride`` steps and at the final step.
    """
    if phi0.grid != grid:
        raise ValueError("initial data lives on a different grid")
    plan = build_plan(scheme, tau, grid.dim, potentials.magnetic)
    n_steps = step_count(T_final, tau)
    stride = default_stride(n_steps) if stride is None else int(stride)
    if stride < 1:
        raise ValueError("stride must be >= 1")
    props = propagators or PropagatorSet(grid, params, potentials)
    built_before = props.build_seconds
    ops = props.prepare(plan)
    observers = dict(observers or {})
    result = EvolutionResult(EvolutionState(phi0, 0, tau, props), records={k: [] for k in observers})

    def sample(vals, n):
        f = SpinorField(grid, vals)  # validates finiteness
        result.times.append(n * tau)
        for name, obs in observers.items():
            result.records[name].append(float(obs(f, n * tau)))
        if keep_frames:
            result.frames.append(vals.copy())

    vals = phi0.values
    sample(vals, 0)
    t0 = time.perf_counter()
    check_every = max(1, min(stride, 1000))
    for n in range(1, n_steps + 1):
        vals = _advance(vals, ops)
        if n % check_every == 0 or n == n_steps:
            if not np.all(np.isfinite(vals)):
                raise FloatingPointError(f"non-finite field values detected at step {n} (t = {n * tau:.6g})")
        if n % stride == 0 or n == n_steps:
            sample(vals, n)
    result.loop_seconds = time.perf_counter() - t0
    result.build_seconds = props.build_seconds - built_before
    result.state = EvolutionState(SpinorField(grid, vals), n_steps, tau, props)
    log.info("%s: %d steps of tau=%g on M=%d: build %.3fs, loop %.3fs",
             plan.scheme.value, n_steps, tau, grid.M, result.build_seconds, result.loop_seconds)
    return result
