"""Content-addressed storage of reference solutions.

Each entry is ``<key>.bin`` (raw little-endian complex128, C order) plus a
``<key>.json`` sidecar with shape, grid, parameters and the key itself.  The
key is the sha256 of the reference run's configuration and sample times.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

import numpy as np

from ..model import constant_values, parse_preset, plane_wave_solution
from ..splitting import evolve, step_count
from .config import RunConfig

__all__ = ["ReferenceStore", "default_cache_dir", "reference_key", "compute_reference"]

log = logging.getLogger("diracsplit")


def default_cache_dir() -> Path:
    env = os.environ.get("DIRACSPLIT_CACHE")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "diracsplit"


def reference_key(ref_cfg: RunConfig, times: tuple[float, ...] | None = None) -> str:
    payload = {"config": ref_cfg.config_hash(), "times": None if times is None else [float(t) for t in times]}
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


class ReferenceStore:
    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.hits = 0
        self.misses = 0

    def _paths(self, key: str) -> tuple[Path, Path]:
        return self.root / f"{key}.bin", self.root / f"{key}.json"

    def has(self, key: str) -> bool:
        b, j = self._paths(key)
        return b.exists() and j.exists()

    def save(self, key: str, array: np.ndarray, meta: dict) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        b, j = self._paths(key)
        data = np.ascontiguousarray(array, dtype="<c16")
        side = dict(meta, key=key, shape=list(data.shape), dtype="complex128-le")
        # write-then-rename keeps concurrent readers from seeing partial files
        for path, writer in ((b, lambda f: f.write(data.tobytes())),
                             (j, lambda f: f.write(json.dumps(side, indent=2, sort_keys=True).encode()))):
            fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-")
            with os.fdopen(fd, "wb") as f:
                writer(f)
            os.replace(tmp, path)

    def load(self, key: str) -> tuple[np.ndarray, dict] | None:
        if not self.has(key):
            return None
        b, j = self._paths(key)
        meta = json.loads(j.read_text())
        if meta.get("key") != key:
            raise ValueError(f"reference sidecar {j} does not carry key {key}")
        arr = np.fromfile(b, dtype="<c16").reshape(meta["shape"])
        return arr.astype(complex), meta

    def get(self, cfg: RunConfig, times: tuple[float, ...] | None = None) -> np.ndarray:
        """Reference for ``cfg``: the final field, or frames at ``times``.

        Honors the configuration's policy: ``generate`` computes and stores
        on a miss, ``load`` fails on a miss and ``analytic`` evaluates the
        plane-wave solution.
        """
        if cfg.reference == "analytic":
            return analytic_reference(cfg, times)
        ref_cfg = cfg.reference_config()
        if times is not None:
            _uniform_stride(times, ref_cfg.tau)
        key = reference_key(ref_cfg, times)
        hit = self.load(key)
        if hit is not None:
            self.hits += 1
            return hit[0]
        if cfg.reference == "load":
            raise FileNotFoundError(f"no stored reference {key} for {ref_cfg.to_dict()}")
        self.misses += 1
        try:
            arr = compute_reference(ref_cfg, times)
        except Exception as exc:
            raise RuntimeError(f"reference generation failed for {ref_cfg.to_dict()}: {exc}") from exc
        self.save(key, arr, {"config": ref_cfg.to_dict(), "config_hash": ref_cfg.config_hash(),
                             "times": None if times is None else list(times)})
        return arr


def compute_reference(ref_cfg: RunConfig, times: tuple[float, ...] | None = None) -> np.ndarray:
    grid = ref_cfg.grid()
    samples = ref_cfg.samples(grid)
    phi0 = ref_cfg.initial_field(grid)
    if times is None:
        res = evolve(ref_cfg.scheme, grid, ref_cfg.phys(), samples, phi0, ref_cfg.tau, ref_cfg.T_final)
        return res.field.values
    stride = _uniform_stride(times, ref_cfg.tau)
    T_end = times[-1]
    res = evolve(ref_cfg.scheme, grid, ref_cfg.phys(), samples, phi0, ref_cfg.tau, T_end,
                 stride=stride, keep_frames=True)
    return np.stack(res.frames)


def _uniform_stride(times, tau: float) -> int:
    times = np.asarray(times, dtype=float)
    if times[0] != 0 or len(times) < 2:
        raise ValueError("trajectory times must start at 0 and have at least two entries")
    dt = np.diff(times)
    if np.ptp(dt) > 1e-12 * dt[0]:
        raise ValueError("trajectory times must be uniformly spaced")
    return step_count(dt[0], tau, strict=True)


def analytic_reference(cfg: RunConfig, times=None) -> np.ndarray:
    """Plane-wave reference on the run's own grid."""
    key, args = parse_preset(cfg.initial)
    if key != "plane-wave":
        raise ValueError("the analytic reference policy needs plane-wave initial data")
    grid = cfg.grid()
    l = int(args[0]) if args else 1
    branch = str(args[1]) if len(args) > 1 else "+"
    V0, A0 = constant_values(cfg.potential_spec(), grid)
    k = (2 * np.pi * l / grid.length,) * grid.dim

    def at(t):
        return plane_wave_solution(k, V0, A0, cfg.phys(), branch, t, grid).values

    if times is None:
        return at(cfg.T_final)
    return np.stack([at(t) for t in times])

