"""Timing sweeps over T, D or n, with CSV output and linear trend fits."""
from __future__ import annotations

import csv
import dataclasses
import gc
import math
import statistics
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .checks import derive_seed
from .multivariate import interpolate
from .oracle import InstanceSpec, random_instance
from .ring import ZZ, Ring
from .slp import ProbeMeter

# Regressor for each swept parameter: wall time should be linear in it.
TREND_FEATURES = {
    "T": ("T^2", lambda v: v * v),
    "D": ("log2 D", lambda v: math.log2(v)),
    "n": ("n^2", lambda v: v * v),
}
R2_ADVISORY = 0.9


@dataclass(frozen=True)
class BenchRecord:
    algo: str
    n: int
    D: int
    T: int
    seed: int
    rep: int
    wall_time: float
    probes: int
    max_probe_degree: int
    ring_ops: int

    def key(self) -> str:
        return f"{self.algo} n={self.n} D={self.D} T={self.T} rep={self.rep}"


FIELDS = [f.name for f in dataclasses.fields(BenchRecord)]


def bench_point(algo: str, n: int, D: int, T: int, seed: int, rep: int = 0, ring: Ring = ZZ) -> BenchRecord:
    """Generate one instance and time one interpolation of it.

    The instance is generated with term count exactly T (when that many
    monomials exist) and interpolated with bounds T and D.
    """
    inst_seed = derive_seed("bench", seed, n, D, T, rep)
    f, prog = random_instance(InstanceSpec(n, D, T, ring, seed=inst_seed))
    meter = ProbeMeter()
    gc.collect()
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        t0 = time.perf_counter()
        g = interpolate(algo, prog, D, T, ring, meter)
        wall = time.perf_counter() - t0
    finally:
        if was_enabled:
            gc.enable()
    if g != f:
        raise AssertionError(f"{algo} failed to recover the n={n} D={D} T={T} instance")
    return BenchRecord(algo, n, D, T, inst_seed, rep, wall, meter.probes, meter.max_probe_degree, meter.ring_ops)


def sweep(algo: str, vary: str, values: Sequence[int], n: int, D: int, T: int, reps: int = 1,
          seed: int = 0, ring: Ring = ZZ) -> list[BenchRecord]:
    """One record per (value, repetition), in that order.

    The first point is run once untimed beforehand so that prime tables and
    imports do not land on the first measurement.
    """
    if vary not in TREND_FEATURES:
        raise ValueError(f"can only vary one of {sorted(TREND_FEATURES)}")
    if values:
        first = {"n": n, "D": D, "T": T, vary: values[0]}
        bench_point(algo, first["n"], first["D"], first["T"], seed, 0, ring)
    out = []
    for v in values:
        params = {"n": n, "D": D, "T": T, vary: v}
        for rep in range(reps):
            out.append(bench_point(algo, params["n"], params["D"], params["T"], seed, rep, ring))
    return out


def write_csv(records: Iterable[BenchRecord], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\r\n")
    w.writerow(FIELDS)
    for r in records:
        w.writerow([f"{r.wall_time:.6f}" if k == "wall_time" else getattr(r, k) for k in FIELDS])


def read_csv(fh: TextIO) -> list[BenchRecord]:
    types = {f.name: f.type for f in dataclasses.fields(BenchRecord)}
    rows = []
    for row in csv.DictReader(fh):
        rows.append(BenchRecord(**{k: (float(v) if types[k] == "float" else int(v) if types[k] == "int" else v)
                                   for k, v in row.items()}))
    return rows


@dataclass(frozen=True)
class TrendFit:
    metric: str
    feature: str
    slope: float
    intercept: float
    r2: float

    @property
    def meets_advisory(self) -> bool:
        return self.r2 >= R2_ADVISORY

    def describe(self) -> str:
        flag = "ok" if self.meets_advisory else "below advisory"
        return (f"{self.metric} ~ {self.slope:.4g} * {self.feature} + {self.intercept:.4g}  "
                f"R^2={self.r2:.3f} ({flag}, threshold {R2_ADVISORY})")


def fit_trend(records: Sequence[BenchRecord], vary: str, metric: str = "wall_time") -> TrendFit:
    """Least-squares line of a metric's per-point median against the swept parameter's feature."""
    name, feat = TREND_FEATURES[vary]
    by_point: dict[int, list[float]] = {}
    for r in records:
        by_point.setdefault(getattr(r, vary), []).append(getattr(r, metric))
    if len(by_point) < 2:
        raise ValueError("a trend needs at least two distinct sweep points")
    xs = np.array([feat(v) for v in by_point], dtype=float)
    ys = np.array([statistics.median(t) for t in by_point.values()], dtype=float)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return TrendFit(metric, name, float(slope), float(intercept), r2)


def probe_log(records: Iterable[BenchRecord]) -> dict[str, dict[str, int]]:
    """Machine-independent part of a sweep, keyed by point."""
    return {r.key(): {"probes": r.probes, "max_probe_degree": r.max_probe_degree, "ring_ops": r.ring_ops}
            for r in records}
