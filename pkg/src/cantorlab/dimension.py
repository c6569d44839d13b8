"""Fractal invariants of regular Cantor sets computed from finite covers.

Three estimators are provided:

* box-counting dimension: least-squares slope of log(count) against
  -log(radius) across a schedule of cover depths, where the radius at
  each depth is the longest interval of that cover;
* Moran/Hausdorff dimension: the unique root of the strictly decreasing
  map d -> sum (|I|/|hull|)^d - 1 over a single cover, bracketed by
  bisection;
* thickness: Newhouse's ordered-gap quantity min over gaps of
  min(|L|,|R|)/|gap|, with bridges measured to the nearest larger
  (previously processed) gap or to the hull endpoints.

Lengths in the Moran equation are normalized by the hull length so the
result is exactly invariant under affine rescaling of the set; for sets
whose hull is the unit interval this coincides with the raw equation
sum |I|^d = 1.
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass

import numpy as np

from .cantor_core import Cover, Interval, RegularCantorSet, refine
from .errors import DegenerateCover, NoGaps, ValidationError


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    method: str
    residual: float
    depth_used: int
    depths: tuple[int, ...] = ()
    counts: tuple[int, ...] = ()
    radii: tuple[float, ...] = ()

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "residual": self.residual,
            "depth_used": self.depth_used,
        }


@dataclass(frozen=True)
class ThicknessEstimate:
    value: float
    depth: int
    limiting_gap: Interval
    limiting_gap_address: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "depth": self.depth,
            "limiting_gap": list(self.limiting_gap.as_floats()),
            "limiting_gap_address": list(self.limiting_gap_address),
        }


# ---------------------------------------------------------------------------
# box-counting


def box_regression(radii: list[float], counts: list[int]) -> tuple[float, float]:
    """Least-squares slope of log(count) against -log(radius), with RMS residual."""
    if len(radii) != len(counts) or len(radii) < 2:
        raise ValidationError("box regression needs at least two (radius, count) points")
    x = -np.log(np.asarray(radii, dtype=float))
    y = np.log(np.asarray(counts, dtype=float))
    if float(np.ptp(x)) == 0.0:
        raise ValidationError("box regression needs at least two distinct radii")
    (slope, intercept), res, *_ = np.polyfit(x, y, 1, full=True)
    rms = math.sqrt(float(res[0]) / len(x)) if len(res) else 0.0
    return float(slope), rms


def box_dimension(
    K: RegularCantorSet, depths, *, budget: int | None = None
) -> DimensionEstimate:
    """Box-counting estimate from covers at each depth in `depths`.

    At depth n the radius is the longest interval of the depth-n cover
    and the count is the number of cover intervals; the estimate is the
    regression slope across the schedule.
    """
    depths = sorted(set(int(n) for n in depths))
    if not depths:
        raise ValidationError("depth schedule is empty")
    radii: list[float] = []
    counts: list[int] = []
    for n in depths:
        cover = refine(K, n, budget=budget)
        radii.append(float(cover.max_length))
        counts.append(len(cover))
    slope, rms = box_regression(radii, counts)
    return DimensionEstimate(
        value=slope,
        method="box",
        residual=rms,
        depth_used=depths[-1],
        depths=tuple(depths),
        counts=tuple(counts),
        radii=tuple(radii),
    )


def interval_box_dimension(iv: Interval, depths) -> DimensionEstimate:
    """Box dimension of a plain closed interval via dyadic subdivision.

    A full interval has no gaps so it never forms a valid Cantor-set
    input; it is still a useful calibration case, covered here by 2^n
    equal cells at depth n.  The regression slope is exactly 1.
    """
    if not iv.length > 0:
        raise ValidationError("interval must have positive length")
    depths = sorted(set(int(n) for n in depths))
    length = float(iv.length)
    radii = [length * 2.0 ** (-n) for n in depths]
    counts = [2**n for n in depths]
    slope, rms = box_regression(radii, counts)
    return DimensionEstimate(
        value=slope,
        method="box",
        residual=rms,
        depth_used=depths[-1],
        depths=tuple(depths),
        counts=tuple(counts),
        radii=tuple(radii),
    )


def dimension_csv(est: DimensionEstimate, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["depth", "N", "r"])
        for n, count, radius in zip(est.depths, est.counts, est.radii):
            writer.writerow([n, count, repr(radius)])


# ---------------------------------------------------------------------------
# Moran / Hausdorff


def moran_root(ratios: list[float], tol: float = 1e-9) -> float:
    """Root of d -> sum ratios^d - 1 on [0, 1 + 1e-9] by bisection.

    Each ratio must lie strictly inside (0, 1) and the ratios must sum
    to more than 1 at d = 0 (i.e. at least two of them), which makes the
    map strictly decreasing with a sign change across the bracket.
    """
    if tol <= 0:
        raise ValidationError("tolerance must be positive")
    for rho in ratios:
        if not rho > 0.0:
            raise DegenerateCover("cover contains an interval of zero length")
        if rho >= 1.0:
            raise ValidationError(f"length ratio {rho} is not < 1")
    log_r = np.log(np.asarray(ratios, dtype=float))

    def f(d: float) -> float:
        return float(np.exp(d * log_r).sum()) - 1.0

    lo, hi = 0.0, 1.0 + 1e-9
    flo = f(lo)
    if flo <= 0.0:
        return 0.0
    if f(hi) > 0.0:
        raise ValidationError("length ratios keep the Moran sum above 1 at d = 1")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def hausdorff_dimension_moran(
    K: RegularCantorSet, n: int, tol: float = 1e-9, *, budget: int | None = None
) -> DimensionEstimate:
    """Moran-equation dimension from the depth-n cover.

    Solves sum over cover intervals of (|I|/|hull|)^d = 1.  For affine
    sets whose branch ratios are all equal the root does not depend on
    the depth; for Moebius sets the bounded distortion makes successive
    roots drift slightly, so the depth is part of the reported record.
    """
    cover = refine(K, n, budget=budget)
    hull_len = float(K.hull.length)
    ratios = [float(iv.length) / hull_len for iv in cover.intervals]
    value = moran_root(ratios, tol)
    residual = abs(float(np.exp(value * np.log(ratios)).sum()) - 1.0)
    return DimensionEstimate(
        value=value,
        method="moran",
        residual=residual,
        depth_used=n,
        depths=(n,),
        counts=(len(cover),),
        radii=(float(cover.max_length),),
    )


def moran_drift(
    K: RegularCantorSet, depths, tol: float = 1e-9, *, budget: int | None = None
) -> list[tuple[int, float]]:
    """Sequence of per-depth Moran roots; flat for equal-ratio affine sets."""
    return [
        (n, hausdorff_dimension_moran(K, n, tol, budget=budget).value)
        for n in sorted(set(int(d) for d in depths))
    ]


# ---------------------------------------------------------------------------
# thickness


def thickness(
    K: RegularCantorSet, n: int, *, budget: int | None = None
) -> ThicknessEstimate:
    """Newhouse thickness of the depth-n cover.

    Gaps are processed in decreasing length (ties left to right); the
    bridges L and R of a gap run from its endpoints to the nearest
    endpoint of an already-processed (larger) gap or of the hull.  The
    reported address is that of the cover interval immediately to the
    left of the minimizing gap.
    """
    if n < 1:
        raise ValidationError("thickness needs depth >= 1")
    cover = refine(K, n, budget=budget)
    los, his = cover.los, cover.his
    gaps = []
    for i in range(len(cover) - 1):
        length = los[i + 1] - his[i]
        if length > 0.0:
            gaps.append((length, his[i], los[i + 1], cover.addresses[i]))
    if not gaps:
        raise NoGaps(f"depth-{n} cover exposes no gaps")
    gaps.sort(key=lambda g: (-g[0], g[1]))
    hull = K.hull
    barriers = [float(hull.lo), float(hull.hi)]
    best = math.inf
    best_gap = gaps[0]
    for length, g_lo, g_hi, addr in gaps:
        i = bisect.bisect_right(barriers, g_lo)
        left_bridge = g_lo - barriers[i - 1]
        right_bridge = barriers[i] - g_hi
        ratio = min(left_bridge, right_bridge) / length
        if ratio < best:
            best = ratio
            best_gap = (length, g_lo, g_hi, addr)
        bisect.insort(barriers, g_lo)
        bisect.insort(barriers, g_hi)
    return ThicknessEstimate(
        value=best,
        depth=n,
        limiting_gap=Interval(best_gap[1], best_gap[2]),
        limiting_gap_address=best_gap[3],
    )


# ---------------------------------------------------------------------------
# dimension arithmetic for hyperbolic products


def nonuniform_condition(ds: float, du: float) -> bool:
    """Strict smallness test for a pair of transverse dimensions.

    Returns True iff (ds + du)^2 + max(ds, du)^2 < ds + du + max(ds, du).
    """
    if not (0.0 < ds < 1.0 and 0.0 < du < 1.0):
        raise ValidationError("both dimensions must lie strictly between 0 and 1")
    s, m = ds + du, max(ds, du)
    return s * s + m * m < s + m
