"""Dynamical-systems experiments backed by the Cantor-set machinery.

Three small laboratories:

* the idealized affine two-strip horseshoe, whose invariant set is the
  product of a stable and an unstable regular Cantor set, with its
  Hausdorff dimension computed as the sum of the factor Moran roots;
* the hyperbolic torus automorphism (x, y) -> (2x + y, x + y) mod 1,
  with exact surd eigenvalues and exact periodic-point counts verified
  two independent ways (trace formula vs rational lattice enumeration);
* the area-preserving standard family
  (x, y) -> (-y + 2x + lam*sin(2*pi*x), x) mod 1, probed for positive
  Lyapunov exponents with QR-normalized derivative cocycles.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cantor_core import RegularCantorSet, build_affine, resolve_budget
from .dimension import moran_root
from .errors import BudgetExceeded, ValidationError
from .surd import QuadraticSurd

CAT_MATRIX = ((2, 1), (1, 1))
LYAPUNOV_BURN_IN = 100
POSITIVE_EXPONENT_THRESHOLD = 0.05


# ---------------------------------------------------------------------------
# affine horseshoe


@dataclass(frozen=True)
class AffineHorseshoe:
    """Two horizontal strips squeezed by `contraction` and stretched by
    `expansion` onto two vertical strips; disjointness needs
    contraction < 1/2 and 1/expansion < 1/2."""

    contraction: float | Fraction
    expansion: float | Fraction

    def __post_init__(self) -> None:
        if not (0 < self.contraction < Fraction(1, 2)):
            raise ValidationError("contraction must lie in (0, 1/2)")
        if not (self.expansion > 2):
            raise ValidationError("expansion must exceed 2")


def _two_piece_set(ratio) -> RegularCantorSet:
    if isinstance(ratio, (int, Fraction)):
        r = Fraction(ratio)
        pieces = [(Fraction(0), r), (1 - r, Fraction(1))]
    else:
        r = float(ratio)
        pieces = [(0.0, r), (1.0 - r, 1.0)]
    return build_affine(pieces, [(0, 1), (0, 1)])


def horseshoe_cantor_sets(h: AffineHorseshoe) -> tuple[RegularCantorSet, RegularCantorSet]:
    """Stable and unstable factor sets: two pieces of ratio `contraction`
    and two pieces of ratio 1/expansion, both spanning [0, 1]."""
    ks = _two_piece_set(h.contraction)
    inv = (
        1 / Fraction(h.expansion)
        if isinstance(h.expansion, (int, Fraction))
        else 1.0 / float(h.expansion)
    )
    ku = _two_piece_set(inv)
    return ks, ku


@dataclass(frozen=True)
class HorseshoeReport:
    stable_dimension: float
    unstable_dimension: float
    total_dimension: float
    at_unit_dimension: bool

    def to_json(self) -> dict:
        return {
            "stable_dimension": self.stable_dimension,
            "unstable_dimension": self.unstable_dimension,
            "total_dimension": self.total_dimension,
            "at_unit_dimension": self.at_unit_dimension,
        }


def horseshoe_dimension(h: AffineHorseshoe, tol: float = 1e-12) -> HorseshoeReport:
    """Dimension of the invariant set as the sum of the factor Moran roots.

    The boundary case total = 1 separates the thin regime (typically
    trivial intersections) from the fat one, and is flagged.
    """
    ds = moran_root([float(h.contraction)] * 2, tol)
    du = moran_root([1.0 / float(h.expansion)] * 2, tol)
    total = ds + du
    return HorseshoeReport(
        stable_dimension=ds,
        unstable_dimension=du,
        total_dimension=total,
        at_unit_dimension=abs(total - 1.0) <= 1e-9,
    )


def solve_unit_dimension(expansion: float, tol: float = 1e-12) -> HorseshoeReport:
    """Contraction ratio making the horseshoe dimension exactly 1, by
    bisection in the contraction parameter; the returned report carries
    the boundary flag."""
    if not expansion > 2:
        raise ValidationError("expansion must exceed 2")
    du = moran_root([1.0 / float(expansion)] * 2, tol)

    def total(c: float) -> float:
        return moran_root([c, c], tol) + du

    lo, hi = 1e-9, 0.5 - 1e-12
    if total(hi) < 1.0:
        raise ValidationError("no contraction below 1/2 reaches dimension 1")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if total(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    c = 0.5 * (lo + hi)
    return horseshoe_dimension(AffineHorseshoe(contraction=c, expansion=expansion), tol)


# ---------------------------------------------------------------------------
# torus automorphism


def _mat_mul(a, b) -> tuple[tuple[int, int], tuple[int, int]]:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def _mat_pow(a, n: int):
    result = ((1, 0), (0, 1))
    base = a
    while n:
        if n & 1:
            result = _mat_mul(result, base)
        base = _mat_mul(base, base)
        n >>= 1
    return result


def _smith_diagonalize(m):
    """Unimodular U, V and diagonal (s1, s2) with U @ M @ V diagonal."""
    a = [list(row) for row in m]
    u = [[1, 0], [0, 1]]
    v = [[1, 0], [0, 1]]

    def row_op(i, j, k):  # row_i += k * row_j
        for c in range(2):
            a[i][c] += k * a[j][c]
            u[i][c] += k * u[j][c]

    def col_op(i, j, k):  # col_i += k * col_j
        for r in range(2):
            a[r][i] += k * a[r][j]
            v[r][i] += k * v[r][j]

    def swap_rows():
        a[0], a[1] = a[1], a[0]
        u[0], u[1] = u[1], u[0]

    def swap_cols():
        for r in range(2):
            a[r][0], a[r][1] = a[r][1], a[r][0]
            v[r][0], v[r][1] = v[r][1], v[r][0]

    # clear the off-diagonal entries by Euclid steps; swapping the larger
    # entry into the pivot first keeps every step strictly reducing, so
    # the bound is generous.  In a 2x2 matrix the row phase only touches
    # row 1 and the column phase only touches column 1, so neither
    # reintroduces what the other cleared.
    for _ in range(4096):
        if a[0][0] == 0:
            if a[1][0] != 0:
                swap_rows()
            elif a[0][1] != 0:
                swap_cols()
            else:
                break
        if a[1][0] != 0:
            if abs(a[1][0]) < abs(a[0][0]):
                swap_rows()
            row_op(1, 0, -(a[1][0] // a[0][0]))
            continue
        if a[0][1] != 0:
            if abs(a[0][1]) < abs(a[0][0]):
                swap_cols()
            col_op(1, 0, -(a[0][1] // a[0][0]))
            continue
        break
    if a[1][0] != 0 or a[0][1] != 0:
        raise ValidationError("matrix reduction did not terminate")
    return u, v, (a[0][0], a[1][1])


def enumerate_torus_periodic_points(n: int) -> list[tuple[Fraction, Fraction]]:
    """All fixed points of the n-th iterate on the torus, as exact
    rationals in [0,1)^2, via the lattice (A^n - I) x in Z^2."""
    an = _mat_pow(CAT_MATRIX, n)
    m = ((an[0][0] - 1, an[0][1]), (an[1][0], an[1][1] - 1))
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if det == 0:
        raise ValidationError("iterate has non-isolated fixed points")
    _u, v, (s1, s2) = _smith_diagonalize(m)
    s1, s2 = abs(s1), abs(s2)
    # y-solutions of S y in Z^2 are the rational lattice i/s1, j/s2;
    # x = V y mod 1 enumerates each fixed point exactly once
    points = []
    seen = set()
    for i in range(s1):
        for j in range(s2):
            y1, y2 = Fraction(i, s1), Fraction(j, s2)
            x1 = (v[0][0] * y1 + v[0][1] * y2) % 1
            x2 = (v[1][0] * y1 + v[1][1] * y2) % 1
            if (x1, x2) in seen:
                raise ValidationError("lattice enumeration produced a duplicate point")
            seen.add((x1, x2))
            points.append((x1, x2))
    return points


@dataclass(frozen=True)
class CatMapReport:
    eigenvalue_unstable: QuadraticSurd
    eigenvalue_stable: QuadraticSurd
    product_is_one: bool
    hyperbolic: bool
    counts: tuple[tuple[int, int, int], ...]  # (n, trace formula, enumerated)
    all_counts_match: bool

    def to_json(self) -> dict:
        return {
            "eigenvalue_unstable": float(self.eigenvalue_unstable),
            "eigenvalue_stable": float(self.eigenvalue_stable),
            "product_is_one": self.product_is_one,
            "hyperbolic": self.hyperbolic,
            "counts": [list(c) for c in self.counts],
            "all_counts_match": self.all_counts_match,
        }


def cat_map_check(n_periods: int, *, budget: int | None = None) -> CatMapReport:
    """Exact hyperbolicity data for the torus automorphism.

    Eigenvalues are exact surds (3 +- sqrt(5))/2; for each n up to
    n_periods the periodic-point count is computed from the trace of
    the n-th matrix power and independently by enumerating the rational
    lattice of fixed points, each point re-verified in exact arithmetic.
    """
    if n_periods < 1:
        raise ValidationError("need n_periods >= 1")
    limit = resolve_budget(budget)
    lam_u = QuadraticSurd.quadratic_root(1, -3, 1, branch=+1)
    lam_s = QuadraticSurd.quadratic_root(1, -3, 1, branch=-1)
    one = QuadraticSurd.from_rational(1)
    product_ok = (lam_u * lam_s).equals(one)
    hyperbolic = float(lam_u) > 1.0 > float(lam_s) > 0.0
    counts = []
    all_match = True
    for n in range(1, n_periods + 1):
        an = _mat_pow(CAT_MATRIX, n)
        formula = an[0][0] + an[1][1] - 2
        if formula > limit:
            raise BudgetExceeded(
                f"{formula} periodic points at n={n} exceed budget {limit}"
            )
        points = enumerate_torus_periodic_points(n)
        for x1, x2 in points:
            y1 = (an[0][0] * x1 + an[0][1] * x2) % 1
            y2 = (an[1][0] * x1 + an[1][1] * x2) % 1
            if (y1, y2) != (x1, x2):
                raise ValidationError(f"enumerated point {(x1, x2)} is not fixed")
        counts.append((n, formula, len(points)))
        all_match = all_match and formula == len(points)
    return CatMapReport(
        eigenvalue_unstable=lam_u,
        eigenvalue_stable=lam_s,
        product_is_one=product_ok,
        hyperbolic=hyperbolic,
        counts=tuple(counts),
        all_counts_match=all_match,
    )


# ---------------------------------------------------------------------------
# standard family


@dataclass(frozen=True)
class LyapunovReport:
    lam: float
    orbits: int
    iterates: int
    seed: int
    exponents: np.ndarray  # shape (orbits, 2), top and bottom per orbit
    positive_threshold: float

    @property
    def top_exponents(self) -> np.ndarray:
        return self.exponents[:, 0]

    @property
    def mean_exponent(self) -> float:
        return float(np.mean(self.exponents[:, 0]))

    @property
    def fraction_positive(self) -> float:
        return float(np.mean(self.exponents[:, 0] > self.positive_threshold))

    @property
    def max_abs_pair_sum(self) -> float:
        return float(np.max(np.abs(self.exponents.sum(axis=1))))

    def summary_json(self) -> dict:
        return {
            "lambda": self.lam,
            "orbits": self.orbits,
            "iterates": self.iterates,
            "seed": self.seed,
            "mean_exponent": self.mean_exponent,
            "fraction_positive": self.fraction_positive,
            "max_abs_pair_sum": self.max_abs_pair_sum,
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["orbit_id", "exponent"])
            for i, e in enumerate(self.exponents[:, 0]):
                writer.writerow([i, repr(float(e))])


def standard_family_lyapunov(
    lam: float,
    orbits: int,
    iterates: int,
    seed: int = 0,
    *,
    burn_in: int = LYAPUNOV_BURN_IN,
    positive_threshold: float = POSITIVE_EXPONENT_THRESHOLD,
) -> LyapunovReport:
    """Lyapunov exponents of (x, y) -> (-y + 2x + lam*sin(2*pi*x), x) mod 1.

    Random initial conditions; the derivative cocycle
    [[2 + 2*pi*lam*cos(2*pi*x), -1], [1, 0]] (determinant 1) is pushed
    with per-step Gram-Schmidt normalization, discarding `burn_in`
    iterates.  The two per-orbit exponents sum to ~0 by area
    preservation; statistics are deterministic given the seed.
    """
    if orbits < 1 or iterates < 1:
        raise ValidationError("orbits and iterates must be >= 1")
    lam = float(lam)
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, size=orbits)
    y = rng.uniform(0.0, 1.0, size=orbits)
    q0 = np.tile(np.array([1.0, 0.0]), (orbits, 1))
    q1 = np.tile(np.array([0.0, 1.0]), (orbits, 1))
    log0 = np.zeros(orbits)
    log1 = np.zeros(orbits)
    for step in range(burn_in + iterates):
        a = 2.0 + 2.0 * math.pi * lam * np.cos(2.0 * math.pi * x)
        # push both frame vectors through [[a, -1], [1, 0]]
        b0 = np.stack([a * q0[:, 0] - q0[:, 1], q0[:, 0]], axis=1)
        b1 = np.stack([a * q1[:, 0] - q1[:, 1], q1[:, 0]], axis=1)
        r00 = np.sqrt(np.sum(b0 * b0, axis=1))
        q0 = b0 / r00[:, None]
        r01 = np.sum(q0 * b1, axis=1)
        b1 = b1 - r01[:, None] * q0
        r11 = np.sqrt(np.sum(b1 * b1, axis=1))
        q1 = b1 / r11[:, None]
        if step >= burn_in:
            log0 += np.log(r00)
            log1 += np.log(r11)
        x, y = (-y + 2.0 * x + lam * np.sin(2.0 * math.pi * x)) % 1.0, x
    exponents = np.stack([log0 / iterates, log1 / iterates], axis=1)
    return LyapunovReport(
        lam=lam,
        orbits=orbits,
        iterates=iterates,
        seed=seed if isinstance(seed, int) else 0,
        exponents=exponents,
        positive_threshold=positive_threshold,
    )
