"""Regular Cantor sets on the line, defined by expanding Markov maps.

A set is described by finitely many closed pieces I_1 < ... < I_r with
positive gaps, a transition relation, and for each piece an expanding
branch (affine or Moebius) mapping the piece onto the convex hull of its
transition targets.  The attractor is the set of points whose full
forward orbit stays inside the pieces; depth-n covers are the connected
components of the n-th preimage of the piece union.

Exactness policy: affine data given as integers or fractions is kept in
rational arithmetic all the way through cover construction, so cover
endpoints are exact.  Moebius branches are composed as integer 2x2
matrices and evaluated in floating point only when an endpoint is
finally produced.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    BudgetExceeded,
    ContractionViolation,
    NonAffineInput,
    NonContiguousTransitions,
    NonMixingTransitions,
    OverlappingPieces,
    PrecisionLoss,
    ValidationError,
)
from .surd import QuadraticSurd

Num = Union[int, float, Fraction]

TAU_MARKOV = 1e-9       # relative tolerance for floating Markov validation
EPS_LEN = 1e-14         # interval-length floor for covers
DEFAULT_COVER_BUDGET = 2_000_000
BUDGET_ENV_VAR = "CANTORLAB_BUDGET"


def resolve_budget(budget: int | None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get(BUDGET_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValidationError(f"{BUDGET_ENV_VAR} must be an integer, got {env!r}") from exc
    return DEFAULT_COVER_BUDGET


# ---------------------------------------------------------------------------
# intervals


@dataclass(frozen=True, order=False)
class Interval:
    """Closed interval [lo, hi] with lo <= hi.  Endpoints may be exact."""

    lo: Num
    hi: Num

    def __post_init__(self) -> None:
        if not self.lo <= self.hi:
            raise ValidationError(f"interval endpoints out of order: {self.lo} > {self.hi}")

    @property
    def length(self) -> Num:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Num:
        return (self.lo + self.hi) / 2

    def contains_point(self, x: Num, slack: Num = 0) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def as_floats(self) -> tuple[float, float]:
        return float(self.lo), float(self.hi)

    def scaled(self, a: Num, b: Num) -> "Interval":
        x, y = a * self.lo + b, a * self.hi + b
        return Interval(min(x, y), max(x, y))


# ---------------------------------------------------------------------------
# branch maps


@dataclass(frozen=True)
class AffineMap:
    """x -> slope*x + offset."""

    slope: Num
    offset: Num

    def apply(self, x: Num) -> Num:
        return self.slope * x + self.offset

    def apply_interval(self, iv: Interval) -> Interval:
        a, b = self.apply(iv.lo), self.apply(iv.hi)
        return Interval(a, b) if a <= b else Interval(b, a)

    def compose(self, inner: "AffineMap") -> "AffineMap":
        return AffineMap(self.slope * inner.slope, self.slope * inner.offset + self.offset)

    def inverse(self) -> "AffineMap":
        if isinstance(self.slope, Fraction) or isinstance(self.slope, int):
            s = Fraction(1, 1) / Fraction(self.slope)
            return AffineMap(s, -Fraction(self.offset) * s)
        return AffineMap(1.0 / self.slope, -self.offset / self.slope)

    @staticmethod
    def identity() -> "AffineMap":
        return AffineMap(Fraction(1), Fraction(0))


@dataclass(frozen=True)
class MoebiusMap:
    """x -> (a*x + b) / (c*x + d) with integer coefficients."""

    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def apply(self, x: Num) -> Num:
        return (self.a * x + self.b) / (self.c * x + self.d)

    def apply_interval(self, iv: Interval) -> Interval:
        # valid when the pole -d/c is outside [lo, hi]; true for all maps
        # produced by admissible branch compositions on their own domains
        lo, hi = float(iv.lo), float(iv.hi)
        u, v = self.apply(lo), self.apply(hi)
        return Interval(u, v) if u <= v else Interval(v, u)

    def compose(self, inner: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap(
            self.a * inner.a + self.b * inner.c,
            self.a * inner.b + self.b * inner.d,
            self.c * inner.a + self.d * inner.c,
            self.c * inner.b + self.d * inner.d,
        )

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    @staticmethod
    def identity() -> "MoebiusMap":
        return MoebiusMap(1, 0, 0, 1)


MapLike = Union[AffineMap, MoebiusMap]


@dataclass(frozen=True)
class BranchMap:
    """Expanding branch defined on one Markov piece.

    `forward` maps the domain piece onto the convex hull of the target
    pieces; `orientation` is +1 for increasing branches, -1 for
    decreasing ones.  `deriv_min`/`deriv_max` bound |forward'| on the
    domain and must satisfy deriv_min > 1.
    """

    domain: Interval
    forward: MapLike
    orientation: int
    deriv_min: float
    deriv_max: float

    @property
    def kind(self) -> str:
        return "affine" if isinstance(self.forward, AffineMap) else "moebius"

    def inverse(self) -> MapLike:
        return self.forward.inverse()


# ---------------------------------------------------------------------------
# partitions and sets


@dataclass(frozen=True)
class MarkovPartition:
    pieces: tuple[Interval, ...]
    transitions: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.pieces)


@dataclass(frozen=True)
class RegularCantorSet:
    partition: MarkovPartition
    branches: tuple[BranchMap, ...]
    exact: bool
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def pieces(self) -> tuple[Interval, ...]:
        return self.partition.pieces

    @property
    def transitions(self) -> tuple[tuple[int, ...], ...]:
        return self.partition.transitions

    @property
    def n_pieces(self) -> int:
        return len(self.partition.pieces)

    @property
    def hull(self) -> Interval:
        return Interval(self.pieces[0].lo, self.pieces[-1].hi)

    @property
    def is_affine(self) -> bool:
        return all(b.kind == "affine" for b in self.branches)

    @property
    def orientation_preserving(self) -> bool:
        return all(b.orientation == +1 for b in self.branches)

    @property
    def has_full_transitions(self) -> bool:
        full = tuple(range(self.n_pieces))
        return all(t == full for t in self.transitions)

    def target_hull(self, j: int) -> Interval:
        ts = self.transitions[j]
        return Interval(self.pieces[ts[0]].lo, self.pieces[ts[-1]].hi)

    def inverse_branch(self, j: int) -> MapLike:
        return self.branches[j].inverse()

    def identity_map(self) -> MapLike:
        return AffineMap.identity() if self.is_affine else MoebiusMap.identity()

    def contraction_ratios(self) -> tuple[float, ...]:
        """Per-branch upper bound on the inverse-branch contraction."""
        return tuple(1.0 / b.deriv_min for b in self.branches)

    def admissible_count(self, n: int, cap: int | None = None) -> int:
        """Exact number of admissible words of length n+1 (cap-aware)."""
        counts = [1] * self.n_pieces
        for _ in range(n):
            counts = [sum(counts[k] for k in ts) for ts in self.transitions]
            if cap is not None and sum(counts) > cap:
                return cap + 1
        return sum(counts)


# ---------------------------------------------------------------------------
# validation


def _check_pieces(pieces: Sequence[Interval]) -> None:
    for p in pieces:
        if not p.length > 0:
            raise OverlappingPieces(f"piece {p} has zero length")
    for left, right in zip(pieces, pieces[1:]):
        if not left.hi < right.lo:
            raise OverlappingPieces(
                f"pieces must be sorted with positive gaps: {left} then {right}"
            )


def _check_transitions(transitions: Sequence[Sequence[int]], r: int) -> tuple[tuple[int, ...], ...]:
    if len(transitions) != r:
        raise ValidationError(f"expected {r} transition rows, got {len(transitions)}")
    rows = []
    for j, ts in enumerate(transitions):
        ts = tuple(sorted(set(int(t) for t in ts)))
        if not ts:
            raise ValidationError(f"piece {j} has no transitions")
        if ts[0] < 0 or ts[-1] >= r:
            raise ValidationError(f"piece {j} transition targets out of range: {ts}")
        if ts != tuple(range(ts[0], ts[-1] + 1)):
            raise NonContiguousTransitions(
                f"piece {j} targets {ts} are not a contiguous block"
            )
        rows.append(ts)
    # primitivity: some power of the transition matrix must be positive;
    # r*r powers suffice for a primitive 0/1 matrix of size r
    reach = [set(ts) for ts in rows]
    current = [set(ts) for ts in rows]
    for _ in range(r * r):
        if all(len(row) == r for row in current):
            return tuple(rows)
        current = [set().union(*(reach[k] for k in row)) for row in current]
    raise NonMixingTransitions("no power of the transition matrix is strictly positive")


def _check_branch_images(
    pieces: Sequence[Interval],
    transitions: Sequence[tuple[int, ...]],
    branches: Sequence[BranchMap],
    exact: bool,
) -> None:
    scale = float(pieces[-1].hi - pieces[0].lo)
    for j, br in enumerate(branches):
        if br.deriv_min <= 1.0:
            raise ContractionViolation(
                f"branch {j} expansion bound {br.deriv_min} is not > 1"
            )
        ts = transitions[j]
        hull = Interval(pieces[ts[0]].lo, pieces[ts[-1]].hi)
        image = br.forward.apply_interval(br.domain)
        if exact:
            if image.lo != hull.lo or image.hi != hull.hi:
                raise ValidationError(
                    f"branch {j} image {image} differs from target hull {hull}"
                )
        else:
            tol = TAU_MARKOV * max(1.0, scale)
            if abs(float(image.lo) - float(hull.lo)) > tol or abs(
                float(image.hi) - float(hull.hi)
            ) > tol:
                raise ValidationError(
                    f"branch {j} image {image.as_floats()} misses target hull "
                    f"{hull.as_floats()} beyond tolerance {tol}"
                )


def _finish_build(
    pieces: Sequence[Interval],
    transitions: Sequence[Sequence[int]],
    branches: Sequence[BranchMap],
    exact: bool,
    meta: dict | None = None,
) -> RegularCantorSet:
    pieces = tuple(pieces)
    _check_pieces(pieces)
    rows = _check_transitions(transitions, len(pieces))
    branches = tuple(branches)
    if len(branches) != len(pieces):
        raise ValidationError("one branch per piece required")
    _check_branch_images(pieces, rows, branches, exact)
    return RegularCantorSet(
        partition=MarkovPartition(pieces=pieces, transitions=rows),
        branches=branches,
        exact=exact,
        meta=meta or {},
    )


# ---------------------------------------------------------------------------
# constructors


def _to_exact_or_float(x: Num) -> Num:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return float(x)


def build_affine(
    pieces: Sequence[tuple[Num, Num] | Interval],
    transitions: Sequence[Sequence[int]],
) -> RegularCantorSet:
    """Build an affine regular Cantor set from pieces and a transition relation.

    Each branch is the unique orientation-preserving affine map taking its
    piece onto the convex hull of its transition targets.  Rational input
    endpoints give an exact set.
    """
    ivs = []
    exact = True
    for p in pieces:
        lo, hi = (p.lo, p.hi) if isinstance(p, Interval) else p
        lo, hi = _to_exact_or_float(lo), _to_exact_or_float(hi)
        exact = exact and isinstance(lo, Fraction) and isinstance(hi, Fraction)
        ivs.append(Interval(lo, hi))
    _check_pieces(ivs)
    rows = _check_transitions(transitions, len(ivs))
    branches = []
    for j, piece in enumerate(ivs):
        ts = rows[j]
        hull = Interval(ivs[ts[0]].lo, ivs[ts[-1]].hi)
        slope = hull.length / piece.length if exact else float(hull.length) / float(piece.length)
        if not slope > 1:
            raise ContractionViolation(
                f"branch {j} slope {slope} is not > 1; target hull no longer than piece"
            )
        offset = hull.lo - slope * piece.lo
        branches.append(
            BranchMap(
                domain=piece,
                forward=AffineMap(slope, offset),
                orientation=+1,
                deriv_min=float(slope),
                deriv_max=float(slope),
            )
        )
    return _finish_build(ivs, rows, branches, exact)


def gauss_cantor(digit_bound: int) -> RegularCantorSet:
    """Continued-fraction Cantor set with partial quotients in 1..digit_bound.

    Pieces are the convex hulls of the first-digit cylinders; the branch
    on cylinder a is x -> 1/x - a, which is orientation reversing.  The
    hull endpoints are the exact 2-cycle values [0; N,1,N,1,...] and
    [0; 1,N,1,N,...]; for digit_bound = 1 the system degenerates to the
    single golden-mean point, so values below 2 are rejected.
    """
    n = int(digit_bound)
    if n < 2:
        raise ValidationError("digit bound must be >= 2; one symbol gives a single point")
    # y_min = [0; n,1,n,1,...] solves n*y^2 + n*y - 1 = 0
    y_min = QuadraticSurd.quadratic_root(n, n, -1, branch=+1)
    y_max = (QuadraticSurd.from_rational(1) + y_min).inverse()
    pieces = []
    branches = []
    # digit-a cylinder sits left of digit-(a-1): iterate high digit first
    # so pieces come out position-sorted
    for a in range(n, 0, -1):
        lo_s = (QuadraticSurd.from_rational(a) + y_max).inverse()
        hi_s = (QuadraticSurd.from_rational(a) + y_min).inverse()
        piece = Interval(float(lo_s), float(hi_s))
        pieces.append(piece)
        branches.append(
            BranchMap(
                domain=piece,
                forward=MoebiusMap(-a, 1, 1, 0),  # x -> (1 - a x)/x = 1/x - a
                orientation=-1,
                deriv_min=1.0 / float(hi_s) ** 2,
                deriv_max=1.0 / float(lo_s) ** 2,
            )
        )
    transitions = [tuple(range(n))] * n
    meta = {"digit_bound": n, "hull_min_surd": y_min, "hull_max_surd": y_max}
    return _finish_build(pieces, transitions, branches, exact=False, meta=meta)


def scale_affine(K: RegularCantorSet, a: Num, b: Num) -> RegularCantorSet:
    """Return the affine image a*K + b (a != 0).  Affine sets only."""
    if not K.is_affine:
        raise NonAffineInput("affine rescaling is defined for affine sets only")
    if a == 0:
        raise ValidationError("scale factor must be nonzero")
    a = _to_exact_or_float(a)
    b = _to_exact_or_float(b)
    r = K.n_pieces
    new_pieces = [p.scaled(a, b) for p in K.pieces]
    if a < 0:
        new_pieces = new_pieces[::-1]
        remap = lambda j: r - 1 - j
    else:
        remap = lambda j: j
    new_transitions: list[tuple[int, ...]] = [()] * r
    for j, ts in enumerate(K.transitions):
        new_transitions[remap(j)] = tuple(sorted(remap(t) for t in ts))
    return build_affine(new_pieces, new_transitions)


# ---------------------------------------------------------------------------
# covers


@dataclass(frozen=True)
class Cover:
    """Depth-n construction cover: sorted disjoint intervals with addresses.

    `uniform` is True when every interval sits at exactly `depth`
    subdivisions; length-balanced refinement produces mixed depths, in
    which case `depth` is the deepest one used.
    """

    depth: int
    intervals: tuple[Interval, ...]
    addresses: tuple[tuple[int, ...], ...]
    uniform: bool = True

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def los(self) -> np.ndarray:
        return np.array([float(iv.lo) for iv in self.intervals], dtype=float)

    @property
    def his(self) -> np.ndarray:
        return np.array([float(iv.hi) for iv in self.intervals], dtype=float)

    @property
    def lengths(self) -> np.ndarray:
        return self.his - self.los

    @property
    def max_length(self) -> Num:
        return max(iv.length for iv in self.intervals)

    @property
    def min_length(self) -> Num:
        return min(iv.length for iv in self.intervals)

    @property
    def hull(self) -> Interval:
        return Interval(self.intervals[0].lo, self.intervals[-1].hi)


def _address_str(addr: tuple[int, ...]) -> str:
    return "-".join(str(a) for a in addr)


def cover_to_csv(cover: Cover, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["depth", "address", "lo", "hi"])
        for iv, addr in zip(cover.intervals, cover.addresses):
            writer.writerow([len(addr) - 1, _address_str(addr), repr(float(iv.lo)), repr(float(iv.hi))])


def _sorted_cover(depth: int, items: list[tuple[Interval, tuple[int, ...]]], uniform: bool) -> Cover:
    items.sort(key=lambda it: float(it[0].lo))
    return Cover(
        depth=depth,
        intervals=tuple(iv for iv, _ in items),
        addresses=tuple(addr for _, addr in items),
        uniform=uniform,
    )


def refine(K: RegularCantorSet, n: int, *, budget: int | None = None, eps_len: float = EPS_LEN) -> Cover:
    """Depth-n cover of K.  Intervals are sorted by left endpoint.

    Raises BudgetExceeded when the admissible word count passes the
    configured budget and PrecisionLoss when any produced interval is
    shorter than `eps_len`.
    """
    if n < 0:
        raise ValidationError("depth must be >= 0")
    limit = resolve_budget(budget)
    count = K.admissible_count(n, cap=limit)
    if count > limit:
        raise BudgetExceeded(f"depth-{n} cover needs {count}+ intervals, budget {limit}")
    nodes: list[tuple[int, MapLike, tuple[int, ...], Interval]] = [
        (j, K.identity_map(), (j,), K.pieces[j]) for j in range(K.n_pieces)
    ]
    for _ in range(n):
        next_nodes = []
        for last, comp, addr, _iv in nodes:
            deeper = comp.compose(K.inverse_branch(last))
            for k in K.transitions[last]:
                next_nodes.append((k, deeper, addr + (k,), deeper.apply_interval(K.pieces[k])))
        nodes = next_nodes
    items = [(iv, addr) for _, _, addr, iv in nodes]
    if any(float(iv.length) < eps_len for iv, _ in items):
        raise PrecisionLoss(f"depth-{n} cover has intervals below the length floor {eps_len}")
    return _sorted_cover(n, items, uniform=True)


def refine_to_length(
    K: RegularCantorSet,
    target_length: float,
    *,
    max_depth: int = 64,
    budget: int | None = None,
    eps_len: float = EPS_LEN,
) -> Cover:
    """Subdivide until every interval has length <= target_length.

    Depth is balanced by size rather than by count, so heterogeneous
    branch contractions produce mixed-depth covers.  On sets with equal
    contraction everywhere the result coincides with a plain depth-n
    cover.
    """
    if target_length < eps_len:
        raise PrecisionLoss(f"target length {target_length} below floor {eps_len}")
    limit = resolve_budget(budget)
    out: list[tuple[Interval, tuple[int, ...]]] = []
    deepest = 0
    stack: list[tuple[int, MapLike, tuple[int, ...], Interval]] = [
        (j, K.identity_map(), (j,), K.pieces[j]) for j in reversed(range(K.n_pieces))
    ]
    while stack:
        last, comp, addr, iv = stack.pop()
        depth = len(addr) - 1
        if float(iv.length) <= target_length or depth >= max_depth:
            out.append((iv, addr))
            deepest = max(deepest, depth)
            if len(out) > limit:
                raise BudgetExceeded(
                    f"length-balanced cover exceeds budget {limit} at target {target_length}"
                )
            continue
        deeper = comp.compose(K.inverse_branch(last))
        for k in reversed(K.transitions[last]):
            stack.append((k, deeper, addr + (k,), deeper.apply_interval(K.pieces[k])))
    if any(float(iv.length) < eps_len for iv, _ in out):
        raise PrecisionLoss(f"length-balanced cover fell below the length floor {eps_len}")
    uniform = len({len(addr) for _, addr in out}) == 1
    return _sorted_cover(deepest, out, uniform=uniform)


def maxlen_at_depth(K: RegularCantorSet, n: int) -> Num:
    """Exact maximum interval length of the depth-n cover.

    Depth-first search with pruning: a node whose interval is already no
    longer than the best depth-n leaf cannot produce a longer leaf, so
    almost all of the tree is skipped.
    """
    if n < 0:
        raise ValidationError("depth must be >= 0")
    best: Num = 0
    stack: list[tuple[int, MapLike, int, Interval]] = [
        (j, K.identity_map(), 0, K.pieces[j]) for j in range(K.n_pieces)
    ]
    while stack:
        last, comp, depth, iv = stack.pop()
        if iv.length <= best:
            continue
        if depth == n:
            best = iv.length
            continue
        deeper = comp.compose(K.inverse_branch(last))
        children = [
            (k, deeper, depth + 1, deeper.apply_interval(K.pieces[k]))
            for k in K.transitions[last]
        ]
        children.sort(key=lambda c: float(c[3].length))
        stack.extend(children)
    return best


# ---------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class MembershipResult:
    """Outcome of a depth-bounded membership test.

    in_cover=False means x cleared every interval of the depth-`depth`
    cover by more than the guard band: a certificate of exclusion.
    in_cover=True means x stayed inside the cover down to depth `depth`,
    which is evidence of membership only.
    """

    in_cover: bool
    depth: int


def contains(K: RegularCantorSet, x: Num, n: int) -> MembershipResult:
    """Locate x against covers of depth 0..n.

    The guard band errs on the side of membership so that floating
    rounding can never produce a false exclusion certificate.
    """
    xf = float(x)
    guard = 1e-12 * max(1.0, abs(float(K.hull.length)))

    def pick(children: list[tuple[int, MapLike, Interval]]):
        for item in children:
            lo, hi = item[2].as_floats()
            if lo - guard <= xf <= hi + guard:
                return item
        return None

    state = pick([(j, K.identity_map(), K.pieces[j]) for j in range(K.n_pieces)])
    if state is None:
        return MembershipResult(False, 0)
    for depth in range(1, n + 1):
        last, comp, _iv = state
        deeper = comp.compose(K.inverse_branch(last))
        state = pick([(k, deeper, deeper.apply_interval(K.pieces[k])) for k in K.transitions[last]])
        if state is None:
            return MembershipResult(False, depth)
    return MembershipResult(True, n)


# ---------------------------------------------------------------------------
# serialization


def _num_to_json(x: Num):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, int):
        return str(x)
    return float(x)


def _num_from_json(v) -> Num:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, bool):
        raise ValidationError("booleans are not interval endpoints")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    raise ValidationError(f"cannot parse number {v!r}")


def set_to_json(K: RegularCantorSet) -> dict:
    doc: dict = {
        "pieces": [[_num_to_json(p.lo), _num_to_json(p.hi)] for p in K.pieces],
        "transitions": [[j, t] for j, ts in enumerate(K.transitions) for t in ts],
    }
    if K.is_affine:
        doc["branches"] = "affine-auto"
    else:
        doc["branches"] = [
            {"kind": "moebius", "matrix": [[b.forward.a, b.forward.b], [b.forward.c, b.forward.d]]}
            for b in K.branches
        ]
    return doc


def set_from_json(doc: dict) -> RegularCantorSet:
    try:
        raw_pieces = doc["pieces"]
        raw_transitions = doc["transitions"]
        raw_branches = doc.get("branches", "affine-auto")
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"set definition missing field: {exc}") from exc
    pieces = [(_num_from_json(lo), _num_from_json(hi)) for lo, hi in raw_pieces]
    rows: list[list[int]] = [[] for _ in pieces]
    for j, t in raw_transitions:
        if not (0 <= int(j) < len(pieces)):
            raise ValidationError(f"transition source {j} out of range")
        rows[int(j)].append(int(t))
    if raw_branches == "affine-auto":
        return build_affine(pieces, rows)
    ivs = [Interval(lo, hi) for lo, hi in pieces]
    branches = []
    for piece, spec_branch in zip(ivs, raw_branches):
        if spec_branch.get("kind") != "moebius":
            raise ValidationError("explicit branches must be moebius; use affine-auto otherwise")
        (a, b), (c, d) = spec_branch["matrix"]
        m = MoebiusMap(int(a), int(b), int(c), int(d))
        if abs(m.det) != 1:
            raise ValidationError(f"moebius branch determinant must be +-1, got {m.det}")
        lo, hi = float(piece.lo), float(piece.hi)
        dvals = sorted(abs(m.det) / (m.c * x + m.d) ** 2 for x in (lo, hi))
        branches.append(
            BranchMap(
                domain=piece,
                forward=m,
                orientation=+1 if m.det > 0 else -1,
                deriv_min=dvals[0],
                deriv_max=dvals[1],
            )
        )
    return _finish_build(ivs, rows, branches, exact=False)


def load_set(path) -> RegularCantorSet:
    with open(path) as fh:
        return set_from_json(json.load(fh))


def dump_set(K: RegularCantorSet, path) -> None:
    with open(path, "w") as fh:
        json.dump(set_to_json(K), fh, indent=2, sort_keys=True)
        fh.write("\n")
