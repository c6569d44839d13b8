"""Intersection machinery for pairs of regular Cantor sets.

Four layers of evidence about K1 and a translated copy K2 + t:

* `intersect_test` / `difference_scan`: depth-bounded cover sweeps.
  Disjoint covers at some depth certify empty intersection; overlap at
  the deepest tested cover is evidence only.
* `gap_lemma_test`: thickness certificate.  When the thickness product
  exceeds 1 strictly and the sets are linked (each hull meets the other
  set), the intersection is nonempty at every depth — no budget enters.
* `recurrent_compact_search`: a machine-checkable certificate of stable
  intersection.  Relative positions of renormalized cylinder pairs are
  discretized on an (s, t) grid (s the log relative scale, t the
  relative translation in the unit frame of the first set's cylinder);
  cells that cannot renormalize back into the surviving region with a
  one-cell safety margin are deleted until a greatest fixed point
  remains.  Every surviving cell carries a child-pair witness, and the
  whole object can be re-verified by an independent plain-loop checker.
* `d_stable_probe` / `tangency_density_experiment`: stochastic and
  measure-theoretic probes of how robust the intersection is.

Margin note: the safety margin is applied in the translation direction
only.  The log-scale coordinate moves by the exact constant
log|J'| - log|J| per renormalization step, so for equal-ratio pairs
every s-column maps to itself; demanding clearance in s would erode the
outermost columns on every sweep and provably empty every region for
such pairs.  Translation clearance is what perturbation robustness
actually uses.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cantor_core import (
    Interval,
    RegularCantorSet,
    build_affine,
    maxlen_at_depth,
    refine,
    resolve_budget,
    scale_affine,
    set_from_json,
    set_to_json,
)
from .dimension import box_regression, thickness
from .errors import (
    BudgetExceeded,
    NonAffineInput,
    TZeroNotInDifference,
    ValidationError,
)
from .setops import IntervalUnion, cover_sum, merge_intervals

GRID_SNAP_EPS = 1e-9
MAX_SWEEPS = 10_000


# ---------------------------------------------------------------------------
# depth-bounded intersection tests


@dataclass(frozen=True)
class IntersectionOutcome:
    """Tri-state cover verdict: certified disjoint at a depth, or undecided overlap.

    disjoint=True with depth m means the depth-m covers (m minimal) have
    disjoint unions — a certificate that K1 and K2 + t do not meet.
    disjoint=False means the deepest tested covers still overlap, which
    decides nothing about the limit sets.
    """

    disjoint: bool
    depth: int

    def __str__(self) -> str:
        kind = "DisjointAtDepth" if self.disjoint else "OverlapAtDepth"
        return f"{kind}({self.depth})"


def _covers_overlap(a_lo, a_hi, b_lo, b_hi) -> bool:
    """Whether two sorted disjoint interval families share any point."""
    idx = np.searchsorted(b_lo, a_hi, side="right") - 1
    valid = idx >= 0
    if not np.any(valid):
        return False
    return bool(np.any(b_hi[idx[valid]] >= a_lo[valid]))


def intersect_test(
    K1: RegularCantorSet,
    K2: RegularCantorSet,
    t: float,
    n: int,
    *,
    budget: int | None = None,
) -> IntersectionOutcome:
    """Compare depth-d covers of K1 and K2 + t for d = 0..n."""
    if n < 0:
        raise ValidationError("depth must be >= 0")
    t = float(t)
    for d in range(n + 1):
        c1 = refine(K1, d, budget=budget)
        c2 = refine(K2, d, budget=budget)
        if not _covers_overlap(c1.los, c1.his, c2.los + t, c2.his + t):
            return IntersectionOutcome(disjoint=True, depth=d)
    return IntersectionOutcome(disjoint=False, depth=n)


@dataclass(frozen=True)
class DifferenceProfile:
    ts: tuple[float, ...]
    outcomes: tuple[IntersectionOutcome, ...]
    depth: int

    def overlap_mask(self) -> np.ndarray:
        return np.array([not o.disjoint for o in self.outcomes], dtype=bool)

    def overlap_fraction(self) -> float:
        return float(np.mean(self.overlap_mask()))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "state", "depth"])
            for t, o in zip(self.ts, self.outcomes):
                state = "disjoint" if o.disjoint else "overlap"
                writer.writerow([repr(t), state, o.depth])


def difference_scan(
    K1: RegularCantorSet,
    K2: RegularCantorSet,
    t_grid,
    n: int,
    *,
    budget: int | None = None,
) -> DifferenceProfile:
    """intersect_test across a sorted grid of translations.

    The overlap set {t : covers still meet at depth n} is an outer
    approximation, sampled on the grid, of the set of differences
    {x - y : x in K1, y in K2}.
    """
    ts = [float(t) for t in t_grid]
    if ts != sorted(ts):
        raise ValidationError("t grid must be sorted")
    covers1 = [refine(K1, d, budget=budget) for d in range(n + 1)]
    covers2 = [refine(K2, d, budget=budget) for d in range(n + 1)]
    outcomes = []
    for t in ts:
        verdict = IntersectionOutcome(disjoint=False, depth=n)
        for d in range(n + 1):
            c1, c2 = covers1[d], covers2[d]
            if not _covers_overlap(c1.los, c1.his, c2.los + t, c2.his + t):
                verdict = IntersectionOutcome(disjoint=True, depth=d)
                break
        outcomes.append(verdict)
    return DifferenceProfile(ts=tuple(ts), outcomes=tuple(outcomes), depth=n)


# ---------------------------------------------------------------------------
# gap lemma


@dataclass(frozen=True)
class GapLemmaResult:
    certified: bool
    tau1: float
    tau2: float
    linked: bool
    reason: str


def _set_meets_interval(K: RegularCantorSet, target: Interval, max_depth: int) -> bool | None:
    """Certified test of K ∩ target != empty.

    True: some cover interval lies inside target (cover intervals always
    contain points of K).  False: some cover misses target entirely
    (covers contain K).  None: undecided to max_depth (e.g. boundary
    tangencies) — callers must treat this as "no certificate".
    """
    t_lo, t_hi = target.as_floats()
    for d in range(max_depth + 1):
        cover = refine(K, d)
        los, his = cover.los, cover.his
        touching = (los <= t_hi) & (his >= t_lo)
        if not np.any(touching):
            return False
        if np.any((los >= t_lo) & (his <= t_hi)):
            return True
    return None


def gap_lemma_test(
    K1: RegularCantorSet,
    K2: RegularCantorSet,
    t: float,
    *,
    depth: int = 8,
) -> GapLemmaResult:
    """Thickness certificate for K1 ∩ (K2 + t) != empty.

    Requires tau(K1) * tau(K2) > 1 strictly and linkedness: the hulls
    overlap and each hull contains a point of the other set (so neither
    hull sits inside a gap of the other).  A certified result holds for
    the limit sets, with no depth bound.
    """
    t = float(t)
    tau1 = thickness(K1, depth).value
    tau2 = thickness(K2, depth).value
    h1 = K1.hull
    h2_lo, h2_hi = float(K2.hull.lo) + t, float(K2.hull.hi) + t
    if float(h1.hi) < h2_lo or h2_hi < float(h1.lo):
        return GapLemmaResult(False, tau1, tau2, False, "hulls are disjoint")
    if tau1 * tau2 <= 1.0:
        return GapLemmaResult(
            False, tau1, tau2, False, f"thickness product {tau1 * tau2} is not > 1"
        )
    meets1 = _set_meets_interval(K1, Interval(h2_lo, h2_hi), depth)
    if meets1 is not True:
        return GapLemmaResult(
            False, tau1, tau2, False, "first set not shown to meet the other hull"
        )
    shifted_hull1 = Interval(float(h1.lo) - t, float(h1.hi) - t)
    meets2 = _set_meets_interval(K2, shifted_hull1, depth)
    if meets2 is not True:
        return GapLemmaResult(
            False, tau1, tau2, False, "second set not shown to meet the other hull"
        )
    return GapLemmaResult(
        True, tau1, tau2, True, "thickness product > 1 with linked hulls"
    )


# ---------------------------------------------------------------------------
# relative positions and the recurrent-region certificate


@dataclass(frozen=True)
class RelativePosition:
    """Placement of one renormalized cylinder against another.

    In the unit frame of the first cylinder, the second occupies
    [t, t + e^s]; orientation is +1 when both cylinders kept their
    original orientation.
    """

    s: float
    t: float
    orientation: int = +1

    @property
    def second_hull(self) -> Interval:
        return Interval(self.t, self.t + math.exp(self.s))


@dataclass(frozen=True)
class PositionRegion:
    """Surviving (s, t) cells per cylinder-type pair, with witnesses.

    mask has shape (r1, r2, ns, nt); witness_k1/witness_k2 hold, for
    every member cell, the child-pair indices whose renormalization
    image (bounding box over the whole cell, margin-expanded in t)
    stays inside the mask.  Non-member cells hold -1.
    """

    s0: float
    hs: float
    ns: int
    t0: float
    ht: float
    nt: int
    margin: int
    mask: np.ndarray
    witness_k1: np.ndarray
    witness_k2: np.ndarray

    @property
    def n_members(self) -> int:
        return int(self.mask.sum())

    def member_positions(self) -> list[tuple[int, int, float, float]]:
        """Cell-center positions (j1, j2, s, t) of all member cells."""
        out = []
        for j1, j2, i, k in zip(*np.nonzero(self.mask)):
            out.append(
                (
                    int(j1),
                    int(j2),
                    self.s0 + (int(i) + 0.5) * self.hs,
                    self.t0 + (int(k) + 0.5) * self.ht,
                )
            )
        return out


@dataclass(frozen=True)
class SearchOutcome:
    found: bool
    region: PositionRegion | None
    sweeps: int


def _child_tables(K: RegularCantorSet) -> list[list[tuple[int, float, float, float]]]:
    """Per piece j: [(k, J.lo, J.hi, |J|)] with J the child cylinder of
    type k inside piece j, in the unit frame of piece j."""
    tables: list[list[tuple[int, float, float, float]]] = []
    for j in range(K.n_pieces):
        inv = K.inverse_branch(j)
        piece = K.pieces[j]
        row = []
        for k in K.transitions[j]:
            img = inv.apply_interval(K.pieces[k])
            lo = (img.lo - piece.lo) / piece.length
            hi = (img.hi - piece.lo) / piece.length
            row.append((k, float(lo), float(hi), float(hi - lo)))
        tables.append(row)
    return tables


def _require_affine_orientation(K: RegularCantorSet, name: str) -> None:
    if not K.is_affine:
        raise NonAffineInput(f"{name} must be affine for exact renormalization")
    if not K.orientation_preserving:
        raise NonAffineInput(f"{name} must have orientation-preserving branches")


def recurrent_compact_search(
    K1: RegularCantorSet,
    K2: RegularCantorSet,
    box: tuple[tuple[float, float], tuple[float, float]],
    grid: tuple[float, float],
    margin: int = 1,
    *,
    budget: int | None = None,
) -> SearchOutcome:
    """Greatest-fixed-point search for a recurrent region of relative positions.

    Starting from every cell whose positions force overlapping hulls,
    cells are repeatedly deleted unless some child pair (one Markov
    piece of each set) maps the whole cell into surviving cells with
    `margin` cells of clearance in the translation direction.  A
    nonempty fixed point certifies positions whose cylinder pairs can
    renormalize forever with overlapping hulls — nonempty intersection,
    robust under translation-type perturbations up to the margin.
    """
    _require_affine_orientation(K1, "first set")
    _require_affine_orientation(K2, "second set")
    (s_lo, s_hi), (t_lo, t_hi) = box
    hs, ht = float(grid[0]), float(grid[1])
    if not (s_hi > s_lo and t_hi > t_lo and hs > 0 and ht > 0):
        raise ValidationError("box ranges and cell sizes must be positive")
    if margin < 0:
        raise ValidationError("margin must be >= 0")
    ns = max(1, int(round((s_hi - s_lo) / hs)))
    nt = max(1, int(round((t_hi - t_lo) / ht)))
    hs = (s_hi - s_lo) / ns
    ht = (t_hi - t_lo) / nt
    r1, r2 = K1.n_pieces, K2.n_pieces
    limit = resolve_budget(budget)
    if r1 * r2 * ns * nt > limit:
        raise BudgetExceeded(f"{r1 * r2 * ns * nt} grid cells exceed budget {limit}")

    tab1 = _child_tables(K1)
    tab2 = _child_tables(K2)

    s_edges = s_lo + hs * np.arange(ns + 1)
    t_edges = t_lo + ht * np.arange(nt + 1)
    e_lo = np.exp(s_edges[:-1])  # e^s at cell left edge, per column
    e_hi = np.exp(s_edges[1:])

    # initial mask: the whole cell must force hull overlap:
    # [t, t + e^s] meets [0, 1]  <=>  t <= 1 and t + e^s >= 0
    cell_t_lo = t_edges[:-1][None, :]
    cell_t_hi = t_edges[1:][None, :]
    init = (cell_t_hi <= 1.0) & (cell_t_lo + e_lo[:, None] >= 0.0)
    mask = np.broadcast_to(init, (r1, r2, ns, nt)).copy()

    # static per-child-pair index geometry
    rows_idx = np.arange(ns)[:, None]
    moves: dict[tuple[int, int], list[dict]] = {}
    for j1 in range(r1):
        for j2 in range(r2):
            entries = []
            for (k1, w_lo, _w_hi, L) in tab1[j1]:
                for (k2, v_lo, _v_hi, Lp) in tab2[j2]:
                    shift = math.log(Lp) - math.log(L)
                    d_lo = math.floor(shift / hs + GRID_SNAP_EPS)
                    d_hi = math.ceil(shift / hs - GRID_SNAP_EPS)
                    # u' = (u + e^s * v_lo - w_lo) / L over the cell
                    ev = np.where(v_lo >= 0, e_lo * v_lo, e_hi * v_lo)[:, None]
                    ev_hi = np.where(v_lo >= 0, e_hi * v_lo, e_lo * v_lo)[:, None]
                    u_min = (cell_t_lo + ev - w_lo) / L
                    u_max = (cell_t_hi + ev_hi - w_lo) / L
                    it_lo = np.floor((u_min - t_lo) / ht + GRID_SNAP_EPS).astype(np.int64) - margin
                    it_hi = (
                        np.ceil((u_max - t_lo) / ht - GRID_SNAP_EPS).astype(np.int64) - 1 + margin
                    )
                    is_lo = rows_idx + d_lo
                    is_hi = rows_idx + d_hi
                    valid = (is_lo >= 0) & (is_hi < ns) & (it_lo >= 0) & (it_hi < nt)
                    entries.append(
                        {
                            "k1": k1,
                            "k2": k2,
                            "is_lo": np.broadcast_to(is_lo, (ns, nt)),
                            "is_hi": np.broadcast_to(is_hi, (ns, nt)),
                            "it_lo": it_lo,
                            "it_hi": it_hi,
                            "valid": valid,
                        }
                    )
            moves[(j1, j2)] = entries

    def box_all_true(summed: np.ndarray, mv: dict) -> np.ndarray:
        is_lo = np.clip(mv["is_lo"], 0, ns - 1)
        is_hi = np.clip(mv["is_hi"], 0, ns - 1)
        it_lo = np.clip(mv["it_lo"], 0, nt - 1)
        it_hi = np.clip(mv["it_hi"], 0, nt - 1)
        total = (
            summed[is_hi + 1, it_hi + 1]
            - summed[is_lo, it_hi + 1]
            - summed[is_hi + 1, it_lo]
            + summed[is_lo, it_lo]
        )
        area = (is_hi - is_lo + 1) * (it_hi - it_lo + 1)
        return mv["valid"] & (total == area)

    sweeps = 0
    while True:
        sweeps += 1
        if sweeps > MAX_SWEEPS:
            raise BudgetExceeded(f"fixed-point iteration exceeded {MAX_SWEEPS} sweeps")
        integrals = {}
        for k1 in range(r1):
            for k2 in range(r2):
                s = np.zeros((ns + 1, nt + 1), dtype=np.int64)
                np.cumsum(np.cumsum(mask[k1, k2].astype(np.int64), axis=0), axis=1, out=s[1:, 1:])
                integrals[(k1, k2)] = s
        new_mask = np.zeros_like(mask)
        for (j1, j2), entries in moves.items():
            support = np.zeros((ns, nt), dtype=bool)
            for mv in entries:
                support |= box_all_true(integrals[(mv["k1"], mv["k2"])], mv)
            new_mask[j1, j2] = mask[j1, j2] & support
        if np.array_equal(new_mask, mask):
            break
        mask = new_mask

    if not mask.any():
        return SearchOutcome(found=False, region=None, sweeps=sweeps)

    witness_k1 = np.full(mask.shape, -1, dtype=np.int64)
    witness_k2 = np.full(mask.shape, -1, dtype=np.int64)
    integrals = {}
    for k1 in range(r1):
        for k2 in range(r2):
            s = np.zeros((ns + 1, nt + 1), dtype=np.int64)
            np.cumsum(np.cumsum(mask[k1, k2].astype(np.int64), axis=0), axis=1, out=s[1:, 1:])
            integrals[(k1, k2)] = s
    for (j1, j2), entries in moves.items():
        unfilled = mask[j1, j2].copy()
        for mv in entries:
            ok = box_all_true(integrals[(mv["k1"], mv["k2"])], mv) & unfilled
            witness_k1[j1, j2][ok] = mv["k1"]
            witness_k2[j1, j2][ok] = mv["k2"]
            unfilled &= ~ok
        if unfilled.any():
            raise ValidationError("fixed point left a member cell without a witness")

    region = PositionRegion(
        s0=s_lo,
        hs=hs,
        ns=ns,
        t0=t_lo,
        ht=ht,
        nt=nt,
        margin=margin,
        mask=mask,
        witness_k1=witness_k1,
        witness_k2=witness_k2,
    )
    return SearchOutcome(found=True, region=region, sweeps=sweeps)


def renormalization_sensitivity(
    K1: RegularCantorSet, K2: RegularCantorSet, region: PositionRegion
) -> float:
    """Conservative bound L on d(image position)/d(branch parameters).

    Derivation: one renormalization step sends t to (t + e^s*v - w)/L_J
    with v, w child-table offsets and L_J the child length, all ratios
    of piece endpoints.  Perturbing every endpoint by eps moves each
    table entry by at most c_K*eps with c_K = 4/min_piece_len^2
    (quotient rule, normalized hull), so the image moves by at most
    (c_K1*(1 + U) + c_K2*e^smax)/Jmin * eps with U the largest |t| over
    the box.  Perturbations below margin*ht/L keep every witness image
    inside its margin clearance.
    """
    s_max = region.s0 + region.ns * region.hs
    u_max = max(abs(region.t0), abs(region.t0 + region.nt * region.ht)) + 1.0

    def c_of(K: RegularCantorSet) -> tuple[float, float]:
        hull_len = float(K.hull.length)
        min_len = min(float(p.length) for p in K.pieces) / hull_len
        tables = _child_tables(K)
        j_min = min(L for row in tables for (_k, _lo, _hi, L) in row)
        return 4.0 / min_len**2, j_min

    c1, jmin1 = c_of(K1)
    c2, _ = c_of(K2)
    return (c1 * (1.0 + u_max) + c2 * math.exp(s_max)) / jmin1


def position_to_sets(
    K1: RegularCantorSet, K2: RegularCantorSet, s: float, t: float
) -> tuple[RegularCantorSet, RegularCantorSet]:
    """Concrete affine sets realizing a relative position (s, t).

    Both sets are normalized to unit hull; the second is then scaled by
    e^s and translated by t.  Meaningful for full-transition sets, whose
    cylinders are affine copies of the whole set.
    """
    if not (K1.has_full_transitions and K2.has_full_transitions):
        raise ValidationError("relative positions need full-transition sets")
    _require_affine_orientation(K1, "first set")
    _require_affine_orientation(K2, "second set")

    def unit(K: RegularCantorSet) -> RegularCantorSet:
        a = 1 / Fraction(K.hull.length) if K.exact else 1.0 / float(K.hull.length)
        return scale_affine(K, a, -a * K.hull.lo)

    return unit(K1), scale_affine(unit(K2), math.exp(s), t)


# ---------------------------------------------------------------------------
# certificate files and the independent checker


def region_to_json(
    region: PositionRegion, K1: RegularCantorSet, K2: RegularCantorSet
) -> dict:
    flat = region.mask.ravel(order="C")
    runs: list[int] = []
    current, count = False, 0
    for bit in flat:
        b = bool(bit)
        if b == current:
            count += 1
        else:
            runs.append(count)
            current, count = b, 1
    runs.append(count)
    witnesses: list[int] = []
    wk1, wk2 = region.witness_k1.ravel(order="C"), region.witness_k2.ravel(order="C")
    for i in np.flatnonzero(flat):
        witnesses.extend((int(wk1[i]), int(wk2[i])))
    return {
        "schema": 1,
        "kind": "recurrent-region",
        "sets": {"first": set_to_json(K1), "second": set_to_json(K2)},
        "grid": {
            "s0": region.s0,
            "hs": region.hs,
            "ns": region.ns,
            "t0": region.t0,
            "ht": region.ht,
            "nt": region.nt,
            "types": [region.mask.shape[0], region.mask.shape[1]],
        },
        "margin": region.margin,
        "margin_axis": "t",
        "mask_rle": runs,
        "witnesses": witnesses,
    }


def save_certificate(path, region: PositionRegion, K1, K2) -> None:
    with open(path, "w") as fh:
        json.dump(region_to_json(region, K1, K2), fh, sort_keys=True)
        fh.write("\n")


def verify_certificate(doc: dict) -> tuple[bool, str]:
    """Re-check a certificate with plain loops, independent of the search.

    Decodes the mask, rebuilds both sets from their embedded
    definitions, recomputes every member cell's witness image box from
    scratch and confirms (a) hull overlap on the whole cell and (b)
    margin-expanded containment of the image in the member mask.
    """
    try:
        grid = doc["grid"]
        ns, nt = int(grid["ns"]), int(grid["nt"])
        r1, r2 = (int(x) for x in grid["types"])
        s0, hs = float(grid["s0"]), float(grid["hs"])
        t0, ht = float(grid["t0"]), float(grid["ht"])
        margin = int(doc["margin"])
        K1 = set_from_json(doc["sets"]["first"])
        K2 = set_from_json(doc["sets"]["second"])
    except (KeyError, TypeError, ValueError) as exc:
        return False, f"malformed certificate: {exc}"

    total = r1 * r2 * ns * nt
    flat = np.zeros(total, dtype=bool)
    pos, value = 0, False
    for run in doc["mask_rle"]:
        if value:
            flat[pos : pos + run] = True
        pos += run
        value = not value
    if pos != total:
        return False, "mask run-length data does not match grid size"
    mask = flat.reshape((r1, r2, ns, nt))
    members = np.flatnonzero(flat)
    witnesses = doc["witnesses"]
    if len(witnesses) != 2 * len(members):
        return False, "witness list length does not match member count"

    tab1 = _child_tables(K1)
    tab2 = _child_tables(K2)

    for m_index, flat_i in enumerate(members):
        j1, rem = divmod(int(flat_i), r2 * ns * nt)
        j2, rem = divmod(rem, ns * nt)
        i, k = divmod(rem, nt)
        k1 = witnesses[2 * m_index]
        k2 = witnesses[2 * m_index + 1]
        cs_lo, cs_hi = s0 + i * hs, s0 + (i + 1) * hs
        ct_lo, ct_hi = t0 + k * ht, t0 + (k + 1) * ht
        # hull-overlap invariant on the whole cell
        if not (ct_hi <= 1.0 and ct_lo + math.exp(cs_lo) >= 0.0):
            return False, f"member cell ({j1},{j2},{i},{k}) does not force hull overlap"
        row1 = [e for e in tab1[j1] if e[0] == k1]
        row2 = [e for e in tab2[j2] if e[0] == k2]
        if not row1 or not row2:
            return False, f"witness ({k1},{k2}) is not a child pair of types ({j1},{j2})"
        _, w_lo, _w_hi, L = row1[0]
        _, v_lo, _v_hi, Lp = row2[0]
        shift = math.log(Lp) - math.log(L)
        # image bounding box over the cell corners
        e_a, e_b = math.exp(cs_lo), math.exp(cs_hi)
        ev = (min(e_a * v_lo, e_b * v_lo), max(e_a * v_lo, e_b * v_lo))
        u_min = (ct_lo + ev[0] - w_lo) / L
        u_max = (ct_hi + ev[1] - w_lo) / L
        is_lo = math.floor((cs_lo + shift - s0) / hs + GRID_SNAP_EPS)
        is_hi = math.ceil((cs_hi + shift - s0) / hs - GRID_SNAP_EPS) - 1
        it_lo = math.floor((u_min - t0) / ht + GRID_SNAP_EPS) - margin
        it_hi = math.ceil((u_max - t0) / ht - GRID_SNAP_EPS) - 1 + margin
        if is_lo < 0 or is_hi >= ns or it_lo < 0 or it_hi >= nt:
            return False, f"image of cell ({j1},{j2},{i},{k}) leaves the grid"
        for ii in range(is_lo, is_hi + 1):
            for kk in range(it_lo, it_hi + 1):
                if not mask[k1, k2, ii, kk]:
                    return (
                        False,
                        f"image of cell ({j1},{j2},{i},{k}) hits non-member ({k1},{k2},{ii},{kk})",
                    )
    return True, f"verified {len(members)} member cells"


# ---------------------------------------------------------------------------
# stochastic d-stability probe


def perturb_set(
    K: RegularCantorSet, radius: float, rng: np.random.Generator, max_tries: int = 200
) -> RegularCantorSet:
    """Uniform perturbation of piece endpoints, resampled until valid.

    Perturbing endpoints (rather than slopes and offsets directly)
    keeps every branch exactly Markov after rebuilding, which is the
    rejection-free part of the model; overlap violations are resampled.
    """
    if not K.is_affine:
        raise NonAffineInput("perturbations act on affine branch parameters")
    if radius < 0:
        raise ValidationError("radius must be >= 0")
    if radius == 0:
        return build_affine([p.as_floats() for p in K.pieces], K.transitions)
    for _ in range(max_tries):
        pieces = []
        for p in K.pieces:
            lo = float(p.lo) + rng.uniform(-radius, radius)
            hi = float(p.hi) + rng.uniform(-radius, radius)
            pieces.append((lo, hi))
        try:
            return build_affine(pieces, K.transitions)
        except ValidationError:
            continue
    raise ValidationError(f"no valid perturbation found within {max_tries} draws")


def _cover_intersection_union(
    K1: RegularCantorSet, K2: RegularCantorSet, t: float, n: int, budget: int | None
) -> tuple[np.ndarray, np.ndarray]:
    c1 = refine(K1, n, budget=budget)
    c2 = refine(K2, n, budget=budget)
    a_lo, a_hi = c1.los, c1.his
    b_lo, b_hi = c2.los + t, c2.his + t
    out_lo, out_hi = [], []
    i = j = 0
    while i < len(a_lo) and j < len(b_lo):
        lo = max(a_lo[i], b_lo[j])
        hi = min(a_hi[i], b_hi[j])
        if lo <= hi:
            out_lo.append(lo)
            out_hi.append(hi)
        if a_hi[i] < b_hi[j]:
            i += 1
        else:
            j += 1
    if not out_lo:
        return np.empty(0), np.empty(0)
    return merge_intervals(np.array(out_lo), np.array(out_hi))


def _union_box_estimate(los: np.ndarray, his: np.ndarray, finest_scale: float) -> float:
    """Box-count slope of an interval union across dyadic resolutions
    coarser than the union's own interval scale."""
    if len(los) == 0:
        return 0.0
    k_max = min(20, max(4, int(math.floor(-math.log2(max(finest_scale, 1e-18))))))
    radii, counts = [], []
    for k in range(3, k_max + 1):
        r = 2.0**-k
        klo = np.floor(los / r).astype(np.int64)
        khi = np.floor(his / r).astype(np.int64)
        cells = int(np.sum(khi - klo + 1))
        if len(klo) > 1:
            cells -= int(np.sum(klo[1:] == khi[:-1]))
        radii.append(r)
        counts.append(cells)
    if len(set(counts)) == 1 and counts[0] == 1:
        return 0.0
    slope, _ = box_regression(radii, counts)
    return max(0.0, slope)


def d_stable_probe(
    K1: RegularCantorSet,
    K2: RegularCantorSet,
    t: float,
    d: float,
    perturbations: int,
    radius: float,
    n: int,
    *,
    seed: int = 0,
    budget: int | None = None,
) -> float:
    """Fraction of random perturbed pairs whose cover intersection still
    looks at least d-dimensional.

    Each trial draws endpoint perturbations of both sets of size at most
    `radius`, intersects the depth-n covers of the perturbed pair at
    translation t, and estimates the box dimension of the resulting
    union; the trial passes when the estimate reaches d.  A fraction of
    1.0 across many trials is desk-scale evidence of d-stable
    intersection.
    """
    if not (0.0 < d < 1.0):
        raise ValidationError("d must lie strictly between 0 and 1")
    if perturbations < 1:
        raise ValidationError("need at least one perturbation")
    min_gap = min(
        min(float(b.lo) - float(a.hi) for a, b in zip(K.pieces, K.pieces[1:]))
        for K in (K1, K2)
        if K.n_pieces > 1
    )
    if radius > min_gap / 2:
        raise ValidationError(
            f"radius {radius} too large relative to the smallest gap {min_gap}"
        )
    hits = 0
    for index in range(perturbations):
        rng = np.random.default_rng([seed, index])
        P1 = perturb_set(K1, radius, rng)
        P2 = perturb_set(K2, radius, rng)
        los, his = _cover_intersection_union(P1, P2, float(t), n, budget)
        scale = max(
            float(maxlen_at_depth(P1, n)), float(maxlen_at_depth(P2, n))
        )
        estimate = _union_box_estimate(los, his, scale)
        if estimate >= d:
            hits += 1
    return hits / perturbations


# ---------------------------------------------------------------------------
# tangency-density experiment


@dataclass(frozen=True)
class DensityProfile:
    """Measure density of the difference cover in shrinking windows at t0."""

    t0: float
    deltas: tuple[float, ...]
    ratios: tuple[float, ...]
    depth: int

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["delta", "ratio"])
            for delta, ratio in zip(self.deltas, self.ratios):
                writer.writerow([repr(delta), repr(ratio)])

    def to_json(self) -> dict:
        return {
            "t0": self.t0,
            "deltas": list(self.deltas),
            "ratios": list(self.ratios),
            "depth": self.depth,
        }


def tangency_density_experiment(
    K1: RegularCantorSet,
    K2: RegularCantorSet,
    t0: float,
    deltas,
    n: int,
    *,
    pair_budget: int | None = None,
) -> DensityProfile:
    """Densities m(cover(K1-K2) ∩ [t0, t0+delta]) / delta.

    Ratios that decay toward 0 are evidence for the thin regime (the
    difference set has density 0 at t0 on the chosen side); ratios
    bounded away from 0 are evidence of positive density.
    """
    ds = sorted((float(x) for x in deltas), reverse=True)
    if not ds or ds[-1] <= 0:
        raise ValidationError("deltas must be positive")
    U = cover_sum(K1, K2, n, "-", 1.0, pair_budget=pair_budget)
    t0 = float(t0)
    slack = 1e-12 * max(1.0, abs(t0))
    i = int(np.searchsorted(U.los, t0, side="right")) - 1
    on_component = i >= 0 and U.his[i] >= t0 - slack
    at_left_edge = i + 1 < len(U.los) and U.los[i + 1] <= t0 + slack
    if not (on_component or at_left_edge):
        raise TZeroNotInDifference(f"{t0} is not a point of the depth-{n} difference cover")
    ratios = []
    for delta in ds:
        lo = np.clip(U.los, t0, t0 + delta)
        hi = np.clip(U.his, t0, t0 + delta)
        covered = float(np.sum(np.maximum(0.0, hi - lo)))
        ratios.append(min(1.0, covered / delta))
    return DensityProfile(t0=t0, deltas=tuple(ds), ratios=tuple(ratios), depth=n)
