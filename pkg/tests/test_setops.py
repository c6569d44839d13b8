"""Arithmetic of Cantor sets through interval covers: sums, scaled
differences, containment certificates, and projection scans."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from cantorlab import (
    BudgetExceeded,
    EmptyTarget,
    Interval,
    ValidationError,
    build_affine,
    contains_interval,
    cover_sum,
    covered_length,
    gauss_cantor,
    get_set,
    marstrand_scan,
    measure_estimate,
    merge_intervals,
    refine,
    union_from_cover,
)

F = Fraction

SQRT2 = math.sqrt(2)


# ---------------------------------------------------------------------------
# interval unions


def test_merge_intervals_absorbs_small_gaps():
    los = np.array([0.0, 0.5, 2.0])
    his = np.array([0.4999999999999999, 1.0, 3.0])
    mlo, mhi = merge_intervals(los, his, tol=1e-13)
    assert len(mlo) == 2
    assert mlo[0] == 0.0 and mhi[0] == 1.0
    assert mlo[1] == 2.0 and mhi[1] == 3.0


def test_merge_intervals_handles_unsorted_input():
    mlo, mhi = merge_intervals(np.array([2.0, 0.0]), np.array([3.0, 1.0]))
    assert list(mlo) == [0.0, 2.0]
    assert list(mhi) == [1.0, 3.0]


def test_union_from_cover_matches_cover(ternary):
    cover = refine(ternary, 3)
    union = union_from_cover(cover)
    assert union.n_components == len(cover)
    assert union.total_length == pytest.approx(float(sum(cover.lengths)), abs=1e-15)
    assert measure_estimate(union) == pytest.approx(union.total_length)


# ---------------------------------------------------------------------------
# sums and differences


def test_sum_of_symmetric_thirds_fills_unit_doubling(ternary):
    for depth in range(0, 11):
        u = cover_sum(ternary, ternary, depth, "+")
        assert u.n_components == 1
        assert abs(u.los[0] - 0.0) <= 1e-12
        assert abs(u.his[0] - 2.0) <= 1e-12
        assert abs(u.total_length - 2.0) <= 1e-12


def test_difference_of_symmetric_thirds_fills_symmetric_interval(ternary):
    for depth in range(0, 11):
        u = cover_sum(ternary, ternary, depth, "-")
        assert u.n_components == 1
        assert abs(u.los[0] + 1.0) <= 1e-12
        assert abs(u.his[0] - 1.0) <= 1e-12


def test_sum_covers_shrink_with_depth(thin_pair_set):
    prev = None
    for depth in range(1, 9):
        u = cover_sum(thin_pair_set, thin_pair_set, depth, "-")
        total = u.total_length
        if prev is not None:
            assert total < prev
        prev = total
    assert prev < 0.2


def test_sum_cover_is_outer_approximation(ternary, middle_fifth):
    # every point of the deeper cover-sum lies inside the shallower one
    shallow = cover_sum(ternary, middle_fifth, 3, "+")
    deep = cover_sum(ternary, middle_fifth, 6, "+")
    for lo, hi in zip(deep.los, deep.his):
        k = np.searchsorted(shallow.los, lo + 1e-12) - 1
        assert k >= 0
        assert shallow.his[k] >= hi - 1e-12


def test_sum_is_symmetric_in_arguments(ternary, middle_fifth):
    a = cover_sum(ternary, middle_fifth, 5, "+")
    b = cover_sum(middle_fifth, ternary, 5, "+")
    assert a.n_components == b.n_components
    assert np.allclose(a.los, b.los, atol=1e-12)
    assert np.allclose(a.his, b.his, atol=1e-12)


def test_difference_reflects_when_swapped(ternary, middle_fifth):
    a = cover_sum(ternary, middle_fifth, 5, "-")
    b = cover_sum(middle_fifth, ternary, 5, "-")
    assert np.allclose(a.los, -b.his[::-1], atol=1e-12)
    assert np.allclose(a.his, -b.los[::-1], atol=1e-12)


def test_scaled_difference_zero_factor_degenerates_to_first_set(ternary):
    u = cover_sum(ternary, ternary, 4, "-", lam=0.0)
    cover = refine(ternary, 4)
    assert u.n_components == len(cover)
    assert u.total_length == pytest.approx(float(sum(cover.lengths)), abs=1e-15)


def test_scaled_difference_hull_tracks_factor(ternary):
    for lam in (0.5, 2.0, -1.5):
        u = cover_sum(ternary, ternary, 4, "-", lam=lam)
        lo = min(0.0 - lam * 1.0, 0.0 - lam * 0.0)
        hi = max(1.0 - lam * 0.0, 1.0 - lam * 1.0)
        assert u.hull.lo == pytest.approx(lo, abs=1e-12)
        assert u.hull.hi == pytest.approx(hi, abs=1e-12)


def test_sum_rejects_scale_factor_and_bad_op(ternary):
    with pytest.raises(ValidationError):
        cover_sum(ternary, ternary, 3, "+", lam=2.0)
    with pytest.raises(ValidationError):
        cover_sum(ternary, ternary, 3, "*")
    with pytest.raises(ValidationError):
        cover_sum(ternary, ternary, -1, "+")


def test_strict_pair_budget_raises(ternary):
    with pytest.raises(BudgetExceeded):
        cover_sum(ternary, ternary, 10, "+", pair_budget=100, strict_budget=True)


def test_soft_pair_budget_coarsens_but_still_contains(ternary):
    # with a tiny budget the cover is coarser, but it must still contain
    # the full-budget answer (here the exact interval [0, 2])
    u = cover_sum(ternary, ternary, 10, "+", pair_budget=100)
    assert u.los[0] <= 1e-12 and u.his[-1] >= 2.0 - 1e-12
    assert int(u.meta["pairs"]) <= 100


def test_mismatched_ratio_pair_matches_granularities(ternary):
    # one factor refines much faster than the other; granularity matching
    # must keep the pair count near the coarser side's count
    slow = build_affine([(F(0), F(1, 10)), (F(9, 10), F(1))], [(0, 1), (0, 1)])
    u = cover_sum(ternary, slow, 8, "+")
    assert u.meta["pairs"] < 500_000


# ---------------------------------------------------------------------------
# interval containment


def test_cf_four_digit_sum_covers_its_interval():
    K = gauss_cantor(4)
    u = cover_sum(K, K, 8, "+")
    target = Interval(SQRT2 - 1, 4 * (SQRT2 - 1))
    assert contains_interval(u, target, margin=1e-3)
    assert u.n_components == 1
    assert abs(u.los[0] - (SQRT2 - 1)) <= 1e-3
    assert abs(u.his[-1] - 4 * (SQRT2 - 1)) <= 1e-3


def test_contains_interval_detects_holes(ternary):
    holes = cover_sum(ternary, ternary, 6, "-", lam=0.0)  # just the thirds cover
    assert not contains_interval(holes, Interval(0.0, 1.0), margin=1e-3)
    # the middle gap alone spoils even a generous margin
    assert not contains_interval(holes, Interval(0.3, 0.7), margin=0.01)
    filled = cover_sum(ternary, ternary, 6, "+")
    assert contains_interval(filled, Interval(0.1, 1.9), margin=1e-6)


def test_contains_interval_rejects_empty_shrunk_target(ternary):
    u = cover_sum(ternary, ternary, 4, "+")
    with pytest.raises(EmptyTarget):
        contains_interval(u, Interval(0.5, 0.5004), margin=1e-3)


# ---------------------------------------------------------------------------
# covered length at resolution


def test_covered_length_counts_grid_cells(ternary):
    u = cover_sum(ternary, ternary, 2, "-", lam=0.0)
    # the depth-2 thirds cover spans [0, 1]; at resolution 1/4 it meets
    # the four cells of [0, 1) plus the cell containing the endpoint 1.0
    got = covered_length(u, 0.25)
    assert got == pytest.approx(1.25, abs=1e-12)
    fine = covered_length(u, 1e-4)
    assert fine == pytest.approx(u.total_length, rel=0.01)


def test_covered_length_monotone_in_resolution(ternary):
    u = cover_sum(ternary, ternary, 6, "-", lam=0.0)
    resolutions = [2.0**-k for k in range(2, 14)]
    values = [covered_length(u, r) for r in resolutions]
    assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


def test_covered_length_rejects_bad_resolution(ternary):
    u = cover_sum(ternary, ternary, 3, "+")
    with pytest.raises(ValidationError):
        covered_length(u, 0.0)


# ---------------------------------------------------------------------------
# projection scans


def test_projection_scan_fat_product_has_positive_lengths(ternary):
    lambdas = np.linspace(0.1, 3.0, 16)
    scan = marstrand_scan(ternary, ternary, lambdas, 6, theta=0.1)
    assert scan.fraction_above(0.1) == 1.0
    assert scan.table.shape == (16, len(scan.resolutions))


def test_projection_scan_thin_product_decays(thin_pair_set):
    lambdas = np.linspace(0.1, 3.0, 12)
    scan = marstrand_scan(thin_pair_set, thin_pair_set, lambdas, 6)
    # dimension sum ~0.6: covered length shrinks as resolution refines
    assert scan.median_slope() >= 0.3
    summary = scan.summary_json()
    assert summary["median_slope"] == pytest.approx(scan.median_slope())


def test_projection_scan_validates_inputs(ternary):
    with pytest.raises(ValidationError):
        marstrand_scan(ternary, ternary, [], 4)
    with pytest.raises(ValidationError):
        marstrand_scan(ternary, ternary, [0.5], 4, resolutions=[])


def test_projection_scan_serial_matches_parallel_request(ternary):
    lambdas = [0.3, 0.7, 1.1]
    a = marstrand_scan(ternary, ternary, lambdas, 5, jobs=1)
    b = marstrand_scan(ternary, ternary, lambdas, 5, jobs=2)
    assert np.allclose(a.table, b.table, atol=0)
