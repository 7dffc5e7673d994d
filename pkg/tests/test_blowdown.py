"""Blowdown indices, norm bands, ratio tables, smooth partners."""

import math
from fractions import Fraction

import numpy as np
import pytest

from randfan import (
    InvariantError,
    RayVec,
    ValidationError,
    band_bounds,
    blowdown_index,
    blowdown_table,
    complete_fan,
    conjectured_ratio,
    enumerate_rays,
    epsilon_of,
    neighbors,
    ratio_geq,
    smooth_partners,
    spectrum,
    sup_norm,
    triangular,
    wedge,
)

from oracles import brute_blowdown, brute_epsilon, brute_rays


def test_neighbors_at_unit_height():
    tau, omega = neighbors(1, (1, 0))
    assert (tuple(tau), tuple(omega)) == ((1, -1), (1, 1))


def test_neighbors_wrap_around_the_angular_seam():
    u = enumerate_rays(5)
    tau, omega = neighbors(5, u[0])
    assert tau == u[len(u) - 1]
    assert omega == u[1]


def test_neighbors_rejects_outsiders():
    with pytest.raises(ValidationError):
        neighbors(5, (6, 1))
    with pytest.raises(ValidationError):
        neighbors(5, (2, 4))


def test_unit_height_indices():
    t = blowdown_table(1)
    for axis in [(1, 0), (0, 1), (-1, 0), (0, -1)]:
        assert t[axis] == 2
    for diag in [(1, 1), (-1, 1), (-1, -1), (1, -1)]:
        assert t[diag] == 1


def test_height_five_landmarks():
    t = blowdown_table(5)
    assert t[(1, 1)] == 9
    assert t[(1, 0)] == 10
    assert t[(2, 1)] == 5
    assert t[(5, 4)] == 1


@pytest.mark.parametrize("h", [1, 2, 3, 4, 5, 8])
def test_table_matches_remove_and_recomplete_oracle(h):
    t = blowdown_table(h)
    for ray in brute_rays(h):
        assert t[ray] == brute_blowdown(h, ray), (h, ray)


@pytest.mark.parametrize("h", [1, 3, 7, 20, 60])
def test_scalar_and_bulk_paths_agree(h):
    t = blowdown_table(h)
    universe = enumerate_rays(h)
    stride = max(1, len(universe) // 50)
    for ray in universe.rays[::stride]:
        assert blowdown_index(h, ray) == t[ray]


@pytest.mark.parametrize("h", [2, 6, 17])
def test_neighbor_sum_identity_holds_everywhere(h):
    t = blowdown_table(h)
    for ray in enumerate_rays(h):
        tau, omega = neighbors(h, ray)
        k = t[ray]
        assert (k * ray.x, k * ray.y) == (tau.x + omega.x, tau.y + omega.y)
        assert k == abs(wedge(tau, omega))


def test_removal_spectrum_is_one_merged_cone():
    # dropping any single ray leaves every other cone unimodular and one
    # merged cone carrying exactly the blowdown index
    for h in range(1, 7):
        t = blowdown_table(h)
        full = enumerate_rays(h)
        for ray in full:
            fan = complete_fan(set(full.rays) - {ray})
            counts = spectrum(fan).counts
            k = t[ray]
            expected = {1: fan.n_cones - 1, k: 1} if k > 1 else {1: fan.n_cones}
            assert counts == expected, (h, tuple(ray))


def test_mapping_interface():
    t = blowdown_table(4)
    assert len(t) == len(enumerate_rays(4)) == 48
    assert [tuple(r) for r in t] == brute_rays(4)
    assert set(t.keys()) == set(enumerate_rays(4).rays)
    assert (1, 1) in t
    assert (5, 1) not in t
    assert (2, 2) not in t
    with pytest.raises(KeyError):
        t[(5, 1)]
    assert t.get((5, 1), -1) == -1
    assert sorted(t.values()) == sorted(int(k) for k in t.k_values)


def test_table_is_cached_and_frozen():
    t = blowdown_table(9)
    assert t is blowdown_table(9)
    with pytest.raises(ValueError):
        t.k_values[0] = 5


def test_count_and_ratio_are_exact():
    t = blowdown_table(5)
    assert ratio_geq(5, 2) == Fraction(t.count_geq(2), 80)
    assert t.ratio_geq(1) == 1
    brute = sum(1 for ray in brute_rays(5) if brute_blowdown(5, ray) >= 2)
    assert t.count_geq(2) == brute
    for k in range(1, 12):
        assert t.count_geq(k) >= t.count_geq(k + 1)
    with pytest.raises(ValidationError):
        t.count_geq(0)
    with pytest.raises(ValidationError):
        ratio_geq(5, -1)


def test_epsilon_matches_brute_force():
    for h in [1, 2, 3, 5, 11, 24]:
        assert epsilon_of(h) == pytest.approx(brute_epsilon(h), abs=1e-12)
    assert epsilon_of(1) == pytest.approx(1.0)
    assert epsilon_of(5) == pytest.approx(0.2)


def test_epsilon_shrinks_with_height():
    # measured gap bound: positive, and no larger than 2/h in practice
    for h in [1, 2, 4, 8, 16, 32, 64]:
        eps = epsilon_of(h)
        assert 0.0 < eps <= 2.0 / h + 1e-12


@pytest.mark.parametrize("h", [20, 60])
def test_band_containment(h):
    t = blowdown_table(h)
    eps = t.epsilon
    c, kv = t.coords, t.k_values
    norms = np.maximum(np.abs(c[:, 0]), np.abs(c[:, 1]))
    assert bool((kv * norms <= 2 * h).all())
    for k in sorted(set(int(v) for v in kv)):
        low, high = band_bounds(h, k, eps)
        sel = kv == k
        assert bool((norms[sel] <= float(high)).all())
        # asymptotic lower bound, with one unit of integer slack
        assert bool((norms[sel] >= low - 1.0).all()), (h, k)


def test_band_bounds_values_and_validation():
    low, high = band_bounds(10, 2, 0.5)
    assert high == Fraction(20, 2) == 10
    assert low == pytest.approx((2 - 0.5) / 4 * 10)
    with pytest.raises(ValidationError):
        band_bounds(10, 0, 0.1)
    with pytest.raises(ValidationError):
        band_bounds(10, 2, -0.1)
    with pytest.raises(ValidationError):
        band_bounds(10, 2, 2.0)


def test_triangular_and_conjectured_limits():
    assert [triangular(k) for k in range(1, 8)] == [1, 3, 6, 10, 15, 21, 28]
    assert conjectured_ratio(2) == Fraction(2, 3)
    assert conjectured_ratio(7) == Fraction(1, 14)
    with pytest.raises(ValidationError):
        conjectured_ratio(1)
    with pytest.raises(ValidationError):
        triangular(0)


def test_smooth_partners_frozen_cases():
    got = {tuple(v) for v in smooth_partners(1, (1, 0))}
    assert got == {(1, 1), (0, 1), (-1, 1), (-1, -1), (0, -1), (1, -1)}
    assert len(smooth_partners(5, (1, 1))) == 20


@pytest.mark.parametrize("h,ray", [(6, (1, 0)), (6, (2, 1)), (9, (-4, 3)), (9, (1, 1))])
def test_smooth_partners_match_direct_filter(h, ray):
    got = {tuple(v) for v in smooth_partners(h, ray)}
    want = {p for p in brute_rays(h) if abs(ray[0] * p[1] - ray[1] * p[0]) == 1}
    assert got == want
    cap = 2 * h // sup_norm(ray) + 1
    assert len(got) <= 2 * cap


def test_smooth_partners_accepts_rays_above_height():
    # the pivot ray itself need not lie in the universe
    got = smooth_partners(2, (5, 2))
    assert {tuple(v) for v in got} == {p for p in brute_rays(2)
                                       if abs(5 * p[1] - 2 * p[0]) == 1}
    with pytest.raises(ValidationError):
        smooth_partners(2, (4, 2))


def test_tampered_table_raises_invariant_error():
    from randfan.blowdown import BlowdownTable

    u = enumerate_rays(2)
    bogus = np.full(len(u), 9, dtype=np.int64)
    with pytest.raises(InvariantError):
        BlowdownTable(u, bogus, 0.5)


def test_neighbors_march_along_lines_parallel_to_the_ray():
    # growing the height shifts each neighbor by a whole multiple of the ray
    for h, taller in [(1, 2), (1, 5), (2, 3), (3, 9), (5, 8)]:
        for ray in enumerate_rays(h):
            x, y = ray
            for (ox, oy), (nx, ny) in zip(neighbors(h, ray), neighbors(taller, ray)):
                dx, dy = nx - ox, ny - oy
                steps = dx // x if x != 0 else dy // y
                assert steps >= 0
                assert (dx, dy) == (steps * x, steps * y)


@pytest.mark.parametrize("h", [100, 500])
def test_small_norm_rays_carry_high_indices(h):
    t = blowdown_table(h)
    norms = np.abs(t.coords).max(axis=1)
    n_h = len(t)
    for k in [2, 3, 5]:
        inner = norms < 2 * h / (k + 2) - 1
        assert int(t.k_values[inner].min()) >= k
        assert int(inner.sum()) / n_h > 0.8 * (2 / (k + 2)) ** 2


def test_epsilon_landmarks():
    assert epsilon_of(500) < 0.05
    assert epsilon_of(50) < epsilon_of(10) < epsilon_of(2)
