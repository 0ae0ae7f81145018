"""Slab systems, exact/Monte-Carlo/grid volumes, Eulerian identities."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hmt.errors import CapacityError, InvalidArgumentError, NumericError
from hmt.rng import mix
from hmt.volumes import (
    AffineForm,
    SlabSystem,
    build_system,
    eulerian_number,
    single_slab_system,
    slab_volume_integral,
    volume_exact,
    volume_grid,
    volume_mc,
)
from hmt.words import PartitionWord, enumerate_words

W = PartitionWord.from_string


def form(constant=0, **coeffs):
    return AffineForm.make(constant, {int(k[1:]): Fraction(v) for k, v in coeffs.items()})


class TestBuildSystem:
    def test_toeplitz_abab(self):
        s = build_system(W("abab"), "toeplitz")
        assert s.free_vars == (0, 1, 2)
        assert s.dependent_exprs[3] == form(x0=1, x1=-1, x2=1)
        assert s.dependent_exprs[4] == form(x0=1)
        assert s.closure is None

    def test_hankel_abab(self):
        s = build_system(W("abab"), "hankel")
        assert s.free_vars == (2, 3, 4)
        assert s.dependent_exprs[0] == form(x2=2, x4=-1)
        assert s.dependent_exprs[1] == form(x2=-1, x3=1, x4=1)
        # closure = expr(x_0) - x_4; it vanishes exactly on {x_4 = x_2}
        assert s.closure == form(x2=2, x4=-2)
        assert not s.closure.is_zero()

    def test_toeplitz_aa(self):
        s = build_system(W("aa"), "toeplitz")
        assert s.free_vars == (0, 1)
        assert s.dependent_exprs[2] == form(x0=1)

    @pytest.mark.parametrize("kind", ["toeplitz", "hankel"])
    @pytest.mark.parametrize("k", range(1, 5))
    def test_free_dependent_partition(self, kind, k):
        for w in enumerate_words(k):
            s = build_system(w, kind)
            dependents = set(s.dependent_exprs)
            assert len(s.free_vars) == k + 1
            assert dependents.isdisjoint(s.free_vars)
            assert dependents | set(s.free_vars) == set(range(2 * k + 1))
            free = set(s.free_vars)
            for expr in s.dependent_exprs.values():
                assert set(expr.variables()) <= free

    @pytest.mark.parametrize("k", range(1, 6))
    def test_toeplitz_closure_telescopes(self, k):
        # the last variable's expression collapses to x_0 for every word
        for w in enumerate_words(k):
            s = build_system(w, "toeplitz")
            assert s.dependent_exprs[2 * k] == form(x0=1), str(w)

    def test_rejects_unknown_kind(self):
        with pytest.raises(InvalidArgumentError):
            build_system(W("aa"), "hermite")


class TestVolumeExact:
    def test_toeplitz_abab_is_two_thirds(self):
        est = volume_exact(build_system(W("abab"), "toeplitz"))
        assert est.value == Fraction(2, 3)
        assert est.method == "exact" and est.stderr is None

    def test_hankel_abab_is_zero(self):
        est = volume_exact(build_system(W("abab"), "hankel"))
        assert est.value == 0

    def test_toeplitz_aabb_is_one(self):
        est = volume_exact(build_system(W("aabb"), "toeplitz"))
        assert est.value == 1
        grid = volume_grid(build_system(W("aabb"), "toeplitz"), 16)
        assert grid.value == 1.0

    def test_dimension_cap(self):
        with pytest.raises(CapacityError):
            volume_exact(single_slab_system([1] * 7))
        # explicit higher cap admits the same system
        assert volume_exact(single_slab_system([1] * 7), dim_cap=7).value > 0

    @pytest.mark.parametrize("k", range(1, 5))
    def test_toeplitz_volumes_positive(self, k):
        for w in enumerate_words(k):
            assert volume_exact(build_system(w, "toeplitz")).value > 0

    @pytest.mark.parametrize("kind", ["toeplitz", "hankel"])
    def test_volumes_in_unit_interval(self, kind):
        for w in enumerate_words(3):
            value = volume_exact(build_system(w, kind)).value
            assert 0 <= value <= 1


class TestVolumeMC:
    def test_toeplitz_abab_brackets_exact(self):
        est = volume_mc(build_system(W("abab"), "toeplitz"), 1_000_000, seed=20)
        assert abs(est.value - 2.0 / 3.0) <= 3 * est.stderr
        assert est.samples == 1_000_000

    def test_toeplitz_aa_exactly_one(self):
        est = volume_mc(build_system(W("aa"), "toeplitz"), 1000, seed=1)
        assert est.value == 1.0

    def test_hankel_abab_short_circuits(self):
        est = volume_mc(build_system(W("abab"), "hankel"), 10, seed=1)
        assert est.value == 0 and est.method == "exact"

    def test_deterministic(self):
        system = build_system(W("abab"), "toeplitz")
        a = volume_mc(system, 50_000, seed=33)
        b = volume_mc(system, 50_000, seed=33)
        assert a == b
        c = volume_mc(system, 50_000, seed=34)
        assert c.value != a.value

    def test_rejects_zero_samples(self):
        with pytest.raises(InvalidArgumentError):
            volume_mc(build_system(W("aa"), "toeplitz"), 0, seed=1)

    def test_coverage_over_seeds(self):
        # unbiasedness: the exact value lies inside 3 sigma nearly always
        system = build_system(W("abab"), "toeplitz")
        exact = 2.0 / 3.0
        hits = 0
        for i in range(100):
            est = volume_mc(system, 10_000, seed=mix(501, i))
            if abs(est.value - exact) <= 3 * est.stderr:
                hits += 1
        assert hits >= 95


class TestVolumeGrid:
    def test_toeplitz_abab_brackets(self):
        est = volume_grid(build_system(W("abab"), "toeplitz"), 64)
        assert abs(est.value - 2.0 / 3.0) <= 0.02

    def test_toeplitz_aa_exact_one(self):
        assert volume_grid(build_system(W("aa"), "toeplitz"), 4).value == 1.0

    def test_toeplitz_aabb_exact_one(self):
        assert volume_grid(build_system(W("aabb"), "toeplitz"), 32).value == 1.0

    def test_error_shrinks_with_resolution(self):
        system = build_system(W("abab"), "toeplitz")
        exact = 2.0 / 3.0
        err8 = abs(volume_grid(system, 8).value - exact)
        err64 = abs(volume_grid(system, 64).value - exact)
        assert err64 <= err8 + 1e-12

    def test_budget(self):
        with pytest.raises(CapacityError):
            volume_grid(build_system(W("abcabc"), "toeplitz"), 100, budget=10_000)


class TestEulerian:
    def test_a32_is_four(self):
        assert eulerian_number(3, 2) == 4

    @pytest.mark.parametrize("n", range(1, 9))
    def test_first_column_ones(self, n):
        assert eulerian_number(n, 1) == 1

    @pytest.mark.parametrize("n", range(1, 8))
    def test_row_sums_factorial(self, n):
        assert sum(eulerian_number(n, m) for m in range(1, n + 1)) == math.factorial(n)

    def test_out_of_range_zero(self):
        assert eulerian_number(4, 0) == 0
        assert eulerian_number(4, 5) == 0
        assert eulerian_number(4, -1) == 0

    @pytest.mark.parametrize("n", range(1, 8))
    def test_symmetry(self, n):
        for m in range(1, n + 1):
            assert eulerian_number(n, m) == eulerian_number(n, n + 1 - m)

    def test_rejects_bad_n(self):
        with pytest.raises(InvalidArgumentError):
            eulerian_number(0, 1)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_single_slab_volume_identity(self, n):
        # one +/-1 slab with n-m negative signs carves out A(n, m)/n!
        for m in range(1, n + 1):
            signs = [1] * m + [-1] * (n - m)
            est = volume_exact(single_slab_system(signs))
            assert est.value == Fraction(eulerian_number(n, m), math.factorial(n))

    def test_sign_placement_irrelevant(self):
        a = volume_exact(single_slab_system([1, -1, 1])).value
        b = volume_exact(single_slab_system([1, 1, -1])).value
        assert a == b == Fraction(4, 6)


class TestSlabIntegral:
    def test_3_2_matches_two_thirds(self):
        assert abs(slab_volume_integral(3, 2) - 4.0 / 6.0) < 1e-6

    def test_1_1_is_one(self):
        assert abs(slab_volume_integral(1, 1) - 1.0) < 1e-6

    def test_5_3_matches_recurrence(self):
        want = eulerian_number(5, 3) / math.factorial(5)
        assert abs(slab_volume_integral(5, 3) - want) < 1e-6

    @pytest.mark.parametrize("n", range(1, 7))
    def test_matches_recurrence_all(self, n):
        for m in range(1, n + 1):
            want = eulerian_number(n, m) / math.factorial(n)
            assert abs(slab_volume_integral(n, m) - want) < 1e-6, (n, m)

    def test_rejects_bad_arguments(self):
        with pytest.raises(InvalidArgumentError):
            slab_volume_integral(3, 0)
        with pytest.raises(InvalidArgumentError):
            slab_volume_integral(3, 4)

    def test_unreachable_tolerance(self):
        with pytest.raises(NumericError, match="achievable tolerance"):
            slab_volume_integral(1, 1, tol=1e-12, max_panels=1000)


def _random_system(draw):
    d = draw(st.integers(min_value=1, max_value=3))
    n_forms = draw(st.integers(min_value=1, max_value=3))
    forms = {}
    for i in range(n_forms):
        coeffs = {
            j: Fraction(draw(st.integers(min_value=-2, max_value=2)))
            for j in range(d)
        }
        constant = Fraction(draw(st.integers(min_value=-2, max_value=2)), 2)
        forms[d + i] = AffineForm.make(constant, coeffs)
    return SlabSystem("slab", tuple(range(d)), forms, None)


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.data())
def test_exact_volume_cross_checked_by_mc_and_grid(data):
    system = _random_system(data.draw)
    exact = volume_exact(system)
    assert 0 <= exact.value <= 1
    mc = volume_mc(system, 40_000, seed=mix(7, data.draw(st.integers(0, 10**6))))
    tol = 4 * (mc.stderr or 0.0) + 0.01
    assert abs(float(exact.value) - mc.value) <= tol
    grid = volume_grid(system, 24)
    assert abs(float(exact.value) - grid.value) <= 0.1
