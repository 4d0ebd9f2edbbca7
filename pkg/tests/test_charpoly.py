import numpy as np
import pytest

from ruinwalk.charpoly import (
    aberth_roots,
    build_characteristic,
    cluster_multiplicities,
    companion_roots,
    deflate_at_one,
    find_unit_disk_roots,
    reduce_support,
)
from ruinwalk.distributions import FinitePmf, Geometric
from ruinwalk.errors import AmbiguousCluster, ReductionError, RootCountMismatch

P = 101.0 / 300.0


def alpha_closed_form(p: float) -> float:
    return (p - np.sqrt(4 * p - 3 * p * p)) / (2 * (1 - p))


class TestReduceSupport:
    def test_identity_when_mass_at_zero(self, geometric):
        d, k, m = reduce_support(geometric, 3)
        assert (d, k, m) == (geometric, 3, 0)

    def test_shift_by_one(self):
        d, k, m = reduce_support(FinitePmf((0.0, 0.6, 0.4)), 2)
        assert k == 1 and m == 1
        assert d.pmf(0) == 0.6 and d.pmf(1) == 0.4

    def test_shift_by_two(self):
        d, k, m = reduce_support(FinitePmf((0.0, 0.0, 0.9, 0.1)), 3)
        assert k == 1 and m == 2
        assert (d.pmf(0), d.pmf(1)) == (0.9, 0.1)

    def test_floor_reaching_premium(self):
        with pytest.raises(ReductionError):
            reduce_support(FinitePmf((0.0, 0.0, 0.5, 0.5)), 2)


class TestBuildCharacteristic:
    def test_geometric_kappa2_coeffs(self):
        # expand s^2 (1 - (1-p)s) - p by hand
        char = build_characteristic(Geometric(0.4), 2)
        np.testing.assert_allclose(char.coeffs, [-0.4, 0.0, 1.0, -0.6], atol=0)

    def test_finite_example(self, double_root_dist):
        char = build_characteristic(double_root_dist, 3)
        np.testing.assert_allclose(char.coeffs, [-0.128, -0.576, -0.264, 1.0 - 0.032], atol=1e-15)

    def test_bernoulli_kappa1_linear(self):
        char = build_characteristic(FinitePmf((0.7, 0.3)), 1)
        # (1-p)(s-1) with p=0.3
        np.testing.assert_allclose(char.coeffs, [-0.7, 0.7], atol=1e-15)

    def test_one_is_always_a_root(self, geometric, double_root_dist):
        for dist, k in ((geometric, 2), (geometric, 5), (double_root_dist, 3)):
            char = build_characteristic(dist, k)
            assert abs(char.eval(1.0)) <= 1e-10 * np.abs(char.coeffs).sum()

    def test_requires_mass_at_zero(self):
        with pytest.raises(ValueError):
            build_characteristic(FinitePmf((0.0, 1.0)), 2)


class TestDeflation:
    def test_quotient_times_factor_restores(self, geometric):
        char = build_characteristic(geometric, 3)
        quot = deflate_at_one(char.coeffs)
        restored = np.polynomial.polynomial.polymul(quot, [-1.0, 1.0])
        np.testing.assert_allclose(restored, char.coeffs, atol=1e-14)


class TestAberth:
    def test_known_cubic(self):
        # (s-2)(s+3)(s-0.5), lowest first
        coeffs = np.polynomial.polynomial.polyfromroots([2.0, -3.0, 0.5])
        found = np.sort_complex(aberth_roots(coeffs))
        np.testing.assert_allclose(found, np.sort_complex(np.array([-3.0, 0.5, 2.0])), atol=1e-12)

    def test_complex_pair(self):
        coeffs = np.polynomial.polynomial.polyfromroots([1j, -1j, 4.0])
        found = aberth_roots(coeffs.real)
        assert min(abs(found - 1j)) < 1e-12
        assert min(abs(found - 4.0)) < 1e-12

    def test_agrees_with_companion_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            deg = rng.integers(2, 7)
            coeffs = rng.normal(size=deg + 1)
            if abs(coeffs[-1]) < 0.2:
                coeffs[-1] = 0.5
            mine = aberth_roots(coeffs)
            ref = companion_roots(coeffs)
            assert mine.size == ref.size
            for z in mine:
                assert min(abs(ref - z)) < 1e-7


class TestCluster:
    def test_merges_conjugate_noise_pair(self):
        raw = [-0.3636 + 1e-9j, -0.36365 - 1e-9j]
        out = cluster_multiplicities(raw, tol_cluster=1e-3)
        assert len(out) == 1
        value, mult = out[0]
        assert mult == 2
        assert value.imag == 0.0

    def test_keeps_distant_conjugates(self):
        raw = [-0.36 + 0.52j, -0.36 - 0.52j]
        out = cluster_multiplicities(raw, tol_cluster=1e-6)
        assert [m for _, m in out] == [1, 1]

    def test_empty(self):
        assert cluster_multiplicities([], tol_cluster=1e-6) == []

    def test_ambiguous_cluster_detected(self):
        # separation sits inside the factor-10 window around the tolerance
        raw = [0.0 + 0.0j, 3e-6 + 0.0j]
        with pytest.raises(AmbiguousCluster):
            cluster_multiplicities(raw, tol_cluster=1e-6)


class TestFindUnitDiskRoots:
    def test_geometric_kappa2_closed_form(self, geometric):
        roots = find_unit_disk_roots(build_characteristic(geometric, 2))
        assert roots.total_multiplicity == 1
        alpha = roots.values[0]
        assert abs(alpha - alpha_closed_form(P)) < 1e-13
        assert -1 < alpha.real < 0 and alpha.imag == 0

    def test_geometric_kappa3_conjugate_pair(self, geometric):
        roots = find_unit_disk_roots(build_characteristic(geometric, 3))
        values = np.sort_complex(roots.values)
        target = np.sort_complex(np.array([-0.368094 + 0.522097j, -0.368094 - 0.522097j]))
        np.testing.assert_allclose(values, target, atol=1e-5)
        assert roots.total_multiplicity == 2
        # conjugate closure
        assert set(np.round(values, 12)) == set(np.round(values.conj(), 12))

    def test_double_root_recovered(self, double_root_dist):
        roots = find_unit_disk_roots(build_characteristic(double_root_dist, 3))
        assert len(roots.roots) == 1
        r = roots.roots[0]
        assert r.multiplicity == 2
        assert abs(r.value - (-4.0 / 11.0)) < 1e-10
        assert r.value.imag == 0.0

    def test_kappa1_no_roots(self, bernoulli):
        roots = find_unit_disk_roots(build_characteristic(bernoulli, 1))
        assert roots.roots == ()

    def test_boundary_root_even_support(self):
        # support {0, 2} at kappa=2 puts -1 on the unit circle
        roots = find_unit_disk_roots(build_characteristic(FinitePmf((0.5, 0.0, 0.5)), 2))
        assert roots.total_multiplicity == 1
        r = roots.roots[0]
        assert abs(r.value - (-1.0)) < 1e-12
        assert r.on_boundary

    def test_no_root_near_one(self, geometric, random_models):
        for dist, kappa, roots, _char in random_models[:50]:
            for r in roots.roots:
                assert abs(r.value - 1.0) > 1e-10

    def test_count_matches_multiplicity(self, random_models):
        for dist, kappa, roots, _char in random_models:
            assert roots.total_multiplicity == kappa - 1

    def test_residuals_small(self, random_models):
        for _dist, _kappa, roots, char in random_models[:80]:
            scale = np.abs(char.coeffs).sum()
            for r in roots.roots:
                assert abs(char.eval(r.value)) <= 1e-10 * scale

    def test_oracle_equivalence_low_degree(self, random_models):
        # independent eigenvalue route on the same deflated polynomial
        checked = 0
        for _dist, kappa, roots, char in random_models:
            if char.degree > 6 or not roots.roots:
                continue
            ref = companion_roots(deflate_at_one(char.coeffs))
            for r in roots.roots:
                assert min(abs(ref - r.value)) < 1e-8
            checked += 1
        assert checked >= 20

    def test_outside_roots_are_outside(self, random_models):
        for _dist, _kappa, roots, _char in random_models[:80]:
            for w in roots.outside:
                assert abs(w) > 1.0 + 1e-8

    def test_count_mismatch_reported(self, geometric):
        char = build_characteristic(geometric, 3)
        with pytest.raises(RootCountMismatch):
            # absurd boundary tolerance excludes the genuine interior roots
            find_unit_disk_roots(char, tol_boundary=-0.9)
