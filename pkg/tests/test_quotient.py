import math

import numpy as np
import pytest

from pinchcert.errors import (
    ConjugationFailure,
    DimensionMismatch,
    InvalidSpec,
)
from pinchcert.exactalg import IntMatrix, PolySpec, build_polynomial, companion_matrix
from pinchcert.quotient import (
    DiameterBound,
    LatticeData,
    _int_inverse,
    conjugator,
    diameter_upper,
    fiber_diameter_upper,
    fiber_gs_bound,
    lattice_invariance_check,
    sampled_diameter,
)
from pinchcert.solvgroup import assemble_generator, exp_tA_closed
from pinchcert.spectra import Spectrum, roots_closed_form


def make_case(n):
    spec = PolySpec.for_dimension(n)
    spectrum = roots_closed_form(spec)
    t_mat = companion_matrix(build_polynomial(spec))
    a = assemble_generator(spectrum)
    return t_mat, spectrum, a


def flat_spectrum(n):
    return Spectrum(n=n, pairs=(), reals=(0.0,) * n, lambda_max=0.0)


class TestConjugator:
    def test_identity_holonomy_gives_identity_conjugator(self):
        lat = conjugator(IntMatrix.identity(3), flat_spectrum(3))
        assert np.array_equal(lat.P, np.eye(3))
        assert lat.residual == 0.0
        assert lat.cond == 1.0
        assert lat.h == 1

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 8, 11])
    def test_intertwines_holonomy_and_companion(self, n):
        t_mat, spectrum, a = make_case(n)
        lat = conjugator(t_mat, spectrum)
        assert lat.residual < 1e-8
        exp_a = exp_tA_closed(a, 1.0)
        tf = np.array(t_mat.entries, dtype=float)
        defect = np.linalg.norm(exp_a @ lat.P - lat.P @ tf) / np.linalg.norm(lat.P)
        assert defect < 1e-8
        assert math.isfinite(lat.cond)

    @pytest.mark.parametrize("n", [2, 4, 5, 7])
    def test_lattice_is_invariant_under_holonomy(self, n):
        t_mat, spectrum, a = make_case(n)
        lat = conjugator(t_mat, spectrum)
        scale = float(np.max(np.abs(lat.P)))
        assert lattice_invariance_check(lat, a) < 1e-8 * scale

    def test_perturbed_conjugator_breaks_invariance(self):
        t_mat, spectrum, a = make_case(4)
        lat = conjugator(t_mat, spectrum)
        bad = lat.P.copy()
        bad[0, 0] += 1e-3
        broken = LatticeData(T=lat.T, P=bad, h=lat.h, residual=lat.residual, cond=lat.cond)
        assert lattice_invariance_check(broken, a) > 1e-4

    def test_spectrum_dimension_mismatch_raises(self):
        t_mat, _, _ = make_case(4)
        with pytest.raises(DimensionMismatch):
            conjugator(t_mat, roots_closed_form(PolySpec.for_dimension(6)))

    def test_wrong_spectrum_raises(self):
        t_mat, _, _ = make_case(4)
        wrong = Spectrum(
            n=4, pairs=((0.3, 1.0), (-0.3, 2.0)), reals=(), lambda_max=0.3
        )
        with pytest.raises(ConjugationFailure):
            conjugator(t_mat, wrong)

    def test_with_h_validates(self):
        lat = conjugator(IntMatrix.identity(2), flat_spectrum(2))
        assert lat.with_h(8).h == 8
        with pytest.raises(InvalidSpec):
            lat.with_h(0)
        with pytest.raises(InvalidSpec):
            lat.with_h(2.0)


class TestFiberBound:
    def test_zero_generator_control_value(self):
        # cubic lattice (1/h) Z^n measured flat: bound is sqrt(n) / (2h)
        for n, h in [(2, 1), (3, 4), (5, 8)]:
            lat = conjugator(IntMatrix.identity(n), flat_spectrum(n)).with_h(h)
            a = assemble_generator(flat_spectrum(n))
            got = fiber_diameter_upper(lat, a)
            assert got == pytest.approx(math.sqrt(n) / (2 * h), abs=1e-15)

    @pytest.mark.parametrize("n", [2, 5])
    def test_halving_h_halves_the_bound(self, n):
        t_mat, spectrum, a = make_case(n)
        lat = conjugator(t_mat, spectrum)
        coarse = fiber_diameter_upper(lat.with_h(2), a)
        fine = fiber_diameter_upper(lat.with_h(4), a)
        assert fine == pytest.approx(coarse / 2, rel=1e-12)

    @pytest.mark.parametrize("n", [2, 5])
    @pytest.mark.parametrize("t", [0.0, 0.31, 0.77])
    def test_shifting_one_period_twists_by_holonomy(self, n, t):
        t_mat, spectrum, a = make_case(n)
        lat = conjugator(t_mat, spectrum)
        shifted = fiber_gs_bound(lat, a, t + 1.0, twists=1)
        assert shifted == pytest.approx(fiber_gs_bound(lat, a, t), abs=1e-9)

    def test_grid_sup_is_below_final_bound(self):
        t_mat, spectrum, a = make_case(4)
        lat = conjugator(t_mat, spectrum)
        final = fiber_diameter_upper(lat, a, t_grid=32)
        worst = max(fiber_gs_bound(lat, a, i / 32) for i in range(32))
        assert final > worst

    def test_refining_grid_stays_within_coarse_slack(self):
        t_mat, spectrum, a = make_case(4)
        lat = conjugator(t_mat, spectrum)
        coarse = fiber_diameter_upper(lat, a, t_grid=16)
        fine = fiber_diameter_upper(lat, a, t_grid=128)
        assert fine <= coarse * (1 + 1e-12)

    def test_rejects_tiny_grid(self):
        t_mat, spectrum, a = make_case(2)
        lat = conjugator(t_mat, spectrum)
        with pytest.raises(InvalidSpec):
            fiber_diameter_upper(lat, a, t_grid=8)

    def test_diameter_upper_combines_base_and_fiber(self):
        t_mat, spectrum, a = make_case(4)
        lat = conjugator(t_mat, spectrum).with_h(4)
        bound = diameter_upper(lat, a)
        assert isinstance(bound, DiameterBound)
        assert bound.base_diam == 0.5
        assert bound.upper == pytest.approx(0.5 + bound.fiber_sup)
        assert bound.upper_paper == pytest.approx(1.0 + bound.fiber_sup)
        assert bound.sampled is None
        keys = set(bound.to_json_dict())
        assert keys == {"base_diam", "fiber_sup", "upper", "upper_paper", "sampled"}


class TestIntInverse:
    @pytest.mark.parametrize("n", [2, 3, 5, 7])
    def test_inverts_companion_matrices(self, n):
        t_mat = companion_matrix(build_polynomial(PolySpec.for_dimension(n)))
        inv = _int_inverse(t_mat)
        assert inv @ t_mat == IntMatrix.identity(n)
        assert t_mat @ inv == IntMatrix.identity(n)

    def test_rejects_non_unimodular(self):
        with pytest.raises(InvalidSpec):
            _int_inverse(IntMatrix.from_rows([[2, 0], [0, 1]]))

    def test_one_by_one(self):
        assert _int_inverse(IntMatrix.from_rows([[-1]])) == IntMatrix.from_rows([[-1]])


class TestSampledDiameter:
    def test_flat_square_torus(self):
        # fiber circle x base circle, both length 1: diameter sqrt(2)/2,
        # attained at the corner, which the diagonal edges hit exactly
        lat = conjugator(IntMatrix.identity(1), flat_spectrum(1))
        a = assemble_generator(flat_spectrum(1))
        got = sampled_diameter(lat, a, grid=32)
        assert got == pytest.approx(math.sqrt(2) / 2, rel=1e-9)

    def test_flat_cubic_torus(self):
        lat = conjugator(IntMatrix.identity(2), flat_spectrum(2))
        a = assemble_generator(flat_spectrum(2))
        got = sampled_diameter(lat, a, grid=16)
        assert got == pytest.approx(math.sqrt(3) / 2, rel=1e-9)

    @pytest.mark.parametrize("n,grid", [(2, 16), (3, 8)])
    def test_sample_stays_below_analytic_bound(self, n, grid):
        t_mat, spectrum, a = make_case(n)
        lat = conjugator(t_mat, spectrum)
        bound = diameter_upper(lat, a)
        got = sampled_diameter(lat, a, grid=grid)
        assert got <= bound.upper + 1e-3

    def test_scaling_h_shrinks_sampled_estimate(self):
        t_mat, spectrum, a = make_case(2)
        lat = conjugator(t_mat, spectrum)
        whole = sampled_diameter(lat, a, grid=12)
        scaled = sampled_diameter(lat.with_h(4), a, grid=12)
        assert scaled < whole

    def test_rejects_large_fiber_and_tiny_grid(self):
        t_mat, spectrum, a = make_case(4)
        lat = conjugator(t_mat, spectrum)
        with pytest.raises(InvalidSpec):
            sampled_diameter(lat, a)
        lat2 = conjugator(IntMatrix.identity(1), flat_spectrum(1))
        a2 = assemble_generator(flat_spectrum(1))
        with pytest.raises(InvalidSpec):
            sampled_diameter(lat2, a2, grid=6)
