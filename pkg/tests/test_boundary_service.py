import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import iv

from models.domain import DomainSpec, WeightSpec
from models.errors import DomainError, EvaluationError, InvalidWeightError, ShapeError
from models.functions import BoundaryFunction, LaurentSeries


def cos_samples(domain: DomainSpec) -> np.ndarray:
    return np.cos(domain.nodes())


class TestSamplesToCoeffs:
    def test_constant_has_only_zero_mode(self, boundary_service):
        domain = DomainSpec.disk(8)
        f = boundary_service.samples_to_coeffs(np.ones(domain.n_nodes), domain)
        expected = np.zeros(2 * 8 + 1)
        expected[8] = 1
        assert_allclose(f.coefficients[0], expected, atol=1e-14)

    def test_pure_mode(self, boundary_service):
        domain = DomainSpec.disk(8)
        f = boundary_service.samples_to_coeffs(np.exp(1j * domain.nodes()), domain)
        assert f.coefficient(1) == pytest.approx(1, abs=1e-14)
        assert np.sum(np.abs(f.coefficients)) == pytest.approx(1, abs=1e-12)

    def test_exp_cos_gives_bessel_coefficients(self, boundary_service):
        domain = DomainSpec.disk(16)
        f = boundary_service.samples_to_coeffs(np.exp(cos_samples(domain)), domain)
        for k in range(-6, 7):
            assert f.coefficient(k) == pytest.approx(iv(abs(k), 1.0), abs=1e-13)

    def test_round_trip_on_grid(self, boundary_service):
        domain = DomainSpec.annulus(0.5, 8)
        rng = np.random.default_rng(3)
        f = BoundaryFunction(rng.standard_normal((2, 17)) + 1j * rng.standard_normal((2, 17)))
        back = boundary_service.samples_to_coeffs(boundary_service.coeffs_to_samples(f, domain), domain)
        assert_allclose(back.coefficients, f.coefficients, atol=1e-12)

    def test_length_mismatch(self, boundary_service):
        domain = DomainSpec.disk(8)
        with pytest.raises(ShapeError):
            boundary_service.samples_to_coeffs(np.ones(domain.n_nodes - 1), domain)


class TestRepresentingMeasure:
    def test_disk_mean_value(self, boundary_service):
        domain = DomainSpec.disk(8)
        f = BoundaryFunction.from_modes({0: 3, 1: 2}, 1, 8)
        assert boundary_service.pair_with_m(f, domain) == pytest.approx(3)

    def test_annulus_pairs_z_to_basepoint(self, boundary_service):
        domain = DomainSpec.annulus(0.5, 16)
        z = boundary_service.laurent_boundary(LaurentSeries.from_modes({1: 1}), domain)
        assert boundary_service.pair_with_m(z, domain) == pytest.approx(math.sqrt(0.5), abs=1e-12)
        assert boundary_service.pair_with_m(z, domain) == pytest.approx(0.70711, abs=1e-5)

    def test_annulus_pairs_inverse_z(self, boundary_service):
        domain = DomainSpec.annulus(0.5, 16)
        inverse = boundary_service.laurent_boundary(LaurentSeries.from_modes({-1: 1}), domain)
        assert boundary_service.pair_with_m(inverse, domain) == pytest.approx(1.41421, abs=1e-5)

    def test_density_is_probability_measure(self, boundary_service):
        domain = DomainSpec.annulus(0.3, 16)
        density = boundary_service.representing_density(domain)
        assert density.shape == (2, domain.n_nodes)
        assert np.min(density) > 0
        assert np.sum(density) == pytest.approx(1, abs=1e-12)

    def test_quadrature_matches_mode_pairing(self, boundary_service):
        domain = DomainSpec.annulus(0.5, 16)
        f = boundary_service.laurent_boundary(LaurentSeries.from_modes({2: 1, -3: 0.5, 0: 1}), domain)
        quadrature = boundary_service.pair_samples(f.samples(domain.n_nodes), domain)
        assert quadrature == pytest.approx(boundary_service.pair_with_m(f, domain), abs=1e-12)

    def test_nu_integrates_log_modulus_to_one(self, boundary_service):
        domain = DomainSpec.annulus(0.4, 16)
        nu = boundary_service.nu_basis(domain)[0]
        log_modulus = np.array([np.zeros(domain.n_nodes), np.full(domain.n_nodes, np.log(0.4))])
        assert np.sum(nu * log_modulus) == pytest.approx(1.0)

    def test_annulus_hardy_space_orthogonal_to_conjugates(self, boundary_service):
        domain = DomainSpec.annulus(0.5, 16)
        rng = np.random.default_rng(6)
        modes = range(-3, 4)
        for _ in range(5):
            f = LaurentSeries.from_modes({k: complex(*rng.standard_normal(2)) for k in modes})
            h = LaurentSeries.from_modes({k: complex(*rng.standard_normal(2)) for k in modes})
            # g = h − h(x0) лежит в H²₀
            g = h - LaurentSeries.from_modes({0: boundary_service.evaluate_analytic(h, domain.basepoint, 0, domain)})
            conj_g = boundary_service.laurent_boundary(g, domain).conj()
            pairing = boundary_service.weighted_inner_product(
                boundary_service.laurent_boundary(f, domain), conj_g, WeightSpec.unit(), domain
            )
            assert abs(pairing) < 1e-10


class TestWeightedInnerProduct:
    @pytest.mark.parametrize("k", [0, 1, 5])
    def test_monomials_are_orthonormal(self, boundary_service, k):
        domain = DomainSpec.disk(8)
        f = BoundaryFunction.from_modes({k: 1}, 1, 8)
        assert boundary_service.weighted_inner_product(f, f, WeightSpec.unit(), domain) == pytest.approx(1)

    def test_distinct_monomials_are_orthogonal(self, boundary_service):
        domain = DomainSpec.disk(8)
        f = BoundaryFunction.from_modes({2: 1}, 1, 8)
        g = BoundaryFunction.from_modes({3: 1}, 1, 8)
        assert abs(boundary_service.weighted_inner_product(f, g, WeightSpec.unit(), domain)) < 1e-14

    def test_annulus_weight_scales_inner_circle(self, boundary_service):
        domain = DomainSpec.annulus(0.5, 16)
        one = BoundaryFunction.constant(1, 2, 1)
        density = boundary_service.representing_density(domain)
        expected = np.sum(density[0]) + 0.5 * np.sum(density[1])
        value = boundary_service.weighted_inner_product(one, one, WeightSpec.z_power(1), domain)
        assert value == pytest.approx(expected, abs=1e-14)

    def test_complex_weight_rejected(self, boundary_service):
        domain = DomainSpec.disk(8)
        one = BoundaryFunction.constant(1, 1, 1)
        weight = BoundaryFunction.from_modes({0: 2, 1: 0.5j}, 1, 1)
        assert not weight.real_valued
        with pytest.raises(InvalidWeightError):
            boundary_service.weighted_inner_product(one, one, weight, domain)

    def test_sigma_counts_fixed_functions(self):
        assert DomainSpec.disk(8).Z == ()
        assert DomainSpec.disk(8).sigma == 0
        assert DomainSpec.annulus(0.5, 8).Z == ("z",)
        assert DomainSpec.annulus(0.5, 8).sigma == 1

    def test_nonpositive_weight_rejected(self, boundary_service):
        domain = DomainSpec.disk(8)
        one = BoundaryFunction.constant(1, 1, 1)
        weight = BoundaryFunction.from_modes({0: 0.5, 1: 0.5, -1: 0.5}, 1, 1)
        with pytest.raises(InvalidWeightError):
            boundary_service.weighted_inner_product(one, one, weight, domain)


class TestLogExp:
    def test_log_of_one_is_zero(self, boundary_service):
        domain = DomainSpec.disk(8)
        log = boundary_service.boundary_log(BoundaryFunction.constant(1, 1, 8), domain)
        assert_allclose(log.coefficients, 0, atol=1e-15)

    def test_exp_cos_gives_bessel_coefficients(self, boundary_service):
        domain = DomainSpec.disk(16)
        cos = BoundaryFunction.from_modes({1: 0.5, -1: 0.5}, 1, 16)
        f = boundary_service.boundary_exp(cos, domain)
        assert_allclose([f.coefficient(k) for k in range(5)], iv(np.arange(5), 1.0), atol=1e-13)

    def test_log_exp_round_trip(self, boundary_service):
        domain = DomainSpec.disk(64)
        cos = BoundaryFunction.from_modes({1: 0.5, -1: 0.5}, 1, 64)
        back = boundary_service.boundary_log(boundary_service.boundary_exp(cos, domain), domain)
        assert_allclose(back.coefficients, cos.coefficients, atol=1e-10)

    def test_log_of_nonpositive_rejected(self, boundary_service):
        domain = DomainSpec.disk(8)
        with pytest.raises(DomainError):
            boundary_service.boundary_log(BoundaryFunction.from_modes({1: 1, -1: 1}, 1, 8), domain)


class TestEvaluateAnalytic:
    def test_derivative_of_square(self, boundary_service):
        f = LaurentSeries.from_modes({2: 1})
        assert boundary_service.evaluate_analytic(f, 0.3, 1) == pytest.approx(0.6)

    def test_exponential_series(self, boundary_service):
        f = LaurentSeries.from_taylor([1 / math.factorial(k) for k in range(20)])
        assert boundary_service.evaluate_analytic(f, 0.5) == pytest.approx(math.exp(0.5), abs=1e-14)

    def test_geometric_series_second_derivative(self, boundary_service):
        f = LaurentSeries.from_taylor(0.4 ** np.arange(80))
        assert boundary_service.evaluate_analytic(f, 0.5, 2) == pytest.approx(0.625, abs=1e-12)

    def test_taylor_series_at_origin(self, boundary_service):
        f = LaurentSeries.from_modes({0: 3, 2: 1})
        assert f.exponents[0] < 0
        assert boundary_service.evaluate_analytic(f, 0) == pytest.approx(3)
        assert boundary_service.evaluate_analytic(f, 0, 1) == 0
        assert boundary_service.evaluate_analytic(f, 0, 2) == pytest.approx(2)

    def test_negative_power_at_origin(self, boundary_service):
        with pytest.raises(EvaluationError):
            boundary_service.evaluate_analytic(LaurentSeries.from_modes({-1: 1, 1: 1}), 0)

    def test_point_outside_disk(self, boundary_service):
        with pytest.raises(EvaluationError):
            boundary_service.evaluate_analytic(LaurentSeries.from_modes({1: 1}), 1.2)

    def test_laurent_series_inside_hole(self, boundary_service):
        domain = DomainSpec.annulus(0.5, 8)
        with pytest.raises(EvaluationError):
            boundary_service.evaluate_analytic(LaurentSeries.from_modes({-1: 1}), 0.2, 0, domain)


class TestSeries:
    def test_reciprocal_series_is_geometric(self, boundary_service):
        domain = DomainSpec.disk(16)
        psi = LaurentSeries.from_modes({0: 2, 2: 1})
        inverse = boundary_service.reciprocal_series(psi, domain, 64)
        expected = np.zeros(65, dtype=complex)
        expected[0::2] = 0.5 * (-0.5) ** np.arange(33)
        assert_allclose(inverse.taylor(), expected, atol=1e-12)

    def test_reciprocal_of_function_with_interior_zero(self, boundary_service):
        domain = DomainSpec.disk(16)
        with pytest.raises(DomainError):
            boundary_service.reciprocal_series(LaurentSeries.from_modes({1: 1, 0: 0.5}), domain, 32)
