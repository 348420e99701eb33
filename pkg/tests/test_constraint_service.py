import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from models.chain import DeltaPoint, DerivationConstraint, GamelinChain, TwoPointConstraint
from models.domain import DomainSpec, WeightSpec
from models.errors import (
    ChainAdmissibilityError,
    ConfigError,
    DeltaArithmeticError,
    DomainError,
    ShapeError,
)
from models.functions import LaurentSeries

TWO_POINT = GamelinChain((TwoPointConstraint(0.3, -0.3),))
NEIL = GamelinChain((DerivationConstraint(0, 1),))


def exp_taylor(scale: float = 1.0, terms: int = 30) -> LaurentSeries:
    return LaurentSeries.from_taylor([scale ** k / math.factorial(k) for k in range(terms)])


class TestDeltaArithmetic:
    def test_two_point_product(self, constraint_service):
        result = constraint_service.delta_product(
            DeltaPoint.from_values([1]), DeltaPoint.from_values([1]), TWO_POINT
        )
        assert result.values()[0] == pytest.approx(1)

    def test_derivation_product_is_harmonic_sum(self, constraint_service):
        result = constraint_service.delta_product(
            DeltaPoint.from_values([2]), DeltaPoint.from_values([2]), NEIL
        )
        assert result.values()[0] == pytest.approx(1)

    def test_derivation_product_with_infinity(self, constraint_service):
        result = constraint_service.delta_product(
            DeltaPoint.from_values(["inf"]), DeltaPoint.from_values([3]), NEIL
        )
        assert result.values()[0] == pytest.approx(3)

    def test_zero_times_infinity_is_undefined(self, constraint_service):
        with pytest.raises(DeltaArithmeticError):
            constraint_service.delta_product(
                DeltaPoint.from_values([0]), DeltaPoint.from_values(["inf"]), TWO_POINT
            )

    def test_derivation_zero_times_zero_is_undefined(self, constraint_service):
        with pytest.raises(DeltaArithmeticError):
            constraint_service.delta_product(
                DeltaPoint.from_values([0]), DeltaPoint.from_values([0]), NEIL
            )

    def test_inverse(self, constraint_service):
        assert constraint_service.delta_inverse(DeltaPoint.from_values([2]), TWO_POINT).values()[0] == pytest.approx(0.5)
        assert constraint_service.delta_inverse(DeltaPoint.from_values([5]), NEIL).values()[0] == pytest.approx(-5)
        assert constraint_service.delta_inverse(DeltaPoint.from_values(["inf"]), TWO_POINT).values()[0] == 0

    def test_gamma_identity(self, constraint_service, mixed_chain):
        assert constraint_service.delta_gamma(TWO_POINT).values() == (1,)
        assert constraint_service.delta_gamma(NEIL).is_infinite(0)
        identity = constraint_service.delta_gamma(mixed_chain)
        assert identity.values()[0] == 1
        assert identity.is_infinite(1)

    def test_product_with_inverse_is_identity(self, constraint_service, mixed_chain):
        rng = np.random.default_rng(7)
        identity = constraint_service.delta_gamma(mixed_chain)
        for _ in range(10):
            values = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            point = DeltaPoint.from_values(list(values))
            product = constraint_service.delta_product(
                point, constraint_service.delta_inverse(point, mixed_chain), mixed_chain
            )
            assert product.projectively_equal(identity)

    def test_product_is_commutative(self, constraint_service, mixed_chain):
        first = DeltaPoint.from_values([0.5 + 1j, 2])
        second = DeltaPoint.from_values(["inf", -1.5])
        assert constraint_service.delta_product(first, second, mixed_chain).projectively_equal(
            constraint_service.delta_product(second, first, mixed_chain)
        )

    def test_product_is_associative(self, constraint_service, mixed_chain):
        rng = np.random.default_rng(8)
        for _ in range(10):
            first, second, third = (
                DeltaPoint.from_values(list(rng.standard_normal(2) + 1j * rng.standard_normal(2)))
                for _ in range(3)
            )
            product = constraint_service.delta_product
            left = product(product(first, second, mixed_chain), third, mixed_chain)
            right = product(first, product(second, third, mixed_chain), mixed_chain)
            assert left.projectively_equal(right)

    @pytest.mark.parametrize("values", [[2, 3], [-0.5j, "inf"], ["inf", 0], [0, 1 + 1j]])
    def test_gamma_is_identity(self, constraint_service, mixed_chain, values):
        point = DeltaPoint.from_values(values)
        identity = constraint_service.delta_gamma(mixed_chain)
        assert constraint_service.delta_product(point, identity, mixed_chain).projectively_equal(point)
        assert constraint_service.delta_product(identity, point, mixed_chain).projectively_equal(point)

    def test_length_mismatch(self, constraint_service, mixed_chain):
        with pytest.raises(ShapeError):
            constraint_service.delta_inverse(DeltaPoint.from_values([1]), mixed_chain)


class TestGammaEval:
    def test_square_at_symmetric_points(self, constraint_service):
        chain = GamelinChain((TwoPointConstraint(0.2, -0.2),))
        values = constraint_service.gamma_eval(LaurentSeries.from_modes({2: 1}), chain)
        assert_allclose(values.entries, [0.04, 0.04], atol=1e-15)

    def test_square_at_neil_point(self, constraint_service):
        values = constraint_service.gamma_eval(LaurentSeries.from_modes({2: 1}), NEIL)
        assert_allclose(values.entries, [0, 0], atol=1e-15)

    def test_exponential_second_derivative(self, constraint_service):
        chain = GamelinChain((DerivationConstraint(0.1, 2),))
        values = constraint_service.gamma_eval(exp_taylor(), chain)
        assert_allclose(values.entries, [math.exp(0.1)] * 2, atol=1e-14)

    def test_linear_in_function(self, constraint_service, mixed_chain):
        rng = np.random.default_rng(12)
        f = LaurentSeries.from_taylor(rng.standard_normal(10) + 1j * rng.standard_normal(10))
        g = LaurentSeries.from_taylor(rng.standard_normal(6) + 1j * rng.standard_normal(6))
        a, b = 0.7 - 2j, -1.3
        combined = constraint_service.gamma_eval(f.scale(a) + g.scale(b), mixed_chain).entries
        expected = a * constraint_service.gamma_eval(f, mixed_chain).entries \
            + b * constraint_service.gamma_eval(g, mixed_chain).entries
        assert_allclose(combined, expected, atol=1e-13)


class TestConstraintResidual:
    def test_neil_member(self, constraint_service):
        f = LaurentSeries.from_modes({2: 1, 3: 1})
        assert constraint_service.constraint_residual(f, NEIL, DeltaPoint.from_values(["inf"])) == 0

    def test_constant_satisfies_two_point(self, constraint_service):
        f = LaurentSeries.from_taylor([1])
        assert constraint_service.constraint_residual(f, TWO_POINT, DeltaPoint.from_values([1])) == 0

    def test_ratio_of_values(self, constraint_service):
        f = LaurentSeries.from_taylor([1, 1])
        point = DeltaPoint.from_values([1.3 / 0.7])
        assert constraint_service.constraint_residual(f, TWO_POINT, point) < 1e-15

    def test_empty_chain(self, constraint_service, empty_chain):
        f = LaurentSeries.from_taylor([1, 2, 3])
        assert constraint_service.constraint_residual(f, empty_chain, DeltaPoint(())) == 0

    def test_quotient_lands_in_gamma_space(self, constraint_service, kernel_service, boundary_service, mixed_chain):
        domain = DomainSpec.disk(16)
        rng = np.random.default_rng(31)
        for _ in range(5):
            # |c1| + |c2| < 1, поэтому g = 2 + c1·z + c2·z² не обращается в нуль в замкнутом круге
            c1, c2 = 0.5 * np.exp(2j * np.pi * rng.uniform(size=2))
            g = LaurentSeries.from_taylor([2, c1, c2])
            evaluate = boundary_service.evaluate_analytic
            point = DeltaPoint.from_values([evaluate(g, 0.3) / evaluate(g, -0.3), 2 / c1])
            assert constraint_service.constraint_residual(g, mixed_chain, point) < 1e-12

            space = kernel_service.build_constrained_space(domain, WeightSpec.unit(), mixed_chain, point)
            coords = space.basis @ (rng.standard_normal(space.dimension) + 1j * rng.standard_normal(space.dimension))
            f = kernel_service.coords_to_series(coords, space.exponents, space.scales, domain.truncation)
            assert constraint_service.constraint_residual(f, mixed_chain, point) < 1e-10

            quotient = f * boundary_service.reciprocal_series(g, domain, 64)
            identity = constraint_service.delta_gamma(mixed_chain)
            assert constraint_service.constraint_residual(quotient, mixed_chain, identity) < 1e-7


class TestValidateChain:
    @pytest.fixture
    def disk(self):
        return DomainSpec.disk(16)

    def test_first_derivative_passes(self, constraint_service, disk):
        chain = GamelinChain((DerivationConstraint(0.2, 1),))
        assert constraint_service.validate_chain(chain, disk).passed

    def test_third_derivative_after_first_passes(self, constraint_service, disk):
        chain = GamelinChain((DerivationConstraint(0, 1), DerivationConstraint(0, 3)))
        report = constraint_service.validate_chain(chain, disk)
        assert report.passed
        assert [stage.passed for stage in report.stages] == [True, True]

    def test_second_derivative_fails(self, constraint_service, disk):
        chain = GamelinChain((DerivationConstraint(0, 2),))
        report = constraint_service.validate_chain(chain, disk)
        assert not report.passed
        assert report.failed_stage == 0

    def test_require_admissible_reports_stage(self, constraint_service, disk):
        chain = GamelinChain((TwoPointConstraint(0.3, -0.3), DerivationConstraint(0.1, 2)))
        with pytest.raises(ChainAdmissibilityError) as error:
            constraint_service.require_admissible(chain, disk)
        assert error.value.stage == 1

    def test_mixed_chain_passes(self, constraint_service, disk, mixed_chain):
        assert constraint_service.validate_chain(mixed_chain, disk).passed

    def test_point_outside_domain(self, constraint_service):
        annulus = DomainSpec.annulus(0.5, 8)
        chain = GamelinChain((DerivationConstraint(0.2, 1),))
        with pytest.raises(DomainError):
            constraint_service.validate_chain(chain, annulus)

    def test_validation_is_seeded(self, constraint_service, disk):
        chain = GamelinChain((DerivationConstraint(0, 2),))
        first = constraint_service.validate_chain(chain, disk, seed=5)
        second = constraint_service.validate_chain(chain, disk, seed=5)
        assert first.stages[0].defect == second.stages[0].defect


class TestChainRecords:
    def test_round_trip(self, mixed_chain):
        assert GamelinChain.from_records(mixed_chain.to_records()).to_records() == mixed_chain.to_records()

    def test_unknown_type(self):
        with pytest.raises(ConfigError):
            GamelinChain.from_records([{"type": "triple_point", "points": [0, 1, 2]}])

    def test_degenerate_two_point(self):
        with pytest.raises(DomainError):
            TwoPointConstraint(0.2, 0.2)
