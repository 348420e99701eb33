import numpy as np
import pytest
from numpy.testing import assert_allclose

from models.chain import DeltaPoint, DerivationConstraint, GamelinChain, TwoPointConstraint
from models.domain import DomainSpec, WeightSpec
from models.errors import DegenerateConstraintError, IllConditionedError, UnsupportedDomainError
from models.space import Functional
from services.kernel_service import KernelService, nested_null_space

POINTS = [0, 0.2, -0.3 + 0.1j, 0.5j, 0.4 - 0.4j]


def neil_closed_form(t: complex, z, w) -> np.ndarray:
    """(α+βz)conj(α+βw) + z²w̄²/(1−zw̄) при α/β = t, |α|²+|β|² = 1."""
    if np.isinf(abs(t)):
        alpha, beta = 1.0, 0.0
    else:
        norm = np.sqrt(1 + abs(t) ** 2)
        alpha, beta = t / norm, 1 / norm
    z = np.asarray(z, dtype=complex)[:, np.newaxis]
    w = np.asarray(w, dtype=complex)[np.newaxis, :]
    return (alpha + beta * z) * np.conj(alpha + beta * w) + z ** 2 * np.conj(w) ** 2 / (1 - z * np.conj(w))


class TestSzegoKernel:
    def test_disk_kernel_is_cauchy(self, kernel_service):
        kernel = kernel_service.szego_kernel(DomainSpec.disk(64), WeightSpec.unit())
        assert kernel_service.kernel_value(kernel, 0.2, 0.3) == pytest.approx(1 / (1 - 0.06), abs=1e-12)
        assert kernel_service.kernel_value(kernel, 0.2, 0.3) == pytest.approx(1.06383, abs=1e-5)

    def test_kernel_matrix_is_hermitian(self, kernel_service):
        kernel = kernel_service.szego_kernel(DomainSpec.annulus(0.5, 16), WeightSpec.z_power(0.3))
        points = [0.7, 0.6j, -0.8 + 0.1j]
        matrix = kernel_service.kernel_matrix(kernel, points, points)
        assert_allclose(matrix, matrix.conj().T, atol=1e-12)
        assert np.min(np.linalg.eigvalsh(matrix)) > 0

    def test_annulus_kernel_stable_in_truncation(self, kernel_service):
        x0 = np.sqrt(0.5)
        values = [
            kernel_service.kernel_value(
                kernel_service.szego_kernel(DomainSpec.annulus(0.5, m), WeightSpec.unit()), x0, x0
            ).real
            for m in (16, 24)
        ]
        assert values[0] > 0
        assert values[0] == pytest.approx(values[1], abs=1e-6)

    def test_condition_guard(self, boundary_service, constraint_service):
        strict = KernelService(boundary_service, constraint_service, condition_limit=1.0)
        with pytest.raises(IllConditionedError):
            strict.szego_kernel(DomainSpec.annulus(0.5, 16), WeightSpec.unit())


class TestRepresenters:
    def test_derivative_at_origin_is_z(self, kernel_service):
        kernel = kernel_service.szego_kernel(DomainSpec.disk(8), WeightSpec.unit())
        representer = kernel_service.functional_representer(kernel, Functional.derivative(0, 1))
        expected = np.zeros(9)
        expected[1] = 1
        assert_allclose(representer.coefficients, expected, atol=1e-14)
        assert representer.norm_squared == pytest.approx(1)

    def test_point_evaluation_is_kernel_column(self, kernel_service):
        kernel = kernel_service.szego_kernel(DomainSpec.disk(8), WeightSpec.unit())
        representer = kernel_service.functional_representer(kernel, Functional.point(0.4))
        assert_allclose(representer.coefficients, 0.4 ** np.arange(9), atol=1e-14)

    def test_representer_pairs_to_functional(self, kernel_service):
        domain = DomainSpec.annulus(0.5, 12)
        kernel = kernel_service.szego_kernel(domain, WeightSpec.unit())
        functional = Functional.combination(Functional.point(0.7), Functional.point(-0.6), 2.0)
        representer = kernel_service.functional_representer(kernel, functional)
        rng = np.random.default_rng(11)
        coords = rng.standard_normal(len(kernel.exponents)) + 1j * rng.standard_normal(len(kernel.exponents))
        row = kernel_service.constraint_service.functional_row(functional, kernel.exponents, kernel.scales)
        pairing = np.vdot(representer.coefficients, kernel.gram @ coords)
        assert pairing == pytest.approx(row @ coords, abs=1e-9)

    def test_downdate_removes_functional(self, kernel_service):
        kernel = kernel_service.szego_kernel(DomainSpec.disk(16), WeightSpec.unit())
        functional = Functional.point(0.3)
        reduced = kernel_service.downdate(kernel, kernel_service.functional_representer(kernel, functional))
        assert abs(kernel_service.kernel_value(reduced, 0.3, 0.3)) < 1e-12
        assert reduced.rank == len(kernel.exponents) - 1

    def test_repeated_constraint_is_degenerate(self, kernel_service):
        chain = GamelinChain((TwoPointConstraint(0.3, -0.3), TwoPointConstraint(0.3, -0.3)))
        with pytest.raises(DegenerateConstraintError):
            kernel_service.build_constrained_space(
                DomainSpec.disk(8), WeightSpec.unit(), chain, DeltaPoint.from_values([1, 1])
            )


class TestConstrainedSpace:
    def test_unconstrained_norm_at_origin(self, kernel_service, empty_chain):
        space = kernel_service.build_constrained_space(DomainSpec.disk(16), WeightSpec.unit(), empty_chain, DeltaPoint(()))
        assert kernel_service.kernel_norm_at_basepoint(space) == pytest.approx(1)

    @pytest.mark.parametrize("t", [2.0, 0.5 - 1j, complex(np.inf), 0.0])
    def test_neil_kernel_closed_form(self, kernel_service, neil_chain, t):
        point = DeltaPoint.from_values([t])
        space = kernel_service.build_constrained_space(DomainSpec.disk(64), WeightSpec.unit(), neil_chain, point)
        expected = neil_closed_form(t, POINTS, POINTS)
        assert_allclose(kernel_service.kernel_matrix(space.kernel, POINTS, POINTS), expected, atol=1e-10)
        alpha_squared = 1.0 if np.isinf(abs(t)) else abs(t) ** 2 / (1 + abs(t) ** 2)
        assert kernel_service.kernel_norm_at_basepoint(space) == pytest.approx(alpha_squared, abs=1e-12)

    def test_neil_kernel_random_parameters(self, kernel_service, neil_chain):
        domain = DomainSpec.disk(64)
        rng = np.random.default_rng(23)
        for _ in range(20):
            alpha, beta = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            t = complex(alpha / beta)
            space = kernel_service.build_constrained_space(domain, WeightSpec.unit(), neil_chain, DeltaPoint.from_values([t]))
            matrix = kernel_service.kernel_matrix(space.kernel, POINTS, POINTS)
            assert matrix.shape == (5, 5)
            assert_allclose(matrix, neil_closed_form(t, POINTS, POINTS), atol=1e-10)
            alpha_squared = abs(alpha) ** 2 / (abs(alpha) ** 2 + abs(beta) ** 2)
            assert kernel_service.kernel_norm_at_basepoint(space) == pytest.approx(alpha_squared, abs=1e-12)

    def test_basis_reproduces_kernel(self, kernel_service, mixed_chain):
        point = DeltaPoint.from_values([1.5, -0.5j])
        space = kernel_service.build_constrained_space(DomainSpec.disk(24), WeightSpec.unit(), mixed_chain, point)
        assert_allclose(
            kernel_service.basis_kernel_matrix(space, POINTS, POINTS),
            kernel_service.kernel_matrix(space.kernel, POINTS, POINTS),
            atol=1e-10
        )

    def test_basis_is_orthonormal(self, kernel_service):
        domain = DomainSpec.annulus(0.5, 16)
        chain = GamelinChain((DerivationConstraint(domain.basepoint, 1),))
        space = kernel_service.build_constrained_space(domain, WeightSpec.z_power(0.25), chain, DeltaPoint.from_values([2]))
        assert_allclose(space.basis.conj().T @ space.gram @ space.basis, np.eye(space.dimension), atol=1e-10)

    def test_basis_members_satisfy_constraints(self, kernel_service, constraint_service, mixed_chain):
        point = DeltaPoint.from_values([0.7, 3])
        space = kernel_service.build_constrained_space(DomainSpec.disk(12), WeightSpec.unit(), mixed_chain, point)
        for index in range(space.dimension):
            f = kernel_service.basis_series(space, index)
            assert constraint_service.constraint_residual(f, mixed_chain, point) < 1e-10

    def test_bases_are_nested_in_truncation(self, kernel_service, mixed_chain):
        point = DeltaPoint.from_values([1, "inf"])
        small = kernel_service.build_constrained_space(DomainSpec.disk(8), WeightSpec.unit(), mixed_chain, point)
        large = kernel_service.build_constrained_space(DomainSpec.disk(16), WeightSpec.unit(), mixed_chain, point)
        for index in range(small.dimension):
            assert_allclose(
                kernel_service.basis_series(small, index).truncate(16).coefficients,
                kernel_service.basis_series(large, index).coefficients,
                atol=1e-12
            )

    def test_two_point_norm_stable(self, kernel_service):
        chain = GamelinChain((TwoPointConstraint(0.5, -0.5),))
        point = DeltaPoint.from_values([1])
        values = [
            kernel_service.kernel_norm_at_basepoint(
                kernel_service.build_constrained_space(DomainSpec.disk(m), WeightSpec.unit(), chain, point)
            )
            for m in (32, 40)
        ]
        assert values[0] == pytest.approx(values[1], abs=1e-8)

    @pytest.mark.parametrize("domain, weight, points", [
        (DomainSpec.disk(16), WeightSpec.unit(), [0.2, -0.3 + 0.1j, 0.5j]),
        (DomainSpec.annulus(0.5, 16), WeightSpec.z_power(0.25), [0.7, 0.6j, -0.8 + 0.1j]),
    ])
    def test_reproducing_property(self, kernel_service, boundary_service, domain, weight, points):
        chain = GamelinChain((TwoPointConstraint(0.75, -0.75), DerivationConstraint(domain.basepoint, 1)))
        space = kernel_service.build_constrained_space(domain, weight, chain, DeltaPoint.from_values([1.5, -0.5j]))
        kernel = space.kernel
        # K(ζ, w) на граничной сетке через ядро после понижений ранга
        boundary = kernel_service.boundary_matrix(domain, kernel.exponents, kernel.scales) @ kernel.factor
        columns = boundary @ (kernel_service.evaluation_matrix(kernel, points) @ kernel.factor).conj().T
        measure = kernel_service.boundary_measure(domain, weight)
        for index in range(space.dimension):
            f = kernel_service.basis_series(space, index)
            values = boundary_service.laurent_boundary(f, domain).samples(domain.n_nodes).ravel()
            pairing = (values * measure) @ columns.conj()
            expected = [boundary_service.evaluate_analytic(f, w, 0, domain) for w in points]
            assert_allclose(pairing, expected, atol=1e-8)

    def test_downdate_order_invariance(self, kernel_service):
        two_point = TwoPointConstraint(0.3, -0.3)
        derivation = DerivationConstraint(0, 1)
        domain = DomainSpec.disk(24)
        forward = kernel_service.build_constrained_space(
            domain, WeightSpec.unit(), GamelinChain((two_point, derivation)), DeltaPoint.from_values([1.5, -0.5j])
        )
        backward = kernel_service.build_constrained_space(
            domain, WeightSpec.unit(), GamelinChain((derivation, two_point)), DeltaPoint.from_values([-0.5j, 1.5])
        )
        assert_allclose(
            kernel_service.kernel_matrix(forward.kernel, POINTS, POINTS),
            kernel_service.kernel_matrix(backward.kernel, POINTS, POINTS),
            atol=1e-9
        )


class TestNullSpace:
    def test_empty_rows(self):
        assert_allclose(nested_null_space(np.zeros((0, 4))), np.eye(4))

    def test_null_space_annihilates_rows(self):
        rng = np.random.default_rng(2)
        rows = rng.standard_normal((2, 7)) + 1j * rng.standard_normal((2, 7))
        basis = nested_null_space(rows)
        assert basis.shape == (7, 5)
        assert_allclose(rows @ basis, 0, atol=1e-12)


class TestBlaschke:
    def test_neil_gives_square(self, kernel_service, neil_chain):
        product = kernel_service.blaschke_with_gamma_zeros(neil_chain, DomainSpec.disk(16))
        expected = np.zeros(17)
        expected[2] = 1
        assert_allclose(product.taylor(), expected, atol=1e-14)

    def test_two_point_zeros_and_unimodular(self, kernel_service, boundary_service):
        chain = GamelinChain((TwoPointConstraint(0.2, -0.2),))
        domain = DomainSpec.disk(32)
        product = kernel_service.blaschke_with_gamma_zeros(chain, domain)
        assert abs(boundary_service.evaluate_analytic(product, 0.2)) < 1e-14
        assert abs(boundary_service.evaluate_analytic(product, -0.2)) < 1e-14
        values = boundary_service.laurent_boundary(product, domain).samples(domain.n_nodes)
        assert_allclose(np.abs(values), 1, atol=1e-12)

    def test_derivation_zero_of_order_two(self, kernel_service, constraint_service):
        chain = GamelinChain((DerivationConstraint(0.3, 1),))
        product = kernel_service.blaschke_with_gamma_zeros(chain, DomainSpec.disk(48))
        assert_allclose(constraint_service.gamma_eval(product, chain).entries, 0, atol=1e-12)

    def test_lies_in_every_constrained_space(self, kernel_service, constraint_service, mixed_chain):
        product = kernel_service.blaschke_with_gamma_zeros(mixed_chain, DomainSpec.disk(48))
        rng = np.random.default_rng(19)
        points = [DeltaPoint.from_values(["inf", 0]), DeltaPoint.from_values([0, "inf"])]
        points += [DeltaPoint.from_values(list(rng.standard_normal(2) + 1j * rng.standard_normal(2))) for _ in range(10)]
        for point in points:
            assert constraint_service.constraint_residual(product, mixed_chain, point) < 1e-12

    def test_annulus_unsupported(self, kernel_service, neil_chain):
        with pytest.raises(UnsupportedDomainError):
            kernel_service.blaschke_with_gamma_zeros(neil_chain, DomainSpec.annulus(0.5, 8))
