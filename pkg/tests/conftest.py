import numpy as np
import pytest

from models.chain import DerivationConstraint, GamelinChain, TwoPointConstraint
from models.domain import DomainSpec
from models.functions import BoundaryFunction
from repositories.database import Database
from repositories.run_repository import RunRepository
from services.boundary_service import BoundaryService
from services.constraint_service import ConstraintService
from services.experiment_service import ExperimentService
from services.kernel_service import KernelService
from services.szego_service import SzegoService
from services.toeplitz_service import ToeplitzService
from services.widom_service import WidomService


@pytest.fixture
def boundary_service():
    return BoundaryService()


@pytest.fixture
def constraint_service(boundary_service):
    return ConstraintService(boundary_service)


@pytest.fixture
def kernel_service(boundary_service, constraint_service):
    return KernelService(boundary_service, constraint_service)


@pytest.fixture
def szego_service(boundary_service, constraint_service, kernel_service):
    return SzegoService(boundary_service, constraint_service, kernel_service)


@pytest.fixture
def toeplitz_service(boundary_service, constraint_service, kernel_service):
    return ToeplitzService(boundary_service, constraint_service, kernel_service)


@pytest.fixture
def widom_service(boundary_service, constraint_service, kernel_service, toeplitz_service):
    return WidomService(boundary_service, constraint_service, kernel_service, toeplitz_service)


@pytest.fixture
async def database():
    async with Database(":memory:") as db:
        yield db


@pytest.fixture
async def run_repository(database):
    return RunRepository(database)


@pytest.fixture
def experiment_service(
    boundary_service, constraint_service, kernel_service, szego_service, widom_service, tmp_path
):
    return ExperimentService(
        boundary_service,
        constraint_service,
        kernel_service,
        szego_service,
        widom_service,
        output_dir=str(tmp_path / "out")
    )


@pytest.fixture
def neil_chain():
    """Алгебра Нейла: f'(0) = 0."""
    return GamelinChain((DerivationConstraint(0, 1),))


@pytest.fixture
def mixed_chain():
    return GamelinChain((TwoPointConstraint(0.3, -0.3), DerivationConstraint(0, 1)))


@pytest.fixture
def empty_chain():
    return GamelinChain(())


@pytest.fixture
def random_rho(boundary_service):
    """Фабрика гладких положительных ρ = exp(u) со случайным тригонометрическим u."""

    def make(rng: np.random.Generator, domain: DomainSpec, degree: int = 3, scale: float = 0.3) -> BoundaryFunction:
        coefficients = np.zeros((domain.n_components, 2 * degree + 1), dtype=complex)
        for component in range(domain.n_components):
            coefficients[component, degree] = rng.standard_normal() * scale
            for k in range(1, degree + 1):
                value = (rng.standard_normal() + 1j * rng.standard_normal()) * scale / (k * k)
                coefficients[component, degree + k] = value
                coefficients[component, degree - k] = np.conj(value)
        return boundary_service.boundary_exp(BoundaryFunction(coefficients), domain)

    return make
