import math
import pathlib

import pytest

import surveykit as sk

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def hand_pop():
    """y=(2,4,6), x=(1,2,4): every moment is hand-checkable."""
    return sk.units_from_arrays([2, 4, 6], [1, 2, 4])


@pytest.fixture(scope="session")
def hand_moments(hand_pop):
    return sk.compute_moments(hand_pop)


@pytest.fixture(scope="session")
def theory_fixture():
    """The hand-solved theory fixture: Ybar=4, f1=0.04, Cy=0.5, Cx^2=3/7, Kx=0.75."""
    moments = sk.PopulationMoments.from_coefficients(
        Ybar=4.0, Xbar=7 / 3, cy=0.5, cx=math.sqrt(3 / 7), rho=math.sqrt(27 / 28), N=100
    )
    factors = sk.finite_factors(100, 20)
    cfg = sk.FamilyConfig(K1=1.0, K2=1, K3=0.0, alpha=1.0, beta=1.0, lam=0.0)
    return sk.TheoryInput.build(moments, factors, cfg)


@pytest.fixture(scope="session")
def accept_cfg():
    """alpha=1 (V1=1 via K1=1, K3=0), beta=1, lambda=0."""
    return sk.FamilyConfig(K1=1.0, K2=1, K3=0.0, alpha=1.0, beta=1.0, lam=0.0)


@pytest.fixture(scope="session")
def pop24():
    return sk.load_population(str(DATA / "pop_n24.csv"))


@pytest.fixture(scope="session")
def pop12():
    return sk.load_population(str(DATA / "pop_n12.csv"))


@pytest.fixture(scope="session")
def pop10():
    return sk.load_population(str(DATA / "pop_n10.csv"))


@pytest.fixture(scope="session")
def pop8(pop12):
    return sk.FinitePopulation(pop12.units[:8])


@pytest.fixture(scope="session")
def zero_rho_pop():
    """Units arranged so that Syx is exactly 0.0 in floating point."""
    return sk.units_from_arrays([1, 2, 1, 2, 1, 2, 1, 2], [1, 1, 2, 2, 3, 3, 4, 4])


@pytest.fixture(scope="session")
def proportional_pop():
    """y = x/2 exactly; the ratio estimator is exact on every sample."""
    xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]
    return sk.units_from_arrays([x / 2 for x in xs], xs)
