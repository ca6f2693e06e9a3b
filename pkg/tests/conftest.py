import pytest

from cyclo import FieldSpec
from group_core import GroupSpec, build_group, cyclic_group, heisenberg_group, modular_group
from services import fixtures


@pytest.fixture(scope="session")
def rationals():
    return FieldSpec("rationals", name="Q")


@pytest.fixture(scope="session")
def imag5():
    return FieldSpec("imag_quadratic", d=5)


@pytest.fixture(scope="session")
def imag23():
    return FieldSpec("imag_quadratic", d=23)


@pytest.fixture(scope="session")
def q_i_sqrt10():
    return fixtures.load_field("q_i_sqrt10")


@pytest.fixture(scope="session")
def c3():
    return cyclic_group(3)


@pytest.fixture(scope="session")
def c9():
    return cyclic_group(9)


@pytest.fixture(scope="session")
def heis3():
    return heisenberg_group(3)


@pytest.fixture(scope="session")
def mod3_3():
    return modular_group(3, 3)


@pytest.fixture(scope="session")
def mod3_4():
    return modular_group(3, 4)


@pytest.fixture(scope="session")
def c7sdc3():
    spec = GroupSpec("semidirect", {"h": GroupSpec("cyclic", {"n": 7}), "g": GroupSpec("cyclic", {"n": 3}), "power": 2})
    return build_group(spec)


@pytest.fixture(scope="session")
def fixture_group():
    """Группа из встроенного каталога фикстур по имени."""
    return lambda name: fixtures.load_group(name)
