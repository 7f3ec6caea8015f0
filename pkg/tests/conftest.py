import numpy as np
import pytest

from curvafield import bundled_environment, triangulate

_CACHE = {}


def complex_for(name):
    if name not in _CACHE:
        env = bundled_environment(name)
        _CACHE[name] = (env, triangulate(env))
    return _CACHE[name]


@pytest.fixture(scope="session", params=["maze", "bugtrap", "sparse"])
def env_and_complex(request):
    return complex_for(request.param)


@pytest.fixture(scope="session")
def sparse_complex():
    return complex_for("sparse")


@pytest.fixture(scope="session")
def maze_complex():
    return complex_for("maze")


@pytest.fixture(scope="session")
def bugtrap_complex():
    return complex_for("bugtrap")


@pytest.fixture()
def square_with_hole():
    """Tiny deterministic world: unit-ish square with a square hole."""
    from curvafield import make_environment

    env = make_environment(
        name="square-with-hole",
        outer=[[0, 0], [4, 0], [4, 4], [0, 4]],
        holes=[[[1.5, 1.5], [2.5, 1.5], [2.5, 2.5], [1.5, 2.5]]],
        goal=[3.4, 3.3],
    )
    return env, triangulate(env)


def rng(seed=0):
    return np.random.default_rng(seed)
