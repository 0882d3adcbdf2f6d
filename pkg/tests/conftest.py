import random

import pytest
from sympy import Rational

from portrait_engine.config import get_settings
from portrait_engine.exactalg import T, Z
from portrait_engine.dynmap import map_from_expr


@pytest.fixture
def quadratic():
    """z^2 + t"""
    return map_from_expr(Z ** 2 + T)


@pytest.fixture
def inverse_square():
    return map_from_expr(1 / Z ** 2)


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    monkeypatch.setenv("PORTRAIT_OUTPUT_DIR", str(tmp_path / "analysis_results"))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def random_tpoly_expr(rng: random.Random, max_degree: int, coeff_range: int = 9):
    degree = rng.randint(0, max_degree)
    return sum(rng.randint(-coeff_range, coeff_range) * T ** i for i in range(degree + 1))


def random_rational(rng: random.Random, height: int) -> Rational:
    return Rational(rng.randint(-height, height), rng.randint(1, height))
