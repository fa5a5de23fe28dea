"""
Configuration globale et fixtures pour les tests pytest
"""
import os
from pathlib import Path

import numpy as np
import pytest
import sympy as sp

from bcos.core.cosine import make_grid
from bcos.models.problem import STATE_SYMBOLS, DerivativeTier, SymbolicFields, build_problem
from bcos.models.study import THETA_PRESETS, LqParams

t, x, y, z = STATE_SYMBOLS

CONFIGS_DIR = Path(__file__).resolve().parents[1] / "configs"


# ========== CONFIGURATION PYTEST ==========


def pytest_collection_modifyitems(config, items):
    """Les tests `slow` ne tournent que si BCOS_RUN_SLOW=1"""
    if os.getenv("BCOS_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="BCOS_RUN_SLOW=1 requis")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# ========== FIXTURES GÉNÉRALES ==========


@pytest.fixture
def rng():
    """Générateur déterministe pour les tests"""
    return np.random.default_rng(20240611)


@pytest.fixture
def configs_dir():
    return CONFIGS_DIR


@pytest.fixture
def second_order_theta():
    return THETA_PRESETS["second-order"]


@pytest.fixture
def backward_euler_theta():
    return THETA_PRESETS["backward-euler"]


# ========== FIXTURES GRILLES ==========


@pytest.fixture
def small_grid():
    """Grille [-10, 10] à 128 termes"""
    return make_grid(-10.0, 10.0, 128)


@pytest.fixture
def wide_grid():
    """Grille [-8, 8] à 256 termes (oracles de Gauss-Hermite)"""
    return make_grid(-8.0, 8.0, 256)


# ========== FIXTURES PROBLÈMES ==========


def heat_fields(T: float) -> SymbolicFields:
    """u(t, x) = E[exp(-(x + W_{T-t})²)] et v = u_x"""
    tau = 1 + 2 * (T - t)
    u = sp.exp(-(x**2) / tau) / sp.sqrt(tau)
    return SymbolicFields(u, sp.diff(u, x))


@pytest.fixture(scope="session")
def heat_problem():
    """
    Problème découplé μ = 0, σ = 1, f = 0, g = exp(-x²) : solution exacte connue.
    """
    T = 1.0
    return build_problem(
        name="heat",
        T=T,
        x0=0.5,
        mu=sp.Integer(0),
        sigma=sp.Integer(1),
        driver=sp.Integer(0),
        terminal=sp.exp(-(x**2)),
        tier=DerivativeTier.SECOND,
        analytic_fields=heat_fields(T),
    )


@pytest.fixture(scope="session")
def brownian_problem():
    """μ = 0, σ = 1, g(x) = x : X = x0 + W, u = x, v = 1"""
    return build_problem(
        name="brownian",
        T=1.0,
        x0=0.5,
        mu=sp.Integer(0),
        sigma=sp.Integer(1),
        driver=sp.Integer(0),
        terminal=x,
        tier=DerivativeTier.SECOND,
        analytic_fields=SymbolicFields(x, sp.Integer(1) + 0 * x),
    )


@pytest.fixture(scope="session")
def example1_problem():
    from bcos.problems.examples import example1

    return example1()


@pytest.fixture(scope="session")
def example2_problem():
    from bcos.problems.examples import example2

    return example2(kappa_z=0.0)


@pytest.fixture(scope="session")
def example2_zdrift_problem():
    from bcos.problems.examples import example2

    return example2(kappa_z=1e-2)


@pytest.fixture(scope="session")
def example3_problem():
    """Exemple 3 avec une intégration Riccati allégée"""
    from bcos.problems.examples import example3

    return example3(LqParams(), ode_steps=2000)
