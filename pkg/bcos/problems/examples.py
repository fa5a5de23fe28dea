"""
Problèmes de référence livrés avec le solveur.

    - example1 : diffusion avant découplée, driver non linéaire en (y, z)
    - example2 : couplage en Y (et en Z via la dérive si kappa_z != 0)
    - example3 : entièrement couplé (σ dépend de z), contrôle linéaire-quadratique

Comment ajouter un problème:
    1. Écrire une fabrique qui appelle build_problem() avec des expressions sympy
    2. L'enregistrer dans PROBLEM_FACTORIES
"""

from typing import Callable, Dict, List, Optional

import sympy as sp

from ..config.settings import default_settings
from ..errors import InvalidParamsError
from ..models.problem import (
    STATE_SYMBOLS,
    DerivativeTier,
    FbsdeProblem,
    SymbolicFields,
    build_problem,
)
from ..models.study import LqParams
from ..simulation.riccati import RiccatiFields

t, x, y, z = STATE_SYMBOLS

# Domaine de troncature de l'exemple 1
EXAMPLE1_RANGE = (-19.341110327048455, 22.822591808529936)


def example1() -> FbsdeProblem:
    """
    Exemple 1 : T = 10, x0 = 1, u(t, x) = exp(-x²/(t+1)).

    La dérive x(1+x²)/(2+x²)³ et le terme -x²/(t+1) hors du facteur σ² rendent
    (u, v) solution exacte de l'EDP quasi-linéaire associée.
    """
    T = 10
    sigma = (1 + x**2) / (2 + x**2)
    mu = x * (1 + x**2) / (2 + x**2) ** 3
    decay = sp.exp(-(x**2) / (t + 1))
    driver = decay / (t + 1) * (
        4 * x**2 * (1 + x**2) / (2 + x**2) ** 3
        + sigma**2 * (1 - 2 * x**2 / (t + 1))
        - x**2 / (t + 1)
    ) + z * x / (2 + x**2) ** 2 * sp.sqrt(
        (1 + y**2 + sp.exp(-2 * x**2 / (t + 1))) / (1 + 2 * y**2)
    )
    u = sp.exp(-(x**2) / (t + 1))
    v = -2 * x * (1 + x**2) / ((t + 1) * (2 + x**2)) * sp.exp(-(x**2) / (t + 1))

    return build_problem(
        name="example1",
        T=T,
        x0=1.0,
        mu=mu,
        sigma=sigma,
        driver=driver,
        terminal=sp.exp(-(x**2) / (T + 1)),
        tier=DerivativeTier.SECOND,
        analytic_fields=SymbolicFields(u, v),
    )


def example2(kappa_z: float = 0.0) -> FbsdeProblem:
    """
    Exemple 2 : T = 1, x0 = π/4, r = 0, σ̄ = 0.4, κ_y = 0.1.

    Args:
        kappa_z: Couplage de Z dans la dérive (0 ou 1e-2 dans les études)
    """
    T, r, sigma_bar, kappa_y = 1.0, 0.0, 0.4, 0.1
    kz = sp.Float(kappa_z)
    mu = kappa_y * sigma_bar * y + kz * z
    sigma = sigma_bar * y
    damp = sp.exp(-3 * r * (T - t))
    driver = (
        -r * y
        + sp.Rational(1, 2) * damp * sigma_bar**2 * sp.sin(x) ** 3
        - kappa_y * z
        - kz * sigma_bar * damp * sp.sin(x) * sp.cos(x) ** 2
    )
    u = sp.exp(-r * (T - t)) * sp.sin(x)
    v = sp.exp(-2 * r * (T - t)) * sigma_bar * sp.sin(x) * sp.cos(x)

    return build_problem(
        name="example2" if kappa_z == 0 else "example2-zdrift",
        T=T,
        x0=float(sp.pi / 4),
        mu=mu,
        sigma=sigma,
        driver=driver,
        terminal=sp.sin(x),
        tier=DerivativeTier.SECOND,
        analytic_fields=SymbolicFields(u, v),
        parameters={"kappa_z": float(kappa_z), "r": r, "sigma_bar": sigma_bar, "kappa_y": kappa_y},
    )


def example3(params: Optional[LqParams] = None, ode_steps: Optional[int] = None) -> FbsdeProblem:
    """
    Exemple 3 : FBSDE entièrement couplé issu d'un contrôle linéaire-quadratique.

    Les champs analytiques sont fournis par le système de Riccati (intégré au
    premier accès).

    Raises:
        InvalidParamsError: si R_u = 0
    """
    params = params or LqParams()
    if params.R_u == 0:
        raise InvalidParamsError("R_u doit être non nul")
    ode_steps = ode_steps or default_settings.riccati_steps

    ru = params.R_u
    mu = (
        params.A_tilde * x
        + params.B**2 / ru * y
        + params.B * params.D / ru * z
        + params.beta
    )
    sigma = (
        params.C_tilde * x
        + params.D * params.B / ru * y
        + params.D**2 / ru * z
        + params.Sigma
    )
    driver = params.A_tilde * y + params.C_tilde * z - params.R_tilde * x

    return build_problem(
        name="example3",
        T=params.T,
        x0=params.x0,
        mu=sp.sympify(mu),
        sigma=sp.sympify(sigma),
        driver=sp.sympify(driver),
        terminal=-params.G * x,
        tier=DerivativeTier.SECOND,
        analytic_fields=RiccatiFields(params, ode_steps),
        parameters=params.model_dump(),
    )


# ==================== REGISTRE ====================

PROBLEM_FACTORIES: Dict[str, Callable[..., FbsdeProblem]] = {
    "example1": example1,
    "example2": example2,
    "example3": example3,
}


def get_problem(name: str, **params) -> FbsdeProblem:
    """
    Instancie un problème par son nom.

    Raises:
        KeyError: Si le problème n'existe pas
    """
    if name not in PROBLEM_FACTORIES:
        raise KeyError(
            f"Problème '{name}' inconnu. Problèmes disponibles: {list(PROBLEM_FACTORIES.keys())}"
        )
    return PROBLEM_FACTORIES[name](**params)


def list_problems() -> List[str]:
    return list(PROBLEM_FACTORIES.keys())
