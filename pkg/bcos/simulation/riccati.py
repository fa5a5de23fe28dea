"""
Solution de référence du problème linéaire-quadratique (exemple 3).

Avec un terminal linéaire g(x) = -Gx, le champ de découplage reste linéaire :
    u(t, x) = a(t)·x + b(t),   v(t, x) = p(t)·x + q(t)
où v = a·σ(t, x, u, v) donne, avec d = 1 - a·D²/R_u,
    p = a·(C̃ + DB·a/R_u)/d,   q = a·(DB·b/R_u + Σ)/d.
En injectant ce développement dans l'EDP quasi-linéaire (u_xx = 0) :
    a' = -2Ãa - (B²/R_u)a² - (BD/R_u)a·p - C̃p + R̃
    b' = -a((B²/R_u)b + (BD/R_u)q + β) - Ãb - C̃q
avec a(T) = -G, b(T) = 0, intégré en temps rétrograde s = T - t.
"""

from functools import cached_property, lru_cache
from typing import Tuple

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import InvalidParamsError, RiccatiBlowupError
from ..models.problem import AnalyticFields, FieldJet
from ..models.study import LqParams

BLOWUP_GUARD = 1e12


def feedback_coefficients(params: LqParams, a, b) -> Tuple[np.ndarray, np.ndarray]:
    """(p, q) tels que v = p·x + q, pour u = a·x + b"""
    denominator = 1.0 - a * params.D**2 / params.R_u
    db = params.D * params.B / params.R_u
    p = a * (params.C_tilde + db * a) / denominator
    q = a * (db * b + params.Sigma) / denominator
    return p, q


def riccati_rhs(t: float, state: np.ndarray, params: LqParams) -> np.ndarray:
    """Second membre (a', b') en temps direct"""
    a, b = state
    p, q = feedback_coefficients(params, a, b)
    bb = params.B**2 / params.R_u
    bd = params.B * params.D / params.R_u
    da = (
        -2.0 * params.A_tilde * a
        - bb * a**2
        - bd * a * p
        - params.C_tilde * p
        + params.R_tilde
    )
    db = -a * (bb * b + bd * q + params.beta) - params.A_tilde * b - params.C_tilde * q
    return np.array([da, db])


class RiccatiFields(AnalyticFields):
    """
    Champs (u, v) linéaires en x issus du système de Riccati.

    L'intégration est faite au premier accès (solution dense DOP853).
    """

    def __init__(self, params: LqParams, ode_steps: int = 100_000):
        if params.R_u == 0:
            raise InvalidParamsError("R_u doit être non nul")
        if ode_steps < 1:
            raise InvalidParamsError(f"ode_steps doit être >= 1, reçu: {ode_steps}")
        self.params = params
        self.T = params.T
        self.ode_steps = int(ode_steps)

    @cached_property
    def solution(self):
        T = self.T

        def backward_rhs(s: float, state: np.ndarray) -> np.ndarray:
            return -riccati_rhs(T - s, state, self.params)

        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            sol = solve_ivp(
                backward_rhs,
                [0.0, T],
                np.array([-self.params.G, 0.0]),
                method="DOP853",
                dense_output=True,
                rtol=1e-12,
                atol=1e-14,
                max_step=T / self.ode_steps,
            )
        if not sol.success or not np.all(np.isfinite(sol.y)):
            raise RiccatiBlowupError(f"Intégration de Riccati échouée: {sol.message}")
        if np.max(np.abs(sol.y[0])) > BLOWUP_GUARD:
            raise RiccatiBlowupError(f"|a(t)| dépasse {BLOWUP_GUARD:.0e}")
        return sol.sol

    def coefficients(self, t) -> Tuple[np.ndarray, np.ndarray]:
        """(a(t), b(t))"""
        s = self.T - np.asarray(t, dtype=float)
        a, b = self.solution(s)
        return a, b

    def feedback(self, t) -> Tuple[np.ndarray, np.ndarray]:
        """(p(t), q(t))"""
        a, b = self.coefficients(t)
        return feedback_coefficients(self.params, a, b)

    def u(self, t, x):
        a, b = self.coefficients(t)
        return a * np.asarray(x, dtype=float) + b

    def v(self, t, x):
        p, q = self.feedback(t)
        return p * np.asarray(x, dtype=float) + q

    def jet(self, t, x, order: int = 2) -> FieldJet:
        x = np.asarray(x, dtype=float)
        a, b = self.coefficients(t)
        p, q = feedback_coefficients(self.params, a, b)
        zeros = np.zeros_like(x)
        return FieldJet(
            phi=a * x + b,
            zeta=p * x + q,
            dphi=zeros + a if order >= 1 else None,
            dzeta=zeros + p if order >= 1 else None,
            ddphi=zeros if order >= 2 else None,
            ddzeta=zeros if order >= 2 else None,
        )


@lru_cache(maxsize=16)
def reference_riccati(params: LqParams, ode_steps: int = 100_000) -> RiccatiFields:
    """
    Fournisseur de champs analytiques pour l'exemple 3, intégré immédiatement.

    Raises:
        InvalidParamsError: si R_u = 0
        RiccatiBlowupError: si a(t) explose sur [0, T]
    """
    fields = RiccatiFields(params, ode_steps)
    fields.solution
    return fields
