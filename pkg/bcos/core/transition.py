"""
Moteur de transition : schémas de Taylor du second ordre pour la diffusion avant.

Pour un pas de temps et un champ de découplage fixés, la transition s'écrit
    X_{n+1} = x + m̄·Δt + s̄·ΔW + κ̄·ΔW²
et sa fonction caractéristique est connue en forme fermée. Les espérances
conditionnelles E[h(X_{n+1})·ΔW^k] (k = 0, 1, 2) d'une série cosinus h se
calculent alors par la méthode COS avec les multiplicateurs w_k.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

from ..errors import UnsupportedPowerError
from ..models.problem import (
    ComposedCoefficients,
    DerivativeTier,
    FbsdeProblem,
    FieldJet,
    compose_jet,
)
from .cosine import SpatialGrid

ArrayLike = Union[float, np.ndarray]


class SchemeKind(str, Enum):
    """Discrétisations de la diffusion avant"""

    EULER = "euler"
    MILSTEIN = "milstein"
    WEAK_TAYLOR_2 = "weak-taylor-2"

    @property
    def required_tier(self) -> DerivativeTier:
        return {
            SchemeKind.EULER: DerivativeTier.NONE,
            SchemeKind.MILSTEIN: DerivativeTier.FIRST,
            SchemeKind.WEAK_TAYLOR_2: DerivativeTier.SECOND,
        }[self]

    @property
    def label(self) -> str:
        return {
            SchemeKind.EULER: "Euler",
            SchemeKind.MILSTEIN: "Milstein",
            SchemeKind.WEAK_TAYLOR_2: "2.0 weak Taylor",
        }[self]


@dataclass(frozen=True)
class TransitionCoefficients:
    """Coefficients (m̄, s̄, κ̄) de la transition quadratique en ΔW"""

    m_bar: np.ndarray
    s_bar: np.ndarray
    kappa_bar: np.ndarray


def transition_coefficients(
    scheme: SchemeKind, composed: ComposedCoefficients, dt: float
) -> TransitionCoefficients:
    """Coefficients du schéma à partir des coefficients composés"""
    mu, sigma = composed.mu_bar, composed.sigma_bar

    if scheme == SchemeKind.EULER:
        return TransitionCoefficients(
            m_bar=mu, s_bar=sigma, kappa_bar=np.zeros_like(np.asarray(mu, dtype=float))
        )

    kappa = sigma * composed.dx_sigma_bar / 2.0
    if scheme == SchemeKind.MILSTEIN:
        return TransitionCoefficients(m_bar=mu - kappa, s_bar=sigma, kappa_bar=kappa)

    dx_mu, dxx_mu = composed.dx_mu_bar, composed.dxx_mu_bar
    dx_sigma, dxx_sigma = composed.dx_sigma_bar, composed.dxx_sigma_bar
    m_bar = mu - kappa + (composed.dt_mu_bar + mu * dx_mu + dxx_mu * sigma**2 / 2.0) * dt / 2.0
    s_bar = sigma + (
        dx_mu * sigma + composed.dt_sigma_bar + mu * dx_sigma + dxx_sigma * sigma**2 / 2.0
    ) * dt / 2.0
    return TransitionCoefficients(m_bar=m_bar, s_bar=s_bar, kappa_bar=kappa)


def coefficients(
    scheme: SchemeKind,
    problem: FbsdeProblem,
    field,
    t_n: float,
    dt: float,
    x: ArrayLike,
    counter=None,
) -> TransitionCoefficients:
    """
    (m̄, s̄, κ̄) du schéma en x, avec μ et σ composés avec le champ.

    Raises:
        TierUnavailableError: si le problème ne fournit pas les dérivées du schéma
    """
    scheme = SchemeKind(scheme)
    tier = scheme.required_tier
    problem.require_tier(tier)
    jet = field.jet(x, counter=counter, order=int(tier))
    return transition_coefficients(scheme, compose_jet(problem, jet, t_n, x, tier), dt)


# ==================== FONCTION CARACTÉRISTIQUE ====================


def characteristic(
    m_bar: ArrayLike,
    s_bar: ArrayLike,
    kappa_bar: ArrayLike,
    dt: float,
    x: ArrayLike,
    u: ArrayLike,
) -> Union[complex, np.ndarray]:
    """
    E[exp(iu(x + m̄Δt + s̄ΔW + κ̄ΔW²))] avec ΔW ~ N(0, Δt).

    exp(iu(x + m̄Δt) - u²s̄²Δt / (2(1 - 2iuκ̄Δt))) / sqrt(1 - 2iuκ̄Δt), branche
    principale (Re(1 - 2iuκ̄Δt) = 1).
    """
    u = np.asarray(u, dtype=float)
    d = 1.0 - 2j * u * kappa_bar * dt
    value = np.exp(1j * u * (x + m_bar * dt) - u**2 * s_bar**2 * dt / (2.0 * d)) / np.sqrt(d)
    return complex(value) if np.ndim(value) == 0 else value


def jk_weight(
    u: ArrayLike, s_bar: ArrayLike, kappa_bar: ArrayLike, dt: float, k: int
) -> Union[complex, np.ndarray]:
    """
    Multiplicateur w_k tel que E[exp(iuX)ΔW^k] = w_k·E[exp(iuX)].

    Raises:
        UnsupportedPowerError: si k n'est pas dans {0, 1, 2}
    """
    if k not in (0, 1, 2):
        raise UnsupportedPowerError(f"Puissance ΔW^{k} non supportée (k ∈ {{0, 1, 2}})")
    u = np.asarray(u, dtype=float)
    inv_d = 1.0 / (1.0 - 2j * u * kappa_bar * dt)
    if k == 0:
        value = np.ones(np.broadcast(u, s_bar, kappa_bar).shape, dtype=complex)
    else:
        w1 = 1j * u * s_bar * dt * inv_d
        value = w1 if k == 1 else w1**2 + dt * inv_d
    return complex(value) if np.ndim(value) == 0 else value


# ==================== TABLE DE TRANSITION ====================


@dataclass(frozen=True)
class TransitionTable:
    """
    Table de transition d'un pas de temps.

    Attributes:
        grid: Grille spatiale
        dt: Pas de temps
        m_bar, s_bar, kappa_bar: Coefficients aux nœuds (taille K)
        phi: phi[k, i] = φ(kπ/(b - a) | x_i)·exp(-ikπa/(b - a)), matrice K×K
    """

    grid: SpatialGrid
    dt: float
    m_bar: np.ndarray
    s_bar: np.ndarray
    kappa_bar: np.ndarray
    phi: np.ndarray = field(repr=False)
    scheme: Optional[SchemeKind] = None


def _node_jet(field, grid: SpatialGrid, order: int, counter=None) -> FieldJet:
    node_jet = getattr(field, "node_jet", None)
    if callable(node_jet) and getattr(field, "grid", None) == grid:
        return node_jet(order=order)
    return field.jet(grid.nodes, counter=counter, order=order)


def table_from_coefficients(
    grid: SpatialGrid, dt: float, coeffs: TransitionCoefficients, scheme=None
) -> TransitionTable:
    """Matrice Φ aux nœuds pour des coefficients donnés"""
    shape = (grid.K,)
    m_bar = np.broadcast_to(np.asarray(coeffs.m_bar, dtype=float), shape).copy()
    s_bar = np.broadcast_to(np.asarray(coeffs.s_bar, dtype=float), shape).copy()
    kappa_bar = np.broadcast_to(np.asarray(coeffs.kappa_bar, dtype=float), shape).copy()

    u = grid.frequencies[:, None]
    d = 1.0 - 2j * u * kappa_bar[None, :] * dt
    exponent = 1j * u * (grid.nodes[None, :] + m_bar[None, :] * dt - grid.a) - (
        u**2 * s_bar[None, :] ** 2 * dt / (2.0 * d)
    )
    phi = np.exp(exponent) / np.sqrt(d)

    for array in (m_bar, s_bar, kappa_bar, phi):
        array.setflags(write=False)
    return TransitionTable(
        grid=grid,
        dt=dt,
        m_bar=m_bar,
        s_bar=s_bar,
        kappa_bar=kappa_bar,
        phi=phi,
        scheme=scheme,
    )


def build_table(
    scheme: SchemeKind,
    problem: FbsdeProblem,
    field,
    t_n: float,
    dt: float,
    grid: SpatialGrid,
    counter=None,
) -> TransitionTable:
    """
    Coefficients aux nœuds et matrice caractéristique Φ_n (K×K).

    Le champ peut être un DecouplingField (jet aux nœuds par DCT rapide)
    ou tout FieldLike.
    """
    scheme = SchemeKind(scheme)
    tier = scheme.required_tier
    problem.require_tier(tier)
    jet = _node_jet(field, grid, int(tier), counter)
    composed = compose_jet(problem, jet, t_n, grid.nodes, tier)
    return table_from_coefficients(
        grid, dt, transition_coefficients(scheme, composed, dt), scheme=scheme
    )


def weight_matrix(table: TransitionTable, power: int) -> Optional[np.ndarray]:
    """w_k(u_l; s̄_i, κ̄_i, Δt) pour tout (l, i), None pour k = 0"""
    if power not in (0, 1, 2):
        raise UnsupportedPowerError(f"Puissance ΔW^{power} non supportée (k ∈ {{0, 1, 2}})")
    if power == 0:
        return None
    u = table.grid.frequencies[:, None]
    return jk_weight(u, table.s_bar[None, :], table.kappa_bar[None, :], table.dt, power)


def cos_expectations(table: TransitionTable, series_coeffs: np.ndarray, power: int) -> np.ndarray:
    """
    E[h(X_{n+1})·ΔW^k | X_n = x_i] à tous les nœuds i.

    Σ'_l coeffs[l]·Re{w_k(u_l; s̄_i, κ̄_i)·phi[l, i]}
    """
    weights = weight_matrix(table, power)
    kernel = table.phi if weights is None else weights * table.phi
    weighted = table.grid.half_weights * np.asarray(series_coeffs, dtype=float)
    return weighted @ kernel.real


def cos_expectation(
    table: TransitionTable, series_coeffs: np.ndarray, node: int, power: int
) -> float:
    """Version scalaire de cos_expectations au nœud `node`"""
    u = table.grid.frequencies
    column = table.phi[:, node]
    if power != 0:
        column = jk_weight(u, table.s_bar[node], table.kappa_bar[node], table.dt, power) * column
    weighted = table.grid.half_weights * np.asarray(series_coeffs, dtype=float)
    return float(weighted @ column.real)
