"""
═══════════════════════════════════════════════════════════════════════════════
COSINE CORE - Séries de Fourier cosinus tronquées sur [a, b]
═══════════════════════════════════════════════════════════════════════════════

RÔLE:
    Grille spatiale décalée, récupération des coefficients par DCT-II et
    évaluation analytique de la série et de ses deux premières dérivées.

CONVENTIONS:
    - nodes[l] = a + (l + 1/2)(b - a)/K
    - Les coefficients sont stockés non divisés par deux : le poids 1/2 du
      terme k = 0 est appliqué à l'évaluation (somme Σ').
    - Hors de [a, b], x est ramené dans l'intervalle (clamp). Un ClampCounter
      optionnel compte les points concernés.

UTILISATION:
    >>> grid = make_grid(-5.0, 5.0, 256)
    >>> series = dct2(np.exp(-grid.nodes**2), grid)
    >>> eval_deriv1(series, 0.5)

═══════════════════════════════════════════════════════════════════════════════
"""

import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy import fft

from ..errors import InvalidBoundsError, InvalidSizeError, LengthMismatchError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class SpatialGrid:
    """
    Grille spatiale de K points au milieu des K sous-intervalles de [a, b].

    Attributes:
        a: Borne inférieure de troncature
        b: Borne supérieure de troncature
        K: Nombre de termes de Fourier (= nombre de nœuds)
    """

    a: float
    b: float
    K: int

    @property
    def length(self) -> float:
        return self.b - self.a

    @cached_property
    def nodes(self) -> np.ndarray:
        nodes = self.a + (np.arange(self.K) + 0.5) * (self.length / self.K)
        nodes.setflags(write=False)
        return nodes

    @cached_property
    def frequencies(self) -> np.ndarray:
        """u_k = kπ/(b - a) pour k = 0..K-1"""
        freqs = np.arange(self.K) * (np.pi / self.length)
        freqs.setflags(write=False)
        return freqs

    @cached_property
    def half_weights(self) -> np.ndarray:
        """Poids de la somme Σ' : 1/2 pour k = 0, 1 sinon"""
        weights = np.ones(self.K)
        weights[0] = 0.5
        weights.setflags(write=False)
        return weights


def make_grid(a: float, b: float, K: int) -> SpatialGrid:
    """
    Construit une grille spatiale validée.

    Raises:
        InvalidBoundsError: si a >= b
        InvalidSizeError: si K < 1
    """
    if not np.isfinite(a) or not np.isfinite(b) or a >= b:
        raise InvalidBoundsError(f"Bornes invalides: a={a}, b={b} (a < b requis)")
    if int(K) != K or K < 1:
        raise InvalidSizeError(f"K doit être un entier >= 1, reçu: {K}")
    return SpatialGrid(a=float(a), b=float(b), K=int(K))


class ClampCounter:
    """Compteur (thread-safe) des évaluations ramenées dans [a, b]"""

    def __init__(self):
        self._count = 0
        self._lock = threading.Lock()

    @property
    def count(self) -> int:
        return self._count

    def add(self, n: int):
        if n:
            with self._lock:
                self._count += int(n)


@dataclass(frozen=True)
class CosineSeries:
    """
    Série cosinus tronquée Σ'_{k<K} V_k cos(kπ(x - a)/(b - a)).

    Attributes:
        grid: Grille associée
        coeffs: Coefficients V_k (non divisés par deux)
    """

    grid: SpatialGrid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.shape != (self.grid.K,):
            raise LengthMismatchError(
                f"{coeffs.shape} coefficients pour une grille de K={self.grid.K}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @cached_property
    def _weighted(self) -> np.ndarray:
        return self.grid.half_weights * self.coeffs

    def at_nodes(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Valeur, dérivée première et seconde à tous les nœuds de la grille.

        Utilise la DCT-III et la DST-III rapides : en x_i,
        cos(kπ(x_i - a)/(b - a)) = cos(πk(2i + 1)/(2K)).

        Returns:
            Tuple (v, v', v'') de tableaux de taille K
        """
        freqs = self.grid.frequencies
        coeffs = self.coeffs

        # DCT-III: y_i = x_0 + 2 Σ_{k>=1} x_k cos(πk(2i+1)/(2K))
        value = fft.dct(coeffs, type=3) / 2.0
        second = fft.dct(-(freqs**2) * coeffs, type=3) / 2.0

        # DST-III avec décalage d'indice : x_{k-1} = c_k, x_{K-1} = 0
        sine_input = np.zeros(self.grid.K)
        sine_input[:-1] = (-freqs * coeffs)[1:]
        first = fft.dst(sine_input, type=3) / 2.0

        return value, first, second


def _clamp(
    grid: SpatialGrid, x: ArrayLike, counter: Optional[ClampCounter]
) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    clamped = np.clip(x, grid.a, grid.b)
    if counter is not None:
        counter.add(np.count_nonzero(clamped != x))
    return clamped


def _phase(grid: SpatialGrid, x_hat: np.ndarray) -> np.ndarray:
    # (..., K) : kπ(x̂ - a)/(b - a)
    return np.multiply.outer(x_hat - grid.a, grid.frequencies)


def _scalar_or_array(values: np.ndarray, x: ArrayLike) -> ArrayLike:
    return float(values) if np.ndim(x) == 0 else values


# ==================== TRANSFORMÉES ====================


def dct2(samples: np.ndarray, grid: SpatialGrid) -> CosineSeries:
    """
    Coefficients V_k = (2/K) Σ_l samples[l] cos(kπ(2l + 1)/(2K)) par DCT-II rapide.

    Raises:
        LengthMismatchError: si len(samples) != K
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.K,):
        raise LengthMismatchError(
            f"{samples.shape[0] if samples.ndim else 0} échantillons pour K={grid.K}"
        )
    # scipy: y_k = 2 Σ_l x_l cos(πk(2l+1)/(2K))
    return CosineSeries(grid=grid, coeffs=fft.dct(samples, type=2) / grid.K)


def build_cosine_matrix(K: int) -> np.ndarray:
    """Matrice C[k, l] = cos(πk(2l + 1)/(2K))"""
    k = np.arange(K)
    return np.cos(np.pi * np.outer(k, k + 0.5) / K)


def dct2_direct(samples: np.ndarray, grid: SpatialGrid) -> CosineSeries:
    """Somme directe en O(K²), oracle de dct2"""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (grid.K,):
        raise LengthMismatchError(f"{samples.size} échantillons pour K={grid.K}")
    coeffs = (2.0 / grid.K) * (build_cosine_matrix(grid.K) @ samples)
    return CosineSeries(grid=grid, coeffs=coeffs)


def cosine_integral_coefficients(
    fn: Callable[[np.ndarray], np.ndarray], grid: SpatialGrid, quad_points: int = 2048
) -> CosineSeries:
    """
    Coefficients "exacts" (2/(b - a)) ∫_a^b v(x) cos(kπ(x - a)/(b - a)) dx.

    Quadrature de Gauss-Legendre ; sert de référence pour l'erreur de la DCT.
    """
    nodes, weights = np.polynomial.legendre.leggauss(quad_points)
    half = grid.length / 2.0
    x = grid.a + half * (nodes + 1.0)
    values = np.asarray(fn(x), dtype=float) * weights * half
    coeffs = (2.0 / grid.length) * (np.cos(_phase(grid, x)).T @ values)
    return CosineSeries(grid=grid, coeffs=coeffs)


# ==================== ÉVALUATION ====================


def eval_series(
    series: CosineSeries, x: ArrayLike, counter: Optional[ClampCounter] = None
) -> ArrayLike:
    """Σ'_k V_k cos(kπ(x̂ - a)/(b - a)) avec x̂ = clamp(x, a, b)"""
    x_hat = _clamp(series.grid, x, counter)
    values = np.cos(_phase(series.grid, x_hat)) @ series._weighted
    return _scalar_or_array(values, x)


def eval_deriv1(
    series: CosineSeries, x: ArrayLike, counter: Optional[ClampCounter] = None
) -> ArrayLike:
    """Σ'_k -(kπ/(b - a)) V_k sin(kπ(x̂ - a)/(b - a))"""
    x_hat = _clamp(series.grid, x, counter)
    weighted = -series.grid.frequencies * series._weighted
    values = np.sin(_phase(series.grid, x_hat)) @ weighted
    return _scalar_or_array(values, x)


def eval_deriv2(
    series: CosineSeries, x: ArrayLike, counter: Optional[ClampCounter] = None
) -> ArrayLike:
    """Σ'_k -(kπ/(b - a))² V_k cos(kπ(x̂ - a)/(b - a))"""
    x_hat = _clamp(series.grid, x, counter)
    weighted = -(series.grid.frequencies**2) * series._weighted
    values = np.cos(_phase(series.grid, x_hat)) @ weighted
    return _scalar_or_array(values, x)


@dataclass(frozen=True)
class TrigBasis:
    """
    cos et sin des phases kπ(x̂ - a)/(b - a) en des points fixés.

    Permet d'évaluer plusieurs séries de la même grille aux mêmes points
    sans recalculer les matrices trigonométriques.
    """

    grid: SpatialGrid
    cos_phase: np.ndarray = field(repr=False)
    sin_phase: Optional[np.ndarray] = field(default=None, repr=False)

    def evaluate(
        self, series: CosineSeries, order: int = 2
    ) -> Tuple[np.ndarray, Optional[np.ndarray], Optional[np.ndarray]]:
        if series.grid != self.grid:
            raise LengthMismatchError("Série et base sur des grilles différentes")
        freqs = self.grid.frequencies
        weighted = series._weighted
        value = self.cos_phase @ weighted
        first = None
        second = None
        if order >= 1:
            first = self.sin_phase @ (-freqs * weighted)
        if order >= 2:
            second = self.cos_phase @ (-(freqs**2) * weighted)
        return value, first, second


def trig_basis(
    grid: SpatialGrid,
    x: ArrayLike,
    counter: Optional[ClampCounter] = None,
    order: int = 2,
) -> TrigBasis:
    """Base trigonométrique en x (ramené dans [a, b], clamp compté une fois)"""
    phase = _phase(grid, _clamp(grid, x, counter))
    return TrigBasis(
        grid=grid,
        cos_phase=np.cos(phase),
        sin_phase=np.sin(phase) if order >= 1 else None,
    )


def eval_jet(
    series: CosineSeries,
    x: ArrayLike,
    counter: Optional[ClampCounter] = None,
    order: int = 2,
) -> Tuple[np.ndarray, Optional[np.ndarray], Optional[np.ndarray]]:
    """Valeur et dérivées jusqu'à l'ordre `order` en partageant les matrices trigonométriques"""
    return trig_basis(series.grid, x, counter, order).evaluate(series, order)
