"""
═══════════════════════════════════════════════════════════════════════════════
BCOS SOLVER - Récurrence rétrograde du theta-schéma avec découplage explicite
═══════════════════════════════════════════════════════════════════════════════

RÔLE:
    Calcule, de t_N = T jusqu'à t_0 = 0, les champs de découplage numériques
    (y_n, z_n) sous forme de séries cosinus sur [a, b].

ALGORITHME (pour n = N-1, ..., 0):
    1. (φ, ζ) = champs en t_{n+1} (découplage explicite)
    2. Table de transition Φ_n du schéma avant choisi
    3. z_n aux nœuds (theta-schéma)
    4. y_n aux nœuds par itérations de Picard sur le terme implicite θ₁·Δt·f
    5. Coefficients 𝒴, 𝒵, F̄ en t_n par DCT-II

    z est calculé avant y : z_n entre dans f dans l'équation implicite de y_n.

UTILISATION:
    >>> grid = make_grid(-5.0, 5.0, 512)
    >>> solution = solve(example3(), grid, N=100, theta=THETA_PRESETS["second-order"],
    ...                  scheme=SchemeKind.MILSTEIN)
    >>> y0, z0 = eval_solution(solution, 0, 1.0)

═══════════════════════════════════════════════════════════════════════════════
"""

import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from ..errors import IndexOutOfRangeError, InvalidParamsError, TerminalFixedPointError
from ..models.problem import FbsdeProblem, FieldJet
from ..models.study import ThetaParams
from ..utils.logging import SolverLogger
from .cosine import (
    ClampCounter,
    CosineSeries,
    SpatialGrid,
    TrigBasis,
    cosine_integral_coefficients,
    dct2,
    trig_basis,
)
from .transition import SchemeKind, TransitionTable, build_table, cos_expectations

ArrayLike = Union[float, np.ndarray]

logger = SolverLogger("bcos_solver")


@dataclass(frozen=True)
class DecouplingField:
    """
    Couple de séries (y, z) à un niveau de temps.

    Attributes:
        t: Temps t_n
        y_series: Série cosinus de y(t_n, ·)
        z_series: Série cosinus de z(t_n, ·)
    """

    t: float
    y_series: CosineSeries
    z_series: CosineSeries

    def __post_init__(self):
        if self.y_series.grid != self.z_series.grid:
            raise InvalidParamsError("Les séries y et z doivent partager la même grille")

    @property
    def grid(self) -> SpatialGrid:
        return self.y_series.grid

    def jet(
        self, x: ArrayLike, counter: Optional[ClampCounter] = None, order: int = 2
    ) -> FieldJet:
        """Valeurs et dérivées (ordre <= order) de y et z en x, clamp compté une fois"""
        return self.jet_on(trig_basis(self.grid, x, counter, order), order)

    def jet_on(self, basis: TrigBasis, order: int = 2) -> FieldJet:
        """Jet sur une base trigonométrique déjà calculée"""
        phi, dphi, ddphi = basis.evaluate(self.y_series, order)
        zeta, dzeta, ddzeta = basis.evaluate(self.z_series, order)
        return FieldJet(phi=phi, zeta=zeta, dphi=dphi, dzeta=dzeta, ddphi=ddphi, ddzeta=ddzeta)

    def node_jet(self, order: int = 2) -> FieldJet:
        """Jet aux nœuds de la grille par DCT-III / DST-III rapides"""
        phi, dphi, ddphi = self.y_series.at_nodes()
        zeta, dzeta, ddzeta = self.z_series.at_nodes()
        return FieldJet(
            phi=phi,
            zeta=zeta,
            dphi=dphi if order >= 1 else None,
            dzeta=dzeta if order >= 1 else None,
            ddphi=ddphi if order >= 2 else None,
            ddzeta=ddzeta if order >= 2 else None,
        )


@dataclass(frozen=True)
class NextCoefficients:
    """Coefficients (𝒴, 𝒵, F̄) au temps t_{n+1}"""

    y_coeffs: np.ndarray
    z_coeffs: np.ndarray
    f_coeffs: np.ndarray

    @classmethod
    def from_series(cls, fields: DecouplingField, driver: CosineSeries) -> "NextCoefficients":
        return cls(
            y_coeffs=fields.y_series.coeffs,
            z_coeffs=fields.z_series.coeffs,
            f_coeffs=driver.coeffs,
        )


@dataclass(frozen=True)
class PicardResult:
    """Résultat de la résolution implicite de y_n"""

    y: np.ndarray
    iterations: int
    converged: bool
    residual: float


@dataclass
class BcosSolution:
    """
    Solution BCOS complète sur la partition uniforme de [0, T].

    Attributes:
        problem_name: Nom du problème résolu
        grid: Grille spatiale
        times: t_n = n·T/N, n = 0..N
        fields: Champs de découplage (N + 1 niveaux)
        driver_series: Séries de x ↦ f(t_n, x, y_n(x), z_n(x))
        picard_counts: Itérations de Picard par pas (taille N)
        picard_converged: Convergence de Picard par pas (taille N)
        scheme: Schéma avant utilisé
        theta: Paramètres du theta-schéma
        x0: État initial du problème
    """

    problem_name: str
    grid: SpatialGrid
    times: np.ndarray
    fields: List[DecouplingField]
    driver_series: List[CosineSeries]
    picard_counts: np.ndarray
    picard_converged: np.ndarray
    scheme: SchemeKind
    theta: ThetaParams
    x0: float = 0.0
    clamp_counter: ClampCounter = field(default_factory=ClampCounter)
    seconds: float = 0.0

    @property
    def N(self) -> int:
        return len(self.times) - 1

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def dt(self) -> float:
        return self.T / self.N

    @property
    def picard_max(self) -> int:
        return int(self.picard_counts.max()) if self.picard_counts.size else 0

    @property
    def picard_mean(self) -> float:
        return float(self.picard_counts.mean()) if self.picard_counts.size else 0.0

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.picard_converged))


# ==================== PAS TERMINAL ====================


def terminal_fields(
    problem: FbsdeProblem,
    grid: SpatialGrid,
    max_iter: int = 100,
    tol: float = 1e-14,
    quad_points: Optional[int] = None,
) -> Tuple[DecouplingField, CosineSeries]:
    """
    Champs en t_N = T : y_N = g, z_N = g'·σ(T, x, g, z_N), et la série de f en T.

    Le point fixe en z_N n'est itéré que si σ dépend de z.

    Par défaut les trois séries viennent de la DCT des valeurs aux nœuds,
    comme aux autres pas. Avec quad_points, et si σ ne dépend pas de z
    (z_N en forme fermée), elles sont intégrées par Gauss-Legendre.

    Raises:
        TerminalFixedPointError: si l'itération ne converge pas (|g'·∂zσ| >= 1)
    """
    if quad_points and not problem.sigma_depends_on_z:
        return _terminal_fields_quadrature(problem, grid, quad_points)
    if quad_points:
        logger.debug("z_N sans forme fermée, séries terminales par DCT", problem=problem.name)

    x = grid.nodes
    T = problem.T
    y = np.asarray(problem.terminal(x), dtype=float) + np.zeros(grid.K)
    g_prime = np.asarray(problem.terminal_deriv(x), dtype=float) + np.zeros(grid.K)

    z = g_prime * problem.sigma(T, x, y, 0.0)
    if problem.sigma_depends_on_z:
        delta = np.inf
        for iteration in range(1, max_iter + 1):
            z_new = g_prime * problem.sigma(T, x, y, z)
            if not np.all(np.isfinite(z_new)):
                raise TerminalFixedPointError(
                    f"Point fixe terminal divergent (itération {iteration})"
                )
            delta = float(np.max(np.abs(z_new - z)))
            z = z_new
            if delta <= tol * max(1.0, float(np.max(np.abs(z)))):
                break
        else:
            raise TerminalFixedPointError(
                f"Point fixe terminal non convergé après {max_iter} itérations "
                f"(résidu {delta:.2e})"
            )

    field_T = DecouplingField(t=T, y_series=dct2(y, grid), z_series=dct2(z, grid))
    driver_T = dct2(problem.driver(T, x, y, z), grid)
    return field_T, driver_T


def _terminal_fields_quadrature(
    problem: FbsdeProblem, grid: SpatialGrid, quad_points: int
) -> Tuple[DecouplingField, CosineSeries]:
    T = problem.T

    def y_T(x):
        return np.asarray(problem.terminal(x), dtype=float) + np.zeros_like(x)

    def z_T(x):
        return np.asarray(problem.terminal_deriv(x), dtype=float) * problem.sigma(T, x, y_T(x), 0.0)

    def f_T(x):
        return problem.driver(T, x, y_T(x), z_T(x))

    field_T = DecouplingField(
        t=T,
        y_series=cosine_integral_coefficients(y_T, grid, quad_points),
        z_series=cosine_integral_coefficients(z_T, grid, quad_points),
    )
    return field_T, cosine_integral_coefficients(f_T, grid, quad_points)


# ==================== PAS RÉTROGRADE ====================


def step_z(table: TransitionTable, next_coeffs: NextCoefficients, theta: ThetaParams) -> np.ndarray:
    """
    z(t_n, x_i) à tous les nœuds :

        (1/(θ₃Δt))·[θ₄Δt·Σ'𝒵_k Re{Φ} + Σ'((θ₃ - θ₄)𝒴_k + (1 - θ₂)Δt·F̄_k)·Re{w₁Φ}]
    """
    dt = table.dt
    t1, t2, t3, t4 = theta.as_tuple()
    z = np.zeros(table.grid.K)
    if t4 != 0.0:
        z += t4 * dt * cos_expectations(table, next_coeffs.z_coeffs, 0)
    combined = (t3 - t4) * next_coeffs.y_coeffs + (1.0 - t2) * dt * next_coeffs.f_coeffs
    z += cos_expectations(table, combined, 1)
    return z / (t3 * dt)


def step_y(
    table: TransitionTable,
    next_coeffs: NextCoefficients,
    z_now: np.ndarray,
    theta: ThetaParams,
    problem: FbsdeProblem,
    t_n: float,
    max_picard: int = 100,
    eps: float = 1e-15,
) -> PicardResult:
    """
    Résout y = θ₁Δt·f(t_n, x_i, y, z_now) + G_i par itération de point fixe.

    G_i = Σ'(𝒴_k + (1 - θ₁)Δt·F̄_k)·Re{Φ}. L'itération part de l'évaluation
    explicite Σ'(𝒴_k + Δt·F̄_k)·Re{Φ} et s'arrête quand la plus grande mise à
    jour nodale est <= eps. `iterations` compte les mises à jour supérieures
    à eps ; la non-convergence est signalée, pas levée.
    """
    dt = table.dt
    theta1 = theta.theta1
    x = table.grid.nodes
    explicit = cos_expectations(table, next_coeffs.y_coeffs + dt * next_coeffs.f_coeffs, 0)
    if theta1 == 0.0:
        return PicardResult(y=explicit, iterations=0, converged=True, residual=0.0)

    g = cos_expectations(
        table, next_coeffs.y_coeffs + (1.0 - theta1) * dt * next_coeffs.f_coeffs, 0
    )
    y = explicit
    iterations = 0
    residual = np.inf
    for _ in range(max_picard):
        y_new = theta1 * dt * problem.driver(t_n, x, y, z_now) + g
        residual = float(np.max(np.abs(y_new - y)))
        y = y_new
        if residual <= eps:
            return PicardResult(y=y, iterations=iterations, converged=True, residual=residual)
        iterations += 1
    return PicardResult(y=y, iterations=iterations, converged=False, residual=residual)


# ==================== BOUCLE COMPLÈTE ====================


def solve(
    problem: FbsdeProblem,
    grid: SpatialGrid,
    N: int,
    theta: ThetaParams,
    scheme: SchemeKind,
    max_picard: int = 100,
    eps: float = 1e-15,
    terminal_max_iter: int = 100,
    terminal_tol: float = 1e-14,
    terminal_quad_points: Optional[int] = None,
) -> BcosSolution:
    """
    Résolution BCOS complète sur une partition uniforme à N pas.

    Raises:
        TierUnavailableError: si le problème ne fournit pas les dérivées du schéma
        TerminalFixedPointError: si le point fixe terminal diverge
    """
    if int(N) != N or N < 1:
        raise InvalidParamsError(f"N doit être un entier >= 1, reçu: {N}")
    scheme = SchemeKind(scheme)
    problem.require_tier(scheme.required_tier)

    start_time = time.time()
    logger.log_solve_start(problem.name, scheme.value, N, grid.K)

    times = np.linspace(0.0, problem.T, N + 1)
    dt = problem.T / N
    x = grid.nodes

    fields: List[Optional[DecouplingField]] = [None] * (N + 1)
    drivers: List[Optional[CosineSeries]] = [None] * (N + 1)
    picard_counts = np.zeros(N, dtype=int)
    picard_converged = np.ones(N, dtype=bool)

    fields[N], drivers[N] = terminal_fields(
        problem,
        grid,
        max_iter=terminal_max_iter,
        tol=terminal_tol,
        quad_points=terminal_quad_points,
    )

    for n in range(N - 1, -1, -1):
        t_n = float(times[n])
        nxt = fields[n + 1]
        table = build_table(scheme, problem, nxt, t_n, dt, grid)
        next_coeffs = NextCoefficients.from_series(nxt, drivers[n + 1])

        z = step_z(table, next_coeffs, theta)
        picard = step_y(table, next_coeffs, z, theta, problem, t_n, max_picard, eps)

        picard_counts[n] = picard.iterations
        picard_converged[n] = picard.converged
        if not picard.converged:
            logger.log_picard_nonconvergence(n, picard.iterations, picard.residual)

        fields[n] = DecouplingField(t=t_n, y_series=dct2(picard.y, grid), z_series=dct2(z, grid))
        drivers[n] = dct2(problem.driver(t_n, x, picard.y, z), grid)

        if logger.is_debug():
            logger.debug("Pas rétrograde", step=n, picard=picard.iterations)

    duration = time.time() - start_time
    solution = BcosSolution(
        problem_name=problem.name,
        grid=grid,
        times=times,
        fields=fields,
        driver_series=drivers,
        picard_counts=picard_counts,
        picard_converged=picard_converged,
        scheme=scheme,
        theta=theta,
        x0=problem.x0,
        seconds=duration,
    )
    logger.log_solve_done(problem.name, scheme.value, solution.picard_max, duration)
    return solution


def eval_solution(
    solution: BcosSolution, n: int, x: ArrayLike, counter: Optional[ClampCounter] = None
) -> Tuple[ArrayLike, ArrayLike]:
    """
    (y_n(x̂), z_n(x̂)) par évaluation des séries (x ramené dans [a, b]).

    Raises:
        IndexOutOfRangeError: si n n'est pas dans [0, N]
    """
    if not 0 <= n <= solution.N:
        raise IndexOutOfRangeError(f"Indice de temps {n} hors de [0, {solution.N}]")
    counter = counter if counter is not None else solution.clamp_counter
    current = solution.fields[n]
    basis = trig_basis(solution.grid, x, counter, order=0)
    y, _, _ = basis.evaluate(current.y_series, order=0)
    z, _, _ = basis.evaluate(current.z_series, order=0)
    if np.ndim(x) == 0:
        return float(y), float(z)
    return y, z
