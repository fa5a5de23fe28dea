"""
Trajectoires de référence et trajectoires approchées.

- Référence : schéma de Taylor faible d'ordre 2.0 sur la grille fine, avec les
  champs analytiques (u, v) à la place des séries cosinus.
- Approchée : schéma choisi sur la grille grossière, coefficients composés avec
  les champs numériques de t_{n+1} comme dans le solveur, Y et Z lus dans les
  séries le long du chemin.

Les deux utilisent les mêmes incréments browniens (BrownianBundle).
"""

from dataclasses import dataclass
from functools import reduce
from math import gcd
from pathlib import Path
from typing import Dict, Iterable, Optional

import numpy as np
import pandas as pd

from ..core.cosine import ClampCounter, trig_basis
from ..core.solver import BcosSolution, eval_solution
from ..core.transition import SchemeKind, coefficients, transition_coefficients
from ..errors import MissingAnalyticFieldsError, ShapeMismatchError, StepCountMismatchError
from ..models.problem import AnalyticFields, FbsdeProblem, compose_jet
from ..utils.logging import SolverLogger
from .brownian import BrownianBundle

logger = SolverLogger("reference_sim")


@dataclass(frozen=True)
class PathSet:
    """
    Trajectoires (X, Y, Z) aux instants t_n, de forme (M, N + 1).

    Z[:, N] est rempli mais n'entre pas dans les erreurs.
    """

    times: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray

    def __post_init__(self):
        shape = (self.X.shape[0], len(self.times))
        for name in ("X", "Y", "Z"):
            if getattr(self, name).shape != shape:
                raise ShapeMismatchError(
                    f"{name} de forme {getattr(self, name).shape}, attendu {shape}"
                )

    @property
    def M(self) -> int:
        return self.X.shape[0]

    @property
    def N(self) -> int:
        return len(self.times) - 1


def _analytic_fields(problem: FbsdeProblem, fields: Optional[AnalyticFields]) -> AnalyticFields:
    fields = fields or problem.analytic_fields
    if fields is None:
        raise MissingAnalyticFieldsError(
            f"Le problème '{problem.name}' n'a pas de champs analytiques"
        )
    return fields


def reference_path_family(
    problem: FbsdeProblem,
    bundle: BrownianBundle,
    N_list: Iterable[int],
    fields: Optional[AnalyticFields] = None,
) -> Dict[int, PathSet]:
    """
    Une seule simulation fine, échantillonnée à chaque N de N_list.

    X est enregistré tous les pgcd(N_fine / N) pas fins.

    Raises:
        MissingAnalyticFieldsError: si aucun champ analytique n'est disponible
        NonDivisorAggregationError: si un N ne divise pas N_fine
    """
    fields = _analytic_fields(problem, fields)
    N_list = sorted(set(int(N) for N in N_list))
    blocks = {N: bundle.block_size(N) for N in N_list}
    stride = reduce(gcd, blocks.values())

    h = problem.T / bundle.N_fine
    X = np.full(bundle.M, problem.x0, dtype=float)
    recorded = [X.copy()]
    step = 0
    logger.info(
        "Simulation de référence",
        problem=problem.name,
        M=bundle.M,
        N_fine=bundle.N_fine,
        stride=stride,
    )
    for chunk in bundle.iter_fine_chunks():
        for dW in chunk.T:
            t = step * h
            c = coefficients(SchemeKind.WEAK_TAYLOR_2, problem, fields.at(t), t, h, X)
            X = X + c.m_bar * h + c.s_bar * dW + c.kappa_bar * dW**2
            step += 1
            if step % stride == 0:
                recorded.append(X.copy())
    recorded = np.stack(recorded, axis=1)

    family = {}
    for N in N_list:
        columns = np.arange(N + 1) * (blocks[N] // stride)
        times = np.linspace(0.0, problem.T, N + 1)
        X_N = recorded[:, columns]
        Y_N = np.empty_like(X_N)
        Z_N = np.empty_like(X_N)
        for n, t in enumerate(times):
            Y_N[:, n] = fields.u(t, X_N[:, n])
            Z_N[:, n] = fields.v(t, X_N[:, n])
        Y_N[:, N] = problem.terminal(X_N[:, N])
        family[N] = PathSet(times=times, X=X_N, Y=Y_N, Z=Z_N)
    return family


def reference_paths(
    problem: FbsdeProblem,
    bundle: BrownianBundle,
    N: int,
    fields: Optional[AnalyticFields] = None,
) -> PathSet:
    """reference_path_family pour un seul N"""
    return reference_path_family(problem, bundle, [N], fields)[N]


def approx_paths(
    problem: FbsdeProblem,
    solution: BcosSolution,
    scheme: SchemeKind,
    bundle: BrownianBundle,
    N: int,
    counter: Optional[ClampCounter] = None,
) -> PathSet:
    """
    Trajectoires sous les champs numériques, incréments bundle.aggregate(N).

    Raises:
        StepCountMismatchError: si la solution n'a pas N pas
    """
    if solution.N != N:
        raise StepCountMismatchError(f"Solution à {solution.N} pas, {N} demandés")
    scheme = SchemeKind(scheme)
    tier = scheme.required_tier
    problem.require_tier(tier)
    counter = counter if counter is not None else solution.clamp_counter
    dW = bundle.aggregate(N)
    dt = solution.dt
    grid = solution.grid

    X = np.empty((bundle.M, N + 1))
    Y = np.empty_like(X)
    Z = np.empty_like(X)
    X[:, 0] = problem.x0
    for n in range(N):
        t_n = float(solution.times[n])
        x = X[:, n]
        # une base par pas : y_n, z_n et le jet de t_{n+1} sont lus aux mêmes points
        basis = trig_basis(grid, x, counter, order=int(tier))
        Y[:, n] = basis.evaluate(solution.fields[n].y_series, order=0)[0]
        Z[:, n] = basis.evaluate(solution.fields[n].z_series, order=0)[0]
        jet = solution.fields[n + 1].jet_on(basis, order=int(tier))
        c = transition_coefficients(scheme, compose_jet(problem, jet, t_n, x, tier), dt)
        X[:, n + 1] = x + c.m_bar * dt + c.s_bar * dW[:, n] + c.kappa_bar * dW[:, n] ** 2
    _, Z[:, N] = eval_solution(solution, N, X[:, N], counter)
    Y[:, N] = problem.terminal(X[:, N])
    return PathSet(times=solution.times.copy(), X=X, Y=Y, Z=Z)


def dump_paths(paths: PathSet, path: str) -> Path:
    """
    Écrit les trajectoires en CSV long (path, n, t, X, Y, Z).

    Returns:
        Chemin du fichier écrit
    """
    M, columns = paths.X.shape
    frame = pd.DataFrame(
        {
            "path": np.repeat(np.arange(M), columns),
            "n": np.tile(np.arange(columns), M),
            "t": np.tile(paths.times, M),
            "X": paths.X.ravel(),
            "Y": paths.Y.ravel(),
            "Z": paths.Z.ravel(),
        }
    )
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(
        target, index=False, float_format="%.10e", lineterminator="\n", encoding="utf-8"
    )
    return target
