"""
Erreurs fortes, erreurs en t₀ et pentes de convergence empiriques.
"""

from typing import Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd

from ..core.solver import BcosSolution, eval_solution
from ..errors import ShapeMismatchError
from ..models.report import METRIC_COLUMNS, ErrorReport, StrongErrors, WeakErrors


def strong_errors(approx, reference) -> StrongErrors:
    """
    Erreurs fortes L² entre deux PathSet couplés.

        X : max_n sqrt(moyenne_m |ΔX|²)        (idem Y)
        Z : sqrt((T/(N·M))·Σ_{n<N} Σ_m |ΔZ|²)

    Raises:
        ShapeMismatchError: si les temps ou le nombre de trajectoires diffèrent
    """
    if approx.X.shape != reference.X.shape:
        raise ShapeMismatchError(
            f"Formes incompatibles: {approx.X.shape} vs {reference.X.shape}"
        )
    if not np.allclose(approx.times, reference.times, rtol=0.0, atol=1e-12):
        raise ShapeMismatchError("Grilles de temps différentes")

    N = approx.N
    T = float(approx.times[-1])
    x_err = np.sqrt(np.mean((approx.X - reference.X) ** 2, axis=0)).max()
    y_err = np.sqrt(np.mean((approx.Y - reference.Y) ** 2, axis=0)).max()
    dz2 = (approx.Z[:, :N] - reference.Z[:, :N]) ** 2
    z_err = np.sqrt(T / N * np.mean(dz2, axis=0).sum())
    return StrongErrors(X=float(x_err), Y=float(y_err), Z=float(z_err))


def weak_errors_t0(solution: BcosSolution, u0: float, v0: float) -> WeakErrors:
    """(|y₀(x₀) - u0|, |z₀(x₀) - v0|)"""
    y0, z0 = eval_solution(solution, 0, solution.x0)
    return WeakErrors(Y0=abs(y0 - float(u0)), Z0=abs(z0 - float(v0)))


def fit_slope(points: Iterable[Tuple[int, float]], T: float = 1.0) -> float:
    """
    Pente des moindres carrés de log(erreur) contre log(h), h = T/N.

    Returns:
        L'ordre de convergence, ou NaN si les données sont dégénérées
        (moins de deux N distincts, erreur nulle ou non finie)
    """
    points = list(points)
    if len(points) < 2:
        return float("nan")
    N = np.array([p[0] for p in points], dtype=float)
    errors = np.array([p[1] for p in points], dtype=float)
    if not np.all(np.isfinite(errors)) or np.any(errors <= 0) or np.unique(N).size < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(T / N), np.log(errors), 1)
    return float(slope)


def rates_table(reports: Sequence[ErrorReport], T: float = 1.0) -> pd.DataFrame:
    """Pente par schéma (lignes) et par métrique (colonnes), cellules réussies seules"""
    rows: List[dict] = []
    schemes = list(dict.fromkeys(r.scheme for r in reports))
    for scheme in schemes:
        cells = [r for r in reports if r.scheme == scheme and r.success]
        row = {"scheme": scheme}
        for metric in METRIC_COLUMNS:
            row[metric] = fit_slope([(r.N, r.to_row()[metric]) for r in cells], T)
        rows.append(row)
    return pd.DataFrame(rows, columns=["scheme", *METRIC_COLUMNS])
