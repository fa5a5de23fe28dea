"""
Rapports d'erreur d'une étude de convergence.

ErrorReport est la ligne de errors.csv ; l'ordre des colonnes est figé par
ERROR_COLUMNS.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

ERROR_COLUMNS: List[str] = [
    "problem",
    "scheme",
    "theta1",
    "theta2",
    "theta3",
    "theta4",
    "K",
    "N",
    "M",
    "seed",
    "strong_X",
    "strong_Y",
    "strong_Z",
    "strong_total",
    "weak_Y0",
    "weak_Z0",
    "weak_total",
    "picard_max",
    "clamp_count",
    "error",
]

METRIC_COLUMNS: List[str] = [
    "strong_X",
    "strong_Y",
    "strong_Z",
    "strong_total",
    "weak_Y0",
    "weak_Z0",
    "weak_total",
]

TIMING_COLUMNS: List[str] = ["scheme", "K", "N", "seconds", "ratio_to_euler"]


@dataclass(frozen=True)
class StrongErrors:
    """Erreurs fortes L² (max en temps pour X et Y, intégrée en temps pour Z)"""

    X: float
    Y: float
    Z: float

    @property
    def total(self) -> float:
        return self.X + self.Y + self.Z

    @classmethod
    def missing(cls) -> "StrongErrors":
        return cls(np.nan, np.nan, np.nan)


@dataclass(frozen=True)
class WeakErrors:
    """Erreurs en t₀ : |y₀(x₀) - u(0, x₀)| et |z₀(x₀) - v(0, x₀)|"""

    Y0: float
    Z0: float

    @property
    def total(self) -> float:
        return self.Y0 + self.Z0

    @classmethod
    def missing(cls) -> "WeakErrors":
        return cls(np.nan, np.nan)


@dataclass
class ErrorReport:
    """
    Résultat d'une cellule (schéma, N) d'une étude.

    Attributes:
        problem, scheme, theta, K, N, M, seed: Métadonnées de la cellule
        strong: Erreurs fortes (NaN si non mesurées)
        weak: Erreurs en t₀ (NaN si non mesurées)
        picard_max: Itérations de Picard max sur les pas de temps
        clamp_count: Évaluations ramenées dans [a, b]
        seconds: Durée de la cellule
        error: Message d'erreur, vide en cas de succès
    """

    problem: str
    scheme: str
    theta: tuple
    K: int
    N: int
    M: int
    seed: int
    strong: StrongErrors = field(default_factory=StrongErrors.missing)
    weak: WeakErrors = field(default_factory=WeakErrors.missing)
    picard_max: int = 0
    clamp_count: int = 0
    seconds: float = 0.0
    error: Optional[str] = None

    @property
    def success(self) -> bool:
        return self.error is None

    def to_row(self) -> Dict[str, Any]:
        """Ligne de errors.csv dans l'ordre de ERROR_COLUMNS"""
        t1, t2, t3, t4 = self.theta
        row = {
            "problem": self.problem,
            "scheme": self.scheme,
            "theta1": t1,
            "theta2": t2,
            "theta3": t3,
            "theta4": t4,
            "K": self.K,
            "N": self.N,
            "M": self.M,
            "seed": self.seed,
            "strong_X": self.strong.X,
            "strong_Y": self.strong.Y,
            "strong_Z": self.strong.Z,
            "strong_total": self.strong.total,
            "weak_Y0": self.weak.Y0,
            "weak_Z0": self.weak.Z0,
            "weak_total": self.weak.total,
            "picard_max": self.picard_max,
            "clamp_count": self.clamp_count,
            "error": self.error or "",
        }
        return {column: row[column] for column in ERROR_COLUMNS}


@dataclass(frozen=True)
class TimingRecord:
    scheme: str
    K: int
    N: int
    seconds: float
    ratio_to_euler: float = np.nan

    def to_row(self) -> Dict[str, Any]:
        return {column: getattr(self, column) for column in TIMING_COLUMNS}
