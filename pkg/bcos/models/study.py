"""
Modèles de paramètres : schéma theta, problème linéaire-quadratique, étude.

ThetaParams est un dataclass figé validé à la construction.
LqParams et StudyConfig sont des modèles pydantic : ils sont remplis depuis
les fichiers de configuration et les options de la CLI.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..errors import InvalidParamsError


@dataclass(frozen=True)
class ThetaParams:
    """
    Paramètres (θ₁, θ₂, θ₃, θ₄) du theta-schéma généralisé.

    Contraintes: θ₁, θ₂ ∈ [0, 1], θ₃ ∈ (0, 1], |θ₄| ≤ θ₃.

    Examples:
        >>> ThetaParams(0.5, 0.5, 0.5, -0.5)
        >>> ThetaParams.crisan_manolarakis(theta2=0.3)
    """

    theta1: float
    theta2: float
    theta3: float
    theta4: float

    def __post_init__(self):
        values = self.as_tuple()
        if not all(math.isfinite(v) for v in values):
            raise InvalidParamsError(f"theta non fini: {values}")
        if not 0.0 <= self.theta1 <= 1.0:
            raise InvalidParamsError(f"theta1 doit être dans [0, 1], reçu: {self.theta1}")
        if not 0.0 <= self.theta2 <= 1.0:
            raise InvalidParamsError(f"theta2 doit être dans [0, 1], reçu: {self.theta2}")
        if not 0.0 < self.theta3 <= 1.0:
            raise InvalidParamsError(f"theta3 doit être dans (0, 1], reçu: {self.theta3}")
        if abs(self.theta4) > self.theta3:
            raise InvalidParamsError(
                f"|theta4| doit être <= theta3, reçu: theta4={self.theta4}, theta3={self.theta3}"
            )

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.theta1, self.theta2, self.theta3, self.theta4)

    @classmethod
    def crisan_manolarakis(cls, theta2: float = 0.5) -> "ThetaParams":
        """Schéma de second ordre : θ₁ = 1/2, θ₃ = 1 - θ₂, θ₄ = 0"""
        return cls(0.5, theta2, 1.0 - theta2, 0.0)

    @classmethod
    def theta_family(cls, theta: float) -> "ThetaParams":
        """Famille à un paramètre θ₁ = θ₂ = θ₃ = θ, θ₄ = θ - 1"""
        return cls(theta, theta, theta, theta - 1.0)

    @classmethod
    def parse(cls, text: str) -> "ThetaParams":
        """
        Lit "0.5,0.5,0.5,-0.5" ou un nom de preset ("backward-euler", ...).

        Raises:
            InvalidParamsError: si le texte n'est ni un preset ni 4 réels
        """
        key = text.strip().lower()
        if key in THETA_PRESETS:
            return THETA_PRESETS[key]
        parts = [p for p in key.replace(";", ",").split(",") if p.strip()]
        if len(parts) != 4:
            raise InvalidParamsError(
                f"theta attend 4 réels ou un preset {sorted(THETA_PRESETS)}, reçu: '{text}'"
            )
        try:
            return cls(*(float(p) for p in parts))
        except ValueError as e:
            if isinstance(e, InvalidParamsError):
                raise
            raise InvalidParamsError(f"theta non numérique: '{text}'") from e


THETA_PRESETS: Dict[str, ThetaParams] = {
    "second-order": ThetaParams(0.5, 0.5, 0.5, -0.5),
    "second-order-explicit-z": ThetaParams(0.5, 0.5, 0.5, 0.0),
    "backward-euler": ThetaParams(1.0, 1.0, 1.0, 0.0),
    "crisan-manolarakis": ThetaParams(0.5, 0.5, 0.5, 0.0),
}


class LqParams(BaseModel):
    """
    Paramètres du problème linéaire-quadratique (exemple 3).

    T et x0 ne font pas partie des coefficients mais de l'instance du problème.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    A: float = -1.0
    B: float = 0.1
    beta: float = 0.0
    C: float = 1.0
    D: float = 0.01
    Sigma: float = 0.05
    R_x: float = 2.0
    R_xu: float = 0.0
    R_u: float = 2.0
    G: float = 2.0
    T: float = 1.0
    x0: float = 1.0

    @field_validator("T")
    @classmethod
    def validate_horizon(cls, v):
        if not v > 0:
            raise ValueError(f"T doit être > 0, reçu: {v}")
        return v

    # Coefficients réduits
    @property
    def A_tilde(self) -> float:
        return self.A - self.B * self.R_xu / self.R_u

    @property
    def C_tilde(self) -> float:
        return self.C - self.D * self.R_xu / self.R_u

    @property
    def R_tilde(self) -> float:
        return self.R_x - self.R_xu**2 / self.R_u


SCHEME_NAMES = ("euler", "milstein", "weak-taylor-2")
PROBLEM_NAMES = ("example1", "example2", "example3")


class StudyConfig(BaseModel):
    """
    Configuration complète d'une étude de convergence.

    Invariants: theta valide, chaque N de N_list divise N_fine, a < b.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    problem: str
    kappa_z: float = 0.0
    lq: LqParams = LqParams()
    schemes: List[str] = list(SCHEME_NAMES)
    theta: ThetaParams = THETA_PRESETS["second-order"]
    K: int = 512
    a: float = -5.0
    b: float = 5.0
    N_list: List[int] = [10, 100, 400, 1000]
    M: int = 1024
    N_fine: int = 100_000
    seed: int = 42
    out_dir: str = "results"
    max_picard: int = 100
    picard_tol: float = 1e-15
    workers: int = 1
    K_list: List[int] = []
    bench_N: int = 1000
    strong: bool = True
    dump_paths: bool = False

    @field_validator("problem")
    @classmethod
    def validate_problem(cls, v):
        if v not in PROBLEM_NAMES:
            raise ValueError(f"problème inconnu '{v}', disponibles: {list(PROBLEM_NAMES)}")
        return v

    @field_validator("theta", mode="before")
    @classmethod
    def validate_theta(cls, v):
        if isinstance(v, ThetaParams):
            return v
        if isinstance(v, str):
            return ThetaParams.parse(v)
        if isinstance(v, (list, tuple)) and len(v) == 4:
            return ThetaParams(*(float(p) for p in v))
        raise ValueError(f"theta invalide: {v}")

    @field_validator("schemes")
    @classmethod
    def validate_schemes(cls, v):
        unknown = [s for s in v if s not in SCHEME_NAMES]
        if unknown or not v:
            raise ValueError(f"schémas inconnus {unknown}, disponibles: {list(SCHEME_NAMES)}")
        return v

    @field_validator("K", "M", "N_fine", "max_picard", "workers", "bench_N")
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError(f"doit être >= 1, reçu: {v}")
        return v

    @field_validator("N_list", "K_list")
    @classmethod
    def validate_positive_list(cls, v):
        if any(n < 1 for n in v):
            raise ValueError(f"entiers >= 1 requis, reçu: {v}")
        return v

    @model_validator(mode="after")
    def validate_consistency(self):
        if not self.a < self.b:
            raise ValueError(f"a < b requis, reçu: a={self.a}, b={self.b}")
        if not self.N_list:
            raise ValueError("N_list vide")
        bad = [n for n in self.N_list if self.N_fine % n != 0]
        if bad:
            raise ValueError(f"N_fine={self.N_fine} n'est pas divisible par {bad}")
        return self

    def restricted(self, scheme: str, N: int) -> "StudyConfig":
        """Configuration réduite à une seule cellule (schéma, N)"""
        return self.model_copy(update={"schemes": [scheme], "N_list": [N]})

    @property
    def bench_K_list(self) -> List[int]:
        return self.K_list or [self.K]

    def problem_parameters(self) -> Dict[str, object]:
        """Arguments de la fabrique du problème"""
        if self.problem == "example2":
            return {"kappa_z": self.kappa_z}
        if self.problem == "example3":
            return {"params": self.lq}
        return {}

    def describe(self) -> str:
        return (
            f"{self.problem} θ={self.theta.as_tuple()} K={self.K} "
            f"[a,b]=[{self.a}, {self.b}] N={self.N_list}"
        )
