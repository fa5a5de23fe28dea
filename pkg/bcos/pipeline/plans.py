"""
Presets d'étude prédéfinis.

Un preset fixe le problème et les paramètres numériques de référence
(intervalle de troncature, K, θ) d'une étude de convergence.

Presets:
    - "example1": T = 10, x0 = 1, K = 512, intervalle dérivé des cumulants
    - "example2": κ_z = 0, [a, b] = [-3, 5], K = 1024
    - "example2-zdrift": κ_z = 1e-2, même grille, θ₄ = -1/2
    - "example3": [a, b] = [-5, 5], K = 512, θ = (½, ½, ½, -½)

Comment ajouter un nouveau preset:
    1. Définir le preset dans AVAILABLE_PRESETS
    2. Ajouter un fichier configs/<nom>.cfg si besoin
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List

from ..problems.examples import EXAMPLE1_RANGE


@dataclass
class StudyPreset:
    """
    Paramètres de référence d'une étude.

    Attributes:
        name: Nom du preset (valeur de la clé PROBLEM)
        problem: Fabrique de problème utilisée ("example1", ...)
        description: Description lisible
        values: Champs de StudyConfig fixés par le preset

    Exemple:
        >>> preset = get_preset("example2-zdrift")
        >>> preset.values["kappa_z"]
        0.01
    """

    name: str
    problem: str
    description: str
    values: Dict[str, Any] = field(default_factory=dict)

    def as_config_values(self) -> Dict[str, Any]:
        """Valeurs initiales d'un StudyConfig (avant fichier et CLI)"""
        return {"problem": self.problem, **self.values}

    def __repr__(self) -> str:
        return f"Preset({self.name}: {self.problem}, K={self.values.get('K')})"


# ==================== PRESETS DISPONIBLES ====================

AVAILABLE_PRESETS = {
    "example1": StudyPreset(
        name="example1",
        problem="example1",
        description="Diffusion découplée, driver non linéaire, T = 10",
        values={
            "a": EXAMPLE1_RANGE[0],
            "b": EXAMPLE1_RANGE[1],
            "K": 512,
            "theta": "0.5,0.5,0.5,0",
        },
    ),
    "example2": StudyPreset(
        name="example2",
        problem="example2",
        description="Couplage en Y, κ_z = 0",
        values={"kappa_z": 0.0, "a": -3.0, "b": 5.0, "K": 1024, "theta": "second-order"},
    ),
    "example2-zdrift": StudyPreset(
        name="example2-zdrift",
        problem="example2",
        description="Couplage en Y et Z dans la dérive, κ_z = 1e-2",
        values={"kappa_z": 1e-2, "a": -3.0, "b": 5.0, "K": 1024, "theta": "second-order"},
    ),
    "example3": StudyPreset(
        name="example3",
        problem="example3",
        description="Contrôle linéaire-quadratique entièrement couplé",
        values={"a": -5.0, "b": 5.0, "K": 512, "theta": "second-order"},
    ),
}


def get_preset(name: str) -> StudyPreset:
    """
    Récupère un preset par son nom.

    Raises:
        KeyError: Si le preset n'existe pas

    Exemple:
        >>> get_preset("example3").values["K"]
        512
    """
    if name not in AVAILABLE_PRESETS:
        raise KeyError(
            f"Preset '{name}' inconnu. Presets disponibles: {list(AVAILABLE_PRESETS.keys())}"
        )
    return AVAILABLE_PRESETS[name]


def list_presets() -> List[str]:
    """
    Exemple:
        >>> list_presets()
        ['example1', 'example2', 'example2-zdrift', 'example3']
    """
    return list(AVAILABLE_PRESETS.keys())
