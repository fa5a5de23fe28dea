"""
Exceptions du solveur BCOS.

Chaque type d'erreur hérite de BcosError ET de l'exception standard la plus
proche (ValueError, IndexError, RuntimeError) : l'appelant peut attraper
l'une ou l'autre.

La non-convergence des itérations de Picard n'est pas une exception : elle est
signalée dans la solution (picard_converged) et dans les logs.
"""

from typing import Optional


class BcosError(Exception):
    """Racine de toutes les erreurs du package"""


# ==================== GRILLE / SÉRIES ====================


class InvalidBoundsError(BcosError, ValueError):
    """Bornes de troncature invalides (a >= b)"""


class InvalidSizeError(BcosError, ValueError):
    """Nombre de termes de Fourier invalide (K < 1)"""


class LengthMismatchError(BcosError, ValueError):
    """Longueur d'échantillons différente de K"""


# ==================== PROBLÈME / TRANSITION ====================


class TierUnavailableError(BcosError, ValueError):
    """Le problème ne fournit pas les dérivées partielles requises par le schéma"""


class InvalidParamsError(BcosError, ValueError):
    """Paramètres de problème ou de schéma invalides"""


class UnsupportedPowerError(BcosError, ValueError):
    """Puissance de ΔW non supportée (k > 2)"""


# ==================== SOLVEUR ====================


class TerminalFixedPointError(BcosError, RuntimeError):
    """Le point fixe terminal z = g'·σ(T, x, g, z) ne converge pas"""


class IndexOutOfRangeError(BcosError, IndexError):
    """Indice de pas de temps hors de [0, N]"""


# ==================== SIMULATION / MÉTRIQUES ====================


class MissingAnalyticFieldsError(BcosError, ValueError):
    """Le problème n'a pas de champs analytiques (u, v)"""


class StepCountMismatchError(BcosError, ValueError):
    """Nombre de pas de la solution différent de celui demandé"""


class NonDivisorAggregationError(BcosError, ValueError):
    """N ne divise pas N_fine"""


class RiccatiBlowupError(BcosError, RuntimeError):
    """Explosion de la solution du système de Riccati"""


class ShapeMismatchError(BcosError, ValueError):
    """Ensembles de trajectoires incompatibles"""


# ==================== CONFIGURATION ====================


class ConfigError(BcosError, ValueError):
    """
    Erreur de configuration d'étude.

    Attributes:
        field: Clé ou champ fautif (optionnel)
        line: Numéro de ligne dans le fichier de config (optionnel)
    """

    def __init__(
        self, message: str, field: Optional[str] = None, line: Optional[int] = None
    ):
        self.field = field
        self.line = line
        location = []
        if line is not None:
            location.append(f"ligne {line}")
        if field:
            location.append(f"champ '{field}'")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")
