"""
═══════════════════════════════════════════════════════════════════════════════
SOLVER SETTINGS - Valeurs par défaut du solveur et des études
═══════════════════════════════════════════════════════════════════════════════

RÔLE:
    Centralise les réglages numériques qui ne dépendent pas d'un problème
    (tolérances de Picard, point fixe terminal, parallélisme, oracle Riccati).

FEATURES:
    ✅ Configuration via variables d'environnement (.env chargé par python-dotenv)
    ✅ Overrides ponctuels sans modifier l'instance par défaut

UTILISATION:
    >>> settings = SolverSettings.from_env()
    >>> strict = settings.with_overrides(picard_tol=1e-14)

VARIABLES D'ENVIRONNEMENT:
    - BCOS_MAX_PICARD: Itérations de Picard max par pas (défaut: 100)
    - BCOS_PICARD_TOL: Seuil d'arrêt de Picard (défaut: 1e-15)
    - BCOS_TERMINAL_MAX_ITER: Itérations max du point fixe terminal (défaut: 100)
    - BCOS_TERMINAL_TOL: Tolérance relative du point fixe terminal (défaut: 1e-14)
    - BCOS_TERMINAL_QUADRATURE: Points de Gauss-Legendre des séries en T, 0 = DCT (défaut: 0)
    - BCOS_WORKERS: Threads pour les cellules d'une étude (défaut: 1)
    - BCOS_RICCATI_STEPS: Pas max de l'intégration Riccati (défaut: 100000)
    - BCOS_N_FINE: Pas de la simulation de référence (défaut: 100000)

═══════════════════════════════════════════════════════════════════════════════
"""

import os
from dataclasses import dataclass, replace
from typing import Optional

from dotenv import load_dotenv

load_dotenv()


@dataclass(frozen=True)
class SolverSettings:
    """
    Réglages numériques globaux.

    Attributes:
        max_picard: Itérations de Picard max par pas de temps
        picard_tol: Arrêt quand la mise à jour nodale max est <= picard_tol
        terminal_max_iter: Itérations max du point fixe z_N = g'·σ(T, x, g, z_N)
        terminal_tol: Tolérance relative de ce point fixe
        terminal_quad_points: Quadrature des séries terminales (0: DCT aux nœuds)
        workers: Nombre de threads d'une étude
        riccati_steps: max_step = T / riccati_steps pour l'oracle Riccati
        n_fine: Pas de temps de la simulation de référence
    """

    max_picard: int = 100
    picard_tol: float = 1e-15
    terminal_max_iter: int = 100
    terminal_tol: float = 1e-14
    terminal_quad_points: int = 0
    workers: int = 1
    riccati_steps: int = 100_000
    n_fine: int = 100_000

    @classmethod
    def from_env(cls) -> "SolverSettings":
        """
        Crée les réglages depuis les variables d'environnement.

        Examples:
            >>> # Dans .env
            >>> # BCOS_WORKERS=4
            >>> settings = SolverSettings.from_env()
        """
        return cls(
            max_picard=int(os.getenv("BCOS_MAX_PICARD", "100")),
            picard_tol=float(os.getenv("BCOS_PICARD_TOL", "1e-15")),
            terminal_max_iter=int(os.getenv("BCOS_TERMINAL_MAX_ITER", "100")),
            terminal_tol=float(os.getenv("BCOS_TERMINAL_TOL", "1e-14")),
            terminal_quad_points=int(os.getenv("BCOS_TERMINAL_QUADRATURE", "0")),
            workers=int(os.getenv("BCOS_WORKERS", "1")),
            riccati_steps=int(os.getenv("BCOS_RICCATI_STEPS", "100000")),
            n_fine=int(os.getenv("BCOS_N_FINE", "100000")),
        )

    def with_overrides(
        self,
        max_picard: Optional[int] = None,
        picard_tol: Optional[float] = None,
        terminal_max_iter: Optional[int] = None,
        terminal_tol: Optional[float] = None,
        terminal_quad_points: Optional[int] = None,
        workers: Optional[int] = None,
        riccati_steps: Optional[int] = None,
        n_fine: Optional[int] = None,
    ) -> "SolverSettings":
        """
        Nouvelle instance où seuls les arguments non None changent.

        Examples:
            >>> fast = default_settings.with_overrides(n_fine=1000)
        """
        overrides = {
            "max_picard": max_picard,
            "picard_tol": picard_tol,
            "terminal_max_iter": terminal_max_iter,
            "terminal_tol": terminal_tol,
            "terminal_quad_points": terminal_quad_points,
            "workers": workers,
            "riccati_steps": riccati_steps,
            "n_fine": n_fine,
        }
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


# Instance par défaut (chargée depuis env)
default_settings = SolverSettings.from_env()
