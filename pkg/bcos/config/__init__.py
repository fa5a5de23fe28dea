"""
Module de configuration du solveur BCOS.

Centralise les réglages globaux (variables d'environnement) et la lecture
des fichiers d'étude.
"""

from .settings import SolverSettings, default_settings

__all__ = [
    "SolverSettings",
    "default_settings",
]
