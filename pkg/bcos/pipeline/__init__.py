"""
Module d'exécution des études de convergence.

Ce module fournit les presets, le contexte partagé, l'exécuteur des cellules
(schéma, N) et l'écriture des fichiers de résultats.
"""
