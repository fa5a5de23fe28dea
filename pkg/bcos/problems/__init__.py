"""
Problèmes de référence (exemples 1 à 3) et registre par nom.
"""
