"""
Noyau numérique : séries cosinus, moteur de transition et solveur BCOS.
"""
