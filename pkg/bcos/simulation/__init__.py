"""
Simulation Monte Carlo : incréments browniens communs, trajectoires de
référence et approchées, oracle Riccati.
"""
