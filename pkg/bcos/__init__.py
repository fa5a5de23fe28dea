# Solveur BCOS pour FBSDE scalaires entièrement couplés
# Séries cosinus, schémas de Taylor du second ordre et études de convergence
