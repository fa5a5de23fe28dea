"""
Modèles de données : problème FBSDE, paramètres d'étude et rapports d'erreur.
"""
