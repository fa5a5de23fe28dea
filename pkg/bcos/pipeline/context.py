"""
Contexte d'exécution d'une étude de convergence.

Le contexte accumule les rapports des cellules (schéma, N) dans l'ordre de
la configuration, ainsi qu'une trace lisible de l'exécution.

Exemple de flux:
    1. StudyConfig → Context créé
    2. Chaque cellule → add_report (succès) ou set_error (échec)
    3. Context → errors.csv, rates.csv, script de tracé
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..models.report import ErrorReport
from ..models.study import StudyConfig


@dataclass
class StudyContext:
    """
    Contexte partagé par les cellules d'une étude.

    Attributes:
        config: Configuration de l'étude
        reports: Rapports indexés par (schéma, N)
        failures: Nombre de cellules en échec
        horizon: Horizon T du problème (pour h = T/N)
        execution_trace: Historique lisible (debug)
    """

    config: StudyConfig
    reports: Dict[Tuple[str, int], ErrorReport] = field(default_factory=dict)
    failures: int = 0
    horizon: float = 1.0
    execution_trace: List[str] = field(default_factory=list)

    def add_trace(self, cell: str, action: str):
        """
        Exemple:
            >>> context.add_trace("euler/N=10", "solve 0.4s")
        """
        self.execution_trace.append(f"{cell}: {action}")

    def add_report(self, report: ErrorReport):
        self.reports[(report.scheme, report.N)] = report
        if report.success:
            self.add_trace(f"{report.scheme}/N={report.N}", f"ok {report.seconds:.1f}s")
        else:
            self.set_error(report)

    def set_error(self, report: ErrorReport):
        """Enregistre une cellule en échec (le rapport porte le message)"""
        self.reports[(report.scheme, report.N)] = report
        self.failures += 1
        self.add_trace(f"{report.scheme}/N={report.N}", f"ERROR - {report.error}")

    def ordered_reports(self) -> List[ErrorReport]:
        """Rapports dans l'ordre (schémas, N_list) de la configuration"""
        ordered = []
        for scheme in self.config.schemes:
            for N in self.config.N_list:
                report: Optional[ErrorReport] = self.reports.get((scheme, N))
                if report is not None:
                    ordered.append(report)
        return ordered

    @property
    def success(self) -> bool:
        return self.failures == 0
