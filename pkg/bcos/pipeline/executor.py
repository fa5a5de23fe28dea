"""
Exécuteur d'études de convergence.

Le StudyExecutor prend un StudyConfig, résout chaque cellule (schéma, N),
simule les trajectoires couplées et mesure les erreurs.

Architecture:
    1. Problème + références (trajectoires fines, valeurs u(0, x0), v(0, x0))
    2. Cellules (schéma, N) → solve → approx_paths → strong/weak errors
    3. StudyContext → errors.csv, rates.csv, plot_convergence.py

Gestion d'erreurs:
    - Si une cellule échoue, l'étude continue avec les cellules suivantes
    - Le message est recopié dans la colonne `error` de errors.csv
    - Le code de sortie de la CLI devient 1

Exemple:
    >>> executor = StudyExecutor()
    >>> context = executor.run_study(load_study_config("configs/example3.cfg"))
"""

import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from ..config.settings import SolverSettings, default_settings
from ..core.cosine import make_grid
from ..core.solver import solve
from ..core.transition import SchemeKind
from ..errors import MissingAnalyticFieldsError
from ..metrics.convergence import strong_errors, weak_errors_t0
from ..models.problem import FbsdeProblem
from ..models.report import ErrorReport, StrongErrors, TimingRecord
from ..models.study import StudyConfig
from ..problems.examples import get_problem
from ..simulation.brownian import BrownianBundle, make_brownian
from ..simulation.paths import PathSet, approx_paths, dump_paths, reference_path_family
from ..utils.logging import SolverLogger
from .context import StudyContext


class StudyExecutor:
    """
    Exécuteur des cellules d'une étude.

    Attributes:
        settings: Réglages globaux (point fixe terminal)
        problem_factory: Fabrique (nom, **params) -> FbsdeProblem
        logger: Logger du composant
    """

    def __init__(
        self,
        settings: SolverSettings = default_settings,
        problem_factory: Callable[..., FbsdeProblem] = get_problem,
    ):
        self.settings = settings
        self.problem_factory = problem_factory
        self.logger = SolverLogger("study_executor")

    def build_problem(self, config: StudyConfig) -> FbsdeProblem:
        return self.problem_factory(config.problem, **config.problem_parameters())

    # ==================== RÉFÉRENCES ====================

    def _references(
        self, config: StudyConfig, problem: FbsdeProblem
    ) -> Tuple[Optional[BrownianBundle], Dict[int, PathSet], Tuple[float, float]]:
        if problem.analytic_fields is None:
            raise MissingAnalyticFieldsError(
                f"Le problème '{problem.name}' n'a pas de champs analytiques"
            )
        u0 = float(problem.analytic_u(0.0, problem.x0))
        v0 = float(problem.analytic_v(0.0, problem.x0))
        if not config.strong:
            return None, {}, (u0, v0)
        bundle = make_brownian(config.seed, config.M, config.N_fine, T=problem.T)
        references = reference_path_family(problem, bundle, config.N_list)
        return bundle, references, (u0, v0)

    # ==================== CELLULES ====================

    def _empty_report(self, config: StudyConfig, problem_name: str, scheme: str, N: int) -> ErrorReport:
        return ErrorReport(
            problem=problem_name,
            scheme=scheme,
            theta=config.theta.as_tuple(),
            K=config.K,
            N=N,
            M=config.M,
            seed=config.seed,
        )

    def run_cell(
        self,
        config: StudyConfig,
        problem: FbsdeProblem,
        scheme: str,
        N: int,
        bundle: Optional[BrownianBundle],
        references: Dict[int, PathSet],
        reference_values: Tuple[float, float],
    ) -> ErrorReport:
        """
        Résout et mesure une cellule (schéma, N).

        Toute exception est capturée et recopiée dans le rapport.
        """
        start_time = time.perf_counter()
        report = self._empty_report(config, problem.name, scheme, N)
        try:
            grid = make_grid(config.a, config.b, config.K)
            solution = solve(
                problem,
                grid,
                N,
                config.theta,
                SchemeKind(scheme),
                max_picard=config.max_picard,
                eps=config.picard_tol,
                terminal_max_iter=self.settings.terminal_max_iter,
                terminal_tol=self.settings.terminal_tol,
                terminal_quad_points=self.settings.terminal_quad_points or None,
            )
            report.weak = weak_errors_t0(solution, *reference_values)
            if config.strong:
                approx = approx_paths(problem, solution, scheme, bundle, N)
                report.strong = strong_errors(approx, references[N])
                if config.dump_paths:
                    dump_paths(approx, Path(config.out_dir) / f"paths_{scheme}_N{N}.csv")
            else:
                report.strong = StrongErrors.missing()
            report.picard_max = solution.picard_max
            report.clamp_count = solution.clamp_counter.count
        except Exception as e:
            self.logger.error(
                f"Erreur lors de la cellule {scheme} N={N}: {str(e)}",
                scheme=scheme,
                N=N,
            )
            report.error = f"{type(e).__name__}: {e}"
        report.seconds = time.perf_counter() - start_time

        self.logger.log_cell_result(
            scheme,
            N,
            report.success,
            report.seconds,
            strong_total=report.strong.total if report.success and config.strong else None,
            weak_total=report.weak.total if report.success else None,
        )
        return report

    def run_study(self, config: StudyConfig) -> StudyContext:
        """
        Exécute toutes les cellules (schémas × N_list) d'une étude.

        Les cellules indépendantes tournent dans un pool de `workers` threads ;
        l'ordre des rapports suit la configuration.
        """
        start_time = time.perf_counter()
        context = StudyContext(config=config)
        cells = [(scheme, N) for scheme in config.schemes for N in config.N_list]

        self.logger.info(
            "🚀 Début de l'étude",
            study=config.describe(),
            cells=len(cells),
            workers=config.workers,
        )

        try:
            problem = self.build_problem(config)
            bundle, references, reference_values = self._references(config, problem)
            context.horizon = problem.T
        except Exception as e:
            self.logger.error(f"Références indisponibles: {str(e)}", problem=config.problem)
            for scheme, N in cells:
                report = self._empty_report(config, config.problem, scheme, N)
                report.error = f"{type(e).__name__}: {e}"
                context.set_error(report)
            self.logger.log_study_summary(len(cells), context.failures, config.out_dir)
            return context
        context.add_trace("references", f"{len(references)} grilles, u0={reference_values[0]:.6e}")

        def run(cell: Tuple[str, int]) -> ErrorReport:
            scheme, N = cell
            return self.run_cell(config, problem, scheme, N, bundle, references, reference_values)

        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                reports = list(pool.map(run, cells))
        else:
            reports = [run(cell) for cell in cells]

        for report in reports:
            context.add_report(report)

        self.logger.info(
            "✅ Cellules terminées",
            execution_time=f"{time.perf_counter() - start_time:.2f}s",
        )
        self.logger.log_study_summary(len(cells), context.failures, config.out_dir)
        return context

    def run_single(self, config: StudyConfig) -> ErrorReport:
        """Une seule cellule : premier schéma et premier N de la configuration"""
        restricted = config.restricted(config.schemes[0], config.N_list[0])
        return self.run_study(restricted).ordered_reports()[0]

    # ==================== TEMPS DE CALCUL ====================

    def emit_timing(self, config: StudyConfig) -> List[TimingRecord]:
        """
        Temps de résolution par (schéma, K) à N = bench_N fixé.

        Euler est toujours mesuré pour servir de référence au ratio.
        """
        problem = self.build_problem(config)
        schemes = list(dict.fromkeys(["euler", *config.schemes]))
        records: List[TimingRecord] = []
        for K in config.bench_K_list:
            grid = make_grid(config.a, config.b, K)
            seconds: Dict[str, float] = {}
            for scheme in schemes:
                start_time = time.perf_counter()
                solve(
                    problem,
                    grid,
                    config.bench_N,
                    config.theta,
                    SchemeKind(scheme),
                    max_picard=config.max_picard,
                    eps=config.picard_tol,
                    terminal_max_iter=self.settings.terminal_max_iter,
                    terminal_tol=self.settings.terminal_tol,
                    terminal_quad_points=self.settings.terminal_quad_points or None,
                )
                seconds[scheme] = time.perf_counter() - start_time
            for scheme in schemes:
                records.append(
                    TimingRecord(
                        scheme=scheme,
                        K=K,
                        N=config.bench_N,
                        seconds=seconds[scheme],
                        ratio_to_euler=seconds[scheme] / seconds["euler"],
                    )
                )
            self.logger.info("⏱️  Temps mesurés", K=K, **{s: f"{v:.2f}s" for s, v in seconds.items()})
        return records
