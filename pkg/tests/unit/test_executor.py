"""
Tests unitaires de l'exécuteur d'études et des fichiers de résultats.

Le problème de la chaleur (solution exacte) remplace les exemples pour que
chaque cellule reste instantanée.
"""

import dataclasses
import math

import pandas as pd
import pytest

from bcos.core.solver import solve as real_solve
from bcos.errors import RiccatiBlowupError
from bcos.models.report import ERROR_COLUMNS, TIMING_COLUMNS
from bcos.models.study import StudyConfig
from bcos.pipeline.executor import StudyExecutor
from bcos.pipeline.writers import (
    write_errors_csv,
    write_plot_script,
    write_rates_csv,
    write_timing_csv,
)
from bcos.metrics.convergence import rates_table


@pytest.mark.unit
class TestStudyExecutor:
    """Tests de run_study / run_single / emit_timing"""

    @pytest.fixture
    def config(self, tmp_path):
        return StudyConfig(
            problem="example2",
            schemes=["euler", "milstein"],
            N_list=[2, 4],
            K=64,
            a=-10.0,
            b=10.0,
            M=4,
            N_fine=8,
            seed=1,
            out_dir=str(tmp_path),
        )

    @pytest.fixture
    def executor(self, heat_problem):
        return StudyExecutor(problem_factory=lambda name, **params: heat_problem)

    def test_all_cells_succeed(self, executor, config):
        """Test: une cellule par (schéma, N), dans l'ordre de la configuration"""
        context = executor.run_study(config)

        reports = context.ordered_reports()
        assert context.success
        assert [(r.scheme, r.N) for r in reports] == [
            ("euler", 2),
            ("euler", 4),
            ("milstein", 2),
            ("milstein", 4),
        ]
        assert all(math.isfinite(r.strong.total) for r in reports)
        assert all(r.weak.total < 1e-8 for r in reports)
        assert context.horizon == 1.0

    def test_failed_cell_does_not_stop_study(self, executor, config, mocker):
        """Test: une cellule en échec → message dans `error`, les autres continuent"""

        # Arrange
        def flaky_solve(problem, grid, N, theta, scheme, **kwargs):
            if scheme.value == "milstein" and N == 4:
                raise RuntimeError("boom")
            return real_solve(problem, grid, N, theta, scheme, **kwargs)

        mocker.patch("bcos.pipeline.executor.solve", side_effect=flaky_solve)

        # Act
        context = executor.run_study(config)

        # Assert
        reports = context.ordered_reports()
        assert context.failures == 1
        assert not context.success
        assert len(reports) == 4
        failed = [r for r in reports if not r.success]
        assert [(r.scheme, r.N) for r in failed] == [("milstein", 4)]
        assert failed[0].error == "RuntimeError: boom"
        assert all(math.isnan(v) for v in (failed[0].strong.total, failed[0].weak.total))

    def test_problem_failure_marks_every_cell(self, config):
        """Test: références indisponibles → toutes les cellules en échec"""

        def broken_factory(name, **params):
            raise RiccatiBlowupError("a(t) explose")

        context = StudyExecutor(problem_factory=broken_factory).run_study(config)

        assert context.failures == 4
        assert all(
            r.error == "RiccatiBlowupError: a(t) explose" for r in context.ordered_reports()
        )

    def test_problem_without_analytic_fields(self, heat_problem, config):
        """Test: pas de champs (u, v) exacts → MissingAnalyticFieldsError dans chaque cellule"""
        # Arrange
        bare = dataclasses.replace(heat_problem, analytic_fields=None)
        executor = StudyExecutor(problem_factory=lambda name, **params: bare)

        # Act
        context = executor.run_study(config)

        # Assert
        reports = context.ordered_reports()
        assert context.failures == 4
        assert all(r.error.startswith("MissingAnalyticFieldsError") for r in reports)

    def test_workers_do_not_change_results(self, executor, config):
        """Test: exécution parallèle → mêmes rapports, même ordre"""
        serial = executor.run_study(config).ordered_reports()
        parallel = executor.run_study(config.model_copy(update={"workers": 2})).ordered_reports()

        assert [r.to_row()["strong_total"] for r in serial] == [
            r.to_row()["strong_total"] for r in parallel
        ]
        assert [(r.scheme, r.N) for r in parallel] == [(r.scheme, r.N) for r in serial]

    def test_weak_only_study_skips_reference_simulation(self, executor, config, mocker):
        spy = mocker.patch("bcos.pipeline.executor.reference_path_family")

        context = executor.run_study(config.model_copy(update={"strong": False}))

        spy.assert_not_called()
        assert context.success
        assert all(math.isnan(r.strong.total) for r in context.ordered_reports())

    def test_dump_paths(self, executor, config, tmp_path):
        executor.run_study(config.model_copy(update={"dump_paths": True}))

        assert (tmp_path / "paths_euler_N2.csv").is_file()
        assert (tmp_path / "paths_milstein_N4.csv").is_file()

    def test_run_single(self, executor, config):
        report = executor.run_single(config)

        assert (report.scheme, report.N) == ("euler", 2)
        assert report.success

    def test_emit_timing_always_includes_euler(self, executor, config):
        """Test: Euler est mesuré pour chaque K et sert de référence au ratio"""
        bench = config.model_copy(update={"schemes": ["milstein"], "K_list": [16, 32], "bench_N": 2})

        records = executor.emit_timing(bench)

        assert [(r.scheme, r.K) for r in records] == [
            ("euler", 16),
            ("milstein", 16),
            ("euler", 32),
            ("milstein", 32),
        ]
        assert all(r.ratio_to_euler == 1.0 for r in records if r.scheme == "euler")
        assert all(r.N == 2 for r in records)


@pytest.mark.unit
class TestWriters:
    """Tests des fichiers errors.csv, rates.csv, timing.csv et du script de tracé"""

    @pytest.fixture
    def reports(self, heat_problem, tmp_path):
        config = StudyConfig(
            problem="example2",
            schemes=["euler"],
            N_list=[2, 4],
            K=32,
            a=-10.0,
            b=10.0,
            M=4,
            N_fine=8,
            seed=3,
            out_dir=str(tmp_path),
        )
        executor = StudyExecutor(problem_factory=lambda name, **params: heat_problem)
        return executor.run_study(config).ordered_reports()

    def test_errors_csv(self, reports, tmp_path):
        """Test: colonnes figées, fins de ligne LF, champ error vide en cas de succès"""
        target = write_errors_csv(reports, str(tmp_path / "out"))

        frame = pd.read_csv(target)
        assert list(frame.columns) == ERROR_COLUMNS
        assert len(frame) == 2
        assert frame["error"].isna().all()
        assert b"\r\n" not in target.read_bytes()

    def test_errors_csv_is_deterministic(self, reports, tmp_path):
        first = write_errors_csv(reports, str(tmp_path / "a")).read_bytes()
        second = write_errors_csv(reports, str(tmp_path / "b")).read_bytes()

        assert first == second

    def test_rates_and_timing(self, reports, tmp_path):
        rates = write_rates_csv(rates_table(reports), str(tmp_path))
        timing = write_timing_csv([], str(tmp_path))

        assert pd.read_csv(rates)["scheme"].tolist() == ["euler"]
        assert pd.read_csv(timing).columns.tolist() == TIMING_COLUMNS

    def test_plot_script(self, tmp_path):
        """Test: script autonome qui relit errors.csv"""
        target = write_plot_script(str(tmp_path), "example3", 1.0, {"euler": "Euler"})

        source = target.read_text(encoding="utf-8")
        compile(source, str(target), "exec")
        assert "errors.csv" in source
        assert "T = 1.0" in source
        assert "pente {slope:g}" in source
