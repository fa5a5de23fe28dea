"""
Tests unitaires de la ligne de commande (parsing, codes de sortie, rapport).

L'exécuteur est simulé : seules la construction de la configuration et
l'écriture des fichiers sont testées ici.
"""

import pandas as pd
import pytest

from bcos.errors import RiccatiBlowupError
from bcos.main import (
    EXIT_CELL_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    build_parser,
    format_report,
    main,
    overrides_from_args,
)
from bcos.models.report import ErrorReport, StrongErrors, WeakErrors
from bcos.models.study import StudyConfig
from bcos.pipeline.context import StudyContext
from bcos.pipeline.executor import StudyExecutor


def make_report(scheme="euler", N=10, error=None):
    return ErrorReport(
        problem="example2",
        scheme=scheme,
        theta=(0.5, 0.5, 0.5, -0.5),
        K=64,
        N=N,
        M=16,
        seed=3,
        strong=StrongErrors(X=1e-3, Y=2e-3, Z=3e-3),
        weak=WeakErrors(Y0=1e-4, Z0=2e-4),
        picard_max=4,
        seconds=0.2,
        error=error,
    )


def parse(argv):
    args = build_parser().parse_args(argv)
    return overrides_from_args(args)


@pytest.mark.unit
@pytest.mark.cli
class TestParser:
    """Tests des options → surcharges de StudyConfig"""

    def test_solve_options(self):
        """Test: solve → une seule cellule (schéma, N)"""
        overrides = parse(
            ["solve", "--problem", "example3", "--scheme", "milstein", "--N", "100", "--K", "256"]
        )

        assert overrides == {
            "preset": "example3",
            "K": 256,
            "schemes": ["milstein"],
            "N_list": [100],
        }

    def test_study_options(self):
        overrides = parse(
            [
                "study",
                "--problem",
                "example2",
                "--scheme",
                "euler,weak-taylor-2",
                "--N-list",
                "10,100",
                "--range=-5,5",
                "--seed",
                "7",
                "--dump-paths",
                "--no-strong",
            ]
        )

        assert overrides["schemes"] == ["euler", "weak-taylor-2"]
        assert overrides["N_list"] == [10, 100]
        assert (overrides["a"], overrides["b"]) == (-5.0, 5.0)
        assert overrides["seed"] == 7
        assert overrides["dump_paths"] is True
        assert overrides["strong"] is False

    def test_bench_options(self):
        overrides = parse(["bench", "--problem", "example3", "--K-list", "128,256", "--N", "1000"])

        assert overrides["K_list"] == [128, 256]
        assert overrides["bench_N"] == 1000
        assert "N_list" not in overrides

    def test_unset_options_are_dropped(self):
        """Test: options absentes → pas de surcharge (le fichier garde la main)"""
        overrides = parse(["study", "--config", "configs/example3.cfg"])

        assert overrides == {}

    @pytest.mark.parametrize(
        "argv",
        [
            ["study", "--N-list", "10,abc"],
            ["study", "--range", "1"],
            ["solve", "--scheme", "rk4"],
            [],
        ],
    )
    def test_invalid_arguments(self, argv):
        with pytest.raises(SystemExit):
            build_parser().parse_args(argv)


@pytest.mark.unit
@pytest.mark.cli
class TestMain:
    """Tests des codes de sortie de main()"""

    def test_invalid_theta_is_config_error(self, capsys):
        """Test: |θ₄| > θ₃ → code 2 et message sur stderr"""
        code = main(["study", "--problem", "example3", "--theta", "0.5,0.5,0.5,0.9"])

        assert code == EXIT_CONFIG_ERROR
        assert "Erreur de configuration" in capsys.readouterr().err

    def test_bad_config_file(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("PROBLEM=example3\nSOLVER_K=abc\n", encoding="utf-8")

        code = main(["solve", "--config", str(path)])

        assert code == EXIT_CONFIG_ERROR
        assert "ligne 2" in capsys.readouterr().err

    def test_study_with_failed_cell(self, tmp_path, mocker):
        """Test: une cellule en échec → code 1, fichiers écrits quand même"""
        # Arrange
        config = StudyConfig(problem="example2", schemes=["euler"], N_list=[10, 100])
        context = StudyContext(config=config)
        context.add_report(make_report(N=10))
        context.add_report(make_report(N=100, error="RuntimeError: boom"))
        mocker.patch.object(StudyExecutor, "run_study", return_value=context)

        # Act
        code = main(["study", "--problem", "example2", "--out", str(tmp_path)])

        # Assert
        assert code == EXIT_CELL_FAILED
        errors = pd.read_csv(tmp_path / "errors.csv")
        assert errors["error"].fillna("").tolist() == ["", "RuntimeError: boom"]
        assert (tmp_path / "rates.csv").is_file()
        assert (tmp_path / "plot_convergence.py").is_file()

    def test_solve(self, mocker, capsys):
        mocker.patch.object(StudyExecutor, "run_single", return_value=make_report())

        code = main(["solve", "--problem", "example2", "--scheme", "euler", "--N", "10"])

        assert code == EXIT_OK
        assert "example2 · euler · N=10" in capsys.readouterr().out

    def test_bench_failure(self, tmp_path, mocker):
        """Test: oracle indisponible pendant la mesure → code 1, pas de timing.csv"""
        mocker.patch.object(
            StudyExecutor, "emit_timing", side_effect=RiccatiBlowupError("a(t) explose")
        )

        code = main(["bench", "--problem", "example3", "--out", str(tmp_path)])

        assert code == EXIT_CELL_FAILED
        assert not (tmp_path / "timing.csv").exists()


@pytest.mark.unit
@pytest.mark.cli
class TestFormatReport:
    """Tests du rapport lisible"""

    def test_success(self):
        text = format_report(make_report())

        assert "Erreurs fortes" in text
        assert "6.000000e-03" in text
        assert "Picard max = 4" in text

    def test_failure(self):
        text = format_report(make_report(error="TierUnavailableError: milstein"))

        assert "❌ ERREUR: TierUnavailableError: milstein" in text
        assert "Erreurs fortes" not in text

    def test_missing_metrics(self):
        report = make_report()
        report.strong = StrongErrors.missing()

        assert "total = —" in format_report(report)
