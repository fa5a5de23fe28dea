"""
═══════════════════════════════════════════════════════════════════════════════
BCOS CLI - Études de convergence des schémas BCOS
═══════════════════════════════════════════════════════════════════════════════

COMMANDES:
    solve   Une cellule (schéma, N), rapport lisible sur stdout
    study   Toutes les cellules → errors.csv, rates.csv, plot_convergence.py
    bench   Temps de calcul par (schéma, K) → timing.csv

UTILISATION:
    python -m bcos.main solve --problem example3 --scheme euler --N 100
    python -m bcos.main study --config configs/example3.cfg --seed 42
    python -m bcos.main bench --problem example3 --K-list 128,256,512 --N 1000

    Les valeurs négatives s'écrivent avec '=' : --range=-5,5

CODES DE SORTIE:
    0 succès, 1 au moins une cellule en échec, 2 erreur de configuration

═══════════════════════════════════════════════════════════════════════════════
"""

import argparse
import math
import sys
from typing import Any, Dict, List, Optional

from .config.study_loader import load_study_config
from .core.transition import SchemeKind
from .errors import BcosError, ConfigError
from .metrics.convergence import rates_table
from .models.report import ErrorReport
from .pipeline.executor import StudyExecutor
from .pipeline.plans import list_presets
from .pipeline.writers import (
    write_errors_csv,
    write_plot_script,
    write_rates_csv,
    write_timing_csv,
)
from .utils.logging import SolverLogger

logger = SolverLogger("bcos_cli")

EXIT_OK = 0
EXIT_CELL_FAILED = 1
EXIT_CONFIG_ERROR = 2


# ==================== PARSING ====================


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"liste d'entiers attendue, reçu: '{text}'")


def _str_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _range(text: str) -> List[float]:
    try:
        bounds = [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"intervalle 'a,b' attendu, reçu: '{text}'")
    if len(bounds) != 2:
        raise argparse.ArgumentTypeError(f"intervalle 'a,b' attendu, reçu: '{text}'")
    return bounds


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Fichier d'étude (syntaxe KEY=VALUE)")
    common.add_argument("--problem", help=f"Preset: {', '.join(list_presets())}")
    common.add_argument("--theta", help="θ1,θ2,θ3,θ4 ou nom de preset")
    common.add_argument("--K", type=int, help="Nombre de termes de Fourier")
    common.add_argument("--range", type=_range, help="Intervalle de troncature a,b")
    common.add_argument("--paths", type=int, help="Nombre de trajectoires M")
    common.add_argument("--n-fine", type=int, dest="n_fine", help="Pas de la référence")
    common.add_argument("--seed", type=int, help="Graine des incréments browniens")
    common.add_argument("--out", help="Dossier de sortie")
    common.add_argument("--workers", type=int, help="Threads pour les cellules")

    parser = argparse.ArgumentParser(
        prog="bcos", description="Solveur BCOS pour FBSDE entièrement couplés"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", parents=[common], help="Une seule cellule")
    solve.add_argument("--scheme", choices=[s.value for s in SchemeKind])
    solve.add_argument("--N", type=int, help="Nombre de pas de temps")
    solve.add_argument("--no-strong", action="store_true", help="Erreurs en t0 seules")

    study = commands.add_parser("study", parents=[common], help="Étude complète")
    study.add_argument("--scheme", type=_str_list, dest="schemes", help="Schémas (liste)")
    study.add_argument("--N-list", type=_int_list, dest="N_list", help="Liste de N")
    study.add_argument("--no-strong", action="store_true", help="Erreurs en t0 seules")
    study.add_argument("--dump-paths", action="store_true", help="CSV des trajectoires")

    bench = commands.add_parser("bench", parents=[common], help="Temps de calcul")
    bench.add_argument("--scheme", type=_str_list, dest="schemes", help="Schémas (liste)")
    bench.add_argument("--K-list", type=_int_list, dest="K_list", help="Liste de K")
    bench.add_argument("--N", type=int, help="Nombre de pas de temps")
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Options CLI → champs de StudyConfig (None = non renseigné)"""
    overrides: Dict[str, Any] = {
        "preset": args.problem,
        "theta": args.theta,
        "K": args.K,
        "M": args.paths,
        "N_fine": args.n_fine,
        "seed": args.seed,
        "out_dir": args.out,
        "workers": args.workers,
    }
    if args.range is not None:
        overrides["a"], overrides["b"] = args.range

    if args.command == "solve":
        overrides["schemes"] = [args.scheme] if args.scheme else None
        overrides["N_list"] = [args.N] if args.N is not None else None
    elif args.command == "study":
        overrides["schemes"] = args.schemes
        overrides["N_list"] = args.N_list
        overrides["dump_paths"] = True if args.dump_paths else None
    else:
        overrides["schemes"] = args.schemes
        overrides["K_list"] = args.K_list
        overrides["bench_N"] = args.N

    if getattr(args, "no_strong", False):
        overrides["strong"] = False
    return {k: v for k, v in overrides.items() if v is not None}


# ==================== RAPPORT ====================


def _fmt(value: float) -> str:
    return "—" if value is None or math.isnan(value) else f"{value:.6e}"


def format_report(report: ErrorReport) -> str:
    """Bloc lisible d'un rapport de cellule"""
    lines = [
        f"═══ {report.problem} · {report.scheme} · N={report.N} ═══",
        f"θ = {report.theta}   K = {report.K}   M = {report.M}   seed = {report.seed}",
    ]
    if not report.success:
        lines.append(f"❌ ERREUR: {report.error}")
        return "\n".join(lines)
    lines += [
        (
            f"Erreurs fortes   X = {_fmt(report.strong.X)}   Y = {_fmt(report.strong.Y)}   "
            f"Z = {_fmt(report.strong.Z)}   total = {_fmt(report.strong.total)}"
        ),
        (
            f"Erreurs en t0    Y0 = {_fmt(report.weak.Y0)}   Z0 = {_fmt(report.weak.Z0)}   "
            f"total = {_fmt(report.weak.total)}"
        ),
        f"Picard max = {report.picard_max}   clamp = {report.clamp_count}   durée = {report.seconds:.1f}s",
    ]
    return "\n".join(lines)


# ==================== COMMANDES ====================


def run_solve(config, executor: StudyExecutor) -> int:
    report = executor.run_single(config)
    print(format_report(report))
    return EXIT_OK if report.success else EXIT_CELL_FAILED


def run_study(config, executor: StudyExecutor) -> int:
    context = executor.run_study(config)
    reports = context.ordered_reports()
    write_errors_csv(reports, config.out_dir)
    write_rates_csv(rates_table(reports, context.horizon), config.out_dir)
    write_plot_script(
        config.out_dir,
        title=config.describe(),
        T=context.horizon,
        labels={s.value: s.label for s in SchemeKind},
    )
    for report in reports:
        print(format_report(report))
    return EXIT_OK if context.success else EXIT_CELL_FAILED


def run_bench(config, executor: StudyExecutor) -> int:
    try:
        records = executor.emit_timing(config)
    except BcosError as e:
        logger.error(f"Mesure impossible: {e}")
        return EXIT_CELL_FAILED
    target = write_timing_csv(records, config.out_dir)
    logger.info("📄 Temps écrits", path=str(target), rows=len(records))
    return EXIT_OK


COMMANDS = {"solve": run_solve, "study": run_study, "bench": run_bench}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_study_config(args.config, overrides_from_args(args))
    except ConfigError as e:
        logger.error(f"Configuration invalide: {e}", field=e.field, line=e.line)
        print(f"Erreur de configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    return COMMANDS[args.command](config, StudyExecutor())


if __name__ == "__main__":
    sys.exit(main())
