import structlog
import logging
import sys
import os
from dotenv import load_dotenv

load_dotenv()


def configure_logging():
    """Configure le système de logging riche mais concis"""
    log_level = os.getenv("LOG_LEVEL", "INFO").upper()

    # Configuration de structlog avec couleurs et format concis
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="%H:%M:%S"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.dev.ConsoleRenderer(colors=True, pad_event=25),
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    # stderr : stdout est réservé aux rapports de la CLI
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, log_level, logging.INFO),
    )

    _configure_third_party_loggers(log_level)


def _configure_third_party_loggers(app_log_level: str):
    """
    Calme les loggers des librairies scientifiques.

    Args:
        app_log_level: Niveau de log de l'application (DEBUG, INFO, etc.)
    """
    noisy_loggers = ["matplotlib", "numexpr", "numexpr.utils"]

    if app_log_level == "DEBUG":
        target_level = logging.INFO
    else:
        target_level = logging.WARNING

    for logger_name in noisy_loggers:
        logging.getLogger(logger_name).setLevel(target_level)


class SolverLogger:
    """Logger riche mais concis pour les composants du solveur"""

    def __init__(self, component: str):
        self.component = component
        self.logger = structlog.get_logger(component)

    def _clean(self, kwargs: dict) -> dict:
        return {k: v for k, v in kwargs.items() if k != "component"}

    def info(self, message: str, **kwargs):
        """Log d'information avec emoji et couleurs"""
        self.logger.info(f"ℹ️  {message}", component=self.component, **self._clean(kwargs))

    def error(self, message: str, **kwargs):
        """Log d'erreur avec emoji"""
        self.logger.error(f"❌ {message}", component=self.component, **self._clean(kwargs))

    def warning(self, message: str, **kwargs):
        """Log d'avertissement avec emoji"""
        self.logger.warning(
            f"⚠️  {message}", component=self.component, **self._clean(kwargs)
        )

    def debug(self, message: str, **kwargs):
        """Log de debug détaillé"""
        self.logger.debug(f"🔍 {message}", component=self.component, **self._clean(kwargs))

    def log_solve_start(self, problem: str, scheme: str, N: int, K: int):
        """Log du démarrage d'une résolution BCOS"""
        self.info(f"🚀 Résolution {problem} démarrée", scheme=scheme, N=N, K=K)

    def log_solve_done(
        self, problem: str, scheme: str, picard_max: int, duration: float = None
    ):
        """Log de fin de résolution"""
        if duration:
            self.info(
                f"✅ Résolution {problem} terminée",
                scheme=scheme,
                picard_max=picard_max,
                duration=f"{duration:.1f}s",
            )
        else:
            self.info(
                f"✅ Résolution {problem} terminée",
                scheme=scheme,
                picard_max=picard_max,
            )

    def log_picard_nonconvergence(self, step: int, iterations: int, residual: float):
        """Log d'une itération de Picard non convergée"""
        self.warning(
            "Picard non convergé",
            step=step,
            iterations=iterations,
            residual=f"{residual:.2e}",
        )

    def log_cell_result(
        self, scheme: str, N: int, success: bool, duration: float = None, **metrics
    ):
        """Log du résultat d'une cellule (schéma, N) d'une étude"""
        emoji = "✅" if success else "❌"
        extra = {k: f"{v:.2e}" for k, v in metrics.items() if v is not None}
        if duration:
            extra["duration"] = f"{duration:.1f}s"
        self.info(f"{emoji} Cellule {scheme} N={N}", **extra)

    def log_study_summary(self, cells: int, failures: int, out_dir: str):
        """Log de synthèse d'une étude"""
        emoji = "✅" if failures == 0 else "⚠️"
        self.info(f"{emoji} Étude terminée", cells=cells, failures=failures, out=out_dir)

    def is_debug(self) -> bool:
        """Vérifie si le mode DEBUG est activé"""
        return logging.getLogger(self.component).getEffectiveLevel() <= logging.DEBUG


# Initialisation du logging
configure_logging()
