"""
Lecture des fichiers d'étude (syntaxe dotenv) vers un StudyConfig.

Format (une clé par ligne, '#' pour les commentaires):

    PROBLEM=example3
    PROBLEM_LQ_T=1.0
    SOLVER_SCHEMES=euler,milstein
    SOLVER_THETA=0.5,0.5,0.5,-0.5
    SOLVER_RANGE=-5,5
    STUDY_N_LIST=10,100,400,1000

Priorité: preset (PROBLEM) < fichier < options CLI.
"""

from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from dotenv import dotenv_values
from pydantic import ValidationError

from ..errors import ConfigError
from ..models.study import StudyConfig
from ..pipeline.plans import get_preset
from .settings import SolverSettings, default_settings

# Clé du fichier -> champ de StudyConfig
FIELD_KEYS: Dict[str, str] = {
    "PROBLEM_KAPPA_Z": "kappa_z",
    "SOLVER_SCHEMES": "schemes",
    "SOLVER_THETA": "theta",
    "SOLVER_K": "K",
    "SOLVER_MAX_PICARD": "max_picard",
    "SOLVER_PICARD_TOL": "picard_tol",
    "STUDY_N_LIST": "N_list",
    "STUDY_PATHS": "M",
    "STUDY_N_FINE": "N_fine",
    "STUDY_SEED": "seed",
    "STUDY_OUT": "out_dir",
    "STUDY_WORKERS": "workers",
    "STUDY_K_LIST": "K_list",
    "STUDY_BENCH_N": "bench_N",
    "STUDY_DUMP_PATHS": "dump_paths",
    "STUDY_STRONG": "strong",
}

# Clé du fichier -> champ de LqParams
LQ_KEYS: Dict[str, str] = {
    "PROBLEM_LQ_A": "A",
    "PROBLEM_LQ_B": "B",
    "PROBLEM_LQ_BETA": "beta",
    "PROBLEM_LQ_C": "C",
    "PROBLEM_LQ_D": "D",
    "PROBLEM_LQ_SIGMA": "Sigma",
    "PROBLEM_LQ_RX": "R_x",
    "PROBLEM_LQ_RXU": "R_xu",
    "PROBLEM_LQ_RU": "R_u",
    "PROBLEM_LQ_G": "G",
    "PROBLEM_LQ_T": "T",
    "PROBLEM_LQ_X0": "x0",
}

LIST_FIELDS = {"schemes", "N_list", "K_list"}
KNOWN_KEYS = {"PROBLEM", "SOLVER_RANGE", *FIELD_KEYS, *LQ_KEYS}


def _split(value: str) -> list:
    return [part.strip() for part in value.split(",") if part.strip()]


def _key_lines(path: Path) -> Dict[str, int]:
    """Numéro de ligne (1-based) de chaque clé du fichier"""
    lines = {}
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#") or "=" not in stripped:
            continue
        key = stripped.split("=", 1)[0].strip()
        if key.startswith("export "):
            key = key[len("export "):].strip()
        lines[key] = number
    return lines


def read_study_file(path: str) -> Tuple[Dict[str, Any], Dict[str, int]]:
    """
    Lit un fichier d'étude.

    Returns:
        (valeurs par champ de StudyConfig, ligne par champ)
        Les champs LqParams sont rangés sous "lq" et repérés "lq.<champ>".

    Raises:
        ConfigError: fichier absent, clé inconnue ou valeur vide
    """
    file_path = Path(path)
    if not file_path.is_file():
        raise ConfigError(f"Fichier de configuration introuvable: {path}")

    raw = dotenv_values(file_path, interpolate=False)
    key_lines = _key_lines(file_path)

    values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    lq: Dict[str, Any] = {}

    for key, value in raw.items():
        line = key_lines.get(key)
        if key not in KNOWN_KEYS:
            raise ConfigError(f"Clé inconnue '{key}'", field=key, line=line)
        if value is None or not value.strip():
            raise ConfigError(f"Valeur vide pour '{key}'", field=key, line=line)
        value = value.strip()

        if key == "PROBLEM":
            values["preset"] = value
            lines["problem"] = line
        elif key == "SOLVER_RANGE":
            bounds = _split(value)
            if len(bounds) != 2:
                raise ConfigError(
                    f"SOLVER_RANGE attend 'a,b', reçu: '{value}'", field=key, line=line
                )
            values["a"], values["b"] = bounds
            lines["a"] = lines["b"] = line
        elif key in LQ_KEYS:
            lq[LQ_KEYS[key]] = value
            lines[f"lq.{LQ_KEYS[key]}"] = line
        else:
            name = FIELD_KEYS[key]
            values[name] = _split(value) if name in LIST_FIELDS else value
            lines[name] = line

    if lq:
        values["lq"] = lq
    return values, lines


def _settings_defaults(settings: SolverSettings) -> Dict[str, Any]:
    return {
        "max_picard": settings.max_picard,
        "picard_tol": settings.picard_tol,
        "workers": settings.workers,
        "N_fine": settings.n_fine,
    }


def _as_config_error(error: ValidationError, lines: Dict[str, int]) -> ConfigError:
    first = error.errors()[0]
    loc = [str(part) for part in first.get("loc", ()) if not isinstance(part, int)]
    field = ".".join(loc) or None
    line = lines.get(field) if field else None
    if line is None and loc:
        line = lines.get(loc[0])
    message = first.get("msg", str(error))
    return ConfigError(message, field=field, line=line)


def load_study_config(
    path: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    preset: Optional[str] = None,
    settings: SolverSettings = default_settings,
) -> StudyConfig:
    """
    Construit un StudyConfig : réglages globaux < preset < fichier < overrides.

    Args:
        path: Fichier d'étude (optionnel)
        overrides: Champs de StudyConfig venant de la CLI ("preset" pour --problem)
        preset: Preset par défaut si ni le fichier ni les overrides n'en donnent
        settings: Réglages globaux

    Raises:
        ConfigError: preset inconnu, clé inconnue, valeur invalide

    Exemple:
        >>> config = load_study_config("configs/example3.cfg", {"seed": 7})
    """
    file_values, lines = read_study_file(path) if path else ({}, {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}

    name = overrides.pop("preset", None) or file_values.pop("preset", None) or preset
    file_values.pop("preset", None)
    if name is None:
        raise ConfigError("Aucun problème: renseigner PROBLEM ou --problem", field="problem")
    try:
        study_preset = get_preset(name)
    except KeyError as e:
        raise ConfigError(str(e.args[0]), field="problem", line=lines.get("problem")) from e

    values: Dict[str, Any] = {
        **_settings_defaults(settings),
        **study_preset.as_config_values(),
    }
    lq = {**file_values.pop("lq", {}), **overrides.pop("lq", {})}
    values.update(file_values)
    values.update(overrides)
    if lq:
        values["lq"] = lq

    try:
        return StudyConfig(**values)
    except ValidationError as e:
        cli_fields = set(overrides)
        raise _as_config_error(
            e, {k: v for k, v in lines.items() if k not in cli_fields}
        ) from e
