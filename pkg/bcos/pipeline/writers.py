"""
Fichiers de sortie d'une étude : errors.csv, rates.csv, timing.csv et le
script de tracé plot_convergence.py.

Tous les fichiers sont en UTF-8, fins de ligne LF, séparateur décimal '.',
réels en notation scientifique à 7 chiffres significatifs.
"""

from pathlib import Path
from typing import Dict, Sequence

import pandas as pd

from ..models.report import ERROR_COLUMNS, TIMING_COLUMNS, ErrorReport, TimingRecord

FLOAT_FORMAT = "%.6e"

CSV_OPTIONS = {
    "index": False,
    "float_format": FLOAT_FORMAT,
    "lineterminator": "\n",
    "encoding": "utf-8",
    "na_rep": "nan",
}


def _target(out_dir: str, name: str) -> Path:
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    return directory / name


def errors_frame(reports: Sequence[ErrorReport]) -> pd.DataFrame:
    return pd.DataFrame([r.to_row() for r in reports], columns=ERROR_COLUMNS)


def write_errors_csv(reports: Sequence[ErrorReport], out_dir: str) -> Path:
    target = _target(out_dir, "errors.csv")
    errors_frame(reports).to_csv(target, **CSV_OPTIONS)
    return target


def write_rates_csv(rates: pd.DataFrame, out_dir: str) -> Path:
    target = _target(out_dir, "rates.csv")
    rates.to_csv(target, **CSV_OPTIONS)
    return target


def write_timing_csv(records: Sequence[TimingRecord], out_dir: str) -> Path:
    target = _target(out_dir, "timing.csv")
    pd.DataFrame([r.to_row() for r in records], columns=TIMING_COLUMNS).to_csv(
        target, **CSV_OPTIONS
    )
    return target


PLOT_TEMPLATE = '''"""
Courbes de convergence log-log de l'étude {title}.

Usage: python plot_convergence.py   (lit errors.csv dans ce dossier)
"""

from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

HERE = Path(__file__).resolve().parent
T = {T!r}
LABELS = {labels!r}
METRICS = [
    ("strong_total", "Erreur forte totale"),
    ("weak_total", "Erreur faible en t0"),
]
REFERENCE_SLOPES = [0.5, 1.0, 2.0]


def main():
    errors = pd.read_csv(HERE / "errors.csv")
    errors = errors[errors["error"].isna()]
    fig, axes = plt.subplots(1, len(METRICS), figsize=(12, 5))
    for ax, (metric, title) in zip(axes, METRICS):
        for scheme, cells in errors.groupby("scheme", sort=False):
            cells = cells.sort_values("N")
            h = T / cells["N"].to_numpy(dtype=float)
            ax.loglog(h, cells[metric], "-o", label=LABELS.get(scheme, scheme))
        if len(errors):
            h = T / np.sort(errors["N"].unique().astype(float))
            anchor = errors[metric].dropna().max()
            for slope in REFERENCE_SLOPES:
                ax.loglog(h, anchor * (h / h.max()) ** slope, "k:", alpha=0.5,
                          label=f"pente {{slope:g}}")
        ax.set_xlabel("h = T/N")
        ax.set_title(title)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
    fig.tight_layout()
    fig.savefig(HERE / "convergence.png", dpi=150, bbox_inches="tight")


if __name__ == "__main__":
    main()
'''


def write_plot_script(out_dir: str, title: str, T: float, labels: Dict[str, str]) -> Path:
    """Script matplotlib autonome qui relit errors.csv (aucune image rendue ici)"""
    target = _target(out_dir, "plot_convergence.py")
    target.write_text(
        PLOT_TEMPLATE.format(title=title, T=float(T), labels=dict(labels)),
        encoding="utf-8",
        newline="\n",
    )
    return target
