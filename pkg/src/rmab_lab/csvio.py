"""CSV and manifest serialization with a fixed number format."""

import math
from pathlib import Path

import numpy as np

REGRET_COLUMNS = ("n", "G_n", "ln_n", "genie_mean", "meta_mean", "regret",
                  "regret_halfwidth", "regret_over_Gn_ln_n", "T_n_mean")


def format_value(value) -> str:
    """Integers verbatim, reals to 12 significant digits, NaN/None blank."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return ""
        return f"{float(value):.12g}"
    return str(value)


def write_table(path, columns, rows) -> Path:
    path = Path(path)
    if not rows:
        raise ValueError(f"refusing to write empty table {path}")
    lines = [",".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"{path}: row has {len(row)} fields, expected {len(columns)}")
        lines.append(",".join(format_value(v) for v in row))
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def regret_rows(series):
    ln_n = series.ln_n
    norm = series.normalized
    return [
        (int(series.n[q]), int(series.g_n[q]), float(ln_n[q]), float(series.genie_mean[q]),
         float(series.meta_mean[q]), float(series.regret[q]),
         float(series.regret_halfwidth[q]), float(norm[q]), float(series.t_n_mean[q]))
        for q in range(series.n.shape[0])
    ]


def emit_regret_csv(series, path) -> Path:
    return write_table(path, REGRET_COLUMNS, regret_rows(series))
