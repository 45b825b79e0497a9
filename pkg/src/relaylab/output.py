"""CSV and SVG emission.

Files are named ``<experiment>_seed<seed>.csv`` / ``.svg``. Both are first
written to temporary names in the target directory and moved into place
only once everything succeeded, so a failure never leaves a partial set.
"""

import csv
from dataclasses import astuple, fields
import io
import os
import tempfile

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiments import RegretRow, ResultRow  # noqa: E402


class OutputError(OSError):
    """Writing results failed; the message names the path."""


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(rows):
    """RFC-4180 CSV text (CRLF line ends, minimal quoting) with a header row."""
    if not rows:
        raise ValueError("no rows to write")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow([f.name for f in fields(rows[0])])
    for row in rows:
        w.writerow([_cell(v) for v in astuple(row)])
    return buf.getvalue()


def _sweep_figure(rows):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    names = [n for n in dict.fromkeys(r.estimator for r in rows) if not n.startswith("term_")]
    var = rows[0].sweep_variable
    for name in names:
        pts = [(r.sweep_value, r.estimate) for r in rows if r.estimator == name]
        x, y = zip(*pts)
        ax.plot(x, y, marker="o", ms=3, lw=1.2, label=name)
    if var == "zeta":
        ax.set_xscale("log")
    ax.set_xlabel(var)
    ax.set_ylabel("success probability")
    ax.set_ylim(0.0, 1.0)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return fig


def _regret_figure(rows):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name in dict.fromkeys(r.policy for r in rows):
        pts = [(r.round, r.cumulative_regret) for r in rows if r.policy == name]
        x, y = zip(*pts)
        ax.plot(x, y, lw=1.2, label=name)
    ax.set_xlabel("round")
    ax.set_ylabel("cumulative regret")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return fig


def to_svg(rows):
    """Deterministic SVG line chart of a result table."""
    if not rows:
        raise ValueError("no rows to plot")
    with matplotlib.rc_context({"svg.hashsalt": "relaylab", "svg.fonttype": "none"}):
        if isinstance(rows[0], RegretRow):
            fig = _regret_figure(rows)
        elif isinstance(rows[0], ResultRow):
            fig = _sweep_figure(rows)
        else:
            raise TypeError("unsupported row type")
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buf.getvalue()


def output_paths(out_dir, experiment, seed):
    stem = os.path.join(out_dir, f"{experiment}_seed{seed}")
    return stem + ".csv", stem + ".svg"


def emit_outputs(rows, experiment, seed, out_dir, svg=True):
    """Write the CSV (and SVG) for one experiment; all or nothing."""
    if not rows:
        raise ValueError("empty result table: nothing written")
    payload = [to_csv(rows)]
    if svg:
        payload.append(to_svg(rows))
    targets = output_paths(out_dir, experiment, seed)[: len(payload)]
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out_dir!r}: {exc.strerror}") from exc
    temps = []
    try:
        for text, target in zip(payload, targets):
            fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=out_dir)
            temps.append(tmp)
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        for tmp, target in zip(temps, targets):
            os.replace(tmp, target)
    except OSError as exc:
        for tmp in temps:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise OutputError(f"cannot write results under {out_dir!r}: {exc}") from exc
    return list(targets)
