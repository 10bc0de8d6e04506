"""Plain-text outputs: CSV tables, JSON summaries and dependency-free SVG
plots.  All writers go through :func:`write_atomic`.

CSV column orders are fixed:

trajectory  k, phase, beta_<label>..., energy, fid_initial, fid_passive
suite (1q)  state, initial_energy, exact_ergotropy, estimated_ergotropy, final_energy
suite (2q)  state, initial_energy, exact_ergotropy, estimated_ergotropy,
            exact_local_sum, exact_local_opt, estimated_local, exact_gap,
            estimated_gap, final_energy
sweep       omega0_tau, state, n          (n empty when not converged)
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from html import escape
from pathlib import Path

import numpy as np


def _num(x) -> str:
    if x is None:
        return ""
    x = float(x)
    return "nan" if math.isnan(x) else format(x, ".12g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def trajectory_csv(traj) -> str:
    labels = list(traj.labels)
    header = ["k", "phase"] + [f"beta_{lab}" for lab in labels] + ["energy", "fid_initial", "fid_passive"]
    rho0 = traj.initial_state.matrix
    f0 = float(np.real(np.trace(rho0 @ rho0)))
    fp = float("nan")
    if traj.passive_state is not None:
        fp = float(np.real(np.trace(traj.passive_state.matrix @ rho0)))
    rows = [[0, "initial"] + [""] * len(labels) + [_num(traj.initial_energy), _num(f0), _num(fp)]]
    for r in traj.records:
        betas = dict(r.betas)
        rows.append(
            [r.index, r.phase]
            + [_num(betas[lab]) if lab in betas else "" for lab in labels]
            + [_num(r.energy_after), _num(r.fidelity_to_initial), _num(r.fidelity_to_passive)]
        )
    return _csv(header, rows)


SUITE_1Q = ["state", "initial_energy", "exact_ergotropy", "estimated_ergotropy", "final_energy"]
SUITE_2Q = [
    "state",
    "initial_energy",
    "exact_ergotropy",
    "estimated_ergotropy",
    "exact_local_sum",
    "exact_local_opt",
    "estimated_local",
    "exact_gap",
    "estimated_gap",
    "final_energy",
]


def suite_csv(result) -> str:
    rows = []
    two = result.system == "2q"
    for r in result.rows:
        t, o = r.trajectory, r.oracle
        row = [r.index, _num(t.initial_energy), _num(o.ergotropy), _num(r.estimate)]
        if two:
            row += [
                _num(o.local_sum_ergotropy),
                _num(o.local_opt_ergotropy),
                _num(t.estimated_ergotropy_local),
                _num(o.gap),
                _num(t.estimated_gap),
            ]
        row.append(_num(t.energies[-1]))
        rows.append(row)
    return _csv(SUITE_2Q if two else SUITE_1Q, rows)


def sweep_csv(result) -> str:
    rows = []
    for tau, ns in zip(result.grid, result.counts):
        for i, n in enumerate(ns):
            rows.append([_num(tau), i, "" if n is None else n])
    return _csv(["omega0_tau", "state", "n"], rows)


def to_json(obj) -> str:
    def default(o):
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        raise TypeError(f"not JSON serialisable: {type(o).__name__}")

    return json.dumps(obj, indent=2, sort_keys=True, default=default) + "\n"


def write_atomic(path, text: str) -> Path:
    """Write to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


# -- SVG ----------------------------------------------------------------

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 40, 55
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def _nice_ticks(lo, hi, n=5):
    if not np.isfinite(lo) or not np.isfinite(hi) or hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.floor(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


class _Axes:
    def __init__(self, xs, ys):
        xs = np.asarray([x for x in xs if np.isfinite(x)], dtype=float)
        ys = np.asarray([y for y in ys if np.isfinite(y)], dtype=float)
        self.xt = _nice_ticks(xs.min() if xs.size else 0.0, xs.max() if xs.size else 1.0)
        self.yt = _nice_ticks(ys.min() if ys.size else 0.0, ys.max() if ys.size else 1.0)
        self.x0, self.x1 = self.xt[0], self.xt[-1]
        self.y0, self.y1 = self.yt[0], self.yt[-1]

    def px(self, x):
        return _ML + (x - self.x0) / ((self.x1 - self.x0) or 1) * (_W - _ML - _MR)

    def py(self, y):
        return _H - _MB - (y - self.y0) / ((self.y1 - self.y0) or 1) * (_H - _MT - _MB)


def _frame(ax, title, xlabel, ylabel, metadata) -> list[str]:
    meta = escape(json.dumps(metadata or {}, sort_keys=True, default=str))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f"<metadata>{meta}</metadata>",
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{_W / 2}" y="22" text-anchor="middle" font-size="15" font-family="sans-serif">{escape(title)}</text>',
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" height="{_H - _MT - _MB}" fill="none" stroke="black"/>',
    ]
    for t in ax.xt:
        x = ax.px(t)
        out.append(f'<line x1="{x:.2f}" y1="{_H - _MB}" x2="{x:.2f}" y2="{_H - _MB + 5}" stroke="black"/>')
        out.append(
            f'<text x="{x:.2f}" y="{_H - _MB + 18}" text-anchor="middle" font-size="11" font-family="sans-serif">{t:g}</text>'
        )
    for t in ax.yt:
        y = ax.py(t)
        out.append(f'<line x1="{_ML - 5}" y1="{y:.2f}" x2="{_ML}" y2="{y:.2f}" stroke="black"/>')
        out.append(
            f'<text x="{_ML - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="11" font-family="sans-serif">{t:g}</text>'
        )
    out.append(
        f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 12}" text-anchor="middle" font-size="13" font-family="sans-serif">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="16" y="{(_MT + _H - _MB) / 2}" text-anchor="middle" font-size="13" font-family="sans-serif" '
        f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2})">{escape(ylabel)}</text>'
    )
    return out


def svg_lines(series, title="", xlabel="", ylabel="", metadata=None) -> str:
    """``series`` is a list of ``(xs, ys, label)``."""
    allx = [x for xs, _, _ in series for x in xs]
    ally = [y for _, ys, _ in series for y in ys]
    ax = _Axes(allx, ally)
    out = _frame(ax, title, xlabel, ylabel, metadata)
    for i, (xs, ys, label) in enumerate(series):
        pts = " ".join(f"{ax.px(x):.2f},{ax.py(y):.2f}" for x, y in zip(xs, ys) if np.isfinite(y))
        color = _COLORS[i % len(_COLORS)]
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"><title>{escape(str(label))}</title></polyline>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def svg_scatter(series, title="", xlabel="", ylabel="", metadata=None, diagonal=False) -> str:
    """``series`` is a list of ``(xs, ys, label)``; ``diagonal`` adds a y=x guide."""
    allx = [x for xs, _, _ in series for x in xs]
    ally = [y for _, ys, _ in series for y in ys]
    if diagonal:
        allx = ally = allx + ally
    ax = _Axes(allx, ally)
    out = _frame(ax, title, xlabel, ylabel, metadata)
    if diagonal:
        lo, hi = max(ax.x0, ax.y0), min(ax.x1, ax.y1)
        out.append(
            f'<line class="diagonal" x1="{ax.px(lo):.2f}" y1="{ax.py(lo):.2f}" x2="{ax.px(hi):.2f}" y2="{ax.py(hi):.2f}" '
            'stroke="gray" stroke-dasharray="4 3"/>'
        )
    for i, (xs, ys, label) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        out.append(f'<g fill="{color}"><title>{escape(str(label))}</title>')
        for x, y in zip(xs, ys):
            if y is None or not np.isfinite(y):
                continue
            out.append(f'<circle cx="{ax.px(x):.2f}" cy="{ax.py(y):.2f}" r="3"/>')
        out.append("</g>")
    # legend
    for i, (_, _, label) in enumerate(series):
        y = _MT + 14 + 16 * i
        color = _COLORS[i % len(_COLORS)]
        out.append(f'<circle cx="{_ML + 12}" cy="{y - 4}" r="4" fill="{color}"/>')
        out.append(f'<text x="{_ML + 22}" y="{y}" font-size="11" font-family="sans-serif">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def energy_plot(trajectories, metadata=None, title="Energy vs iteration") -> str:
    series = [(np.arange(len(t.energies)), t.energies, f"state {i}") for i, t in enumerate(trajectories)]
    return svg_lines(series, title=title, xlabel="iteration k", ylabel="energy E(rho_k) / omega0", metadata=metadata)


def estimate_scatter(result, metadata=None) -> str:
    series = [([r.oracle.ergotropy for r in result.rows], [r.estimate for r in result.rows], "ergotropy")]
    if result.system == "2q":
        series.append(
            (
                [r.oracle.local_sum_ergotropy for r in result.rows],
                [r.trajectory.estimated_ergotropy_local for r in result.rows],
                "local",
            )
        )
        series.append(([r.oracle.gap for r in result.rows], [r.trajectory.estimated_gap for r in result.rows], "gap"))
    return svg_scatter(
        series, title="Estimated vs exact", xlabel="exact", ylabel="estimated", metadata=metadata, diagonal=True
    )


def sweep_scatter(result, metadata=None) -> str:
    xs, ys = [], []
    for tau, ns in zip(result.grid, result.counts):
        for n in ns:
            if n is not None:
                xs.append(float(tau))
                ys.append(float(n))
    return svg_scatter(
        [(xs, ys, f"{result.system} (converged cells)")],
        title="Iterations to passive state",
        xlabel="omega0 tau",
        ylabel="iterations n",
        metadata=metadata,
    )
