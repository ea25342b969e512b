"""Figure rendering for the CLI report path.

Each CLI command can render one PNG alongside its CSV output.  Rendering is
opt-in (--figures DIR); the CSV remains the primary hand-off format.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _finish(fig, directory: str, name: str) -> str:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    target = path / f"{name}.png"
    fig.tight_layout()
    fig.savefig(target, dpi=144)
    plt.close(fig)
    return str(target)


def _column(header, rows, name):
    idx = header.index(name)
    return [row[idx] for row in rows]


def render_bound(header, rows, directory) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    rho = _column(header, rows, "rho")
    value_col = next(h for h in header if h.startswith("value"))
    values = _column(header, rows, value_col)
    by_set: dict[str, tuple[list, list]] = {}
    for r, v, s in zip(rho, values, _column(header, rows, "index_set")):
        by_set.setdefault(s, ([], []))[0].append(r)
        by_set[s][1].append(v if math.isfinite(v) else float("nan"))
    for label, (xs, ys) in sorted(by_set.items()):
        ax.plot(xs, ys, marker="o", markersize=3, label=f"I = {{{label}}}")
    ax.set_xlabel(r"$\rho$")
    ax.set_ylabel(value_col.replace("_", " "))
    ax.set_title("Leakage bound over the rho grid")
    ax.legend()
    return _finish(fig, directory, "bound")


def render_exponent(header, rows, directory) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = _column(header, rows, "index_set")
    names = [h for h in header if h.startswith("e_")]
    width = 0.8 / len(names)
    for j, name in enumerate(names):
        values = _column(header, rows, name)
        xs = [i + j * width for i in range(len(labels))]
        ax.bar(xs, values, width=width, label=name.replace("_", " "))
    ax.set_xticks([i + 0.4 for i in range(len(labels))])
    ax.set_xticklabels([f"{{{s}}}" for s in labels])
    ax.set_xlabel("index set")
    ax.set_ylabel("exponent / slope")
    ax.set_title("Error, secrecy, and leakage-rate quadruple")
    ax.legend(fontsize=8)
    return _finish(fig, directory, "exponent")


def render_resolve(header, rows, directory) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    rho = _column(header, rows, "rho")
    for name in ("lhs_d", "lhs_psi", "rhs"):
        ax.plot(rho, _column(header, rows, name), marker="o", markersize=3, label=name)
    ax.set_xlabel(r"$\rho$")
    ax.set_ylabel("ensemble average / bound")
    ax.set_title("Resolvability bound check")
    ax.legend()
    return _finish(fig, directory, "resolve_check")


def render_leakage(header, rows, directory) -> str:
    fig, ax = plt.subplots(figsize=(5, 4))
    labels = [f"{{{s}}}" for s in _column(header, rows, "index_set")]
    value_col = next(h for h in header if h.startswith("leakage"))
    ax.bar(range(len(labels)), _column(header, rows, value_col))
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels)
    ax.set_xlabel("index set")
    ax.set_ylabel(value_col.replace("_", " "))
    ax.set_title("Exact leaked information")
    return _finish(fig, directory, "leakage")


def render_simulate(header, rows, directory) -> str:
    fig, ax = plt.subplots(figsize=(5, 4))
    row = rows[0]
    values = [row[header.index("p_b_hat")], row[header.index("p_e_hat")]]
    radii = [row[header.index("p_b_radius")], row[header.index("p_e_radius")]]
    ax.bar([0, 1], values, yerr=radii, capsize=6)
    ax.set_xticks([0, 1])
    ax.set_xticklabels(["Bob", "Eve"])
    ax.set_ylabel("empirical error rate")
    ax.set_title(f"Monte Carlo ({int(row[header.index('trials')])} trials, Wilson 95%)")
    return _finish(fig, directory, "simulate")


def render_capacity(header, rows, directory) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    if "secrecy_capacity_nats" in header or "secrecy_capacity_bits" in header:
        name = header[-1]
        ax.bar([0], [rows[0][header.index(name)]])
        ax.set_xticks([0])
        ax.set_xticklabels(["degraded secrecy capacity"])
        ax.set_ylabel(name.replace("_", " "))
    else:
        r1 = _column(header, rows, header[2])
        floor = _column(header, rows, header[3])
        ax.scatter(r1, floor, s=8, alpha=0.6)
        ax.set_xlabel(header[2].replace("_", " "))
        ax.set_ylabel(header[3].replace("_", " "))
        ax.set_title("Sampled achievable points")
    return _finish(fig, directory, "capacity")


def render_construct(header, rows, directory) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = [f"{{{s}}}" for s in _column(header, rows, "index_set")]
    xs = range(len(labels))
    bound_col = next(h for h in header if h.startswith("bound"))
    target_col = next(h for h in header if h.startswith("target"))
    ax.bar(xs, _column(header, rows, bound_col), width=0.4, label="achieved bound")
    ax.bar(
        [x + 0.4 for x in xs],
        _column(header, rows, target_col),
        width=0.4,
        label="target",
    )
    ax.set_xticks([x + 0.2 for x in xs])
    ax.set_xticklabels(labels)
    ax.set_yscale("log")
    ax.set_ylabel("expected leakage (nats)")
    ax.set_title("Rate allocation: per-set slack")
    ax.legend()
    return _finish(fig, directory, "construct")
