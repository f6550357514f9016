"""Render report figures to image files.

Every entry point takes the rows produced by the corresponding report
function and a target path, draws one figure, and writes it out.  The Agg
backend is forced so this works headless; nothing here ever opens a window.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def save_qubit_series(series, path, *, fermions=None):
    """Log-log qubit counts versus mode count, one line per encoding."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for name in sorted(series):
        points = series[name]
        if not points:
            continue
        xs = [m for m, _ in points]
        ys = [q for _, q in points]
        ax.loglog(xs, ys, marker="o", label=name)
    ax.set_xlabel("modes")
    ax.set_ylabel("qubits")
    title = "Encoded register size"
    if fermions is not None:
        title += f" ({fermions} fermions)"
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_compare_bars(rows, path):
    """Bar chart of qubit counts from an encoding-comparison table."""
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    labels = [row.encoding for row in rows]
    values = [row.qubits for row in rows]
    colors = ["tab:green" if row.best else "tab:blue" for row in rows]
    ax.bar(range(len(rows)), values, color=colors)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("qubits")
    ax.set_yscale("log")
    ax.set_title("Register size by encoding")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_scan_minima(rows, path):
    """Least local minimum of the interpolant versus instance size."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    xs = [row.size for row in rows]
    ys = [row.least_local_min for row in rows]
    kind = rows[0].kind if rows else ""
    ax.plot(xs, ys, marker=".", linestyle="-")
    ax.axhline(0.9, color="tab:red", linestyle="--", alpha=0.6, label="0.9")
    ax.set_xlabel("size")
    ax.set_ylabel("least local minimum")
    ax.set_title(f"Interpolant minima scan ({kind})")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_threshold_ks(rows, path):
    """Step plot of the prime-gap bound k against the overlap bound L."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    xs = [row.L for row in rows]
    ys = [row.k_max for row in rows]
    ax.step(xs, ys, where="post")
    ax.set_xlabel("L")
    ax.set_ylabel("max admissible k")
    ax.set_title("Prime-gap slack in the size bound")
    ax.set_yticks(sorted({0, *ys}))
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
