"""Static figure rendering for the experiment drivers.

Figures are conveniences written next to the CSV tables, which remain the
contract; everything renders through the Agg backend so runs stay headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .measurement_tomo import InterferenceScan

_DPI = 150


def _save(fig, path: Path) -> None:
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def plot_interference_scans(scans: dict[str, InterferenceScan], path: Path) -> None:
    """2x2 panel of phase scans with their fitted fringes."""
    fig, axes = plt.subplots(2, 2, figsize=(9, 6.5), sharex=True, sharey=True)
    dense = np.linspace(0.0, 2.0 * np.pi, 361)
    for ax, (name, scan) in zip(axes.ravel(), scans.items()):
        ax.plot(scan.alphas, scan.intensities, "o", ms=3.5, label="scan")
        fit = scan.amplitude * (1.0 + scan.visibility * np.cos(scan.theta - dense))
        ax.plot(dense, fit, "-", lw=1.2,
                label=f"V={scan.visibility:.3f}, theta={scan.theta:.2f}")
        ax.set_title(name)
        ax.legend(fontsize=8, loc="lower right")
    for ax in axes[-1]:
        ax.set_xlabel("relative phase alpha (rad)")
    for ax in axes[:, 0]:
        ax.set_ylabel("projected intensity")
    _save(fig, path)


def plot_density_matrix(matrix: np.ndarray, ideal: np.ndarray, title: str,
                        path: Path) -> None:
    """3D bar charts of Re and Im parts, ideal entries outlined in black."""
    labels = ["H,L1", "H,L2", "V,L1", "V,L2"]
    fig = plt.figure(figsize=(10, 4.4))
    pos = np.arange(4)
    xx, yy = np.meshgrid(pos, pos, indexing="ij")
    for panel, (part, name) in enumerate(
        [(matrix.real, "Re"), (matrix.imag, "Im")]
    ):
        ax = fig.add_subplot(1, 2, panel + 1, projection="3d")
        vals = part.ravel()
        ax.bar3d(xx.ravel() - 0.35, yy.ravel() - 0.35, np.zeros(16), 0.7, 0.7,
                 vals, color="#4878cf", alpha=0.85, shade=True)
        ideal_part = (ideal.real if name == "Re" else ideal.imag).ravel()
        ax.bar3d(xx.ravel() - 0.35, yy.ravel() - 0.35, np.zeros(16), 0.7, 0.7,
                 ideal_part, color=(0, 0, 0, 0), edgecolor="black", linewidth=0.7)
        ax.set_title(f"{name}({title})")
        ax.set_xticks(pos)
        ax.set_yticks(pos)
        ax.set_xticklabels(labels, fontsize=7)
        ax.set_yticklabels(labels, fontsize=7)
        ax.set_zlim(-0.55, 0.55)
    _save(fig, path)


def plot_fidelity_heatmap(values: np.ndarray, l_values: list[int], path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 5.4))
    im = ax.imshow(values, origin="lower", vmin=0.0, vmax=1.0, cmap="viridis")
    ax.set_xticks(range(len(l_values)))
    ax.set_yticks(range(len(l_values)))
    ax.set_xticklabels(l_values)
    ax.set_yticklabels(l_values)
    ax.set_xlabel("L2")
    ax.set_ylabel("L1")
    ax.set_title("estimated storage fidelity")
    fig.colorbar(im, ax=ax, label="F = (1 + 3V)/4")
    _save(fig, path)


def plot_radius_sweep(rows: list[dict], path: Path) -> None:
    """Ring radius and storage efficiency vs topological charge, per family."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for family, marker in (("pov", "o"), ("lg", "s")):
        sel = [r for r in rows if r["family"] == family]
        if not sel:
            continue
        ls = [r["l"] for r in sel]
        ax1.plot(ls, [r["centroid_radius_um"] for r in sel], marker + "-",
                 label=family, ms=4)
        ax2.plot(ls, [100.0 * r["efficiency"] for r in sel], marker + "-",
                 label=family, ms=4)
    ax1.set_xlabel("topological charge l")
    ax1.set_ylabel("ring radius (um)")
    ax1.legend()
    ax2.set_xlabel("topological charge l")
    ax2.set_ylabel("storage efficiency (%)")
    ax2.legend()
    _save(fig, path)


def plot_pov_residuals(ratios: list[float], residuals: list[float], path: Path) -> None:
    fig, ax = plt.subplots(figsize=(5.4, 4))
    ax.plot(ratios, residuals, "o-")
    ax.axhline(0.05, color="gray", lw=0.8, ls="--")
    ax.set_xlabel("ring radius / ring thickness")
    ax.set_ylabel("L2 residual")
    ax.set_yscale("log")
    ax.set_title("numeric transform vs analytic ring")
    _save(fig, path)
