"""Renderers for the laboratory's figure kinds.

Overlay maps use the fixed four-color legend: light blue for a
contractive iteration with an unstable one-step method, dark blue for
contractive and stable, dark gray for stable but non-contractive, white
otherwise, with a yellow contour marking the boundary of the
convergence region (norm_E_inf = 1).
"""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.colors import ListedColormap
from matplotlib.patches import Patch

from .io import GridData, read_grid_csv, read_sidecar, read_sweep_csv
from .recipes import FigureRecipe

# legend colors (RGB 0..255)
LIGHT_BLUE = (84, 127, 255)  # contractive, unstable
DARK_BLUE = (57, 80, 151)  # contractive, stable
DARK_GRAY = (80, 80, 80)  # non-contractive, stable
WHITE = (255, 255, 255)  # non-contractive, unstable
YELLOW = (255, 186, 65)  # norm_E_inf = 1 boundary

CLASS_COLORS = {
    "CONV_STABLE": DARK_BLUE,
    "CONV_UNSTABLE": LIGHT_BLUE,
    "NOCONV_STABLE": DARK_GRAY,
    "NOCONV_UNSTABLE": WHITE,
}

CLASS_LABELS = {
    "CONV_STABLE": "contractive, stable",
    "CONV_UNSTABLE": "contractive, unstable",
    "NOCONV_STABLE": "non-contractive, stable",
    "NOCONV_UNSTABLE": "non-contractive, unstable",
}


def _unit(rgb):
    return tuple(v / 255.0 for v in rgb)


def class_image(grid: GridData) -> np.ndarray:
    """Exact-size RGB raster, one pixel per grid cell.

    Rows run from the largest z2 (top) to the smallest; columns from the
    smallest z1 to the largest.  Cells adjacent to a sign change of
    (norm_E_inf - 1) are painted yellow, which traces the convergence
    boundary at pixel granularity.
    """
    n1, n2 = grid.cls.shape
    img = np.zeros((n2, n1, 3), dtype=np.uint8)
    for token, rgb in CLASS_COLORS.items():
        mask = (grid.cls == token).T[::-1, :]
        img[mask] = rgb

    conv = (grid.norm_E_inf < 1.0).T[::-1, :]
    boundary = np.zeros_like(conv)
    boundary[1:, :] |= conv[1:, :] != conv[:-1, :]
    boundary[:-1, :] |= conv[:-1, :] != conv[1:, :]
    boundary[:, 1:] |= conv[:, 1:] != conv[:, :-1]
    boundary[:, :-1] |= conv[:, :-1] != conv[:, 1:]
    img[boundary] = YELLOW
    return img


def _overlay_title(recipe: FigureRecipe) -> str:
    if recipe.title:
        return recipe.title
    if recipe.sidecar:
        doc = read_sidecar(recipe.sidecar)
        S, E = doc.get("speedup"), doc.get("efficiency")
        if S is not None and E is not None:
            return f"S = {S:.2f}, E = {E:.3f}"
    return ""


def render_overlay(recipe: FigureRecipe) -> None:
    grid = read_grid_csv(recipe.inputs[0])
    if not recipe.legend:
        # exact raster: one pixel per cell, reproducible structure
        plt.imsave(recipe.output, class_image(grid))
        return

    tokens = list(CLASS_COLORS)
    index = np.zeros(grid.cls.shape, dtype=int)
    for value, token in enumerate(tokens):
        index[grid.cls == token] = value
    cmap = ListedColormap([_unit(CLASS_COLORS[token]) for token in tokens])

    fig, ax = plt.subplots(figsize=(6, 5))
    ax.pcolormesh(
        grid.z1_axis, grid.z2_axis, index.T, cmap=cmap, vmin=-0.5, vmax=3.5,
        shading="nearest",
    )
    if grid.z1_axis.size > 1 and grid.z2_axis.size > 1:
        ax.contour(
            grid.z1_axis, grid.z2_axis, grid.norm_E_inf.T, levels=[1.0],
            colors=[_unit(YELLOW)], linewidths=2.0,
        )
    handles = [
        Patch(facecolor=_unit(CLASS_COLORS[t]), label=CLASS_LABELS[t]) for t in tokens
    ]
    handles.append(Patch(facecolor=_unit(YELLOW), label="convergence boundary"))
    ax.legend(handles=handles, loc="upper right", fontsize=8)
    ax.set_xlabel("z1")
    ax.set_ylabel("z2")
    ax.set_title(_overlay_title(recipe))
    fig.savefig(recipe.output, dpi=150)
    plt.close(fig)


def _heatmap(recipe: FigureRecipe, values: np.ndarray, grid: GridData, label: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 5))
    extent = (
        grid.z1_axis[0], grid.z1_axis[-1], grid.z2_axis[0], grid.z2_axis[-1],
    )
    im = ax.imshow(
        values.T, origin="lower", extent=extent, aspect="auto", cmap="viridis"
    )
    fig.colorbar(im, ax=ax, label=label)
    ax.set_xlabel("z1")
    ax.set_ylabel("z2")
    if recipe.title:
        ax.set_title(recipe.title)
    fig.savefig(recipe.output, dpi=150)
    plt.close(fig)


def render_convergence_rate(recipe: FigureRecipe) -> None:
    grid = read_grid_csv(recipe.inputs[0])
    _heatmap(recipe, grid.norm_E_inf, grid, "norm_E_inf")


def render_amp_surface(recipe: FigureRecipe) -> None:
    grid = read_grid_csv(recipe.inputs[0])
    values = np.log10(np.maximum(grid.abs_R, 1e-300))
    _heatmap(recipe, values, grid, "log10 |R|")


def render_accuracy(recipe: FigureRecipe) -> None:
    grid = read_grid_csv(recipe.inputs[0])
    values = np.log10(np.maximum(grid.accuracy_err, 1e-300))
    _heatmap(recipe, values, grid, "log10 error")


def _render_sweep(recipe: FigureRecipe, x_of) -> None:
    fig, ax = plt.subplots(figsize=(6, 5))
    for line in recipe.lines:
        sweep = read_sweep_csv(line.path)
        style = {"color": "black"} if line.serial else {}
        finite = np.isfinite(sweep.error)
        ax.loglog(
            x_of(sweep)[finite], sweep.error[finite],
            marker="o", label=line.label or None, **style,
        )
    ax.set_ylabel("relative error")
    if recipe.legend and any(line.label for line in recipe.lines):
        ax.legend(fontsize=8)
    if recipe.title:
        ax.set_title(recipe.title)
    return fig, ax


def render_error_sweep(recipe: FigureRecipe) -> None:
    fig, ax = _render_sweep(recipe, lambda s: s.Ns)
    ax.set_xlabel("total steps Ns")
    fig.savefig(recipe.output, dpi=150)
    plt.close(fig)


def render_runtime_sweep(recipe: FigureRecipe) -> None:
    def x_of(sweep):
        # serial rows carry the measured runtime; the theoretical column
        # already equals it divided by the predicted speedup
        return np.where(
            sweep.theoretical_runtime_s > 0,
            sweep.theoretical_runtime_s,
            sweep.runtime_s,
        )

    fig, ax = _render_sweep(recipe, x_of)
    ax.set_xlabel("runtime (s)")
    fig.savefig(recipe.output, dpi=150)
    plt.close(fig)


_RENDERERS = {
    "overlay": render_overlay,
    "convergence-rate": render_convergence_rate,
    "amp-surface": render_amp_surface,
    "accuracy": render_accuracy,
    "error-sweep": render_error_sweep,
    "runtime-sweep": render_runtime_sweep,
}


def render(recipe: FigureRecipe) -> None:
    """Render one figure; raises SchemaError/RecipeError on bad inputs."""
    _RENDERERS[recipe.kind](recipe)
