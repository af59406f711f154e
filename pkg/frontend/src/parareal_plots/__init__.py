"""Figure rendering for the Parareal laboratory's file artifacts.

This package consumes only the documented CSV/JSON formats; deleting it
leaves every computation in the main package untouched.
"""

from .io import GridData, SchemaError, SweepData, read_grid_csv, read_sidecar, read_sweep_csv
from .recipes import FigureRecipe, RecipeError, SweepLine, load_recipe, recipe_from_dict
from .render import CLASS_COLORS, YELLOW, class_image, render

__version__ = "0.1.0"

__all__ = [
    "CLASS_COLORS",
    "FigureRecipe",
    "GridData",
    "RecipeError",
    "SchemaError",
    "SweepData",
    "SweepLine",
    "YELLOW",
    "class_image",
    "load_recipe",
    "read_grid_csv",
    "read_sidecar",
    "read_sweep_csv",
    "recipe_from_dict",
    "render",
]
