"""Figure recipes: a JSON document describing one figure to render."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

KINDS = (
    "overlay",
    "convergence-rate",
    "amp-surface",
    "accuracy",
    "error-sweep",
    "runtime-sweep",
)

GRID_KINDS = ("overlay", "convergence-rate", "amp-surface", "accuracy")
SWEEP_KINDS = ("error-sweep", "runtime-sweep")


class RecipeError(ValueError):
    """Raised for an unusable figure recipe."""


@dataclass(frozen=True)
class SweepLine:
    """One line of a sweep figure; ``serial`` lines are drawn black."""

    path: str
    label: str = ""
    serial: bool = False


@dataclass(frozen=True)
class FigureRecipe:
    kind: str
    output: str
    inputs: tuple = ()
    lines: tuple = ()
    sidecar: str = None
    legend: bool = True
    title: str = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RecipeError(f"unknown figure kind {self.kind!r}")
        if not self.output:
            raise RecipeError("recipe needs an output path")
        if self.kind in GRID_KINDS:
            if len(self.inputs) != 1:
                raise RecipeError(f"{self.kind} takes exactly one input CSV")
        else:
            if not self.lines:
                raise RecipeError(f"{self.kind} needs at least one line entry")


def recipe_from_dict(doc: dict) -> FigureRecipe:
    if not isinstance(doc, dict):
        raise RecipeError("recipe must be a JSON object")
    kind = doc.get("kind")
    inputs = doc.get("inputs")
    if inputs is None and "input" in doc:
        inputs = [doc["input"]]
    lines = tuple(
        SweepLine(
            path=str(entry["path"]),
            label=str(entry.get("label", "")),
            serial=bool(entry.get("serial", False)),
        )
        for entry in doc.get("lines", ())
    )
    try:
        return FigureRecipe(
            kind=str(kind),
            output=str(doc.get("output", "")),
            inputs=tuple(str(p) for p in (inputs or ())),
            lines=lines,
            sidecar=doc.get("sidecar"),
            legend=bool(doc.get("legend", True)),
            title=doc.get("title"),
        )
    except KeyError as exc:
        raise RecipeError(f"recipe line entry missing field {exc}") from None


def load_recipe(path) -> FigureRecipe:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RecipeError(f"{path}: invalid JSON ({exc})") from None
    return recipe_from_dict(doc)
