"""Batch figure rendering: ``plots render --recipe recipe.json``."""

from __future__ import annotations

import argparse
import sys

from .io import SchemaError
from .recipes import RecipeError, load_recipe
from .render import render


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise RecipeError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plots", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    p = sub.add_parser("render", help="render one figure from a JSON recipe")
    p.add_argument("--recipe", required=True, help="path to the recipe JSON")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        recipe = load_recipe(args.recipe)
        render(recipe)
    except (RecipeError, SchemaError, OSError) as exc:
        print(f"plots: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
