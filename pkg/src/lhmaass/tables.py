"""Expected values for the reproduction harness, stored as versioned JSON."""
from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources


def parse_factored(expr: str) -> Fraction:
    """Evaluate strings like ``"2^9*5*7/(3^4*11)"`` exactly."""

    def product(s: str) -> int:
        s = s.strip().strip("()")
        out = 1
        for f in s.split("*"):
            base, _, exp = f.partition("^")
            out *= int(base) ** (int(exp) if exp else 1)
        return out

    num, _, den = expr.partition("/")
    return Fraction(product(num), product(den) if den else 1)


@lru_cache(maxsize=1)
def load() -> dict:
    with resources.files("lhmaass").joinpath("data/tables.json").open() as fh:
        return json.load(fh)


def table(level: int) -> dict:
    """Table for a level with the cells parsed to Fractions: ``cells[(D, x)]``."""
    t = load()["tables"][str(level)]
    xs = [Fraction(x) for x in t["x"]]
    cells = {}
    for d, col in t["columns"].items():
        for x, v in zip(xs, col):
            cells[(int(d), x)] = parse_factored(v)
    return {**t, "xs": xs, "cells": cells, "Ds": [int(d) for d in t["columns"]]}
