"""Built-in polytope corpus, so every check runs offline."""

from __future__ import annotations

import itertools

from .lattice import LatticePolytope


def unit_simplex(d: int) -> list[list[int]]:
    return [[0] * d] + [[int(i == j) for j in range(d)] for i in range(d)]


def cube(d: int, lo: int = 0, hi: int = 1) -> list[list[int]]:
    return [list(v) for v in itertools.product((lo, hi), repeat=d)]


def cross_polytope(d: int) -> list[list[int]]:
    out = []
    for i in range(d):
        for s in (1, -1):
            out.append([s * int(i == j) for j in range(d)])
    return out


def reeve(q: int) -> list[list[int]]:
    return [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, q]]


def segment(n: int) -> list[list[int]]:
    return [[0], [n]]


RAW: dict[str, list[list[int]]] = {
    "simplex1": unit_simplex(1),
    "simplex2": unit_simplex(2),
    "simplex3": unit_simplex(3),
    "square01": cube(2),
    "cube01": cube(3),
    "segment_pm1": cube(1, -1, 1),
    "square_pm1": cube(2, -1, 1),
    "cube3pm1": cube(3, -1, 1),
    "cross2": cross_polytope(2),
    "cross3": cross_polytope(3),
    "reflexive_triangle": [[1, 0], [0, 1], [-1, -1]],
    "reflexive_simplex3": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]],
    "reeve2": reeve(2),
    "reeve3": reeve(3),
    "reeve4": reeve(4),
    "segment01": segment(1),
    "segment02": segment(2),
    "segment03": segment(3),
}

ALIASES = {"unit_triangle": "simplex2", "unit_square": "square01", "unit_cube": "cube01"}


def get(name: str) -> LatticePolytope:
    key = ALIASES.get(name, name)
    if key not in RAW:
        raise KeyError(f"unknown built-in polytope {name!r}")
    return _cached(key)


_CACHE: dict[str, LatticePolytope] = {}


def _cached(key: str) -> LatticePolytope:
    if key not in _CACHE:
        _CACHE[key] = LatticePolytope.from_points(key, RAW[key])
    return _CACHE[key]


def names() -> list[str]:
    return list(RAW)


def record(name: str) -> dict:
    """Polytope file record for a built-in."""
    return {"name": name, "vertices": RAW[ALIASES.get(name, name)]}
