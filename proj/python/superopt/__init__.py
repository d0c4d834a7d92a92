"""Superoptimal analytic approximation of matrix functions on the unit circle.

A symbol is a dict mapping integer powers of z to coefficient matrices. Scalars
and nested lists are accepted and promoted to complex 2-D arrays.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

import numpy as np

from . import _superopt
from ._superopt import SuperoptError

__all__ = [
    "SuperoptError",
    "classify",
    "factorize",
    "hankel_singular_values",
    "load_problem",
    "nehari",
    "superoptimal_values",
    "toeplitz_index",
    "verify",
    "wh_indices",
]


def _coeffs(symbol: Mapping[int, Any]) -> dict[int, np.ndarray]:
    out = {}
    for k, c in symbol.items():
        a = np.asarray(c, dtype=np.complex128)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2:
            raise ValueError(f"coefficient {k} must be a scalar or a matrix")
        out[int(k)] = a
    return out


def _matrix(entry: Mapping[str, Any]) -> np.ndarray:
    re = np.asarray(entry["re"], dtype=float)
    im = np.asarray(entry.get("im", np.zeros_like(re)), dtype=float)
    return re + 1j * im


def _decode(text: str) -> dict[str, Any]:
    """Parses a JSON result and turns every *_coeffs list into {k: ndarray}."""

    def walk(node: Any) -> Any:
        if isinstance(node, dict):
            out = {}
            for key, value in node.items():
                if key.endswith("coeffs") and isinstance(value, list):
                    out[key] = {int(e["k"]): _matrix(e) for e in value}
                else:
                    out[key] = walk(value)
            return out
        if isinstance(node, list):
            return [walk(x) for x in node]
        return node

    return walk(json.loads(text))


def nehari(symbol, **options) -> dict[str, Any]:
    """Best analytic approximation: Hankel norm ``sigma`` and approximant ``F_coeffs``."""
    return _decode(_superopt.nehari(_coeffs(symbol), **options))


def factorize(symbol, *, with_factors: bool = False, **options) -> dict[str, Any]:
    """Superoptimal approximant, values and the canonical block structure."""
    return _decode(_superopt.factorize(_coeffs(symbol), with_factors=with_factors, **options))


def superoptimal_values(symbol, **options) -> list[float]:
    return factorize(symbol, **options)["superoptimal_values"]


def verify(symbol, **options) -> dict[str, Any]:
    """Runs every consistency check on a fresh factorization; see ``overall``."""
    return _decode(_superopt.verify(_coeffs(symbol), **options))


def wh_indices(symbol) -> list[int]:
    return _decode(_superopt.wh_indices(_coeffs(symbol)))["indices"]


def classify(symbol) -> dict[str, Any]:
    return _decode(_superopt.classify(_coeffs(symbol)))


def hankel_singular_values(symbol) -> np.ndarray:
    return np.asarray(_superopt.hankel_singular_values(_coeffs(symbol)))


def toeplitz_index(symbol) -> int:
    return _superopt.toeplitz_index(_coeffs(symbol))


def load_problem(path) -> tuple[dict[int, np.ndarray], dict[str, Any]]:
    """Reads a problem file; returns the symbol and its options block."""
    with open(path, encoding="utf-8") as f:
        _, _, coeffs, spec = _superopt.parse_problem(f.read())
    return dict(coeffs), json.loads(spec).get("options", {})
