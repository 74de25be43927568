"""Points of C^n stored as 2n real coordinates.

Layout is interleaved: v = (x_1, y_1, ..., x_n, y_n) for z_k = x_k + i y_k.
All geometry in the lab passes through these helpers so the layout is fixed
in exactly one place.
"""

from __future__ import annotations

import numpy as np


def as_point(v) -> np.ndarray:
    """Coerce to a float64 vector of even length."""
    p = np.asarray(v, dtype=float).ravel()
    if p.size % 2 != 0:
        raise ValueError(f"point must have an even number of real coordinates, got {p.size}")
    return p


def complex_dim(v) -> int:
    return as_point(v).size // 2


def to_complex(v) -> np.ndarray:
    """(2n,) real -> (n,) complex."""
    p = as_point(v)
    return p[0::2] + 1j * p[1::2]


def from_complex(z) -> np.ndarray:
    """(n,) complex -> (2n,) real."""
    z = np.asarray(z, dtype=complex).ravel()
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def complex_structure(n: int) -> np.ndarray:
    """Real 2n x 2n matrix of multiplication by i (per coordinate pair)."""
    j = np.zeros((2 * n, 2 * n))
    for k in range(n):
        j[2 * k, 2 * k + 1] = -1.0
        j[2 * k + 1, 2 * k] = 1.0
    return j


def sup_norm(v) -> float:
    p = as_point(v)
    return float(np.max(np.abs(p))) if p.size else 0.0
