"""Numerical Wirtinger and real calculus on scalar fields of 2n real variables.

A scalar field is any callable on points (2n real coordinates, see
:mod:`foliationlab.coords`); :class:`ScalarField` optionally bundles a
domain hint.  Everything here is plain central finite differences --- the
fields under study include user-supplied black boxes, so the interface
stays oracle-only.  Callables are expected to be deterministic: repeated
evaluation at the same point must give bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .coords import as_point
from .errors import CriticalPointOfAlpha, NonFiniteSample

#: gradient norms below this are treated as critical points
GRADIENT_FLOOR = 1e-10

_SCHEMES = ("central2", "central4")


@dataclass(frozen=True)
class ScalarField:
    """A real-valued function of a point, with an optional validity predicate."""

    eval: Callable[[np.ndarray], float]
    domain_hint: Optional[Callable[[np.ndarray], bool]] = None
    name: str = ""

    def __call__(self, p) -> float:
        return float(self.eval(as_point(p)))


def as_scalar_field(f, name: str = "") -> ScalarField:
    if isinstance(f, ScalarField):
        return f
    return ScalarField(eval=f, name=name)


@dataclass(frozen=True)
class DiffConfig:
    """Finite-difference step policy.

    ``h=None`` resolves to 1e-5 * max(1, |p|) at each evaluation point; the
    scheme is fixed per computation so results are reproducible.
    """

    h: Optional[float] = None
    scheme: str = "central2"

    def __post_init__(self):
        if self.h is not None and not self.h > 0:
            raise ValueError("step h must be positive")
        if self.scheme not in _SCHEMES:
            raise ValueError(f"scheme must be one of {_SCHEMES}")

    def step_for(self, p) -> float:
        if self.h is not None:
            return self.h
        return 1e-5 * max(1.0, float(np.linalg.norm(as_point(p))))


def _eval(f, p):
    v = f(p)
    # accept complex-valued integrands (used when iterating Wirtinger derivatives)
    v = complex(v)
    if not (np.isfinite(v.real) and np.isfinite(v.imag)):
        raise NonFiniteSample(f"non-finite sample at {p!r}")
    return v if v.imag != 0.0 else v.real


def partial(f, p, i: int, cfg: DiffConfig = DiffConfig()):
    """d f / d v_i at p by central differences (real coordinate index i)."""
    p = as_point(p)
    h = cfg.step_for(p)
    e = np.zeros_like(p)
    e[i] = 1.0
    if cfg.scheme == "central2":
        return (_eval(f, p + h * e) - _eval(f, p - h * e)) / (2 * h)
    return (
        -_eval(f, p + 2 * h * e)
        + 8 * _eval(f, p + h * e)
        - 8 * _eval(f, p - h * e)
        + _eval(f, p - 2 * h * e)
    ) / (12 * h)


def gradient(f, p, cfg: DiffConfig = DiffConfig()) -> np.ndarray:
    """Real gradient over all 2n coordinates."""
    p = as_point(p)
    g = np.array([partial(f, p, i, cfg) for i in range(p.size)])
    if np.iscomplexobj(g):
        raise NonFiniteSample("gradient of a complex-valued field is not defined here")
    return g


def second_partial(f, p, i: int, cfg: DiffConfig = DiffConfig()):
    p = as_point(p)
    h = cfg.step_for(p)
    e = np.zeros_like(p)
    e[i] = 1.0
    if cfg.scheme == "central2":
        return (_eval(f, p + h * e) - 2 * _eval(f, p) + _eval(f, p - h * e)) / (h * h)
    return (
        -_eval(f, p + 2 * h * e)
        + 16 * _eval(f, p + h * e)
        - 30 * _eval(f, p)
        + 16 * _eval(f, p - h * e)
        - _eval(f, p - 2 * h * e)
    ) / (12 * h * h)


def mixed_partial(f, p, i: int, j: int, cfg: DiffConfig = DiffConfig()):
    """d^2 f / d v_i d v_j by the 4-point cross stencil (2nd order)."""
    if i == j:
        return second_partial(f, p, i, cfg)
    p = as_point(p)
    h = cfg.step_for(p)
    ei = np.zeros_like(p)
    ej = np.zeros_like(p)
    ei[i] = h
    ej[j] = h
    return (
        _eval(f, p + ei + ej) - _eval(f, p + ei - ej) - _eval(f, p - ei + ej) + _eval(f, p - ei - ej)
    ) / (4 * h * h)


def wirtinger_dz(f, p, k: int, cfg: DiffConfig = DiffConfig()) -> complex:
    """d f / d z_k = (df/dx_k - i df/dy_k) / 2 at p.

    Works for real- or complex-valued f, so it can be iterated.
    """
    p = as_point(p)
    if not 0 <= k < p.size // 2:
        raise ValueError(f"coordinate index {k} out of range for n={p.size // 2}")
    fx = partial(f, p, 2 * k, cfg)
    fy = partial(f, p, 2 * k + 1, cfg)
    return 0.5 * (complex(fx) - 1j * complex(fy))


def wirtinger_dzbar(f, p, k: int, cfg: DiffConfig = DiffConfig()) -> complex:
    """d f / d zbar_k = (df/dx_k + i df/dy_k) / 2 at p."""
    p = as_point(p)
    if not 0 <= k < p.size // 2:
        raise ValueError(f"coordinate index {k} out of range for n={p.size // 2}")
    fx = partial(f, p, 2 * k, cfg)
    fy = partial(f, p, 2 * k + 1, cfg)
    return 0.5 * (complex(fx) + 1j * complex(fy))


def laplacian(f, p, cfg: DiffConfig = DiffConfig()) -> float:
    """Sum of second central differences over all 2n real coordinates."""
    p = as_point(p)
    total = 0.0
    for i in range(p.size):
        total += second_partial(f, p, i, cfg)
    return float(np.real(total))


def obstruction_ratio(alpha, p, cfg: DiffConfig = DiffConfig(), floor: float = GRADIENT_FLOOR) -> float:
    """Laplacian over squared gradient norm, the conserved-quantity obstruction.

    For a function alpha that is constant on the orbits of a field, this ratio
    must itself be constant on orbits whenever leaf-preserving local
    biholomorphisms exist; its variation along an orbit therefore witnesses a
    holomorphicity obstruction.
    """
    p = as_point(p)
    g = gradient(alpha, p, cfg)
    g2 = float(np.dot(g, g))
    if np.sqrt(g2) < floor:
        raise CriticalPointOfAlpha(f"|grad alpha| = {np.sqrt(g2):.3e} below floor {floor:.1e} at {p!r}")
    return laplacian(alpha, p, cfg) / g2
