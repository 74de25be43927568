"""Named built-in functions referenced from JSON specs.

JSON cannot carry callables, so scalar fields, plane predicates, and
holomorphic right-hand sides used by scenarios are registered here under
stable names.  Entries are factories taking a parameter dict, which keeps
parameterized families (log-ratio integrals, seeded cubic perturbations)
constructible from the wire.
"""

from __future__ import annotations

import math
from typing import Callable, Dict

import numpy as np

from .calculus import ScalarField
from .coords import as_point
from .errors import InputError

ALPHA_NOTCH = 1.0 / math.sqrt(3.0)


# --- scalar fields -----------------------------------------------------------

def _y_over_x(params) -> ScalarField:
    return ScalarField(eval=lambda v: v[1] / v[0], name="y/x")


def _re_z2(params) -> ScalarField:
    return ScalarField(eval=lambda v: v[0] ** 2 - v[1] ** 2, name="Re z^2")


def _coordinate_x(params) -> ScalarField:
    return ScalarField(eval=lambda v: float(v[0]), name="x")


def _coordinate_y(params) -> ScalarField:
    return ScalarField(eval=lambda v: float(v[1]), name="y")


def _log_ratio(params) -> ScalarField:
    """-b log x + a log y on the open first quadrant."""
    a = float(params.get("a", 1.0))
    b = float(params.get("b", 1.0))

    def eval_(v):
        if v[0] <= 0 or v[1] <= 0:
            raise ValueError("log-ratio integral lives on the first quadrant")
        return -b * math.log(v[0]) + a * math.log(v[1])

    return ScalarField(eval=eval_, name=f"-{b} log x + {a} log y",
                       domain_hint=lambda v: v[0] > 0 and v[1] > 0)


def _saddle(params) -> ScalarField:
    """|z1|^2 - |z2|^2 on C^2."""
    return ScalarField(eval=lambda v: v[0] ** 2 + v[1] ** 2 - v[2] ** 2 - v[3] ** 2,
                       name="|z1|^2-|z2|^2")


def cubic_perturbation(coeff: float, seed: int, dim: int = 4) -> Callable[[np.ndarray], float]:
    """Random homogeneous cubic in the real coordinates, coefficients in [-coeff, coeff]."""
    rng = np.random.default_rng(seed)
    monos = [(i, j, k) for i in range(dim) for j in range(i, dim) for k in range(j, dim)]
    coefs = rng.uniform(-coeff, coeff, size=len(monos))

    def cubic(v):
        v = as_point(v)
        return float(sum(c * v[i] * v[j] * v[k] for c, (i, j, k) in zip(coefs, monos)))

    return cubic


def _saddle_cubic(params) -> ScalarField:
    coeff = float(params.get("coeff", 0.05))
    seed = int(params.get("seed", 2027))
    cubic = cubic_perturbation(coeff, seed, dim=4)
    base = _saddle({})

    return ScalarField(eval=lambda v: base.eval(v) + cubic(v),
                       name=f"saddle+cubic[{coeff},{seed}]")


def _x2_minus_y3(params) -> ScalarField:
    # obstruction ratio genuinely varies along its level sets: rectification must refuse
    return ScalarField(eval=lambda v: v[0] ** 2 - v[1] ** 3, name="x^2-y^3")


SCALAR_FIELDS: Dict[str, Callable[[dict], ScalarField]] = {
    "y_over_x": _y_over_x,
    "re_z2": _re_z2,
    "coordinate_x": _coordinate_x,
    "coordinate_y": _coordinate_y,
    "log_ratio": _log_ratio,
    "saddle": _saddle,
    "saddle_cubic": _saddle_cubic,
    "x2_minus_y3": _x2_minus_y3,
}


# --- plane predicates ----------------------------------------------------------

def notch_cubic(x1: float) -> float:
    """x1^3 - x1 in the same Horner form the closed-form flow uses.

    Orbits of the notch field ride this curve exactly; evaluating the
    boundary through an identical float pipeline keeps membership of those
    orbits deterministic instead of 1-ulp noise.
    """
    return (x1 * x1 - 1.0) * x1


def notch_region_base(v) -> bool:
    """The planar region below 2 alpha / 3 with a cubic notch carved out.

    x2 < 2 alpha / 3 everywhere, sharpened to x2 < x1^3 - x1 over the notch
    strip -alpha < x1 < 2 alpha (alpha = 1/sqrt(3)).
    """
    x1, x2 = float(v[0]), float(v[1])
    if x2 >= 2.0 * ALPHA_NOTCH / 3.0:
        return False
    if -ALPHA_NOTCH < x1 < 2.0 * ALPHA_NOTCH:
        return x2 < notch_cubic(x1)
    return True


def slit_plane(v) -> bool:
    """C minus the closed negative real axis."""
    x, y = float(v[0]), float(v[1])
    return x > 0.0 or y != 0.0


def left_half_plane(v) -> bool:
    return float(v[0]) < 0.0


PREDICATES: Dict[str, Callable[[dict], Callable]] = {
    "notch_region": lambda params: notch_region_base,
    "slit_plane": lambda params: slit_plane,
    "left_half_plane": lambda params: left_half_plane,
}


# --- holomorphic right-hand sides ------------------------------------------------

def _const_neg_one(params):
    return lambda z: np.array([-1.0 + 0.0j])


def _planar_cubic_extension(params):
    # holomorphic extension of the notch field: z1' = 1, z2' = 3 z1^2 - 1
    return lambda z: np.array([1.0 + 0.0j, 3.0 * z[0] ** 2 - 1.0])


HOLOMORPHIC: Dict[str, Callable[[dict], Callable]] = {
    "const_neg_one": _const_neg_one,
    "notch_field_extension": _planar_cubic_extension,
}


# --- antiholomorphic generators g ---------------------------------------------------

ANTIHOLOMORPHIC_G: Dict[str, Callable[[dict], Callable]] = {
    "neg_i_over_z": lambda params: (lambda z: -1j / z),
    "one": lambda params: (lambda z: 1.0 + 0.0j),
    "z": lambda params: (lambda z: z),
}


def resolve(table: Dict[str, Callable], kind: str, name: str, params: dict | None = None):
    if name not in table:
        raise InputError(f"unknown {kind} name {name!r}; known: {sorted(table)}")
    return table[name](params or {})
