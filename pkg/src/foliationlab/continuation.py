"""Disc-chaining analytic continuation of univariate germs and monodromy.

A germ is a truncated Taylor series with a centre and a validity-radius
estimate.  Continuation along a path recenters in steps bounded by a
fraction of the current radius estimate; a loop whose final value at the
base point differs from the initial one witnesses multivaluedness --- the
mechanism behind the non-schlicht examples (square root, logarithm, and
the exponential-chart first coordinate of the classical two-dimensional
example).

Recentering a bare truncated series is exact polynomial algebra, and
polynomials are single-valued: composing such shifts around a closed loop
is the identity map, so coefficients alone can never carry monodromy (and
in floating point the shifted top coefficients amplify roundoff
exponentially).  Germs built from the named registry therefore carry the
linear ODE their function satisfies; the chaining engine transports the
value and derivatives to each new centre and regenerates the series from
the ODE recurrence there, which is numerically stable and tracks the
branch.  Raw coefficient-only germs continue with honest polynomial
semantics.

Only univariate continuation is implemented: every monodromy witness needed
here lives on a complex line.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import fields as fieldmod
from .coords import as_point, to_complex
from .errors import SingularityEncountered, SliceNotInvariant, StepTooLarge

DEFAULT_ORDER = 40
STEP_FRACTION = 0.3
RADIUS_COLLAPSE = 1e-9
MAX_SUBSTEPS = 10_000
_RADIUS_CAP = 1e12


# ---------------------------------------------------------------------------
# linear ODE models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearODE:
    """Homogeneous linear ODE sum_i p_i(w) f^(i)(w) = 0 with polynomial p_i.

    ``coeffs[i]`` lists p_i low-to-high in the global variable w.  Roots of
    the leading polynomial are the only possible singularities, which pins
    the convergence radius of every regenerated series exactly.
    """

    coeffs: Tuple[Tuple[complex, ...], ...]

    def __post_init__(self):
        cs = tuple(tuple(complex(x) for x in p) for p in self.coeffs)
        if len(cs) < 2:
            raise ValueError("need order >= 1 (constant term plus leading term)")
        if not any(abs(x) > 0 for x in cs[-1]):
            raise ValueError("leading coefficient polynomial must be nonzero")
        object.__setattr__(self, "coeffs", cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def singularities(self) -> np.ndarray:
        lead = np.array(self.coeffs[-1], dtype=complex)
        if lead.size == 1:
            return np.array([], dtype=complex)   # constant leading coefficient
        return np.roots(lead[::-1])

    def distance_to_singularity(self, center: complex) -> float:
        sing = self.singularities()
        if sing.size == 0:
            return _RADIUS_CAP
        return float(np.min(np.abs(sing - complex(center))))


def _shift_poly(p: Sequence[complex], a: complex) -> np.ndarray:
    """Coefficients of p(u + a) in u; exact for the small degrees used here."""
    p = np.asarray(p, dtype=complex)
    out = np.zeros_like(p)
    for j, coef in enumerate(p):
        if coef == 0:
            continue
        binom = 1.0                      # C(j, m), updated over m
        for m in range(j + 1):
            out[m] += coef * binom * a ** (j - m)
            binom = binom * (j - m) / (m + 1)
    return out


def _falling(m: int, i: int) -> float:
    """(m + i)! / m! as a float."""
    out = 1.0
    for t in range(m + 1, m + i + 1):
        out *= t
    return out


def regenerate(ode: LinearODE, center: complex, initial: Sequence[complex],
               order: int = DEFAULT_ORDER) -> np.ndarray:
    """Series coefficients at ``center`` from initial values (f, f', ...).

    initial[i] is f^(i)(center); the recurrence extracted from the shifted
    ODE fills the remaining coefficients.  Requires the leading polynomial
    nonzero at the centre (i.e. the centre is an ordinary point).
    """
    r = ode.order
    if len(initial) != r:
        raise ValueError(f"need {r} initial values, got {len(initial)}")
    q = [_shift_poly(p, center) for p in ode.coeffs]
    lead_at_center = q[r][0]
    if abs(lead_at_center) == 0:
        raise SingularityEncountered(f"ODE is singular at {center!r}")
    c = np.zeros(order, dtype=complex)
    fact = 1.0
    for i, val in enumerate(initial):
        c[i] = complex(val) / fact       # c_i = f^(i) / i!
        fact *= i + 1
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(order - r):
            total = 0j
            for i in range(r + 1):
                for j, coef in enumerate(q[i]):
                    if coef == 0:
                        continue
                    m = k - j
                    if m < 0:
                        continue
                    idx = m + i
                    if idx == k + r and i == r and j == 0:
                        continue         # the unknown being solved for
                    if idx < order:
                        total += coef * _falling(m, i) * c[idx]
            c[k + r] = -total / (lead_at_center * _falling(k, r))
    if not np.all(np.isfinite(c.view(float))):
        raise SingularityEncountered(
            f"series coefficients overflow at {center!r}: singularity too close"
        )
    return c


# ---------------------------------------------------------------------------
# germs
# ---------------------------------------------------------------------------

def ratio_radius(coeffs: np.ndarray, window: int = 10) -> float:
    """Radius estimate from the ratio test on trailing coefficients.

    Median of |c_{k-1} / c_k| over the last ``window`` usable ratios; series
    with vanishing tails count as entire (capped at a large finite radius).
    """
    c = np.abs(np.asarray(coeffs, dtype=complex))
    tiny = 1e-300
    ratios = []
    for k in range(c.size - 1, 0, -1):
        if c[k] > tiny and c[k - 1] > tiny:
            ratios.append(c[k - 1] / c[k])
        if len(ratios) >= window:
            break
    if len(ratios) < 3:
        return _RADIUS_CAP
    return float(min(np.median(ratios), _RADIUS_CAP))


@dataclass(frozen=True)
class Germ:
    """Truncated power series sum_k coeffs[k] (w - center)^k valid near center.

    ``ode`` (optional) is the linear ODE the underlying function satisfies;
    germs carrying one can be continued across the full Riemann surface,
    bare ones only as the polynomials they literally are.
    """

    center: complex
    coeffs: np.ndarray
    radius: float
    ode: Optional[LinearODE] = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0:
            raise ValueError("validity radius must be positive")

    @property
    def order(self) -> int:
        return self.coeffs.size

    def value(self, w: complex) -> complex:
        """Horner evaluation at w; meaningful for |w - center| < radius / 2."""
        u = complex(w) - self.center
        acc = 0j
        for c in self.coeffs[::-1]:
            acc = acc * u + c
        return acc

    def derivative_values(self, w: complex, count: int) -> List[complex]:
        """[f(w), f'(w), ..., f^(count-1)(w)] from the truncated series."""
        u = complex(w) - self.center
        out = []
        coeffs = self.coeffs
        for i in range(count):
            acc = 0j
            for k in range(coeffs.size - 1, i - 1, -1):
                acc = acc * u + coeffs[k] * _falling(k - i, i)
            out.append(acc)
        return out

    def radius_estimate(self) -> float:
        """Conservative minimum of the ratio test and the known singularities."""
        est = ratio_radius(self.coeffs)
        if self.ode is not None:
            est = min(est, self.ode.distance_to_singularity(self.center))
        return est

    def tail_bound(self, dist: float) -> float:
        """Geometric bound on the truncation error at distance ``dist``."""
        c = np.abs(self.coeffs)
        n = c.size - 1
        q = dist / self.radius_estimate()
        if q >= 1.0:
            return math.inf
        scale = float(max(c[max(0, n - 10):].max(initial=0.0), 1e-300))
        return scale * q ** (n + 1) / (1.0 - q)


def recenter(g: Germ, new_center: complex) -> Germ:
    """Shift the expansion point by binomial resummation at fixed order.

    Exact polynomial recentering with the conservative radius
    old - |shift|; the chaining engine prefers ODE regeneration when the
    germ carries a model.
    """
    s = complex(new_center) - g.center
    if abs(s) >= 0.5 * g.radius:
        raise StepTooLarge(f"|shift| = {abs(s):.3e} >= half the radius {g.radius:.3e}")
    if s == 0:
        return Germ(center=g.center, coeffs=g.coeffs.copy(), radius=g.radius, ode=g.ode)
    n = g.order
    powers = s ** np.arange(n)
    new = np.zeros(n, dtype=complex)
    for m in range(n):
        binom = 1.0
        acc = 0j
        for k in range(m, n):
            acc += g.coeffs[k] * binom * powers[k - m]
            binom = binom * (k + 1) / (k + 1 - m)
        new[m] = acc
    return Germ(center=complex(new_center), coeffs=new, radius=g.radius - abs(s), ode=g.ode)


def _step(g: Germ, target: complex) -> Germ:
    """One chaining step: ODE regeneration when available, else polynomial shift."""
    if g.ode is None:
        working = Germ(center=g.center, coeffs=g.coeffs,
                       radius=max(g.radius, ratio_radius(g.coeffs)), ode=None)
        return recenter(working, target)
    initial = g.derivative_values(target, g.ode.order)
    coeffs = regenerate(g.ode, target, initial, g.order)
    radius = g.ode.distance_to_singularity(target)
    return Germ(center=target, coeffs=coeffs, radius=max(radius, 1e-300), ode=g.ode)


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PathSpec:
    waypoints: Tuple[complex, ...]
    description: str = ""

    def __post_init__(self):
        wps = tuple(complex(w) for w in self.waypoints)
        if len(wps) < 2:
            raise ValueError("a path needs at least two waypoints")
        for a, b in zip(wps, wps[1:]):
            if a == b:
                raise ValueError("consecutive waypoints must be distinct")
        object.__setattr__(self, "waypoints", wps)

    def is_loop(self) -> bool:
        return self.waypoints[0] == self.waypoints[-1]

    def reversed(self) -> "PathSpec":
        return PathSpec(waypoints=self.waypoints[::-1],
                        description=f"reverse({self.description})")


def circle_loop(center: complex, radius: float, n_points: int = 64,
                base_angle: float = 0.0, clockwise: bool = False,
                turns: int = 1) -> PathSpec:
    """Closed circular loop; the first and last waypoints coincide exactly."""
    orient = -1.0 if clockwise else 1.0
    pts = []
    total = n_points * turns
    for k in range(total):
        ang = base_angle + orient * 2.0 * math.pi * k / n_points
        pts.append(complex(center) + radius * cmath.exp(1j * ang))
    pts.append(pts[0])
    word = "cw" if clockwise else "ccw"
    return PathSpec(waypoints=tuple(pts),
                    description=f"{word} circle r={radius} around {center} x{turns}")


def polyline(points: Sequence[complex], description: str = "") -> PathSpec:
    return PathSpec(waypoints=tuple(complex(p) for p in points), description=description)


# ---------------------------------------------------------------------------
# continuation
# ---------------------------------------------------------------------------

@dataclass
class ContinuationResult:
    final: Germ
    steps: int


def continue_along(g: Germ, path: PathSpec, step_fraction: float = STEP_FRACTION,
                   max_substeps: int = MAX_SUBSTEPS) -> ContinuationResult:
    """Continue the germ along the path, subdividing each segment adaptively.

    Every recentering step is bounded by ``step_fraction`` times the current
    radius estimate.  A collapsing estimate raises SingularityEncountered
    (the path ran into a branch point); exceeding the subdivision budget
    raises StepTooLarge.
    """
    start = path.waypoints[0]
    if abs(start - g.center) > 0.5 * min(g.radius, g.radius_estimate()):
        raise StepTooLarge("path must start within half the germ radius of the centre")
    cur = g
    steps = 0
    if start != g.center:
        cur = _step(cur, start)
        steps += 1
    for target in path.waypoints[1:]:
        while cur.center != target:
            r_est = cur.radius_estimate()
            if r_est < RADIUS_COLLAPSE:
                raise SingularityEncountered(
                    f"radius estimate {r_est:.3e} collapsed near {cur.center:.6g}"
                )
            allowed = step_fraction * r_est
            gap = target - cur.center
            step_to = target if abs(gap) <= allowed else cur.center + gap / abs(gap) * allowed
            cur = _step(cur, step_to)
            steps += 1
            if steps > max_substeps:
                raise StepTooLarge(f"subdivision limit {max_substeps} exceeded")
    return ContinuationResult(final=cur, steps=steps)


def monodromy(g: Germ, loop: PathSpec, step_fraction: float = STEP_FRACTION) -> complex:
    """Value change at the base point after continuation around a closed loop.

    Zero (to numerical precision) means the germ is single-valued along this
    loop; a nonzero result is the multivaluedness witness.
    """
    if not loop.is_loop():
        raise ValueError("monodromy needs a closed loop (first waypoint == last)")
    base = loop.waypoints[0]
    before = g.value(base)
    res = continue_along(g, loop, step_fraction=step_fraction)
    after = res.final.value(base)
    return after - before


# ---------------------------------------------------------------------------
# continuation along an orbit
# ---------------------------------------------------------------------------

def continue_along_orbit(field: fieldmod.VectorField, g: Germ, seed, t_flow: float,
                         coord: int = 0, n_waypoints: int = 64,
                         slice_tol: float = 1e-9,
                         flow_tol: float = fieldmod.DEFAULT_TOL) -> ContinuationResult:
    """Continue a germ of one complex coordinate along a flow segment.

    The field must preserve the complex line through the seed hosting
    coordinate ``coord`` (all other velocity components vanish along the
    sampled segment); the germ is then continued along the projected
    trajectory from the seed to its time-``t_flow`` image.
    """
    seed = as_point(seed)
    n = field.n
    if not 0 <= coord < n:
        raise ValueError(f"coordinate {coord} out of range for n={n}")
    if t_flow == 0.0:
        return ContinuationResult(final=g, steps=0)
    t0, t1 = (t_flow, 0.0) if t_flow < 0 else (0.0, t_flow)
    traj = fieldmod.sample_orbit(field, seed, t0, t1, max(n_waypoints, 8), tol=flow_tol)
    if traj.truncated:
        raise SliceNotInvariant("orbit segment left the working ball before the requested time")

    others = [k for k in range(n) if k != coord]
    for pt in traj.points:
        vel = to_complex(field.velocity(pt))
        off = float(np.max(np.abs([vel[k] for k in others]))) if others else 0.0
        if off > slice_tol:
            raise SliceNotInvariant(
                f"velocity has component {off:.3e} off the continuation line at {pt!r}"
            )

    zs = [complex(to_complex(pt)[coord]) for pt in traj.points]
    if t_flow < 0:
        zs = zs[::-1]
    way: List[complex] = [zs[0]]
    for z in zs[1:]:
        if z != way[-1]:
            way.append(z)
    if len(way) < 2:
        return ContinuationResult(final=g, steps=0)
    return continue_along(g, PathSpec(waypoints=tuple(way), description="orbit segment"))


# ---------------------------------------------------------------------------
# named germs
# ---------------------------------------------------------------------------

SQRT_ODE = LinearODE(coeffs=((-1.0,), (0.0, 2.0)))      # 2 w f' - f = 0
LOG_ODE = LinearODE(coeffs=((0.0,), (1.0,), (0.0, 1.0)))  # w f'' + f' = 0


def _binom_halves(order: int) -> np.ndarray:
    """Binomial coefficients C(1/2, k) for k = 0..order-1."""
    out = np.empty(order)
    out[0] = 1.0
    for k in range(1, order):
        out[k] = out[k - 1] * (0.5 - (k - 1)) / k
    return out


def sqrt_germ(at: complex, order: int = DEFAULT_ORDER) -> Germ:
    """Principal-branch square root expanded at ``at`` (nonzero)."""
    a = complex(at)
    if a == 0:
        raise ValueError("square root has a branch point at 0")
    root = cmath.sqrt(a)
    k = np.arange(order)
    coeffs = root * _binom_halves(order) / a ** k
    return Germ(center=a, coeffs=coeffs, radius=abs(a), ode=SQRT_ODE)


def log_germ(at: complex, order: int = DEFAULT_ORDER) -> Germ:
    """Principal-branch logarithm expanded at ``at`` (nonzero)."""
    a = complex(at)
    if a == 0:
        raise ValueError("logarithm has a branch point at 0")
    coeffs = np.zeros(order, dtype=complex)
    coeffs[0] = cmath.log(a)
    k = np.arange(1, order)
    coeffs[1:] = ((-1.0) ** (k + 1)) / (k * a ** k)
    return Germ(center=a, coeffs=coeffs, radius=abs(a), ode=LOG_ODE)


def neg_i_log_germ(at: complex, order: int = DEFAULT_ORDER) -> Germ:
    """-i log(w): the first chart coordinate behind the exponential map."""
    g = log_germ(at, order)
    return Germ(center=g.center, coeffs=-1j * g.coeffs, radius=g.radius, ode=LOG_ODE)


def polynomial_germ(at: complex, coefficients: Sequence[complex],
                    order: int = DEFAULT_ORDER) -> Germ:
    """Entire germ of a polynomial given by origin coefficients."""
    a = complex(at)
    base = np.zeros(max(order, len(coefficients)), dtype=complex)
    base[:len(coefficients)] = np.asarray(coefficients, dtype=complex)
    origin = Germ(center=0.0, coeffs=base, radius=_RADIUS_CAP)
    if a == 0:
        return origin
    shifted = recenter(origin, a)
    return Germ(center=a, coeffs=shifted.coeffs, radius=_RADIUS_CAP)


GERM_BUILDERS = {
    "sqrt_at": sqrt_germ,
    "log_at": log_germ,
    "neg_i_log_at": neg_i_log_germ,
}
