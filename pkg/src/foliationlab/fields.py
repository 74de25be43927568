"""Vector-field classes, their flows, leaf transport, and period detection.

Field variants cover the lab's cast: holomorphic callables, complex-linear
fields z -> Az, the diagonal real-linear plane field (a x, b y),
antiholomorphic fields conj(g) d/dz, gradients of quadratic forms, gradients
of arbitrary smooth functions, planar polynomial fields, and their tube
extensions to C^2 (constant in the imaginary directions).

Flows are exact where a closed form exists (matrix exponentials, diagonal
rates, triangular polynomial fields) and classical adaptive 4th-order
Runge-Kutta with step halving otherwise.  Trajectories that leave the
working ball raise :class:`~foliationlab.errors.BlowUp`; escape means
"outside the lab", not a verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from . import calculus
from .coords import as_point, complex_structure, from_complex, sup_norm, to_complex
from .errors import BlowUp, EquilibriumSeed, SegmentEscape, UndefinedAtPoint, ZeroCoefficient
from .forms import QuadraticForm

DEFAULT_TOL = 1e-10
R_MAX = 1e6
EQUILIBRIUM_FLOOR = 1e-9


# ---------------------------------------------------------------------------
# field variants
# ---------------------------------------------------------------------------

class VectorField:
    """Base class: a smooth vector field on C^n as R^{2n}."""

    n: int

    def velocity(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def exact_flow(self, v: np.ndarray, t: float) -> Optional[np.ndarray]:
        """Closed-form time-t map, or None if only numeric integration applies."""
        return None

    def exact_flow_many(self, v: np.ndarray, ts: np.ndarray) -> Optional[np.ndarray]:
        one = self.exact_flow(as_point(v), 0.0)
        if one is None:
            return None
        return np.array([self.exact_flow(as_point(v), float(t)) for t in ts])

    def describe(self) -> str:
        return type(self).__name__

    def _check(self, v) -> np.ndarray:
        p = as_point(v)
        if p.size != 2 * self.n:
            raise ValueError(f"{self.describe()}: expected point of C^{self.n}, got {p.size} reals")
        return p


@dataclass(frozen=True)
class HolomorphicCallable(VectorField):
    """z' = F(z) with F: C^n -> C^n holomorphic (caller contract)."""

    func: Callable[[np.ndarray], np.ndarray]
    n: int = 1
    name: str = ""

    def velocity(self, v):
        z = to_complex(self._check(v))
        w = np.asarray(self.func(z), dtype=complex).ravel()
        if w.size != self.n:
            raise UndefinedAtPoint(f"callable returned {w.size} components, expected {self.n}")
        return from_complex(w)

    def describe(self):
        return f"holomorphic[{self.name or 'callable'}]"


@dataclass(frozen=True)
class LinearComplex(VectorField):
    """z' = A z for a complex n x n matrix; flow is the matrix exponential."""

    matrix: np.ndarray
    n: int = dc_field(init=False)

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        a.flags.writeable = False
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "n", a.shape[0])
        diag = np.diagonal(a)
        is_diag = np.count_nonzero(a - np.diag(diag)) == 0
        object.__setattr__(self, "_diag", diag if is_diag else None)

    def velocity(self, v):
        z = to_complex(self._check(v))
        return from_complex(self.matrix @ z)

    def exact_flow(self, v, t):
        z = to_complex(self._check(v))
        if self._diag is not None:
            return from_complex(z * np.exp(self._diag * t))
        return from_complex(expm(self.matrix * t) @ z)

    def exact_flow_many(self, v, ts):
        z = to_complex(self._check(v))
        if self._diag is not None:
            out = z[None, :] * np.exp(np.outer(np.asarray(ts, dtype=float), self._diag))
            pts = np.empty((out.shape[0], 2 * self.n))
            pts[:, 0::2] = out.real
            pts[:, 1::2] = out.imag
            return pts
        return np.array([self.exact_flow(v, float(t)) for t in ts])

    def describe(self):
        return f"linear[{self.n}x{self.n}]"


@dataclass(frozen=True)
class RealLinearDiag(VectorField):
    """The plane field (a x, b y) on C; quasiholomorphic only when a = +-b."""

    a: float
    b: float
    n: int = dc_field(init=False, default=1)

    def __post_init__(self):
        if self.a == 0.0 or self.b == 0.0:
            raise ZeroCoefficient("diagonal real-linear field needs a != 0 and b != 0")
        object.__setattr__(self, "n", 1)

    def velocity(self, v):
        p = self._check(v)
        return np.array([self.a * p[0], self.b * p[1]])

    def exact_flow(self, v, t):
        p = self._check(v)
        return np.array([p[0] * math.exp(self.a * t), p[1] * math.exp(self.b * t)])

    def exact_flow_many(self, v, ts):
        p = self._check(v)
        ts = np.asarray(ts, dtype=float)
        return np.stack([p[0] * np.exp(self.a * ts), p[1] * np.exp(self.b * ts)], axis=1)

    def describe(self):
        return f"real_linear_diag[a={self.a}, b={self.b}]"


@dataclass(frozen=True)
class Antiholomorphic(VectorField):
    """z' = conj(g(z)) on a plane domain, for holomorphic nonvanishing g.

    Equals |g|^2 times the holomorphic field with z' = 1/g(z); that g has
    no zeros on the working domain is the caller's contract.
    """

    g: Callable[[complex], complex]
    name: str = ""
    n: int = dc_field(init=False, default=1)

    def __post_init__(self):
        object.__setattr__(self, "n", 1)

    def velocity(self, v):
        p = self._check(v)
        z = complex(p[0], p[1])
        w = complex(self.g(z)).conjugate()
        return np.array([w.real, w.imag])

    def describe(self):
        return f"antiholomorphic[{self.name or 'g'}]"


@dataclass(frozen=True)
class GradQuadratic(VectorField):
    """Gradient field of a real quadratic form; linear in real coordinates."""

    form: QuadraticForm
    n: int = dc_field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n", self.form.n)
        hess = self.form.real_hessian()
        hess.flags.writeable = False
        object.__setattr__(self, "_hess", hess)
        # fast path: pure hermitian diagonal form, complex rates 2 a_j
        rates = None
        if self.form.harmonic_norm() == 0.0:
            offdiag = self.form.H - np.diag(np.diagonal(self.form.H))
            if np.count_nonzero(offdiag) == 0:
                rates = 2.0 * np.diagonal(self.form.H).real
        object.__setattr__(self, "_rates", rates)

    def velocity(self, v):
        return self._hess @ self._check(v)

    def exact_flow(self, v, t):
        p = self._check(v)
        if self._rates is not None:
            z = to_complex(p) * np.exp(self._rates * t)
            return from_complex(z)
        return expm(self._hess * t) @ p

    def exact_flow_many(self, v, ts):
        p = self._check(v)
        ts = np.asarray(ts, dtype=float)
        if self._rates is not None:
            z = to_complex(p)[None, :] * np.exp(np.outer(ts, self._rates))
            pts = np.empty((ts.size, 2 * self.n))
            pts[:, 0::2] = z.real
            pts[:, 1::2] = z.imag
            return pts
        return np.array([expm(self._hess * float(t)) @ p for t in ts])

    def describe(self):
        return f"grad_quadratic[n={self.n}]"


@dataclass(frozen=True)
class GradSmooth(VectorField):
    """Gradient of an arbitrary smooth scalar field, by finite differences."""

    rho: calculus.ScalarField
    n: int = 1
    cfg: calculus.DiffConfig = calculus.DiffConfig()

    def velocity(self, v):
        return calculus.gradient(self.rho, self._check(v), self.cfg)

    def describe(self):
        return f"grad_smooth[{self.rho.name or 'rho'}]"


def _poly_table(c) -> np.ndarray:
    a = np.atleast_2d(np.asarray(c, dtype=float))
    return a


@dataclass(frozen=True)
class PolynomialPlane(VectorField):
    """Planar polynomial field (x', y') = (p(x, y), q(x, y)).

    Coefficient tables follow numpy's polyval2d convention:
    ``c[i, j]`` multiplies ``x**i * y**j``.  Triangular fields with constant
    first component and q depending on x only (like x' = 1,
    y' = 3 x^2 - 1) get a closed-form flow through the antiderivative of q.
    """

    p_coeffs: np.ndarray
    q_coeffs: np.ndarray
    n: int = dc_field(init=False, default=1)

    def __post_init__(self):
        p = _poly_table(self.p_coeffs)
        q = _poly_table(self.q_coeffs)
        p.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, "p_coeffs", p)
        object.__setattr__(self, "q_coeffs", q)
        object.__setattr__(self, "n", 1)
        closed = None
        # constant first component iff every entry except [0,0] vanishes
        mask = np.ones_like(p, dtype=bool)
        mask[0, 0] = False
        p_const = not np.any(p[mask] != 0.0)
        q_x_only = q.shape[1] == 1 or not np.any(q[:, 1:] != 0.0)
        if p_const and p[0, 0] != 0.0 and q_x_only:
            qi = np.zeros(q.shape[0] + 1)
            qi[1:] = q[:, 0] / np.arange(1, q.shape[0] + 1)
            closed = (float(p[0, 0]), qi)
        object.__setattr__(self, "_closed", closed)

    def velocity(self, v):
        p = self._check(v)
        x, y = p[0], p[1]
        from numpy.polynomial import polynomial as npoly
        return np.array([npoly.polyval2d(x, y, self.p_coeffs), npoly.polyval2d(x, y, self.q_coeffs)])

    def exact_flow(self, v, t):
        if self._closed is None:
            return None
        p = self._check(v)
        c, qi = self._closed
        x1 = p[0] + c * t
        y1 = p[1] + (np.polynomial.polynomial.polyval(x1, qi) - np.polynomial.polynomial.polyval(p[0], qi)) / c
        return np.array([x1, float(y1)])

    def exact_flow_many(self, v, ts):
        if self._closed is None:
            return None
        p = self._check(v)
        c, qi = self._closed
        ts = np.asarray(ts, dtype=float)
        x1 = p[0] + c * ts
        y1 = p[1] + (np.polynomial.polynomial.polyval(x1, qi) - np.polynomial.polynomial.polyval(p[0], qi)) / c
        return np.stack([x1, y1], axis=1)

    def describe(self):
        return "polynomial_plane"


def counterexample_plane_field() -> PolynomialPlane:
    """x' = 1, y' = 3 x^2 - 1: integral curves (t, t^3 - t + c)."""
    return PolynomialPlane(p_coeffs=[[1.0]], q_coeffs=[[-1.0], [0.0], [3.0]])


@dataclass(frozen=True)
class TubeExtension(VectorField):
    """Extension of a planar field to C^2, constant in the imaginary parts.

    Real parts (x1, x2) follow the planar field; (y1, y2) stay frozen.  The
    resulting field on C^2 is generally not holomorphic even when the planar
    field is polynomial, which is exactly what makes it interesting here.
    """

    planar: VectorField
    n: int = dc_field(init=False, default=2)

    def __post_init__(self):
        if self.planar.n != 1:
            raise ValueError("tube extension expects a planar (n=1) field")
        object.__setattr__(self, "n", 2)

    def _project(self, v):
        p = self._check(v)
        return np.array([p[0], p[2]])

    def velocity(self, v):
        p = self._check(v)
        u = self.planar.velocity(self._project(p))
        return np.array([u[0], 0.0, u[1], 0.0])

    def exact_flow(self, v, t):
        p = self._check(v)
        base = self.planar.exact_flow(self._project(p), t)
        if base is None:
            return None
        return np.array([base[0], p[1], base[1], p[3]])

    def exact_flow_many(self, v, ts):
        p = self._check(v)
        base = self.planar.exact_flow_many(self._project(p), ts)
        if base is None:
            return None
        out = np.empty((base.shape[0], 4))
        out[:, 0] = base[:, 0]
        out[:, 1] = p[1]
        out[:, 2] = base[:, 1]
        out[:, 3] = p[3]
        return out

    def describe(self):
        return f"tube_extension[{self.planar.describe()}]"


def grad_arg_field() -> Antiholomorphic:
    """The field (-y, x) / (x^2 + y^2): antiholomorphic with g(z) = -i/z."""
    return Antiholomorphic(g=lambda z: -1j / z, name="-i/z")


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def _safe_velocity(field: VectorField, v: np.ndarray) -> np.ndarray:
    try:
        w = field.velocity(v)
    except (ZeroDivisionError, FloatingPointError, OverflowError, ValueError) as exc:
        raise UndefinedAtPoint(f"{field.describe()} undefined at {v!r}: {exc}") from exc
    w = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(w)):
        raise UndefinedAtPoint(f"{field.describe()} returned non-finite velocity at {v!r}")
    return w


def _rk4_step(field, v, dt):
    k1 = _safe_velocity(field, v)
    k2 = _safe_velocity(field, v + 0.5 * dt * k1)
    k3 = _safe_velocity(field, v + 0.5 * dt * k2)
    k4 = _safe_velocity(field, v + dt * k3)
    return v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _integrate(field, v0, t, tol, r_max):
    """Adaptive RK4 with step halving; local error per step <= tol."""
    v = np.array(v0, dtype=float)
    if t == 0.0:
        return v
    direction = 1.0 if t > 0 else -1.0
    total = abs(t)
    done = 0.0
    dt = min(total, 0.1)
    while done < total * (1.0 - 1e-15):
        dt = min(dt, total - done)
        full = _rk4_step(field, v, direction * dt)
        half = _rk4_step(field, v, direction * dt / 2.0)
        half = _rk4_step(field, half, direction * dt / 2.0)
        err = float(np.max(np.abs(half - full))) / 15.0
        if err <= tol:
            v = half + (half - full) / 15.0
            done += dt
            if sup_norm(v) > r_max:
                raise BlowUp(
                    f"trajectory left the ball |v| <= {r_max:g} at t = {direction * done:.6g}",
                    t_reached=direction * done,
                    point=v,
                )
            growth = 4.0 if err == 0.0 else min(4.0, 0.9 * (tol / err) ** 0.2)
            dt = dt * max(growth, 0.1)
        else:
            dt *= 0.5
            if dt < 1e-13 * max(1.0, total):
                raise UndefinedAtPoint(
                    f"step size collapsed at t = {direction * done:.6g}; field likely singular nearby"
                )
    return v


def flow(field: VectorField, p, t: float, tol: float = DEFAULT_TOL,
         r_max: float = R_MAX, method: str = "auto") -> np.ndarray:
    """Time-t map of the field applied to p.

    ``method`` is "auto" (closed form when available), "exact" (require a
    closed form) or "rk" (force numeric integration, used for cross-checks).
    """
    p = as_point(p)
    if method not in ("auto", "exact", "rk"):
        raise ValueError("method must be auto, exact or rk")
    if method != "rk":
        out = field.exact_flow(p, float(t))
        if out is not None:
            if sup_norm(out) > r_max:
                raise BlowUp(
                    f"closed-form flow left the ball |v| <= {r_max:g} at t = {t:.6g}",
                    t_reached=float(t), point=out,
                )
            return out
        if method == "exact":
            raise ValueError(f"{field.describe()} has no closed-form flow")
    return _integrate(field, p, float(t), tol, r_max)


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    """Sampled orbit: strictly increasing times with matching points."""

    times: np.ndarray
    points: np.ndarray
    field: VectorField
    seed: np.ndarray
    truncated: bool = False
    truncated_at: Optional[float] = None

    def __len__(self):
        return self.times.size


def sample_orbit(field: VectorField, p, t_min: float, t_max: float,
                 n_samples: int, tol: float = DEFAULT_TOL, r_max: float = R_MAX) -> Trajectory:
    """Evenly spaced samples of the orbit through p over [t_min, t_max].

    On blow-up, the trajectory is truncated on the offending side and
    flagged rather than raising.
    """
    if not t_min < t_max:
        raise ValueError("need t_min < t_max")
    if n_samples < 2:
        raise ValueError("need n_samples >= 2")
    p = as_point(p)
    times = np.linspace(t_min, t_max, n_samples)

    many = field.exact_flow_many(p, times)
    if many is not None:
        norms = np.max(np.abs(many), axis=1)
        ok = norms <= r_max
        if np.all(ok):
            return Trajectory(times=times, points=many, field=field, seed=p)
        # keep the largest contiguous block around t = 0 (or around the kept side)
        keep = _contiguous_keep(times, ok)
        return Trajectory(times=times[keep], points=many[keep], field=field, seed=p,
                          truncated=True, truncated_at=None)

    fwd_mask = times >= 0.0
    fwd = times[fwd_mask]
    bwd = times[~fwd_mask][::-1]  # descending toward t_min
    pts_fwd: List[np.ndarray] = []
    pts_bwd: List[np.ndarray] = []
    truncated = False
    truncated_at = None

    cur, t_cur = p, 0.0
    for t in fwd:
        try:
            cur = flow(field, cur, float(t - t_cur), tol=tol, r_max=r_max)
        except BlowUp as exc:
            truncated = True
            truncated_at = t_cur + (exc.t_reached or 0.0)
            break
        t_cur = float(t)
        pts_fwd.append(cur)
    cur, t_cur = p, 0.0
    for t in bwd:
        try:
            cur = flow(field, cur, float(t - t_cur), tol=tol, r_max=r_max)
        except BlowUp as exc:
            truncated = True
            truncated_at = t_cur + (exc.t_reached or 0.0)
            break
        t_cur = float(t)
        pts_bwd.append(cur)

    kept_times = np.concatenate([bwd[: len(pts_bwd)][::-1], fwd[: len(pts_fwd)]])
    kept_points = pts_bwd[::-1] + pts_fwd
    if len(kept_points) == 0:
        raise BlowUp("orbit blew up before reaching any requested sample time",
                     t_reached=truncated_at, point=p)
    return Trajectory(times=kept_times, points=np.array(kept_points), field=field, seed=p,
                      truncated=truncated, truncated_at=truncated_at)


def _contiguous_keep(times: np.ndarray, ok: np.ndarray) -> np.ndarray:
    """Largest contiguous True-run containing the time nearest 0 (else the longest)."""
    anchor = int(np.argmin(np.abs(times)))
    keep = np.zeros_like(ok)
    if ok[anchor]:
        lo = anchor
        while lo > 0 and ok[lo - 1]:
            lo -= 1
        hi = anchor
        while hi + 1 < ok.size and ok[hi + 1]:
            hi += 1
        keep[lo:hi + 1] = True
        return keep
    # anchor itself escaped: fall back to the longest run
    best_lo, best_len = 0, 0
    i = 0
    while i < ok.size:
        if ok[i]:
            j = i
            while j + 1 < ok.size and ok[j + 1]:
                j += 1
            if j - i + 1 > best_len:
                best_lo, best_len = i, j - i + 1
            i = j + 1
        else:
            i += 1
    if best_len == 0:
        raise BlowUp("every requested sample lies outside the working ball", point=None)
    keep[best_lo:best_lo + best_len] = True
    return keep


# ---------------------------------------------------------------------------
# leaf transport
# ---------------------------------------------------------------------------

@dataclass
class TransportMap:
    """Composition of segment flows: a leaf-preserving map near a base point."""

    base_point: np.ndarray
    target: np.ndarray
    total_time: float
    eval: Callable[[np.ndarray], np.ndarray]
    jacobian: np.ndarray
    ball_radius: float

    def commutator_norm(self) -> float:
        """Frobenius norm of [J, Jac]: zero iff the differential is complex-linear."""
        n = self.base_point.size // 2
        j = complex_structure(n)
        return float(np.linalg.norm(j @ self.jacobian - self.jacobian @ j))


def _ball_samples(p: np.ndarray, radius: float, count: int = 4) -> List[np.ndarray]:
    samples = [p.copy()]
    for i in range(p.size):
        e = np.zeros_like(p)
        e[i] = radius
        samples.append(p + e)
        samples.append(p - e)
    rng = np.random.default_rng(20240616)
    for _ in range(count):
        d = rng.standard_normal(p.size)
        samples.append(p + radius * d / np.linalg.norm(d))
    return samples


def leaf_transport(fields: Sequence, p, schedule: Sequence[Tuple[int, float]],
                   ball_radius: float, tol: float = DEFAULT_TOL,
                   checks_per_segment: int = 8) -> TransportMap:
    """Compose segment flows along a schedule of (field index, duration) pairs.

    ``fields`` entries are either bare fields or (field, region) pairs where
    the region exposes ``contains``; every sampled point of the validity ball
    is checked to stay inside its segment's region.
    """
    entries = []
    for item in fields:
        if isinstance(item, VectorField):
            entries.append((item, None))
        else:
            fld, region = item
            entries.append((fld, region))
    if not entries:
        raise ValueError("need at least one field")
    for idx, dur in schedule:
        if not 0 <= idx < len(entries):
            raise ValueError(f"schedule references field {idx}, have {len(entries)}")
        if dur <= 0:
            raise ValueError("schedule durations must be positive")
    p = as_point(p)

    def transport(x: np.ndarray) -> np.ndarray:
        cur = as_point(x)
        for idx, dur in schedule:
            cur = flow(entries[idx][0], cur, dur, tol=tol)
        return cur

    # validity check on ball samples, sampled along each segment
    for x in _ball_samples(p, ball_radius):
        cur = x
        for idx, dur in schedule:
            fld, region = entries[idx]
            if region is not None:
                for frac in np.linspace(0.0, 1.0, checks_per_segment + 1):
                    probe = flow(fld, cur, dur * float(frac), tol=tol)
                    if not region.contains(probe):
                        raise SegmentEscape(
                            f"sample {x!r} left the validity region of field {idx} "
                            f"at segment fraction {frac:.3f}"
                        )
            cur = flow(fld, cur, dur, tol=tol)

    target = transport(p)
    total = float(sum(dur for _, dur in schedule))

    delta = 1e-6 * max(1.0, float(np.linalg.norm(p)))
    jac = np.empty((p.size, p.size))
    for jcol in range(p.size):
        e = np.zeros_like(p)
        e[jcol] = delta
        jac[:, jcol] = (transport(p + e) - transport(p - e)) / (2 * delta)

    return TransportMap(base_point=p, target=target, total_time=total,
                        eval=transport, jacobian=jac, ball_radius=ball_radius)


def orbit_time_match(field: VectorField, x, target, t_center: float,
                     half_width: float, tol: float = DEFAULT_TOL) -> Tuple[float, float]:
    """Best flow time taking x near target within [t_center +- half_width].

    Returns (t_best, distance); used to certify that transported points stay
    on the orbit of their source.
    """
    x = as_point(x)
    target = as_point(target)

    def dist_sq(t):
        # squared distance is smooth at the minimum, so Brent actually converges
        try:
            d = flow(field, x, float(t), tol=tol) - target
        except (BlowUp, UndefinedAtPoint):
            return float("inf")
        return float(np.dot(d, d))

    res = minimize_scalar(dist_sq, bounds=(t_center - half_width, t_center + half_width),
                          method="bounded", options={"xatol": 1e-12})
    return float(res.x), float(math.sqrt(max(res.fun, 0.0)))


# ---------------------------------------------------------------------------
# period detection
# ---------------------------------------------------------------------------

def detect_period(field: VectorField, p, t_max: float, tol: float = 1e-6,
                  n_grid: int = 2048, min_arc_steps: int = 10,
                  floor: float = EQUILIBRIUM_FLOOR,
                  flow_tol: float = DEFAULT_TOL) -> Optional[float]:
    """Smallest T in (0, t_max] with |flow(p, T) - p| < tol, or None.

    Local minima of the return distance within the first ``min_arc_steps``
    grid steps are ignored (minimum-arc guard), so tiny numerical loops near
    the seed are not declared periodic.
    """
    p = as_point(p)
    speed = float(np.linalg.norm(_safe_velocity(field, p)))
    if speed < floor:
        raise EquilibriumSeed(f"|field(p)| = {speed:.3e} below floor {floor:.1e}")

    dt = t_max / n_grid
    pts = [p]
    dists = [0.0]
    cur = p
    for _ in range(n_grid):
        try:
            cur = flow(field, cur, dt, tol=flow_tol)
        except (BlowUp, UndefinedAtPoint):
            break
        pts.append(cur)
        dists.append(float(np.linalg.norm(cur - p)))
    dists_arr = np.array(dists)
    if dists_arr.size < min_arc_steps + 2:
        return None

    coarse = 2.0 * speed * dt + 10.0 * tol

    def return_dist(t):
        i = min(int(round(t / dt)), len(pts) - 1)
        try:
            v = flow(field, pts[i], float(t - i * dt), tol=flow_tol)
        except (BlowUp, UndefinedAtPoint):
            return float("inf")
        return float(np.linalg.norm(v - p))

    for i in range(max(min_arc_steps, 1), dists_arr.size - 1):
        if dists_arr[i] <= dists_arr[i - 1] and dists_arr[i] <= dists_arr[i + 1] and dists_arr[i] < coarse:
            res = minimize_scalar(return_dist, bounds=((i - 1) * dt, (i + 1) * dt),
                                  method="bounded", options={"xatol": 1e-12})
            if float(res.fun) < tol and res.x > 0:
                return float(res.x)
    return None
