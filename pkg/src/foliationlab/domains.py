"""Domain classes and sample-based certification along orbits.

The central operation intersects a single orbit with a domain and reports
the connected components of flow time, refined by bisection.  Domains that
expose a signed margin additionally get tangency handling: an interior
margin minimum that refines to (numerical) zero splits a component, so a
single-point exit --- an orbit grazing the boundary of an open domain ---
is detected even though boolean sampling alone cannot see it.

All verdicts are sample-based ("Certified-on-samples", never a proof): the
interval-domain property quantifies over *every* leaf, which sampling cannot
certify.  Reports say so explicitly and record the window used.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from . import fields as fieldmod
from .calculus import ScalarField
from .coords import as_point
from .errors import BlowUp, EmptyBase, UndefinedAtPoint

REFINE_T_ACCURACY = 1e-6
SPLIT_TOL = 1e-9  # scaled by the median sampled |margin|


# ---------------------------------------------------------------------------
# domain specs
# ---------------------------------------------------------------------------

class Domain:
    """Base class: open subsets given by membership, optionally with a margin.

    ``margin(v) > 0`` iff ``contains(v)``; domains without a natural signed
    distance return None from :meth:`margin` and lose tangency detection.
    """

    def contains(self, v) -> bool:
        m = self.margin(v)
        if m is None:
            raise NotImplementedError
        return m > 0.0

    def margin(self, v) -> Optional[float]:
        return None

    def describe(self) -> str:
        return type(self).__name__


@dataclass(frozen=True)
class Membership(Domain):
    """Catch-all domain given by an arbitrary membership predicate."""

    predicate: Callable[[np.ndarray], bool]
    name: str = ""

    def contains(self, v) -> bool:
        return bool(self.predicate(as_point(v)))

    def describe(self):
        return f"membership[{self.name or 'predicate'}]"


@dataclass(frozen=True)
class Subgraph(Domain):
    """{(z, x + iy): y < u(z, x), |(z, x)| < r, |y| < r} with sup-norm box.

    ``u`` is any callable on (2(n-1) + 1) reals; lower semicontinuity is the
    caller's contract (it cannot be verified from samples).
    """

    u: ScalarField
    r: float

    def margin(self, v):
        p = as_point(v)
        zx = p[:-1]
        y = p[-1]
        box = min(self.r - float(np.max(np.abs(zx))) if zx.size else self.r, self.r - abs(y))
        return min(box, float(self.u.eval(zx)) - y)

    def contains(self, v):
        return self.margin(v) > 0.0

    def describe(self):
        return f"subgraph[r={self.r}]"


@dataclass(frozen=True)
class ConvexPolygon:
    """Counterclockwise convex polygon; open interior."""

    vertices: np.ndarray

    def __post_init__(self):
        vs = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        vs.flags.writeable = False
        object.__setattr__(self, "vertices", vs)

    def signed_distance(self, point) -> float:
        """min over edges of the signed distance to the edge line (>0 inside)."""
        q = np.asarray(point, dtype=float).ravel()
        vs = self.vertices
        m = vs.shape[0]
        if m == 0:
            return -np.inf
        if m == 1:
            return -float(np.linalg.norm(q - vs[0]))
        best = np.inf
        for i in range(m):
            a = vs[i]
            b = vs[(i + 1) % m] if m > 2 else vs[1 - i] if m == 2 else vs[i]
            edge = b - a
            length = np.linalg.norm(edge)
            if length == 0:
                continue
            cross = edge[0] * (q[1] - a[1]) - edge[1] * (q[0] - a[0])
            best = min(best, cross / length)
        return float(best)


@dataclass(frozen=True)
class Tube(Domain):
    """Base subset of R^2 plus i R^2: membership depends on (Re z1, Re z2) only.

    Accepts both C^2 points (4 reals, real parts extracted) and bare planar
    points (2 reals), so planar fields and their tube extensions share domains.
    """

    base: object  # callable predicate or ConvexPolygon
    name: str = ""

    def _project(self, v) -> np.ndarray:
        p = as_point(v)
        if p.size == 2:
            return p
        if p.size == 4:
            return np.array([p[0], p[2]])
        raise ValueError("tube domains live over R^2: need 2 or 4 real coordinates")

    def contains(self, v) -> bool:
        q = self._project(v)
        if isinstance(self.base, ConvexPolygon):
            return self.base.signed_distance(q) > 0.0
        return bool(self.base(q))

    def margin(self, v):
        if isinstance(self.base, ConvexPolygon):
            return self.base.signed_distance(self._project(v))
        return None

    def describe(self):
        kind = "hull" if isinstance(self.base, ConvexPolygon) else (self.name or "predicate")
        return f"tube[{kind}]"


@dataclass(frozen=True)
class Ellipsoid(Domain):
    """{sum_j c_j |z_j|^2 < r^2} with positive weights."""

    c: np.ndarray
    r: float

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).ravel()
        if np.any(c <= 0):
            raise ValueError("ellipsoid weights must be positive")
        if self.r <= 0:
            raise ValueError("ellipsoid radius must be positive")
        c.flags.writeable = False
        object.__setattr__(self, "c", c)

    def quadratic(self, v) -> float:
        p = as_point(v)
        if p.size != 2 * self.c.size:
            raise ValueError(f"expected point of C^{self.c.size}")
        mods = p[0::2] ** 2 + p[1::2] ** 2
        return float(np.dot(self.c, mods))

    def margin(self, v):
        return self.r ** 2 - self.quadratic(v)

    def contains(self, v):
        return self.margin(v) > 0.0

    def describe(self):
        return f"ellipsoid[c={list(self.c)}, r={self.r}]"


@dataclass(frozen=True)
class Sublevel(Domain):
    """{rho < level} for a scalar field rho."""

    rho: ScalarField
    level: float

    def margin(self, v):
        return self.level - float(self.rho.eval(as_point(v)))

    def contains(self, v):
        return self.margin(v) > 0.0

    def describe(self):
        return f"sublevel[{self.rho.name or 'rho'} < {self.level}]"


@dataclass(frozen=True)
class HalfPlane(Domain):
    """{normal . v < offset} in real coordinates."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        nrm = np.asarray(self.normal, dtype=float).ravel()
        nrm.flags.writeable = False
        object.__setattr__(self, "normal", nrm)

    def margin(self, v):
        p = as_point(v)
        if p.size != self.normal.size:
            raise ValueError("normal dimension mismatch")
        return self.offset - float(np.dot(self.normal, p))

    def contains(self, v):
        return self.margin(v) > 0.0

    def describe(self):
        return f"half_plane[offset={self.offset}]"


@dataclass(frozen=True)
class Intersection(Domain):
    """Finite intersection; margin is the min when every part has one."""

    parts: Tuple[Domain, ...]

    def contains(self, v):
        return all(part.contains(v) for part in self.parts)

    def margin(self, v):
        vals = []
        for part in self.parts:
            m = part.margin(v)
            if m is None:
                return None
            vals.append(m)
        return min(vals)

    def describe(self):
        return "intersection[" + ", ".join(p.describe() for p in self.parts) + "]"


@dataclass(frozen=True)
class BoxNeighbourhood(Domain):
    """The box {|(z, x)| < delta, |y| < 3 eps} from the local-schlichtness step.

    Valid parameters satisfy 0 < delta < eps < 1; as eps -> 0 these boxes
    shrink to a neighbourhood basis of the origin.
    """

    eps: float
    delta: float

    def __post_init__(self):
        if not (0.0 < self.delta < self.eps < 1.0):
            raise ValueError("need 0 < delta < eps < 1")

    def margin(self, v):
        p = as_point(v)
        zx = p[:-1]
        y = p[-1]
        zx_part = self.delta - (float(np.max(np.abs(zx))) if zx.size else 0.0)
        return min(zx_part, 3.0 * self.eps - abs(y))

    def contains(self, v):
        return self.margin(v) > 0.0

    def describe(self):
        return f"box[delta={self.delta}, y<{3 * self.eps}]"


def box_neighbourhood(eps: float, delta: float) -> BoxNeighbourhood:
    return BoxNeighbourhood(eps=eps, delta=delta)


# ---------------------------------------------------------------------------
# convex hulls and tube envelopes
# ---------------------------------------------------------------------------

def convex_hull_2d(points: Sequence) -> np.ndarray:
    """Monotone-chain convex hull; counterclockwise vertices, degenerate-safe.

    Collinear boundary points are dropped, which makes the hull idempotent.
    """
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if len(pts) <= 2:
        return np.array(pts, dtype=float).reshape(-1, 2)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: List[Tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[Tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:  # all collinear
        return np.array([pts[0], pts[-1]], dtype=float)
    return np.array(hull, dtype=float)


def tube_envelope(domain: Tube, window: Tuple[float, float, float, float],
                  samples_per_axis: int = 201) -> Tube:
    """Tube over the convex hull of the sampled base inside the window.

    This is the classical description of the envelope of holomorphy of a
    tube domain: convexify the base.
    """
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, samples_per_axis)
    ys = np.linspace(y0, y1, samples_per_axis)
    inside = []
    for x in xs:
        for y in ys:
            q = np.array([x, y])
            if domain.contains(q):
                inside.append((x, y))
    if not inside:
        raise EmptyBase("no base sample inside the window")
    hull = convex_hull_2d(inside)
    return Tube(base=ConvexPolygon(vertices=hull), name=f"hull({domain.name or 'base'})")


# ---------------------------------------------------------------------------
# orbit intersection
# ---------------------------------------------------------------------------

VERDICT_INTERVAL = "Interval"
VERDICT_DISCONNECTED = "Disconnected"
VERDICT_EMPTY = "Empty"
VERDICT_UNRESOLVED = "Unresolved"


@dataclass
class OrbitIntersectionReport:
    components: List[Tuple[float, float]]
    verdict: str
    seed: np.ndarray
    t_range: Tuple[float, float]
    n_samples: int
    refine_depth: int
    truncated: bool = False
    notes: str = ""

    def to_dict(self):
        return {
            "components": [[a, b] for a, b in self.components],
            "verdict": self.verdict,
            "seed": list(map(float, self.seed)),
            "t_range": list(self.t_range),
            "n_samples": self.n_samples,
            "refine_depth": self.refine_depth,
            "truncated": self.truncated,
            "notes": self.notes,
        }


def _bisect_crossing(field, seed, domain, t_in: float, t_out: float, tol: float,
                     flow_tol: float) -> float:
    """Boundary time between an inside time and an outside time."""
    a, b = t_in, t_out
    while abs(b - a) > tol:
        mid = 0.5 * (a + b)
        if domain.contains(fieldmod.flow(field, seed, mid, tol=flow_tol)):
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def _margin_on_orbit(field, seed, domain, flow_tol):
    def m(t):
        try:
            return float(domain.margin(fieldmod.flow(field, seed, float(t), tol=flow_tol)))
        except (BlowUp, UndefinedAtPoint):
            return -np.inf
    return m


def _components_once(field, seed, domain, t_lo, t_hi, n_samples, flow_tol):
    """One sampling pass: components + unresolved flag + truncation flag."""
    traj = fieldmod.sample_orbit(field, seed, t_lo, t_hi, n_samples, tol=flow_tol)
    times = traj.times
    inside = np.array([domain.contains(pt) for pt in traj.points])
    has_margin = domain.margin(traj.points[0]) is not None
    margins = None
    if has_margin:
        margins = np.array([domain.margin(pt) for pt in traj.points])

    def local_tol(k):
        # boundary-touch threshold scaled by the margins adjacent to the extremum
        nb = [abs(margins[j]) for j in (k - 1, k, k + 1) if 0 <= j < margins.size
              and np.isfinite(margins[j])]
        return SPLIT_TOL * max(1.0, *nb) if nb else SPLIT_TOL

    comps: List[Tuple[float, float]] = []
    unresolved = False

    i = 0
    m = times.size
    while i < m:
        if not inside[i]:
            i += 1
            continue
        j = i
        while j + 1 < m and inside[j + 1]:
            j += 1
        lo = times[i] if i == 0 else _bisect_crossing(
            field, seed, domain, times[i], times[i - 1], REFINE_T_ACCURACY, flow_tol)
        hi = times[j] if j == m - 1 else _bisect_crossing(
            field, seed, domain, times[j], times[j + 1], REFINE_T_ACCURACY, flow_tol)
        runs = [(lo, hi, i, j)]
        if has_margin and j - i >= 2:
            # split at interior margin minima that refine to a boundary touch
            mfun = _margin_on_orbit(field, seed, domain, flow_tol)
            cuts = []
            for k in range(i + 1, j):
                if margins[k] <= margins[k - 1] and margins[k] <= margins[k + 1]:
                    res = minimize_scalar(mfun, bounds=(times[k - 1], times[k + 1]),
                                          method="bounded", options={"xatol": 1e-10})
                    if float(res.fun) <= local_tol(k):
                        cuts.append(float(res.x))
            if cuts:
                bounds = [lo] + sorted(cuts) + [hi]
                runs = [(bounds[k], bounds[k + 1], i, j) for k in range(len(bounds) - 1)]
        comps.extend((a, b) for a, b, _, _ in runs if b > a)
        i = j + 1

    if has_margin:
        # scan outside runs for sub-resolution components (margin pokes above 0)
        mfun = _margin_on_orbit(field, seed, domain, flow_tol)
        for k in range(1, m - 1):
            if inside[k] or inside[k - 1] or inside[k + 1]:
                continue
            if margins[k] >= margins[k - 1] and margins[k] >= margins[k + 1] and np.isfinite(margins[k]):
                res = minimize_scalar(lambda t: -mfun(t), bounds=(times[k - 1], times[k + 1]),
                                      method="bounded", options={"xatol": 1e-10})
                peak = -float(res.fun)
                if peak > local_tol(k):
                    t_peak = float(res.x)
                    lo = _bisect_crossing(field, seed, domain, t_peak, times[k - 1],
                                          REFINE_T_ACCURACY, flow_tol)
                    hi = _bisect_crossing(field, seed, domain, t_peak, times[k + 1],
                                          REFINE_T_ACCURACY, flow_tol)
                    if hi > lo:
                        comps.append((lo, hi))
                elif peak > 0.0:
                    unresolved = True
        comps.sort()

    return comps, unresolved, traj.truncated


def orbit_intersection(field, seed, domain: Domain, t_range: Tuple[float, float],
                       n_samples: int = 64, max_refine: int = 6,
                       flow_tol: float = fieldmod.DEFAULT_TOL) -> OrbitIntersectionReport:
    """Connected components of {t in t_range : flow(seed, t) in domain}.

    Boundary crossings are bisected to t-accuracy 1e-6.  The verdict is
    declared once the component count is stable under doubling the sample
    grid; if it keeps changing through ``max_refine`` doublings, the verdict
    is Unresolved.
    """
    if n_samples < 16:
        raise ValueError("need n_samples >= 16")
    t_lo, t_hi = float(t_range[0]), float(t_range[1])
    if not (np.isfinite(t_lo) and np.isfinite(t_hi) and t_lo < t_hi):
        raise ValueError("t_range must be finite with t_lo < t_hi")
    seed = as_point(seed)

    comps, unresolved, truncated = _components_once(field, seed, domain, t_lo, t_hi,
                                                    n_samples, flow_tol)
    depth = 0
    n = n_samples
    stable = False
    while depth < max_refine:
        n2 = 2 * n
        comps2, unresolved2, truncated2 = _components_once(field, seed, domain, t_lo, t_hi,
                                                           n2, flow_tol)
        if len(comps2) == len(comps) and unresolved2 == unresolved:
            stable = True
            comps, truncated = comps2, truncated or truncated2
            n = n2
            depth += 1
            break
        comps, unresolved, truncated = comps2, unresolved2, truncated or truncated2
        n = n2
        depth += 1

    if unresolved or not stable:
        verdict = VERDICT_UNRESOLVED
    elif len(comps) == 0:
        verdict = VERDICT_EMPTY
    elif len(comps) == 1:
        verdict = VERDICT_INTERVAL
    else:
        verdict = VERDICT_DISCONNECTED
    notes = "sample-based verdict; certification covers sampled leaves only"
    return OrbitIntersectionReport(components=comps, verdict=verdict, seed=seed,
                                   t_range=(t_lo, t_hi), n_samples=n, refine_depth=depth,
                                   truncated=truncated, notes=notes)


# ---------------------------------------------------------------------------
# aggregate certification
# ---------------------------------------------------------------------------

CERTIFIED = "Certified-on-samples"
REFUTED = "Refuted"
UNRESOLVED = "Unresolved"


@dataclass
class AggregateReport:
    verdict: str
    per_seed: List[OrbitIntersectionReport]
    witness: Optional[np.ndarray]
    t_range: Tuple[float, float]
    excluded_seeds: List[np.ndarray] = dc_field(default_factory=list)
    notes: str = ""

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else list(map(float, self.witness)),
            "t_range": list(self.t_range),
            "n_seeds": len(self.per_seed),
            "excluded_seeds": [list(map(float, s)) for s in self.excluded_seeds],
            "per_seed": [r.to_dict() for r in self.per_seed],
            "notes": self.notes,
        }


def _aggregate(per_seed: List[OrbitIntersectionReport], ok: Callable[[OrbitIntersectionReport], bool],
               t_range, excluded, notes) -> AggregateReport:
    witness = None
    verdict = CERTIFIED
    for rep in per_seed:
        if rep.verdict == VERDICT_UNRESOLVED:
            verdict = UNRESOLVED if verdict != REFUTED else verdict
        elif not ok(rep):
            verdict = REFUTED
            if witness is None:
                witness = rep.seed
    return AggregateReport(verdict=verdict, per_seed=per_seed, witness=witness,
                           t_range=t_range, excluded_seeds=excluded, notes=notes)


def is_interval_domain(field, domain: Domain, seed_set: Sequence, t_range,
                       n_samples: int = 64, max_refine: int = 6,
                       flow_tol: float = fieldmod.DEFAULT_TOL) -> AggregateReport:
    """Certify (on samples) that every seeded orbit meets the domain in one interval."""
    seeds = [as_point(s) for s in seed_set]
    if not seeds:
        raise ValueError("seed set must be nonempty")
    per_seed = [orbit_intersection(field, s, domain, t_range, n_samples, max_refine, flow_tol)
                for s in seeds]
    notes = ("interval-domain property quantifies over every leaf; "
             "this verdict covers the sampled seeds only")
    return _aggregate(per_seed, lambda rep: rep.verdict == VERDICT_INTERVAL,
                      tuple(map(float, t_range)), [], notes)


def is_half_space(field, domain: Domain, seed_set: Sequence, t_range,
                  n_samples: int = 64, max_refine: int = 6,
                  flow_tol: float = fieldmod.DEFAULT_TOL) -> AggregateReport:
    """Certify that every seeded orbit meets the domain in a backwards semiorbit.

    Backwards semiorbit means: nonempty, connected, and backward-invariant
    within the sampled range (the single component starts at the range's
    lower end).  A full orbit inside the domain counts as the degenerate
    backwards semiorbit.
    """
    seeds = [as_point(s) for s in seed_set]
    if not seeds:
        raise ValueError("seed set must be nonempty")
    t_lo = float(t_range[0])
    slack = 10.0 * REFINE_T_ACCURACY

    def backward_ok(rep: OrbitIntersectionReport) -> bool:
        if rep.verdict != VERDICT_INTERVAL:
            return False
        lo, _ = rep.components[0]
        return lo <= t_lo + slack

    per_seed = [orbit_intersection(field, s, domain, t_range, n_samples, max_refine, flow_tol)
                for s in seeds]
    notes = "backward invariance checked within the sampled range only"
    return _aggregate(per_seed, backward_ok, tuple(map(float, t_range)), [], notes)
