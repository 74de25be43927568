"""Holomorphicity test bench for plane fields and quadratic gradients.

Four instruments:

* the conserved-quantity obstruction: if a field admits leaf-preserving
  local biholomorphisms backward/forward along orbits, then for any first
  integral alpha the ratio (Laplacian alpha)/|grad alpha|^2 must also be a
  first integral --- so its variation along orbits is an obstruction;
* factorization of antiholomorphic fields conj(g) d/dz into a positive
  function |g|^2 times the holomorphic field (1/g) d/dz;
* rectification: from a submersion alpha whose obstruction ratio is constant
  on level sets, rebuild the harmonic level function w(alpha) by solving
  w'' = -u w' with two quadratures;
* the classifier for gradients of nondegenerate real quadratic forms: some
  positive multiple of grad(sigma) is holomorphic exactly when sigma is
  hermitian, or n = 1 and sigma is harmonic.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from . import calculus, fields as fieldmod
from .calculus import DiffConfig, ScalarField, as_scalar_field
from .coords import as_point
from .errors import (
    NotConserved,
    NotSubmersion,
    ObstructionNotLevelConstant,
    DegenerateForm,
    VanishingG,
    ZeroCoefficient,
)
from .fields import HolomorphicCallable, VectorField
from .forms import QuadraticForm

CONSERVATION_TOL = 1e-6


# ---------------------------------------------------------------------------
# conserved-quantity obstruction
# ---------------------------------------------------------------------------

@dataclass
class ObstructionReport:
    constant: bool
    max_variation: float
    tol: float
    traces: List[dict] = dc_field(default_factory=list)


def obstruction_constancy_test(field: VectorField, alpha, seeds: Sequence, t_range,
                               tol: float = 1e-6, n_samples: int = 33,
                               cfg: DiffConfig = DiffConfig(h=2e-4),
                               conservation_tol: float = CONSERVATION_TOL,
                               flow_tol: float = fieldmod.DEFAULT_TOL) -> ObstructionReport:
    """Evaluate the obstruction ratio along orbits of a first integral alpha.

    Raises NotConserved if alpha visibly varies along a sampled orbit (the
    relative drift |grad(alpha) . v| / (|grad alpha| |v|) exceeds
    ``conservation_tol``).  The report is `constant` iff the ratio's
    variation along every sampled orbit stays below ``tol``.

    The default step is larger than the library-wide first-derivative
    default: second differences at h = 1e-5 sit on the roundoff floor
    (about 4 eps / h^2 = 1e-6), exactly at the constancy tolerance.
    """
    alpha = as_scalar_field(alpha)
    t_lo, t_hi = float(t_range[0]), float(t_range[1])
    traces = []
    max_var = 0.0
    for seed in seeds:
        traj = fieldmod.sample_orbit(field, as_point(seed), t_lo, t_hi, n_samples, tol=flow_tol)
        betas = []
        for pt in traj.points:
            g = calculus.gradient(alpha, pt, cfg)
            v = field.velocity(pt)
            denom = float(np.linalg.norm(g) * np.linalg.norm(v))
            drift = abs(float(np.dot(g, v))) / max(denom, 1e-300)
            if denom > 0 and drift > conservation_tol:
                raise NotConserved(
                    f"alpha drifts along the orbit of {list(map(float, seed))}: "
                    f"relative d(alpha)/dt = {drift:.3e} > {conservation_tol:.1e}"
                )
            betas.append(calculus.obstruction_ratio(alpha, pt, cfg))
        betas = np.array(betas)
        var = float(betas.max() - betas.min())
        max_var = max(max_var, var)
        traces.append({
            "seed": [float(x) for x in as_point(seed)],
            "times": [float(t) for t in traj.times],
            "ratio": [float(b) for b in betas],
            "variation": var,
        })
    return ObstructionReport(constant=max_var < tol, max_variation=max_var, tol=tol,
                             traces=traces)


# ---------------------------------------------------------------------------
# antiholomorphic factorization
# ---------------------------------------------------------------------------

@dataclass
class FactorizationResult:
    positive_factor: Callable[[complex], float]   # |g|^2
    holomorphic_field: HolomorphicCallable        # z' = 1/g(z)
    max_identity_residual: float


def antiholomorphic_factorization(g: Callable[[complex], complex], samples: Sequence[complex],
                                  floor: float = 1e-8) -> FactorizationResult:
    """Split conj(g) d/dz = |g|^2 * (1/g) d/dz, checking the identity on samples."""
    residual = 0.0
    for z in samples:
        gz = complex(g(complex(z)))
        if abs(gz) < floor:
            raise VanishingG(f"|g({z})| = {abs(gz):.3e} below floor {floor:.1e}")
        residual = max(residual, abs(gz.conjugate() - (abs(gz) ** 2) * (1.0 / gz)))

    def u(z: complex) -> float:
        return abs(complex(g(complex(z)))) ** 2

    hol = HolomorphicCallable(func=lambda zv: np.array([1.0 / complex(g(complex(zv[0])))]),
                              n=1, name="1/g")
    return FactorizationResult(positive_factor=u, holomorphic_field=hol,
                               max_identity_residual=float(residual))


# ---------------------------------------------------------------------------
# rectification
# ---------------------------------------------------------------------------

@dataclass
class RectificationResult:
    """Quadrature tables and the rebuilt harmonic level function.

    ``levels`` carries the common grid for the u, v, w profiles (anchored so
    v = w = 0 at the level closest to zero).  ``residual`` is the max of
    |Laplacian(w o alpha)| over the report grid and is always reported,
    never silently dropped.
    """

    levels: np.ndarray
    u_profile: np.ndarray
    v_profile: np.ndarray
    w_profile: np.ndarray
    harmonic_integral: ScalarField
    residual: float
    injectivity_ok: bool
    bin_centers: np.ndarray
    bin_means: np.ndarray
    bin_stds: np.ndarray
    bin_detrended_stds: np.ndarray
    window: Tuple[float, float, float, float]
    grid: int

    def quadrature_csv(self) -> str:
        lines = ["level,u,v,w"]
        for l, u, v, w in zip(self.levels, self.u_profile, self.v_profile, self.w_profile):
            lines.append(f"{l!r},{u!r},{v!r},{w!r}")
        return "\n".join(lines) + "\n"


def _cumint(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Cumulative Simpson integral with zero at the left end.

    Trapezoids are not enough here: their smooth O(h^2) drift in the w knots
    fights the exact end-slope clamp of the spline below and leaves an s''
    boundary layer that the window corners (largest |grad alpha|) then
    amplify past the residual budget.
    """
    from scipy.integrate import cumulative_simpson

    return cumulative_simpson(y, x=x, initial=0.0)


def rectify(alpha, window: Tuple[float, float, float, float],
            level_range: Optional[Tuple[float, float]] = None,
            grid: int = 101, u_grid: int = 201, n_levels: int = 2001,
            check_bins: int = 64, tol_constancy: float = 1e-2,
            diff_h: float = 3e-4, lap_h: float = 5e-4,
            grad_floor: float = 1e-8) -> RectificationResult:
    """Rebuild a harmonic function with the level sets of alpha on the window.

    Pipeline: tabulate the obstruction ratio u over an auxiliary grid, gate
    on its within-level constancy, integrate v' = u and w' = exp(-v) by
    trapezoids on a dense level grid, and report the Laplacian residual of
    w o alpha over the ``grid`` x ``grid`` report grid.
    """
    alpha = as_scalar_field(alpha)
    x0, x1, y0, y1 = map(float, window)
    cfg = DiffConfig(h=diff_h)

    # --- sample alpha and the ratio over the auxiliary grid ---
    xs = np.linspace(x0, x1, u_grid)
    ys = np.linspace(y0, y1, u_grid)
    values = []
    ratios = []
    for x in xs:
        for y in ys:
            p = np.array([x, y])
            g = calculus.gradient(alpha, p, cfg)
            gn = float(np.linalg.norm(g))
            if gn < grad_floor:
                raise NotSubmersion(f"|grad alpha| = {gn:.3e} below floor at ({x:.4g}, {y:.4g})")
            values.append(alpha(p))
            ratios.append(calculus.laplacian(alpha, p, cfg) / (gn * gn))
    values = np.array(values)
    ratios = np.array(ratios)

    if level_range is None:
        level_range = (float(values.min()), float(values.max()))
    l0, l1 = map(float, level_range)
    if not l0 < l1:
        raise ValueError("level_range must be a nonempty interval")

    # --- level-constancy gate: detrended scatter within level bins ---
    edges = np.linspace(l0, l1, check_bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    means = np.full(check_bins, np.nan)
    stds = np.full(check_bins, np.nan)
    detrended = np.full(check_bins, np.nan)
    worst = 0.0
    for b in range(check_bins):
        mask = (values >= edges[b]) & (values <= edges[b + 1])
        if np.count_nonzero(mask) < 6:
            continue
        av = values[mask]
        ar = ratios[mask]
        means[b] = float(ar.mean())
        stds[b] = float(ar.std())
        # remove the slope of u across the bin; what is left is within-level spread
        if float(av.max() - av.min()) > 1e-9:
            coef = np.polyfit(av - centers[b], ar, 1)
            resid = ar - np.polyval(coef, av - centers[b])
        else:
            resid = ar - ar.mean()       # bin carries a single level
        detrended[b] = float(resid.std())
        worst = max(worst, detrended[b])
    if worst > tol_constancy:
        raise ObstructionNotLevelConstant(
            f"obstruction ratio varies within level sets: detrended std {worst:.3e} "
            f"> {tol_constancy:.1e}"
        )

    # --- u on a dense level grid via the sorted sample scatter ---
    order = np.argsort(values)
    v_sorted = values[order]
    r_sorted = ratios[order]
    # collapse duplicate levels so interpolation sees a function
    uniq_vals: List[float] = []
    uniq_ratios: List[float] = []
    i = 0
    while i < v_sorted.size:
        j = i
        while j + 1 < v_sorted.size and v_sorted[j + 1] - v_sorted[i] <= 1e-12:
            j += 1
        uniq_vals.append(float(v_sorted[i:j + 1].mean()))
        uniq_ratios.append(float(r_sorted[i:j + 1].mean()))
        i = j + 1
    levels = np.linspace(l0, l1, n_levels)
    u_vals = np.interp(levels, np.array(uniq_vals), np.array(uniq_ratios))

    # --- two quadratures, anchored at the level nearest zero ---
    anchor = int(np.argmin(np.abs(levels)))
    v_vals = _cumint(u_vals, levels)
    v_vals -= v_vals[anchor]
    w_prime = np.exp(-v_vals)
    w_vals = _cumint(w_prime, levels)
    w_vals -= w_vals[anchor]
    injective = bool(np.all(np.diff(w_vals) > 0.0))

    # clamped C^2 spline: end slopes are known exactly, and the composed
    # Laplacian below needs a continuous second derivative across knots
    w_spline = CubicSpline(levels, w_vals,
                           bc_type=((1, float(w_prime[0])), (1, float(w_prime[-1]))))

    def composed(p):
        return float(w_spline(alpha(p)))

    harmonic = ScalarField(eval=composed, name="w(alpha)")

    # --- residual over the report grid ---
    lap_cfg = DiffConfig(h=lap_h)
    gx = np.linspace(x0, x1, grid)
    gy = np.linspace(y0, y1, grid)
    residual = 0.0
    for x in gx:
        for y in gy:
            residual = max(residual, abs(calculus.laplacian(harmonic, np.array([x, y]), lap_cfg)))

    return RectificationResult(levels=levels, u_profile=u_vals, v_profile=v_vals,
                               w_profile=w_vals, harmonic_integral=harmonic,
                               residual=float(residual), injectivity_ok=injective,
                               bin_centers=centers, bin_means=means, bin_stds=stds,
                               bin_detrended_stds=detrended,
                               window=(x0, x1, y0, y1), grid=grid)


# ---------------------------------------------------------------------------
# classifier for gradients of quadratic forms
# ---------------------------------------------------------------------------

HERMITIAN_CASE = "HermitianCase"
HARMONIC_N1_CASE = "HarmonicN1Case"
INCOMPATIBLE = "Incompatible"

_NORM_TOL = 1e-12
_DEGENERACY_TOL = 1e-9


@dataclass
class ClassifierVerdict:
    verdict: str
    s_rank: int
    hermitian_nullity: int
    n: int
    hessian_eig_min: float
    hessian_eig_max: float

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "s_rank": self.s_rank,
            "hermitian_nullity": self.hermitian_nullity,
            "n": self.n,
            "hessian_eig_min": self.hessian_eig_min,
            "hessian_eig_max": self.hessian_eig_max,
        }


def classify_quadratic_gradient(q: QuadraticForm) -> ClassifierVerdict:
    """Decide whether some positive multiple of grad(sigma) can be holomorphic.

    Requires sigma nondegenerate (all real-Hessian eigenvalues away from
    zero); raises DegenerateForm otherwise.
    """
    eig = q.hessian_eigenvalues()
    abs_eig = np.abs(eig)
    if float(abs_eig.min()) <= _DEGENERACY_TOL:
        raise DegenerateForm(
            f"real Hessian has eigenvalue {eig[np.argmin(abs_eig)]:.3e} within "
            f"{_DEGENERACY_TOL:.1e} of zero"
        )
    s_norm = q.harmonic_norm()
    h_norm = q.hermitian_norm()
    svals = np.linalg.svd(q.S, compute_uv=False) if q.n else np.array([])
    s_rank = int(np.count_nonzero(svals > 1e-10 * max(1.0, float(svals.max(initial=0.0)))))
    h_eig = np.linalg.eigvalsh(q.H)
    nullity = int(np.count_nonzero(np.abs(h_eig) < 1e-10 * max(1.0, float(np.max(np.abs(h_eig))))))

    if s_norm < _NORM_TOL:
        verdict = HERMITIAN_CASE
    elif q.n == 1 and h_norm < _NORM_TOL:
        verdict = HARMONIC_N1_CASE
    else:
        verdict = INCOMPATIBLE
    return ClassifierVerdict(verdict=verdict, s_rank=s_rank, hermitian_nullity=nullity,
                             n=q.n, hessian_eig_min=float(abs_eig.min()),
                             hessian_eig_max=float(abs_eig.max()))


def reallinear_quasihol_test(a: float, b: float, tol: float = 1e-12) -> bool:
    """True iff the plane field (a x, b y) is holomorphic or antiholomorphic, i.e. a = +-b."""
    if abs(a) < tol or abs(b) < tol:
        raise ZeroCoefficient("need a != 0 and b != 0")
    return abs(a - b) < tol or abs(a + b) < tol
