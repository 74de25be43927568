"""Certification pipeline for hermitian boundary singularities.

Given a smooth rho with a nondegenerate hermitian critical point at 0 that
is not a minimum, the pipeline extracts the quadratic jet, diagonalizes its
hermitian part, builds the scaled-ellipsoid family

    eps = min(positive eigenvalues) / 2,    c_j = a_j / (a_j - eps) > 0,

and then numerically certifies every inequality the local-schlichtness
construction rests on: rho strictly increases along nontrivial gradient
orbits near 0, the ellipsoid gauge is convex along orbits, orbits entering
the ellipsoid do so at points where sigma + eps r^2 = sum a_j c_j |z_j|^2
is negative (hence rho < 0), and the trace {rho < 0} inside the ellipsoid
meets every sampled orbit off the positive eigenspace in one interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Tuple

import numpy as np

from . import calculus, domains as dommod, fields as fieldmod
from .calculus import DiffConfig, ScalarField, as_scalar_field
from .coords import as_point, from_complex, to_complex
from .errors import Degenerate, IsMaximum, IsMinimum, NoEntryPoints, NotCritical, NotHermitian
from .forms import QuadraticForm, hermitian_diagonal

JET_STEP = 1e-4
CRITICAL_TOL = 1e-7
HERMITIAN_REL_TOL = 1e-8
DEGENERACY_REL_TOL = 1e-8


# ---------------------------------------------------------------------------
# model extraction
# ---------------------------------------------------------------------------

@dataclass
class CriticalPointModel:
    """Quadratic jet data of rho at 0 in diagonalizing coordinates.

    ``eigen`` lists the hermitian-part eigenvalues, positives first (each
    group in descending order); ``basis`` is a unitary U with
    H = U diag(eigen) U*, so model coordinates zeta satisfy z = U zeta.
    """

    rho: ScalarField
    jet: QuadraticForm
    eigen: np.ndarray
    k: int
    basis: np.ndarray
    grad_norm: float
    flags: dict

    @property
    def n(self) -> int:
        return self.eigen.size

    def rho_model(self) -> ScalarField:
        """rho written in the diagonalizing coordinates."""
        u = self.basis
        rho = self.rho

        def eval_model(v):
            return rho.eval(from_complex(u @ to_complex(as_point(v))))

        return ScalarField(eval=eval_model, name=f"{self.rho.name or 'rho'}@model")

    def sigma_model(self) -> QuadraticForm:
        return hermitian_diagonal(self.eigen)

    def sigma_value(self, v) -> float:
        p = as_point(v)
        mods = p[0::2] ** 2 + p[1::2] ** 2
        return float(np.dot(self.eigen, mods))

    def gradient_field(self) -> fieldmod.GradQuadratic:
        """grad(sigma) in model coordinates: rates 2 a_j per complex coordinate."""
        return fieldmod.GradQuadratic(form=self.sigma_model())

    def to_dict(self):
        return {
            "eigen": [float(a) for a in self.eigen],
            "k": self.k,
            "n": self.n,
            "grad_norm": self.grad_norm,
            "flags": dict(self.flags),
            "basis": [[[float(z.real), float(z.imag)] for z in row] for row in self.basis],
        }


def _real_hessian_fd(rho: ScalarField, n: int, cfg: DiffConfig) -> np.ndarray:
    dim = 2 * n
    hess = np.empty((dim, dim))
    origin = np.zeros(dim)
    for i in range(dim):
        for j in range(i, dim):
            hess[i, j] = hess[j, i] = calculus.mixed_partial(rho, origin, i, j, cfg)
    return hess


def _split_jet(hess: np.ndarray, n: int) -> QuadraticForm:
    """Hermitian/harmonic split of the quadratic jet v^T hess v / 2."""
    H = np.zeros((n, n), dtype=complex)
    S = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            sxx = hess[2 * j, 2 * k]
            syy = hess[2 * j + 1, 2 * k + 1]
            sxy = hess[2 * j, 2 * k + 1]   # d2 / dx_j dy_k
            syx = hess[2 * j + 1, 2 * k]   # d2 / dy_j dx_k
            H[j, k] = 0.25 * ((sxx + syy) + 1j * (syx - sxy))
            S[j, k] = 0.25 * ((sxx - syy) - 1j * (sxy + syx))
    # clean tiny asymmetries before the strict constructor sees them
    H = 0.5 * (H + H.conj().T)
    S = 0.5 * (S + S.T)
    return QuadraticForm(H=H, S=S)


def extract_model(rho, n: int, cfg: Optional[DiffConfig] = None) -> CriticalPointModel:
    """Extract and validate the quadratic jet of rho at the origin of C^n.

    Raises NotCritical / NotHermitian / Degenerate / IsMinimum / IsMaximum,
    naming the violated hypothesis.
    """
    rho = as_scalar_field(rho)
    cfg = cfg or DiffConfig(h=JET_STEP)
    origin = np.zeros(2 * n)
    grad = calculus.gradient(rho, origin, cfg)
    grad_norm = float(np.linalg.norm(grad))
    if grad_norm >= CRITICAL_TOL:
        raise NotCritical(f"|grad rho(0)| = {grad_norm:.3e} >= {CRITICAL_TOL:.1e}")

    jet = _split_jet(_real_hessian_fd(rho, n, cfg), n)
    h_norm = jet.hermitian_norm()
    s_norm = jet.harmonic_norm()
    if s_norm >= HERMITIAN_REL_TOL * max(h_norm, 1e-300):
        raise NotHermitian(
            f"harmonic part |S| = {s_norm:.3e} not negligible against |H| = {h_norm:.3e}"
        )

    eig, vec = np.linalg.eigh(jet.H)
    if float(np.min(np.abs(eig))) <= DEGENERACY_REL_TOL * float(np.max(np.abs(eig))):
        raise Degenerate(f"eigenvalues {eig} contain a relative zero")

    pos = np.where(eig > 0)[0]
    neg = np.where(eig < 0)[0]
    order = list(pos[np.argsort(-eig[pos])]) + list(neg[np.argsort(-eig[neg])])
    eigen = eig[order]
    basis = vec[:, order]
    k = int(pos.size)
    if k == n:
        raise IsMinimum("all jet eigenvalues positive: the critical point is a minimum")
    if k == 0:
        raise IsMaximum("all jet eigenvalues negative: nothing to certify (sublevel set "
                        "is a punctured neighbourhood)")

    flags = {
        "critical": True,
        "hermitian": True,
        "nondegenerate": True,
        "not_minimum": True,
        "not_maximum": True,
    }
    return CriticalPointModel(rho=rho, jet=jet, eigen=eigen, k=k, basis=basis,
                              grad_norm=grad_norm, flags=flags)


# ---------------------------------------------------------------------------
# ellipsoid family
# ---------------------------------------------------------------------------

@dataclass
class EllipsoidFamily:
    eps: float
    c: np.ndarray
    eigen: np.ndarray

    def gauge(self) -> ScalarField:
        c = self.c

        def lam(v):
            p = as_point(v)
            return float(np.dot(c, p[0::2] ** 2 + p[1::2] ** 2))

        return ScalarField(eval=lam, name="ellipsoid gauge")

    def ellipsoid(self, r: float) -> dommod.Ellipsoid:
        return dommod.Ellipsoid(c=self.c, r=r)

    def identity_residual(self) -> float:
        """max_j |a_j + eps c_j - a_j c_j|: zero in exact arithmetic."""
        lhs = self.eigen + self.eps * self.c
        rhs = self.eigen * self.c
        return float(np.max(np.abs(lhs - rhs)))

    def to_dict(self):
        return {"eps": self.eps, "c": [float(x) for x in self.c],
                "eigen": [float(a) for a in self.eigen]}


def build_family(model: CriticalPointModel) -> EllipsoidFamily:
    """eps = half the smallest positive eigenvalue; c_j = a_j / (a_j - eps)."""
    if not all(model.flags.get(name, False) for name in
               ("critical", "hermitian", "nondegenerate", "not_minimum", "not_maximum")):
        raise Degenerate("model hypothesis flags must all pass")
    positives = model.eigen[:model.k]
    eps = 0.5 * float(np.min(positives))
    c = model.eigen / (model.eigen - eps)
    if np.any(c <= 0):
        raise Degenerate("ellipsoid weights must come out positive")
    fam = EllipsoidFamily(eps=eps, c=c, eigen=model.eigen.copy())
    resid = fam.identity_residual()
    scale = float(np.max(np.abs(fam.eigen * fam.c)))
    if resid > 1e-12 * max(1.0, scale):
        raise Degenerate(f"family identity violated: residual {resid:.3e}")
    return fam


# ---------------------------------------------------------------------------
# verification battery
# ---------------------------------------------------------------------------

@dataclass
class CheckReport:
    name: str
    ok: bool
    details: dict
    witnesses: List[list] = dc_field(default_factory=list)

    def to_dict(self):
        return {"name": self.name, "ok": self.ok, "details": self.details,
                "witnesses": self.witnesses}


def _annulus_samples(n: int, r_in: float, r_out: float, count: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Deterministic annulus sample: interior draws plus an inner-sphere batch.

    The batch includes the coordinate-axis points at radius r_in, so minima
    of functions constant on spheres (or attained on an axis) are hit exactly.
    """
    dim = 2 * n
    n_inner = max(count // 4, dim)
    n_bulk = max(count - n_inner - dim, 0)
    dirs = rng.standard_normal((n_bulk, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    u = rng.random(n_bulk)
    radii = (r_in ** dim + (r_out ** dim - r_in ** dim) * u) ** (1.0 / dim)
    bulk = dirs * radii[:, None]
    sph = rng.standard_normal((n_inner, dim))
    sph = sph / np.linalg.norm(sph, axis=1, keepdims=True) * r_in
    axes = np.concatenate([np.eye(dim) * r_in, -np.eye(dim) * r_in])[: dim]
    return np.vstack([bulk, sph, axes])


def verify_increasing(model: CriticalPointModel, r_in: float, r_out: float,
                      n_samples: int = 2000, rng_seed: int = 7,
                      cfg: DiffConfig = DiffConfig()) -> CheckReport:
    """Check grad(rho) . grad(sigma) > 0 on an annulus around 0 (model coords)."""
    if not 0 < r_in < r_out:
        raise ValueError("need 0 < r_in < r_out")
    rng = np.random.default_rng(rng_seed)
    rho_m = model.rho_model()
    pts = _annulus_samples(model.n, r_in, r_out, n_samples, rng)
    min_dot = np.inf
    witnesses = []
    for p in pts:
        grad_rho = calculus.gradient(rho_m, p, cfg)
        grad_sigma = from_complex(2.0 * model.eigen * to_complex(p))
        dot = float(np.dot(grad_rho, grad_sigma))
        min_dot = min(min_dot, dot)
        if dot <= 0:
            witnesses.append([float(x) for x in p])
    ok = min_dot > 0
    return CheckReport(name="strictly_increasing", ok=ok,
                       details={"min_dot": float(min_dot), "n_samples": int(pts.shape[0]),
                                "annulus": [r_in, r_out]},
                       witnesses=witnesses)


def verify_orbit_convexity(family: EllipsoidFamily, model: CriticalPointModel,
                           n_orbits: int = 16, t_span: float = 1.0, dt: float = 3e-4,
                           n_checks: int = 9, rng_seed: int = 11,
                           seed_radius: float = 1.0,
                           extra_seeds: Optional[List] = None) -> CheckReport:
    """Closed-form second derivative of the gauge along orbits vs differences.

    Along gamma_j(t) = z_j exp(a_j t) (the orbit traversed at half the
    gradient speed; convexity is unchanged by affine reparametrization) the
    gauge satisfies (lambda o gamma)'' = 4 sum_j a_j^2 c_j |z_j|^2 e^{2 a_j t},
    which must be nonnegative and match a numerical second difference.
    """
    rng = np.random.default_rng(rng_seed)
    a = family.eigen
    c = family.c
    seeds = [rng.standard_normal(2 * model.n) * seed_radius for _ in range(n_orbits)]
    seeds.append(np.zeros(2 * model.n))
    for s in (extra_seeds or []):
        seeds.append(as_point(s))

    def gauge_along(z0: np.ndarray, t: float) -> float:
        z = z0 * np.exp(a * t)
        return float(np.dot(c, np.abs(z) ** 2))

    max_err = 0.0
    min_value = np.inf
    for seed in seeds:
        z0 = to_complex(seed)
        for t in np.linspace(-t_span, t_span, n_checks):
            closed = 4.0 * float(np.dot(a ** 2 * c, np.abs(z0 * np.exp(a * t)) ** 2))
            numeric = (gauge_along(z0, t + dt) - 2.0 * gauge_along(z0, t)
                       + gauge_along(z0, t - dt)) / (dt * dt)
            max_err = max(max_err, abs(closed - numeric))
            min_value = min(min_value, closed)
    ok = min_value >= 0.0
    return CheckReport(name="orbit_convexity", ok=ok,
                       details={"max_abs_error": float(max_err),
                                "min_second_derivative": float(min_value),
                                "n_orbits": len(seeds), "dt": dt})


def verify_entry_inequality(family: EllipsoidFamily, model: CriticalPointModel, r: float,
                            n_boundary: int = 4000, rng_seed: int = 13) -> CheckReport:
    """At inward-entry points of the ellipsoid boundary, sigma + eps r^2 < 0 and rho < 0.

    Entry points are boundary samples where grad(sigma) . grad(lambda) =
    4 sum a_j c_j |z_j|^2 < 0; there sigma + eps lambda telescopes to
    sum a_j c_j |z_j|^2 exactly.
    """
    rng = np.random.default_rng(rng_seed)
    a, c, eps = family.eigen, family.c, family.eps
    rho_m = model.rho_model()
    n = model.n
    entries = 0
    max_sum = -np.inf
    max_identity = 0.0
    max_rho = -np.inf
    witnesses = []
    for _ in range(n_boundary):
        w = rng.standard_normal(2 * n)
        w /= np.linalg.norm(w)
        zc = to_complex(w)
        z = zc / np.sqrt(c) * r          # lambda(z) = r^2 exactly
        mods = np.abs(z) ** 2
        inward = 4.0 * float(np.dot(a * c, mods))
        if inward >= 0:
            continue
        entries += 1
        sigma = float(np.dot(a, mods))
        lam = float(np.dot(c, mods))
        ent_sum = float(np.dot(a * c, mods))
        max_identity = max(max_identity, abs(sigma + eps * lam - ent_sum))
        max_sum = max(max_sum, sigma + eps * r ** 2)
        rho_val = rho_m.eval(from_complex(z))
        max_rho = max(max_rho, rho_val)
        if sigma + eps * r ** 2 >= 0 or rho_val >= 0:
            witnesses.append([float(x) for x in from_complex(z)])
    if entries == 0:
        raise NoEntryPoints("no inward-pointing boundary samples; radius or window degenerate")
    ok = bool(max_sum < 0 and max_rho < 0)
    return CheckReport(name="entry_inequality", ok=ok,
                       details={"entries": entries, "max_sigma_plus_eps_r2": float(max_sum),
                                "max_identity_residual": float(max_identity),
                                "max_rho_at_entry": float(max_rho), "r": r},
                       witnesses=witnesses)


def certify_sublevel_trace(model: CriticalPointModel, family: EllipsoidFamily, r: float,
                           grid_per_axis: int = 21, t_range: Tuple[float, float] = (-8.0, 8.0),
                           n_samples: int = 32, exclusion: float = 1e-3,
                           max_refine: int = 6) -> dommod.AggregateReport:
    """Interval certification of {rho < 0} inside the ellipsoid, off the
    positive eigenspace.

    Seeds on the positive eigenspace E (all negative-direction coordinates
    zero) are excluded and reported: E is invariant and rho >= 0 there near
    0, so those orbits never meet the trace.
    """
    rho_m = model.rho_model()
    domain = dommod.Intersection(parts=(family.ellipsoid(r), dommod.Sublevel(rho=rho_m, level=0.0)))
    field = model.gradient_field()

    i_pos, i_neg = 0, model.k            # representative positive / negative directions
    lim_pos = r / np.sqrt(family.c[i_pos])
    lim_neg = r / np.sqrt(family.c[i_neg])
    xs = np.linspace(-lim_pos, lim_pos, grid_per_axis)
    ys = np.linspace(-lim_neg, lim_neg, grid_per_axis)
    ell = family.ellipsoid(r)
    seeds = []
    excluded = []
    for x in xs:
        for y in ys:
            v = np.zeros(2 * model.n)
            v[2 * i_pos] = x
            v[2 * i_neg] = y
            if not ell.contains(v):
                continue
            neg_part = np.sqrt(sum(v[2 * j] ** 2 + v[2 * j + 1] ** 2
                                   for j in range(model.k, model.n)))
            if neg_part <= exclusion * r:
                excluded.append(v)
                continue
            seeds.append(v)
    report = dommod.is_interval_domain(field, domain, seeds, t_range,
                                       n_samples=n_samples, max_refine=max_refine)
    report.excluded_seeds = excluded
    report.notes += "; seeds on the positive eigenspace excluded (invariant, rho >= 0 there)"
    return report


def find_working_radius(model: CriticalPointModel, family: EllipsoidFamily,
                        r_start: float = 0.5, r_min: float = 1e-4,
                        grid_per_axis: int = 11) -> Tuple[Optional[float], List[CheckReport]]:
    """Halve r from r_start until the whole battery passes (or r < r_min)."""
    r = r_start
    trail: List[CheckReport] = []
    while r >= r_min:
        inc = verify_increasing(model, 0.1 * r, 2.0 * r, n_samples=1500)
        try:
            ent = verify_entry_inequality(family, model, r)
        except NoEntryPoints:
            r *= 0.5
            continue
        agg = certify_sublevel_trace(model, family, r, grid_per_axis=grid_per_axis)
        ok = inc.ok and ent.ok and agg.verdict == dommod.CERTIFIED
        trail.append(CheckReport(name=f"battery@r={r:g}", ok=ok,
                                 details={"increasing": inc.ok, "entry": ent.ok,
                                          "interval": agg.verdict}))
        if ok:
            return r, trail
        r *= 0.5
    return None, trail
