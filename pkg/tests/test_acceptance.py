"""Acceptance suite: every shipped claim checked at its stated tolerance.

Each criterion prints one PASS/FAIL line (run with ``pytest -s`` to see all
of them together); any failure also fails the test.
"""

import math

import numpy as np
import pytest

from foliationlab import (
    calculus as C,
    continuation as cont,
    domains as D,
    fields as F,
    linearfields as L,
    quasihol as Q,
    scenarios as S,
    singularities as sing,
)
from foliationlab.calculus import DiffConfig
from foliationlab.registry import ALPHA_NOTCH, SCALAR_FIELDS

HULL_OFFSET = 2.0 * ALPHA_NOTCH / 3.0


def criterion(num, desc, ok):
    ok = bool(ok)
    print(f"[{'PASS' if ok else 'FAIL'}] acceptance {num}: {desc}")
    assert ok, f"acceptance criterion {num} failed: {desc}"


# -----------------------------------------------------------------------------
# 1. counterexample reproduction
# -----------------------------------------------------------------------------

def test_criterion_1_counterexample():
    f0 = F.counterexample_plane_field()
    from foliationlab.registry import notch_region_base

    y0 = D.Tube(base=notch_region_base)
    rep_y0 = D.orbit_intersection(f0, [0.0, 0.0], y0, (-10, 10), n_samples=64)
    ok_y0 = rep_y0.verdict == D.VERDICT_INTERVAL and len(rep_y0.components) == 1

    hull = D.HalfPlane(normal=np.array([0.0, 1.0]), offset=HULL_OFFSET)
    rep_h = D.orbit_intersection(f0, [0.0, 0.0], hull, (-10, 10), n_samples=64)
    ok_h = rep_h.verdict == D.VERDICT_DISCONNECTED and len(rep_h.components) == 2
    if ok_h:
        (_, a1), (b0, b1) = rep_h.components
        ok_h = (abs(a1 - (-0.57735)) < 1e-3 and abs(b0 - (-0.57735)) < 1e-3
                and abs(b1 - 1.15470) < 1e-3
                and abs(b1 - 2.0 / math.sqrt(3.0)) < 1e-3)
    criterion(1, "notch-region orbit: one component inside, two against the hull "
                 "with endpoints at -0.57735 / 1.15470", ok_y0 and ok_h)


# -----------------------------------------------------------------------------
# 2. real-linear obstruction
# -----------------------------------------------------------------------------

def test_criterion_2_real_linear_obstruction():
    alpha12 = SCALAR_FIELDS["log_ratio"]({"a": 1.0, "b": 2.0})
    field12 = F.RealLinearDiag(1.0, 2.0)
    rep12 = Q.obstruction_constancy_test(
        field12, alpha12,
        [np.array([1.0, 1.0]), np.array([1.3, 0.8]), np.array([0.9, 1.2])],
        (0.0, math.log(2.0)))
    trace = rep12.traces[0]
    ok_values = (abs(trace["ratio"][0] - 0.2) < 1e-6
                 and abs(trace["ratio"][-1] - 7.0 / 17.0) < 1e-6)
    ok_varies = all(t["variation"] > 1e-3 for t in rep12.traces)

    rep11 = Q.obstruction_constancy_test(
        F.RealLinearDiag(1.0, 1.0), SCALAR_FIELDS["y_over_x"]({}),
        [np.array([1.0, 0.5]), np.array([1.0, 1.0]), np.array([1.2, 0.7])],
        (-0.6, 0.6))
    rep1m1 = Q.obstruction_constancy_test(
        F.RealLinearDiag(1.0, -1.0),
        C.ScalarField(eval=lambda v: math.log(v[0] * v[1])),
        [np.array([1.0, 1.0]), np.array([0.8, 1.4])], (-0.4, 0.4))
    ok_const = rep11.max_variation < 1e-6 and rep1m1.max_variation < 1e-6

    rng = np.random.default_rng(113)
    ok_cross = True
    for i in range(50):
        if i % 2 == 0:
            a = rng.uniform(0.3, 2.0) * rng.choice([-1.0, 1.0])
            b = a if i % 4 == 0 else -a
        else:
            while True:
                a = rng.uniform(0.3, 2.0) * rng.choice([-1.0, 1.0])
                b = rng.uniform(0.3, 2.0) * rng.choice([-1.0, 1.0])
                if abs(a - b) > 0.1 and abs(a + b) > 0.1:
                    break
        alpha = SCALAR_FIELDS["log_ratio"]({"a": a, "b": b})
        rep = Q.obstruction_constancy_test(
            F.RealLinearDiag(a, b), alpha,
            [np.array([1.0, 1.0]), np.array([1.2, 0.9])], (-0.4, 0.4), tol=1e-6)
        algebra = Q.reallinear_quasihol_test(a, b)
        if algebra:
            ok_cross = ok_cross and rep.max_variation < 1e-6
        else:
            ok_cross = ok_cross and rep.max_variation > 1e-3
        ok_cross = ok_cross and (rep.constant == algebra)
    criterion(2, "obstruction ratio 1/5 and 7/17 on the (1,2) orbit; constant "
                 "exactly for a = +-b across 50 random draws",
              ok_values and ok_varies and ok_const and ok_cross)


# -----------------------------------------------------------------------------
# 3. rectification
# -----------------------------------------------------------------------------

def test_criterion_3_rectification():
    res = Q.rectify(SCALAR_FIELDS["y_over_x"]({}), (0.5, 2.0, -1.0, 1.0), grid=101)
    xs = np.linspace(0.5, 2.0, 101)
    ys = np.linspace(-1.0, 1.0, 101)
    got, want = [], []
    for x in xs:
        for y in ys:
            got.append(res.harmonic_integral(np.array([x, y])))
            want.append(math.atan2(y, x))
    got = np.array(got)
    want = np.array(want)
    design = np.stack([want, np.ones_like(want)], axis=1)
    coef, *_ = np.linalg.lstsq(design, got, rcond=None)
    fit_err = float(np.max(np.abs(design @ coef - got)))
    criterion(3, "harmonic integral matches arctan(y/x) affinely within 1e-5 "
                 "and Laplacian residual < 1e-4 on the 101x101 grid",
              fit_err < 1e-5 and res.residual < 1e-4 and res.injectivity_ok)


# -----------------------------------------------------------------------------
# 4. classifier truth table
# -----------------------------------------------------------------------------

def test_criterion_4_classifier_truth_table():
    rep = S.run_classifier({"count": 100, "rng_seed": 509})
    criterion(4, "100 random nondegenerate forms classified with zero "
                 "misclassifications", rep.verdicts["misclassifications"] == 0)


# -----------------------------------------------------------------------------
# 5. boundary-singularity battery
# -----------------------------------------------------------------------------

def test_criterion_5_singularity_battery():
    rho = SCALAR_FIELDS["saddle_cubic"]({"coeff": 0.05, "seed": 2027})
    model = sing.extract_model(rho, n=2)
    family = sing.build_family(model)
    # "exactly" up to jet extraction roundoff (the jet of a quadratic-plus-cubic
    # is exact for central differences; only float rounding remains)
    ok_family = (abs(family.eps - 0.5) < 1e-9
                 and np.max(np.abs(family.c - np.array([2.0, 2.0 / 3.0]))) < 1e-9
                 and family.identity_residual() < 1e-12)

    inc = sing.verify_increasing(model, 0.01, 0.2, n_samples=10_000)
    entry = sing.verify_entry_inequality(family, model, 0.1)
    ok_entry = entry.ok and entry.details["max_rho_at_entry"] < 0

    cert21 = sing.certify_sublevel_trace(model, family, 0.1, grid_per_axis=21)
    cert41 = sing.certify_sublevel_trace(model, family, 0.1, grid_per_axis=41)
    ok_cert = (cert21.verdict == D.CERTIFIED and cert41.verdict == cert21.verdict)

    criterion(5, "eps = 0.5, c = (2, 2/3), identity to machine precision, "
                 "gradient dot positive on 1e4 samples, entries negative, "
                 "trace certified on 21^2 and stable at 41^2",
              ok_family and inc.ok and ok_entry and ok_cert)


# -----------------------------------------------------------------------------
# 6. continuation and monodromy
# -----------------------------------------------------------------------------

def test_criterion_6_continuation():
    sqrt_final = cont.continue_along(cont.sqrt_germ(1.0),
                                     cont.circle_loop(0.0, 1.0)).final.value(1.0)
    ok_sqrt = abs(sqrt_final - (-1.0)) < 1e-9

    log_delta = cont.monodromy(cont.log_germ(1.0), cont.circle_loop(0.0, 1.0))
    ok_log = abs(log_delta - 2j * math.pi) < 1e-9

    dbl = cont.continue_along(cont.sqrt_germ(1.0),
                              cont.circle_loop(0.0, 1.0, turns=2)).final.value(1.0)
    ok_dbl = abs(dbl - 1.0) < 1e-8

    at = math.exp(-2.0)
    cart = cont.monodromy(cont.neg_i_log_germ(at), cont.circle_loop(0.0, at))
    ok_cart = abs(cart - 2 * math.pi) < 1e-6
    criterion(6, "sqrt loop -> -1 (1e-9), log loop -> 2 pi i (1e-9), double "
                 "loop -> +1 (1e-8), chart coordinate loop -> 2 pi (1e-6)",
              ok_sqrt and ok_log and ok_dbl and ok_cart)


# -----------------------------------------------------------------------------
# 7. calculus convergence
# -----------------------------------------------------------------------------

def test_criterion_7_calculus_convergence():
    f = lambda v: v[0] ** 3 * v[1] + v[1] ** 2 + math.sin(v[0]) * math.exp(v[1])
    h = 1e-3
    cfg = DiffConfig(h=h)
    ok_iter = True
    for p in ([0.6, -0.4], [0.2, 0.5], [-0.7, 0.1]):
        direct = C.laplacian(f, p, cfg)
        inner = lambda q: C.wirtinger_dzbar(f, q, 0, cfg)
        iterated = 4.0 * C.wirtinger_dz(inner, np.asarray(p, dtype=float), 0, cfg)
        ok_iter = ok_iter and abs(direct - iterated.real) < 10 * h * h

    g = lambda v: math.sin(v[0]) * math.exp(v[1])
    p = [0.5, 0.3]
    exact = 0.5 * (math.cos(0.5) - 1j * math.sin(0.5)) * math.exp(0.3)
    hs = [1e-2 / 2 ** k for k in range(7)]
    errs = [abs(C.wirtinger_dz(g, p, 0, DiffConfig(h=hh)) - exact) for hh in hs]
    orders = [math.log2(errs[k] / errs[k + 1]) for k in range(len(errs) - 1)]
    criterion(7, "Laplacian agrees with 4 dz dzbar within 10 h^2; observed "
                 "order >= 1.8 from h = 1e-2 down to 1e-4",
              ok_iter and min(orders) >= 1.8)


# -----------------------------------------------------------------------------
# 8. flow correctness
# -----------------------------------------------------------------------------

def test_criterion_8_flows():
    from foliationlab.forms import hermitian_diagonal

    rng = np.random.default_rng(211)
    tol = 1e-10
    variants = [
        F.HolomorphicCallable(func=lambda z: np.array([0.3 * z[1] + 0.1, -0.4 * z[0]]), n=2),
        F.LinearComplex(matrix=np.array([[0.2j, 0.1], [0.0, -0.3 + 0.1j]])),
        F.RealLinearDiag(a=0.7, b=-0.4),
        F.Antiholomorphic(g=lambda z: -1j / z),
        F.GradQuadratic(form=hermitian_diagonal([0.5, -0.5])),
        F.GradSmooth(rho=C.ScalarField(eval=lambda v: v[0] ** 2 + 2.0 * v[1] ** 2), n=1),
        F.counterexample_plane_field(),
        F.TubeExtension(planar=F.counterexample_plane_field()),
    ]
    ok_group = True
    for fld in variants:
        for _ in range(3):
            p = rng.uniform(-0.5, 0.5, size=2 * fld.n)
            if isinstance(fld, F.Antiholomorphic):
                p = np.array([1.0, 0.3]) + rng.uniform(-0.1, 0.1, size=2)
            s, t = rng.uniform(-1.0, 1.0, size=2)
            lhs = F.flow(fld, F.flow(fld, p, s, tol=tol), t, tol=tol)
            rhs = F.flow(fld, p, s + t, tol=tol)
            ok_group = ok_group and np.max(np.abs(lhs - rhs)) < 10 * tol

    closed_cases = [
        (F.counterexample_plane_field(), np.array([0.2, -0.5])),
        (F.LinearComplex(matrix=np.array([[0.3 + 1j, 0.1], [0.0, -0.2j]])),
         np.array([0.5, 0.1, -0.3, 0.2])),
        (F.GradQuadratic(form=hermitian_diagonal([0.8, -0.6])),
         np.array([0.4, 0.1, 0.3, -0.2])),
    ]
    ok_rk = True
    for fld, p in closed_cases:
        for t in np.linspace(-2.0, 2.0, 9):
            if t == 0.0:
                continue
            exact = F.flow(fld, p, float(t), method="exact")
            rk = F.flow(fld, p, float(t), method="rk", tol=1e-10)
            ok_rk = ok_rk and np.max(np.abs(exact - rk)) < 1e-9
    criterion(8, "group law within 10 tol on all variants; RK vs closed form "
                 "within 1e-9 over |t| <= 2", ok_group and ok_rk)


# -----------------------------------------------------------------------------
# 9. linear fields: spectral vs numerical periods
# -----------------------------------------------------------------------------

def test_criterion_9_linear_spectral_vs_numerical():
    rng = np.random.default_rng(307)
    ok = True
    for _ in range(30):
        base = rng.uniform(0.8, 1.2)
        q = int(rng.integers(1, 5))
        p1, p2 = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        a = np.diag([1j * base * p1 / q, 1j * base * p2 / q])
        ana = L.analyze_linear(a)
        ok = ok and ana.commensurability == L.COMMENSURABLE
        z = rng.uniform(0.3, 1.0, size=4) * rng.choice([-1.0, 1.0], size=4)
        pred = L.predicted_period(ana, z)
        detected = F.detect_period(ana.field(), z, t_max=1.3 * pred, tol=1e-6,
                                   n_grid=4096)
        ok = ok and detected is not None and abs(detected - pred) < 1e-5 * max(1.0, pred)

    for _ in range(10):
        re = rng.uniform(0.1, 0.8, size=2) * rng.choice([-1.0, 1.0], size=2)
        im = rng.uniform(-2.0, 2.0, size=2)
        a = np.diag(re + 1j * im)
        z = rng.uniform(0.4, 1.0, size=4)
        z /= np.linalg.norm(z)
        detected = F.detect_period(L.analyze_linear(a).field(), z, t_max=50.0, tol=1e-6)
        ok = ok and detected is None
    criterion(9, "spectral periods match detection on 30 commensurable "
                 "matrices; hyperbolic spectra yield no period <= 50", ok)
