import math

import numpy as np
import pytest

from foliationlab import fields as F, quasihol as Q
from foliationlab.calculus import ScalarField
from foliationlab.errors import (
    DegenerateForm,
    NotConserved,
    NotSubmersion,
    ObstructionNotLevelConstant,
    VanishingG,
    ZeroCoefficient,
)
from foliationlab.forms import QuadraticForm, random_unitary, unitary_change
from foliationlab.registry import SCALAR_FIELDS


# --- obstruction constancy ----------------------------------------------------

def test_holomorphic_case_is_constant():
    field = F.RealLinearDiag(1.0, 1.0)
    alpha = SCALAR_FIELDS["y_over_x"]({})
    rep = Q.obstruction_constancy_test(field, alpha,
                                       [np.array([1.0, 0.5]), np.array([1.0, 1.0])],
                                       (-0.6, 0.6), tol=1e-6)
    assert rep.constant
    assert rep.max_variation < 1e-6


def test_unequal_rates_break_constancy():
    field = F.RealLinearDiag(1.0, 2.0)
    alpha = SCALAR_FIELDS["log_ratio"]({"a": 1.0, "b": 2.0})
    rep = Q.obstruction_constancy_test(field, alpha, [np.array([1.0, 1.0])],
                                       (0.0, math.log(2.0)), tol=1e-6)
    assert not rep.constant
    trace = rep.traces[0]
    # along the orbit of (1,1): 1/5 at (1,1), 7/17 at (2,4)
    assert trace["ratio"][0] == pytest.approx(0.2, abs=1e-6)
    assert trace["ratio"][-1] == pytest.approx(7.0 / 17.0, abs=1e-6)


def test_not_conserved_is_detected():
    field = F.RealLinearDiag(1.0, 2.0)
    alpha = SCALAR_FIELDS["y_over_x"]({})  # conserved only for equal rates
    with pytest.raises(NotConserved):
        Q.obstruction_constancy_test(field, alpha, [np.array([1.0, 1.0])], (0.0, 0.5))


def test_harmonic_level_function_gives_zero_ratio():
    # field tangent to level sets of a harmonic alpha: ratio is identically 0
    field = F.HolomorphicCallable(func=lambda z: np.array([1j * z[0]]), n=1)
    alpha = ScalarField(eval=lambda v: v[0] ** 2 + v[1] ** 2, name="|z|^2")
    rep = Q.obstruction_constancy_test(field, alpha, [np.array([1.0, 0.0])],
                                       (-1.0, 1.0), tol=1e-5)
    assert rep.constant


# --- antiholomorphic factorization -------------------------------------------------

def test_factorization_constant_g():
    res = Q.antiholomorphic_factorization(lambda z: 1.0 + 0j, [0.5, 1.0 + 1j])
    assert res.max_identity_residual == 0.0
    assert res.positive_factor(2.0) == pytest.approx(1.0)


def test_factorization_g_equals_z():
    ring = [r * np.exp(1j * a) for r in (0.5, 1.0, 2.0)
            for a in np.linspace(0, 2 * math.pi, 9)[:-1]]
    res = Q.antiholomorphic_factorization(lambda z: z, ring)
    assert res.max_identity_residual < 1e-12
    assert res.positive_factor(2.0) == pytest.approx(4.0)
    vel = res.holomorphic_field.velocity(np.array([2.0, 0.0]))
    assert np.allclose(vel, [0.5, 0.0])


def test_factorization_vanishing_g():
    with pytest.raises(VanishingG):
        Q.antiholomorphic_factorization(lambda z: z, [0.0])


# --- rectification ------------------------------------------------------------------

def test_rectify_y_over_x_profiles():
    res = Q.rectify(SCALAR_FIELDS["y_over_x"]({}), (0.5, 2.0, -1.0, 1.0),
                    grid=41, u_grid=121, n_levels=801)
    lv = res.levels
    assert np.max(np.abs(res.u_profile - 2 * lv / (1 + lv ** 2))) < 1e-4
    assert np.max(np.abs(res.v_profile - np.log(1 + lv ** 2))) < 1e-4
    assert np.max(np.abs(res.w_profile - np.arctan(lv))) < 1e-4
    assert res.injectivity_ok
    assert res.residual < 1e-3


def test_rectify_horizontal_leaves():
    res = Q.rectify(SCALAR_FIELDS["coordinate_y"]({}), (0.0, 1.0, -0.5, 0.5),
                    grid=41, u_grid=81, n_levels=401)
    assert res.residual < 1e-8
    got = res.harmonic_integral(np.array([0.3, 0.2]))
    assert got == pytest.approx(0.2, abs=1e-6)


def test_rectify_vertical_leaves():
    res = Q.rectify(SCALAR_FIELDS["coordinate_x"]({}), (0.5, 1.5, -0.5, 0.5),
                    grid=41, u_grid=81, n_levels=401)
    assert res.residual < 1e-8
    # w(alpha) = x up to the anchoring constant (0 is not in the level range)
    diff = (res.harmonic_integral(np.array([0.7, 0.1]))
            - res.harmonic_integral(np.array([1.2, -0.3])))
    assert diff == pytest.approx(0.7 - 1.2, abs=1e-6)


def test_rectify_levels_preserved():
    # w strictly increasing means w(alpha) orders points exactly like alpha
    res = Q.rectify(SCALAR_FIELDS["y_over_x"]({}), (0.5, 2.0, -1.0, 1.0),
                    grid=21, u_grid=81, n_levels=401)
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = np.array([rng.uniform(0.5, 2.0), rng.uniform(-1, 1)])
        q = np.array([rng.uniform(0.5, 2.0), rng.uniform(-1, 1)])
        alpha_sign = np.sign(p[1] / p[0] - q[1] / q[0])
        w_sign = np.sign(res.harmonic_integral(p) - res.harmonic_integral(q))
        assert alpha_sign == w_sign


def test_rectify_not_submersion():
    alpha = ScalarField(eval=lambda v: v[0] ** 2)
    with pytest.raises(NotSubmersion):
        Q.rectify(alpha, (-1.0, 1.0, -1.0, 1.0), grid=21, u_grid=41, n_levels=101)


def test_rectify_rejects_level_dependent_ratio():
    with pytest.raises(ObstructionNotLevelConstant):
        Q.rectify(SCALAR_FIELDS["x2_minus_y3"]({}), (1.0, 2.0, 1.0, 2.0),
                  grid=21, u_grid=81, n_levels=201)


def test_quadrature_csv_shape():
    res = Q.rectify(SCALAR_FIELDS["coordinate_y"]({}), (0.0, 1.0, -0.5, 0.5),
                    grid=21, u_grid=41, n_levels=101)
    lines = res.quadrature_csv().strip().splitlines()
    assert lines[0] == "level,u,v,w"
    assert len(lines) == 102


# --- classifier ---------------------------------------------------------------------

def test_classifier_hermitian_case():
    q = QuadraticForm(H=np.diag([1.0, -1.0]).astype(complex), S=np.zeros((2, 2)))
    verdict = Q.classify_quadratic_gradient(q)
    assert verdict.verdict == Q.HERMITIAN_CASE
    assert verdict.s_rank == 0


def test_classifier_harmonic_n1_case():
    q = QuadraticForm(H=np.zeros((1, 1)), S=np.array([[1.0]]))
    verdict = Q.classify_quadratic_gradient(q)
    assert verdict.verdict == Q.HARMONIC_N1_CASE
    assert verdict.hermitian_nullity == 1


def test_classifier_incompatible_mixed_n1():
    # sigma = 2|z|^2 + Re z^2 = 3x^2 + y^2: nondegenerate, mixed
    q = QuadraticForm(H=np.array([[2.0]]), S=np.array([[1.0]]))
    verdict = Q.classify_quadratic_gradient(q)
    assert verdict.verdict == Q.INCOMPATIBLE


def test_classifier_degenerate_rejected():
    # a = |b| means degenerate: sigma = |z|^2 + Re z^2 = 2 x^2
    q = QuadraticForm(H=np.array([[1.0]]), S=np.array([[1.0]]))
    with pytest.raises(DegenerateForm):
        Q.classify_quadratic_gradient(q)


def test_classifier_unitary_invariance():
    rng = np.random.default_rng(29)
    herm = QuadraticForm(H=np.diag([1.3, -0.7]).astype(complex), S=np.zeros((2, 2)))
    harm = QuadraticForm(H=np.zeros((1, 1)), S=np.array([[0.5 - 0.2j]]))
    for _ in range(10):
        u2 = random_unitary(2, rng)
        assert Q.classify_quadratic_gradient(unitary_change(herm, u2)).verdict == Q.HERMITIAN_CASE
        u1 = random_unitary(1, rng)
        assert Q.classify_quadratic_gradient(unitary_change(harm, u1)).verdict == Q.HARMONIC_N1_CASE


def test_reallinear_algebraic_test():
    assert Q.reallinear_quasihol_test(1.0, 1.0)
    assert Q.reallinear_quasihol_test(1.0, -1.0)
    assert not Q.reallinear_quasihol_test(1.0, 2.0)
    with pytest.raises(ZeroCoefficient):
        Q.reallinear_quasihol_test(0.0, 1.0)
