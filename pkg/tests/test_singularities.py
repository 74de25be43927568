import numpy as np
import pytest

from foliationlab import domains as D, singularities as S
from foliationlab.calculus import ScalarField
from foliationlab.coords import from_complex, to_complex
from foliationlab.errors import Degenerate, IsMaximum, IsMinimum, NotCritical, NotHermitian
from foliationlab.forms import random_unitary
from foliationlab.registry import SCALAR_FIELDS


def saddle():
    return SCALAR_FIELDS["saddle"]({})


def saddle_cubic(coeff=0.05, seed=2027):
    return SCALAR_FIELDS["saddle_cubic"]({"coeff": coeff, "seed": seed})


# --- extraction -----------------------------------------------------------------

def test_extract_saddle():
    model = S.extract_model(saddle(), n=2)
    assert np.allclose(model.eigen, [1.0, -1.0], atol=1e-10)
    assert model.k == 1
    assert all(model.flags.values())


def test_extract_rejects_harmonic_jet():
    rho = ScalarField(eval=lambda v: v[0] ** 2 - v[1] ** 2, name="Re z^2")
    with pytest.raises(NotHermitian):
        S.extract_model(rho, n=1)


def test_extract_ignores_cubic_radial_term():
    base = saddle()
    rho = ScalarField(eval=lambda v: base.eval(v) + 0.05 * float(np.sum(np.asarray(v) ** 2)) ** 1.5)
    model = S.extract_model(rho, n=2)
    assert np.max(np.abs(model.jet.H - np.diag([1.0, -1.0]))) < 1e-4


def test_extract_error_cases():
    with pytest.raises(NotCritical):
        S.extract_model(ScalarField(eval=lambda v: v[0]), n=1)
    with pytest.raises(Degenerate):
        S.extract_model(ScalarField(eval=lambda v: v[0] ** 2 + v[1] ** 2), n=2)
    with pytest.raises(IsMinimum):
        S.extract_model(ScalarField(eval=lambda v: float(np.sum(np.asarray(v) ** 2))), n=2)
    with pytest.raises(IsMaximum):
        S.extract_model(ScalarField(eval=lambda v: -float(np.sum(np.asarray(v) ** 2))), n=2)


def test_jet_stable_under_unitary_rotation():
    rng = np.random.default_rng(41)
    base = saddle_cubic()
    u = random_unitary(2, rng)
    rotated = ScalarField(eval=lambda v: base.eval(from_complex(u @ to_complex(v))))
    model = S.extract_model(rotated, n=2)
    assert np.allclose(np.sort(model.eigen), [-1.0, 1.0], atol=1e-5)


# --- family ------------------------------------------------------------------------

def test_family_saddle():
    model = S.extract_model(saddle(), n=2)
    fam = S.build_family(model)
    assert fam.eps == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(fam.c, [2.0, 2.0 / 3.0], atol=1e-12)
    assert fam.identity_residual() < 1e-14


def test_family_three_eigenvalues():
    model = S.extract_model(saddle(), n=2)
    fam = S.EllipsoidFamily(eps=1.0, c=np.array([2.0, 1.5, 0.5]),
                            eigen=np.array([2.0, 3.0, -1.0]))
    # direct formula check: eps = min(2,3)/2 = 1, c_j = a_j/(a_j - 1)
    a = np.array([2.0, 3.0, -1.0])
    eps = 0.5 * min(2.0, 3.0)
    c = a / (a - eps)
    assert np.allclose(c, [2.0, 1.5, 0.5])
    assert fam.identity_residual() < 1e-14
    del model


def test_family_requires_flags():
    model = S.extract_model(saddle(), n=2)
    model.flags["hermitian"] = False
    with pytest.raises(Degenerate):
        S.build_family(model)


# --- battery ----------------------------------------------------------------------

def test_increasing_for_pure_quadratic():
    model = S.extract_model(saddle(), n=2)
    rep = S.verify_increasing(model, 0.05, 0.2, n_samples=1200)
    assert rep.ok
    # grad(rho) . grad(sigma) = |grad sigma|^2 = 4 |z|^2 here: min on the
    # inner sphere, which the sample batch hits exactly
    assert rep.details["min_dot"] == pytest.approx(4 * 0.05 ** 2, abs=1e-6)


def test_increasing_with_small_cubic():
    model = S.extract_model(saddle_cubic(), n=2)
    rep = S.verify_increasing(model, 0.01, 0.2, n_samples=2000)
    assert rep.ok
    assert rep.details["min_dot"] > 0


def test_increasing_violated_by_large_perturbation():
    base = saddle()
    rho = ScalarField(eval=lambda v: base.eval(v) - 5.0 * v[0] ** 3)
    model = S.CriticalPointModel(rho=rho, jet=S.extract_model(saddle(), n=2).jet,
                                 eigen=np.array([1.0, -1.0]), k=1,
                                 basis=np.eye(2, dtype=complex), grad_norm=0.0,
                                 flags={"critical": True, "hermitian": True,
                                        "nondegenerate": True, "not_minimum": True,
                                        "not_maximum": True})
    rep = S.verify_increasing(model, 0.3, 0.5, n_samples=3000)
    assert not rep.ok
    assert rep.witnesses


def test_orbit_convexity_closed_form():
    model = S.extract_model(saddle(), n=2)
    fam = S.build_family(model)
    rep = S.verify_orbit_convexity(fam, model, n_orbits=6,
                                   extra_seeds=[np.array([1.0, 0.0, 1.0, 0.0])])
    assert rep.ok
    assert rep.details["max_abs_error"] < 1e-5
    # seed (1,1) at t=0: 4 (1 * 2 * 1 + 1 * (2/3) * 1) = 32/3
    a, c = fam.eigen, fam.c
    z0 = np.array([1.0, 1.0], dtype=complex)
    closed = 4.0 * float(np.dot(a ** 2 * c, np.abs(z0) ** 2))
    assert closed == pytest.approx(32.0 / 3.0, abs=1e-12)


def test_entry_inequality():
    model = S.extract_model(saddle_cubic(), n=2)
    fam = S.build_family(model)
    rep = S.verify_entry_inequality(fam, model, 0.1, n_boundary=2000)
    assert rep.ok
    assert rep.details["max_identity_residual"] < 1e-15
    assert rep.details["max_sigma_plus_eps_r2"] < 0
    assert rep.details["max_rho_at_entry"] < 0


def test_entry_inequality_spec_point():
    # z = (0, 0.1 / sqrt(2/3)): lambda = r^2, sigma = -0.015, sigma + eps r^2 = -0.01
    model = S.extract_model(saddle(), n=2)
    fam = S.build_family(model)
    z = np.array([0.0, 0.1 / np.sqrt(2.0 / 3.0)], dtype=complex)
    mods = np.abs(z) ** 2
    lam = float(np.dot(fam.c, mods))
    sigma = float(np.dot(fam.eigen, mods))
    assert lam == pytest.approx(0.01, abs=1e-15)
    assert sigma == pytest.approx(-0.015, abs=1e-15)
    assert sigma + fam.eps * 0.1 ** 2 == pytest.approx(-0.01, abs=1e-15)


def test_certify_trace_pure_quadratic():
    model = S.extract_model(saddle(), n=2)
    fam = S.build_family(model)
    rep = S.certify_sublevel_trace(model, fam, 0.1, grid_per_axis=11)
    assert rep.verdict == D.CERTIFIED
    assert rep.excluded_seeds  # seeds on the positive eigenspace are excluded


def test_working_radius_search():
    model = S.extract_model(saddle_cubic(), n=2)
    fam = S.build_family(model)
    r, trail = S.find_working_radius(model, fam, r_start=0.2, grid_per_axis=7)
    assert r is not None
    assert trail[-1].ok
