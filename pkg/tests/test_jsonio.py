import math

import numpy as np
import pytest

from foliationlab import continuation as C, domains as D, fields as F, jsonio
from foliationlab.errors import InputError


def test_field_linear_complex_roundtrip():
    fld = jsonio.field_from_dict({"variant": "linear_complex",
                                  "matrix": [[[0.0, 1.0]]]})
    assert isinstance(fld, F.LinearComplex)
    out = F.flow(fld, [1.0, 0.0], math.pi)
    assert np.allclose(out, [-1.0, 0.0], atol=1e-9)


def test_field_variants_construct():
    specs = [
        {"variant": "real_linear_diag", "a": 1.0, "b": 2.0},
        {"variant": "antiholomorphic", "g": "neg_i_over_z"},
        {"variant": "grad_quadratic",
         "form": {"H": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]],
                  "S": [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]}},
        {"variant": "polynomial_plane", "p": [[1.0]], "q": [[-1.0], [0.0], [3.0]]},
        {"variant": "tube_extension",
         "planar": {"variant": "polynomial_plane", "p": [[1.0]], "q": [[-1.0], [0.0], [3.0]]}},
        {"variant": "holomorphic", "name": "const_neg_one", "n": 1},
        {"variant": "grad_smooth", "rho": "re_z2", "n": 1},
    ]
    for spec in specs:
        fld = jsonio.field_from_dict(spec)
        assert fld.velocity(0.5 * np.ones(2 * fld.n)) is not None


def test_field_errors():
    with pytest.raises(InputError):
        jsonio.field_from_dict({"variant": "warp_drive"})
    with pytest.raises(InputError):
        jsonio.field_from_dict({"variant": "linear_complex"})
    with pytest.raises(InputError):
        jsonio.field_from_dict({"variant": "linear_complex", "matrix": [[1.0]]})
    with pytest.raises(InputError):
        jsonio.field_from_dict({"variant": "antiholomorphic", "g": "unknown_name"})


def test_domain_variants_construct():
    specs = [
        {"variant": "membership", "name": "slit_plane"},
        {"variant": "subgraph", "u": "coordinate_x", "r": 1.0},
        {"variant": "tube", "base": "notch_region"},
        {"variant": "tube", "hull": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]},
        {"variant": "ellipsoid", "c": [1.0, 2.0], "r": 0.5},
        {"variant": "sublevel", "rho": "saddle", "level": 0.0},
        {"variant": "half_plane", "normal": [0.0, 1.0], "offset": 0.5},
        {"variant": "box", "eps": 0.5, "delta": 0.25},
        {"variant": "intersection",
         "parts": [{"variant": "half_plane", "normal": [0.0, 1.0], "offset": 0.5},
                   {"variant": "half_plane", "normal": [0.0, -1.0], "offset": 0.5}]},
    ]
    for spec in specs:
        dom = jsonio.domain_from_dict(spec)
        assert isinstance(dom, D.Domain)


def test_domain_errors():
    with pytest.raises(InputError):
        jsonio.domain_from_dict({"variant": "moon_base"})
    with pytest.raises(InputError):
        jsonio.domain_from_dict({"variant": "ellipsoid", "c": [-1.0], "r": 1.0})
    with pytest.raises(InputError):
        jsonio.domain_from_dict({"variant": "box", "eps": 0.1, "delta": 0.5})


def test_germ_roundtrip():
    g = C.sqrt_germ(4.0, order=12)
    d = jsonio.germ_to_dict(g)
    g2 = jsonio.germ_from_dict(d)
    assert g2.center == g.center
    assert np.allclose(g2.coeffs, g.coeffs)
    assert g2.radius == g.radius
    assert g2.ode is None  # raw germs carry polynomial semantics only


def test_named_germ():
    g = jsonio.germ_from_dict({"named": "log_at", "at": [1.0, 0.0], "order": 24})
    assert g.order == 24
    assert g.ode is not None
    with pytest.raises(InputError):
        jsonio.germ_from_dict({"named": "zeta_at", "at": [1.0, 0.0]})
    with pytest.raises(InputError):
        jsonio.germ_from_dict({"center": [0.0, 0.0]})


def test_path_specs():
    loop = jsonio.path_from_dict({"circle": {"center": [0.0, 0.0], "radius": 1.0,
                                             "points": 16}})
    assert loop.is_loop()
    line = jsonio.path_from_dict({"waypoints": [[4.0, 0.0], [9.0, 0.0]]})
    assert not line.is_loop()
    with pytest.raises(InputError):
        jsonio.path_from_dict({"waypoints": [[4.0, 0.0]]})


def test_form_matrix_validation():
    with pytest.raises(InputError):
        jsonio.form_from_dict({"H": [[[1.0, 0.0], [0.0, 0.0]]], "S": [[[0.0, 0.0]]]})
    q = jsonio.form_from_dict({"H": [[[2.0, 0.0]]], "S": [[[1.0, 0.0]]]})
    assert q.n == 1
    back = jsonio.form_to_dict(q)
    assert back["H"][0][0] == [2.0, 0.0]
