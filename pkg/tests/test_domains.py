import numpy as np
import pytest

from foliationlab import domains as D, fields as F
from foliationlab.calculus import ScalarField
from foliationlab.errors import EmptyBase
from foliationlab.registry import ALPHA_NOTCH, notch_region_base

HULL_OFFSET = 2.0 * ALPHA_NOTCH / 3.0


# --- convex hull -----------------------------------------------------------

def test_hull_triangle():
    hull = D.convex_hull_2d([(0, 0), (1, 0), (0, 1)])
    assert hull.shape == (3, 2)
    assert {tuple(v) for v in hull} == {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)}


def test_hull_drops_interior_point():
    hull = D.convex_hull_2d([(0, 0), (1, 0), (0, 1), (0.25, 0.25)])
    assert (0.25, 0.25) not in {tuple(v) for v in hull}
    assert hull.shape == (3, 2)


def test_hull_ccw_and_contains_inputs():
    rng = np.random.default_rng(7)
    pts = rng.standard_normal((200, 2))
    hull = D.convex_hull_2d(pts)
    m = hull.shape[0]
    for i in range(m):
        a, b, c = hull[i], hull[(i + 1) % m], hull[(i + 2) % m]
        cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        assert cross > 0  # counterclockwise, no collinear triples
    poly = D.ConvexPolygon(vertices=hull)
    for p in pts:
        assert poly.signed_distance(p) > -1e-9


def test_hull_idempotent():
    rng = np.random.default_rng(8)
    pts = rng.standard_normal((100, 2))
    hull = D.convex_hull_2d(pts)
    again = D.convex_hull_2d(hull)
    assert np.allclose(np.sort(hull, axis=0), np.sort(again, axis=0))


def test_hull_degenerate_inputs():
    assert D.convex_hull_2d([(1, 2)]).shape == (1, 2)
    segment = D.convex_hull_2d([(0, 0), (1, 1), (2, 2), (0.5, 0.5)])
    assert segment.shape[0] == 2


def test_hull_of_notch_region_fills_notch():
    # the convex hull of the notch region is the half-plane below 2 alpha / 3
    pts = []
    for x in np.linspace(-3, 3, 701):
        for y in np.linspace(-3, 3, 701):
            if notch_region_base((x, y)):
                pts.append((x, y))
    hull = D.convex_hull_2d(pts)
    top = max(v[1] for v in hull)
    assert abs(top - HULL_OFFSET) < 1e-2


# --- tube envelope ------------------------------------------------------------

def test_tube_envelope_convex_base_idempotent():
    disc = D.Tube(base=lambda q: q[0] ** 2 + q[1] ** 2 < 1.0, name="disc")
    env = D.tube_envelope(disc, (-1.5, 1.5, -1.5, 1.5), samples_per_axis=141)
    for q in ([0.0, 0.0], [0.7, 0.0], [0.0, -0.7]):
        assert env.contains(np.array(q))
    assert not env.contains(np.array([1.1, 0.0]))


def test_tube_envelope_of_notch_region():
    y0 = D.Tube(base=notch_region_base, name="notch")
    env = D.tube_envelope(y0, (-3.0, 3.0, -3.0, 3.0), samples_per_axis=301)
    # upper edge approximates the hull line; probe points far inside the notch
    assert env.contains(np.array([0.0, 0.0]))
    assert env.contains(np.array([0.5, 0.3]))       # inside the filled notch
    assert not env.contains(np.array([0.0, HULL_OFFSET + 0.05]))


def test_tube_envelope_bridged_discs():
    def base(q):
        inside = ((q[0] - 1.5) ** 2 + q[1] ** 2 < 0.25
                  or (q[0] + 1.5) ** 2 + q[1] ** 2 < 0.25
                  or (abs(q[1]) < 0.02 and abs(q[0]) <= 1.5))
        return bool(inside)

    tube = D.Tube(base=base, name="dumbbell")
    env = D.tube_envelope(tube, (-2.5, 2.5, -1.0, 1.0), samples_per_axis=201)
    assert env.contains(np.array([0.0, 0.0]))       # bridge region convexified
    assert env.contains(np.array([0.0, 0.3]))       # hull of the two discs


def test_tube_envelope_empty_base():
    tube = D.Tube(base=lambda q: False, name="empty")
    with pytest.raises(EmptyBase):
        D.tube_envelope(tube, (-1, 1, -1, 1), samples_per_axis=31)


def test_tube_accepts_planar_and_c2_points():
    y0 = D.Tube(base=notch_region_base)
    assert y0.contains(np.array([0.0, -1.0]))
    assert y0.contains(np.array([0.0, 0.5, -1.0, -0.3]))  # imaginary parts ignored
    with pytest.raises(ValueError):
        y0.contains(np.array([0.0, 0.0, 0.0, 0.0, 0.0, 0.0]))


# --- box neighbourhoods ----------------------------------------------------------

def test_box_neighbourhood_dimensions():
    box = D.box_neighbourhood(eps=0.5, delta=0.25)
    # y half-width is 3 eps = 1.5
    assert box.contains(np.array([0.1, 0.0, 0.0, 1.4]))
    assert not box.contains(np.array([0.1, 0.0, 0.0, 1.6]))
    assert not box.contains(np.array([0.3, 0.0, 0.0, 0.0]))  # |(z, x)| >= delta


def test_box_neighbourhood_nesting():
    small = D.box_neighbourhood(eps=0.2, delta=0.1)
    large = D.box_neighbourhood(eps=0.5, delta=0.25)
    rng = np.random.default_rng(5)
    for _ in range(200):
        p = rng.uniform(-1.6, 1.6, size=4)
        if small.contains(p):
            assert large.contains(p)


def test_box_neighbourhood_contains_origin_and_validates():
    for eps, delta in [(0.9, 0.5), (0.3, 0.1), (0.01, 0.005)]:
        assert D.box_neighbourhood(eps, delta).contains(np.zeros(4))
    with pytest.raises(ValueError):
        D.box_neighbourhood(eps=0.25, delta=0.5)


# --- orbit intersection -----------------------------------------------------------

def notch_setup():
    f0 = F.counterexample_plane_field()
    y0 = D.Tube(base=notch_region_base)
    hull = D.HalfPlane(normal=np.array([0.0, 1.0]), offset=HULL_OFFSET)
    return f0, y0, hull


def test_orbit_meets_notch_region_in_interval():
    f0, y0, _ = notch_setup()
    rep = D.orbit_intersection(f0, [0.0, 0.0], y0, (-10, 10), n_samples=64)
    assert rep.verdict == D.VERDICT_INTERVAL
    lo, hi = rep.components[0]
    assert lo == -10.0
    assert abs(hi + ALPHA_NOTCH) < 1e-5


def test_orbit_meets_hull_tube_in_two_components():
    f0, _, hull = notch_setup()
    rep = D.orbit_intersection(f0, [0.0, 0.0], hull, (-10, 10), n_samples=64)
    assert rep.verdict == D.VERDICT_DISCONNECTED
    assert len(rep.components) == 2
    (a0, a1), (b0, b1) = rep.components
    assert abs(a1 + ALPHA_NOTCH) < 1e-3
    assert abs(b0 + ALPHA_NOTCH) < 1e-3
    assert abs(b1 - 2 * ALPHA_NOTCH) < 1e-3


def test_orbit_intersection_stability_under_doubling():
    f0, _, hull = notch_setup()
    rep1 = D.orbit_intersection(f0, [0.0, 0.0], hull, (-10, 10), n_samples=64)
    rep2 = D.orbit_intersection(f0, [0.0, 0.0], hull, (-10, 10), n_samples=128)
    assert rep1.verdict == rep2.verdict
    assert len(rep1.components) == len(rep2.components)


def test_radial_orbit_in_unit_disc():
    fld = F.RealLinearDiag(1.0, 1.0)
    disc = D.Ellipsoid(c=np.array([1.0]), r=1.0)
    rep = D.orbit_intersection(fld, [1.0, 0.0], disc, (-10, 10), n_samples=64)
    assert rep.verdict == D.VERDICT_INTERVAL
    lo, hi = rep.components[0]
    assert lo == -10.0
    assert abs(hi) < 1e-5


def test_orbit_intersection_validates_input():
    f0, y0, _ = notch_setup()
    with pytest.raises(ValueError):
        D.orbit_intersection(f0, [0.0, 0.0], y0, (-10, 10), n_samples=8)
    with pytest.raises(ValueError):
        D.orbit_intersection(f0, [0.0, 0.0], y0, (10, -10))


def test_convex_domain_linear_field_interval_property():
    # sublevel sets of convex gauges along linear flows: always one component
    rng = np.random.default_rng(31)
    for _ in range(8):
        c = rng.uniform(0.3, 2.0, size=2)
        mu = rng.uniform(-1.0, 1.0, size=2) + 1j * rng.uniform(-2.0, 2.0, size=2)
        fld = F.LinearComplex(matrix=np.diag(mu))
        dom = D.Ellipsoid(c=c, r=rng.uniform(0.5, 1.5))
        z = rng.uniform(-0.3, 0.3, size=4)
        rep = D.orbit_intersection(fld, z, dom, (-6, 6), n_samples=64)
        assert rep.verdict in (D.VERDICT_INTERVAL, D.VERDICT_EMPTY)
        assert len(rep.components) <= 1


# --- aggregates --------------------------------------------------------------------

def plane_seeds(lim, per_axis):
    xs = np.linspace(-lim, lim, per_axis)
    return [np.array([x, 0.0, y, 0.0]) for x in xs for y in xs]


def test_notch_tube_certified_hull_refuted():
    tube_field = F.TubeExtension(planar=F.counterexample_plane_field())
    y0 = D.Tube(base=notch_region_base)
    hull_plane = D.HalfPlane(normal=np.array([0.0, 0.0, 1.0, 0.0]), offset=HULL_OFFSET)
    seeds = plane_seeds(2.0, 11)
    cert = D.is_interval_domain(tube_field, y0, seeds, (-10, 10), n_samples=32)
    assert cert.verdict == D.CERTIFIED
    refu = D.is_interval_domain(tube_field, hull_plane, seeds, (-10, 10), n_samples=32)
    assert refu.verdict == D.REFUTED
    assert refu.witness is not None


def test_is_interval_domain_needs_seeds():
    with pytest.raises(ValueError):
        D.is_interval_domain(F.RealLinearDiag(1, 1), D.Ellipsoid(c=[1.0], r=1.0),
                             [], (-1, 1))


def test_half_space_slit_plane():
    fld = F.HolomorphicCallable(func=lambda z: np.array([-1.0 + 0j]), n=1)
    slit = D.Membership(predicate=lambda v: v[0] > 0 or v[1] != 0, name="slit")
    rep = D.is_half_space(fld, slit, [np.array([4.0, 0.0])], (-6, 6), n_samples=32)
    assert rep.verdict == D.CERTIFIED
    # off the axis the whole orbit is inside: degenerate backwards semiorbit
    rep2 = D.is_half_space(fld, slit, [np.array([4.0, 1.0])], (-6, 6), n_samples=32)
    assert rep2.verdict == D.CERTIFIED
    assert rep2.per_seed[0].components[0][1] >= 6.0 - 1e-9


def test_half_space_forward_ray_refuted():
    fld = F.HolomorphicCallable(func=lambda z: np.array([-1.0 + 0j]), n=1)
    ray = D.Membership(predicate=lambda v: v[0] < 0, name="left")
    rep = D.is_half_space(fld, ray, [np.array([4.0, 0.0])], (-6, 6), n_samples=32)
    assert rep.verdict == D.REFUTED


def test_subgraph_membership():
    u = ScalarField(eval=lambda zx: 0.1 - 0.5 * zx[0] ** 2)
    dom = D.Subgraph(u=u, r=1.0)
    assert dom.contains(np.array([0.0, 0.0, 0.0, 0.0]))       # y=0 < u=0.1
    assert not dom.contains(np.array([0.0, 0.0, 0.0, 0.2]))   # y above graph
    assert not dom.contains(np.array([1.2, 0.0, 0.0, 0.0]))   # outside the box


def test_subgraph_along_vertical_drift():
    # z2' = i: the last imaginary coordinate climbs through the graph once
    fld = F.HolomorphicCallable(func=lambda z: np.array([0.0 + 0j, 1j]), n=2)
    dom = D.Subgraph(u=ScalarField(eval=lambda zx: 0.1 - 0.5 * zx[0] ** 2), r=1.0)
    rep = D.orbit_intersection(fld, [0.2, 0.0, 0.0, -0.5], dom, (-2, 2), n_samples=32)
    assert rep.verdict == D.VERDICT_INTERVAL
    lo, hi = rep.components[0]
    # enters where y = -r, exits where y = u(z, x) = 0.1 - 0.5 * 0.04 = 0.08
    assert abs(lo - (-0.5)) < 1e-4
    assert abs(hi - 0.58) < 1e-4
