"""JSON wire formats for fields, domains, forms, germs, and paths.

Complex scalars travel as [re, im] pairs; complex matrices as row-major
nested lists of such pairs.  Named callables go through the registry.  All
shape errors raise InputError with a message naming the offending key.
"""

from __future__ import annotations

from typing import Any, Dict, List

import numpy as np

from . import continuation as contmod, domains as dommod, fields as fieldmod, registry
from .errors import InputError
from .forms import QuadraticForm

Json = Dict[str, Any]


def _cx(pair, where: str) -> complex:
    try:
        re, im = float(pair[0]), float(pair[1])
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"{where}: expected a [re, im] pair, got {pair!r}") from exc
    return complex(re, im)


def _cx_matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise InputError(f"{where}: expected a nonempty list of rows")
    mat = [[_cx(entry, f"{where}[{i}][{j}]") for j, entry in enumerate(row)]
           for i, row in enumerate(rows)]
    arr = np.array(mat, dtype=complex)
    if arr.shape[0] != arr.shape[1]:
        raise InputError(f"{where}: matrix must be square, got {arr.shape}")
    return arr


def matrix_to_json(a: np.ndarray) -> List[List[List[float]]]:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


# --- quadratic forms ----------------------------------------------------------

def form_from_dict(d: Json) -> QuadraticForm:
    if "H" not in d or "S" not in d:
        raise InputError("quadratic form needs 'H' and 'S' entries")
    H = _cx_matrix(d["H"], "H")
    S = _cx_matrix(d["S"], "S")
    try:
        return QuadraticForm(H=H, S=S)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def form_to_dict(q: QuadraticForm) -> Json:
    return {"H": matrix_to_json(q.H), "S": matrix_to_json(q.S)}


# --- fields ----------------------------------------------------------------------

def field_from_dict(d: Json) -> fieldmod.VectorField:
    variant = d.get("variant")
    try:
        if variant == "linear_complex":
            return fieldmod.LinearComplex(matrix=_cx_matrix(d["matrix"], "matrix"))
        if variant == "real_linear_diag":
            return fieldmod.RealLinearDiag(a=float(d["a"]), b=float(d["b"]))
        if variant == "antiholomorphic":
            g = registry.resolve(registry.ANTIHOLOMORPHIC_G, "antiholomorphic generator",
                                 d["g"], d.get("params"))
            return fieldmod.Antiholomorphic(g=g, name=str(d["g"]))
        if variant == "grad_quadratic":
            return fieldmod.GradQuadratic(form=form_from_dict(d["form"]))
        if variant == "grad_smooth":
            rho = registry.resolve(registry.SCALAR_FIELDS, "scalar field",
                                   d["rho"], d.get("params"))
            return fieldmod.GradSmooth(rho=rho, n=int(d.get("n", 1)))
        if variant == "polynomial_plane":
            return fieldmod.PolynomialPlane(p_coeffs=d["p"], q_coeffs=d["q"])
        if variant == "tube_extension":
            inner = field_from_dict(d["planar"])
            return fieldmod.TubeExtension(planar=inner)
        if variant == "holomorphic":
            func = registry.resolve(registry.HOLOMORPHIC, "holomorphic callable",
                                    d["name"], d.get("params"))
            return fieldmod.HolomorphicCallable(func=func, n=int(d.get("n", 1)),
                                                name=str(d["name"]))
    except KeyError as exc:
        raise InputError(f"field spec missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad field spec: {exc}") from exc
    raise InputError(f"unknown field variant {variant!r}")


# --- domains ----------------------------------------------------------------------

def domain_from_dict(d: Json) -> dommod.Domain:
    variant = d.get("variant")
    try:
        if variant == "membership":
            pred = registry.resolve(registry.PREDICATES, "predicate", d["name"], d.get("params"))
            return dommod.Membership(predicate=pred, name=str(d["name"]))
        if variant == "subgraph":
            u = registry.resolve(registry.SCALAR_FIELDS, "scalar field", d["u"], d.get("params"))
            return dommod.Subgraph(u=u, r=float(d["r"]))
        if variant == "tube":
            if "hull" in d:
                poly = dommod.ConvexPolygon(vertices=np.asarray(d["hull"], dtype=float))
                return dommod.Tube(base=poly, name="hull")
            pred = registry.resolve(registry.PREDICATES, "predicate", d["base"], d.get("params"))
            return dommod.Tube(base=pred, name=str(d["base"]))
        if variant == "ellipsoid":
            return dommod.Ellipsoid(c=np.asarray(d["c"], dtype=float), r=float(d["r"]))
        if variant == "sublevel":
            rho = registry.resolve(registry.SCALAR_FIELDS, "scalar field",
                                   d["rho"], d.get("params"))
            return dommod.Sublevel(rho=rho, level=float(d["level"]))
        if variant == "half_plane":
            return dommod.HalfPlane(normal=np.asarray(d["normal"], dtype=float),
                                    offset=float(d["offset"]))
        if variant == "box":
            return dommod.box_neighbourhood(eps=float(d["eps"]), delta=float(d["delta"]))
        if variant == "intersection":
            parts = tuple(domain_from_dict(part) for part in d["parts"])
            return dommod.Intersection(parts=parts)
    except KeyError as exc:
        raise InputError(f"domain spec missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad domain spec: {exc}") from exc
    raise InputError(f"unknown domain variant {variant!r}")


# --- germs and paths -----------------------------------------------------------------

def germ_from_dict(d: Json) -> contmod.Germ:
    try:
        if "named" in d:
            name = d["named"]
            if name not in contmod.GERM_BUILDERS:
                raise InputError(f"unknown germ name {name!r}; "
                                 f"known: {sorted(contmod.GERM_BUILDERS)}")
            at = _cx(d["at"], "at")
            order = int(d.get("order", contmod.DEFAULT_ORDER))
            return contmod.GERM_BUILDERS[name](at, order)
        center = _cx(d["center"], "center")
        coeffs = np.array([_cx(c, f"coeffs[{i}]") for i, c in enumerate(d["coeffs"])],
                          dtype=complex)
        return contmod.Germ(center=center, coeffs=coeffs, radius=float(d["radius"]))
    except KeyError as exc:
        raise InputError(f"germ spec missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad germ spec: {exc}") from exc


def germ_to_dict(g: contmod.Germ) -> Json:
    return {
        "center": [g.center.real, g.center.imag],
        "coeffs": [[c.real, c.imag] for c in g.coeffs],
        "radius": g.radius,
    }


def path_from_dict(d: Json) -> contmod.PathSpec:
    try:
        if "circle" in d:
            c = d["circle"]
            return contmod.circle_loop(center=_cx(c["center"], "circle.center"),
                                       radius=float(c["radius"]),
                                       n_points=int(c.get("points", 64)),
                                       base_angle=float(c.get("base_angle", 0.0)),
                                       clockwise=bool(c.get("clockwise", False)),
                                       turns=int(c.get("turns", 1)))
        waypoints = [_cx(w, f"waypoints[{i}]") for i, w in enumerate(d["waypoints"])]
        return contmod.PathSpec(waypoints=tuple(waypoints),
                                description=str(d.get("description", "")))
    except KeyError as exc:
        raise InputError(f"path spec missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad path spec: {exc}") from exc
