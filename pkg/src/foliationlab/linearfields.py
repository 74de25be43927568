"""Spectral utilities for linear fields z' = A z.

Compact orbits of a linear field exist exactly on the purely imaginary,
commensurable part of the spectrum; this module predicts them from the
eigendecomposition (continued-fraction rational detection on frequency
ratios, honest Unknown beyond the denominator bound) and cross-checks the
prediction against numerical recurrence detection.  It also certifies the
"every orbit meets the domain in a nonempty interval" hypothesis under
which envelopes inherit the same orbit pattern (the star-shaped picture,
generalized), flagging compact orbits that escape the domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, pi
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import domains as dommod, fields as fieldmod
from .coords import as_point, to_complex
from .errors import EquilibriumSeed, SingularMatrix

COMMENSURABLE = "Commensurable"
INCOMMENSURABLE = "Incommensurable"
UNKNOWN = "Unknown"

_IMAG_TOL = 1e-9
_DENOMINATOR_BOUND = 10 ** 6
_RATIO_MATCH = 1e-9


@dataclass
class LinearFieldAnalysis:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray]
    diagonalizable: bool
    imaginary_spectrum_indices: List[int]
    commensurability: str
    common_period: Optional[float]

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def field(self) -> fieldmod.LinearComplex:
        return fieldmod.LinearComplex(matrix=self.matrix)

    def to_dict(self):
        return {
            "eigenvalues": [[float(l.real), float(l.imag)] for l in self.eigenvalues],
            "diagonalizable": self.diagonalizable,
            "imaginary_spectrum_indices": list(self.imaginary_spectrum_indices),
            "commensurability": self.commensurability,
            "common_period": self.common_period,
        }


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _common_period(omegas: np.ndarray) -> Tuple[str, Optional[float]]:
    """Smallest T > 0 with omega_j T in 2 pi Z for all j, if ratios are rational."""
    omegas = np.abs(np.asarray(omegas, dtype=float))
    base = float(np.min(omegas))
    denoms = []
    numers = []
    for w in omegas:
        ratio = w / base
        frac = Fraction(ratio).limit_denominator(_DENOMINATOR_BOUND)
        if abs(ratio - float(frac)) > _RATIO_MATCH / frac.denominator:
            return INCOMMENSURABLE, None
        numers.append(frac.numerator)
        denoms.append(frac.denominator)
    k = 1
    for d in denoms:
        k = _lcm(k, d)
    # T = 2 pi k / base gives omega_j T = 2 pi k p_j / q_j, integral by choice of k;
    # shrink by the gcd of the resulting winding numbers
    windings = [k * p // q for p, q in zip(numers, denoms)]
    g = 0
    for w in windings:
        g = gcd(g, w)
    k_min = k // g if g else k
    return COMMENSURABLE, 2.0 * pi * k_min / base


def analyze_linear(A) -> LinearFieldAnalysis:
    """Eigendecomposition plus compact-orbit bookkeeping for z' = A z.

    Requires A nonsingular.  Commensurability of the imaginary spectrum is
    decided only up to the denominator bound 10^6; floating input cannot
    settle exact rationality, so Unknown stays an honest verdict for
    non-diagonalizable matrices.
    """
    a = np.asarray(A, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    det = np.linalg.det(a)
    if abs(det) <= 1e-12:
        raise SingularMatrix(f"|det A| = {abs(det):.3e} <= 1e-12")
    eig, vec = np.linalg.eig(a)

    diagonalizable = True
    try:
        cond = np.linalg.cond(vec)
        if not np.isfinite(cond) or cond > 1e10:
            diagonalizable = False
    except np.linalg.LinAlgError:
        diagonalizable = False
    if diagonalizable:
        resid = np.max(np.abs(a @ vec - vec * eig[None, :]))
        if resid > 1e-8 * max(1.0, float(np.max(np.abs(a)))):
            diagonalizable = False

    imag_idx = [int(i) for i in np.where(np.abs(eig.real) < _IMAG_TOL)[0]]

    if not diagonalizable:
        verdict, period = UNKNOWN, None
    elif len(imag_idx) == 0:
        verdict, period = UNKNOWN, None     # nothing rotates; no statement to make
    else:
        omegas = eig.imag[imag_idx]
        if np.any(np.abs(omegas) < _IMAG_TOL):
            verdict, period = UNKNOWN, None  # eigenvalue at 0 contradicts det != 0 anyway
        else:
            verdict, period = _common_period(omegas)

    return LinearFieldAnalysis(matrix=a, eigenvalues=eig,
                               eigenvectors=vec if diagonalizable else None,
                               diagonalizable=diagonalizable,
                               imaginary_spectrum_indices=imag_idx,
                               commensurability=verdict, common_period=period)


def predicted_period(analysis: LinearFieldAnalysis, z, amp_tol: float = 1e-9) -> Optional[float]:
    """Spectral period prediction for the specific orbit through z.

    Only eigendirections actually present in z matter; None when the active
    spectrum is not purely imaginary and commensurable (or prediction is
    unavailable for non-diagonalizable A).
    """
    if not analysis.diagonalizable or analysis.eigenvectors is None:
        return None
    zc = to_complex(as_point(z))
    amps = np.linalg.solve(analysis.eigenvectors, zc)
    active = [i for i in range(analysis.n) if abs(amps[i]) > amp_tol]
    if not active:
        return None                      # equilibrium, no period
    eig = analysis.eigenvalues
    if any(abs(eig[i].real) >= _IMAG_TOL for i in active):
        return None
    verdict, period = _common_period(eig.imag[active])
    return period if verdict == COMMENSURABLE else None


def compact_orbit_test(analysis: LinearFieldAnalysis, z, t_max: float = 50.0,
                       tol: float = 1e-6, cross_check: bool = True,
                       period_tol: float = 1e-5) -> bool:
    """True iff numerical recurrence finds a period <= t_max for the orbit of z.

    When the spectral prediction is available it is cross-checked against
    the detected period.
    """
    z = as_point(z)
    if float(np.linalg.norm(z)) == 0.0:
        raise EquilibriumSeed("origin is an equilibrium of every linear field")
    field = analysis.field()
    try:
        detected = fieldmod.detect_period(field, z, t_max, tol=tol)
    except EquilibriumSeed:
        raise
    if cross_check:
        pred = predicted_period(analysis, z)
        if pred is not None and pred <= t_max:
            if detected is None or abs(detected - pred) > period_tol * max(1.0, pred):
                raise AssertionError(
                    f"spectral prediction {pred!r} disagrees with detection {detected!r}"
                )
    return detected is not None


@dataclass
class IntervalHypothesisReport:
    aggregate: dommod.AggregateReport
    compact_seeds: List[list]
    compact_orbit_escapes: List[list]
    verdict: str

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "compact_seeds": self.compact_seeds,
            "compact_orbit_escapes": self.compact_orbit_escapes,
            "certification": self.aggregate.to_dict(),
        }


def certify_interval_hypothesis(A, domain: dommod.Domain, seeds: Sequence, t_range,
                                n_samples: int = 64, t_max_period: float = 50.0,
                                period_tol: float = 1e-6) -> IntervalHypothesisReport:
    """Check on samples that every orbit meets the domain in a nonempty
    interval, and that detected compact orbits lie entirely inside it.
    """
    analysis = analyze_linear(A)
    field = analysis.field()
    aggregate = dommod.is_interval_domain(field, domain, seeds, t_range, n_samples=n_samples)

    compact_seeds = []
    escapes = []
    for s in seeds:
        s = as_point(s)
        if float(np.linalg.norm(s)) == 0.0:
            continue
        try:
            period = fieldmod.detect_period(field, s, t_max_period, tol=period_tol)
        except EquilibriumSeed:
            continue
        if period is None:
            continue
        compact_seeds.append([float(x) for x in s])
        ts = np.linspace(0.0, period, 256, endpoint=False)
        orbit = field.exact_flow_many(s, ts)
        if not all(domain.contains(p) for p in orbit):
            escapes.append([float(x) for x in s])

    verdict = aggregate.verdict
    if escapes and verdict == dommod.CERTIFIED:
        verdict = dommod.REFUTED
    return IntervalHypothesisReport(aggregate=aggregate, compact_seeds=compact_seeds,
                                    compact_orbit_escapes=escapes, verdict=verdict)
