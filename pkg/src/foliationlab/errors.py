"""Exception types shared across the lab.

Every failure mode that names a violated hypothesis gets its own class so
callers (and the HTTP layer) can map failures to precise messages.
"""


class LabError(Exception):
    """Base class for all foliationlab errors."""


class InputError(LabError):
    """Malformed user input (JSON specs, parameter-order violations)."""


# --- numerical differentiation ---------------------------------------------

class NonFiniteSample(LabError):
    """A finite-difference stencil evaluation returned NaN/inf."""


class CriticalPointOfAlpha(LabError):
    """Gradient norm below the configured floor; ratio would be meaningless."""


# --- flows -------------------------------------------------------------------

class BlowUp(LabError):
    """Trajectory left the working ball before reaching the requested time."""

    def __init__(self, message, t_reached=None, point=None):
        super().__init__(message)
        self.t_reached = t_reached
        self.point = point


class UndefinedAtPoint(LabError):
    """Field evaluation failed or went non-finite along the trajectory."""


class SegmentEscape(LabError):
    """A transported sample left a field's validity region mid-segment."""


class EquilibriumSeed(LabError):
    """Seed point is (numerically) an equilibrium of the field."""


# --- domains ------------------------------------------------------------------

class EmptyBase(LabError):
    """No sample of the tube base fell inside the window."""


# --- holomorphicity test bench -------------------------------------------------

class NotConserved(LabError):
    """The candidate invariant varies along sampled orbits."""


class VanishingG(LabError):
    """|g| fell below the floor; the antiholomorphic factorization degenerates."""


class NotSubmersion(LabError):
    """The level function has a (near-)critical point inside the chart window."""


class ObstructionNotLevelConstant(LabError):
    """The Laplacian/gradient ratio varies within a level set beyond tolerance."""


class DegenerateForm(LabError):
    """Real Hessian of the quadratic form has a near-zero eigenvalue."""


class ZeroCoefficient(LabError):
    """Diagonal real-linear field requires both coefficients nonzero."""


# --- boundary-singularity pipeline ---------------------------------------------

class NotCritical(LabError):
    """Gradient at the origin is too large to be a critical point."""


class Degenerate(LabError):
    """Quadratic jet has a near-zero eigenvalue."""


class NotHermitian(LabError):
    """Quadratic jet has a non-negligible harmonic part."""


class IsMinimum(LabError):
    """All jet eigenvalues positive: the construction needs a negative direction."""


class IsMaximum(LabError):
    """All jet eigenvalues negative: no positive direction to build the ellipsoid scale."""


class NoEntryPoints(LabError):
    """Boundary sampling found no inward-pointing points (degenerate radius)."""


# --- analytic continuation -------------------------------------------------------

class StepTooLarge(LabError):
    """Recentering step exceeds half the validity radius (or subdivision limit hit)."""


class SingularityEncountered(LabError):
    """Estimated convergence radius collapsed: the path ran into a branch point."""


class SliceNotInvariant(LabError):
    """The field does not preserve the complex line hosting the germ variable."""


# --- linear fields -----------------------------------------------------------------

class SingularMatrix(LabError):
    """Matrix is numerically singular; the linear-field analysis needs GL(n)."""
