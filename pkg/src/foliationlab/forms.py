"""Real quadratic forms on C^n split into hermitian and harmonic parts.

sigma(z) = conj(z)^T H z + Re(z^T S z) with H hermitian and S symmetric.
The gradient of the hermitian part is complex-linear, the gradient of the
harmonic part is conjugate-linear; both are encoded in the constant real
Hessian, which is what the flow and classifier code consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coords import as_point, from_complex, to_complex

_SYM_TOL = 1e-12


def _as_square(m, n=None) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if n is not None and a.shape[0] != n:
        raise ValueError(f"expected {n}x{n} matrix, got {a.shape}")
    return a


@dataclass(frozen=True)
class QuadraticForm:
    """Pair (H hermitian, S symmetric) defining a real quadratic form on C^n.

    The constructor symmetrizes inputs that are within 1e-12 of being
    hermitian/symmetric and rejects anything further away.
    """

    H: np.ndarray
    S: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        H = _as_square(self.H)
        S = _as_square(self.S, H.shape[0])
        if np.max(np.abs(H - H.conj().T)) > _SYM_TOL * max(1.0, np.max(np.abs(H))):
            raise ValueError("H is not hermitian within tolerance")
        if np.max(np.abs(S - S.T)) > _SYM_TOL * max(1.0, np.max(np.abs(S))):
            raise ValueError("S is not symmetric within tolerance")
        H = 0.5 * (H + H.conj().T)
        S = 0.5 * (S + S.T)
        H.flags.writeable = False
        S.flags.writeable = False
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "n", H.shape[0])

    # --- evaluation ----------------------------------------------------

    def value_complex(self, z) -> float:
        z = np.asarray(z, dtype=complex).ravel()
        herm = np.vdot(z, self.H @ z)          # conj(z) . H z, real for hermitian H
        harm = z @ (self.S @ z)
        return float(herm.real + harm.real)

    def value(self, v) -> float:
        """Evaluate on a point given in real coordinates."""
        return self.value_complex(to_complex(as_point(v)))

    def __call__(self, v) -> float:
        return self.value(v)

    # --- gradient ------------------------------------------------------

    def gradient_complex(self, z) -> np.ndarray:
        """Complex representation of the real gradient: 2 (H z + conj(S) conj(z))."""
        z = np.asarray(z, dtype=complex).ravel()
        return 2.0 * (self.H @ z + self.S.conj() @ z.conj())

    def gradient(self, v) -> np.ndarray:
        return from_complex(self.gradient_complex(to_complex(as_point(v))))

    def real_hessian(self) -> np.ndarray:
        """Constant 2n x 2n real Hessian (grad is linear: grad(v) = Hess v)."""
        dim = 2 * self.n
        hess = np.empty((dim, dim))
        for j in range(dim):
            e = np.zeros(dim)
            e[j] = 1.0
            hess[:, j] = self.gradient(e)
        return 0.5 * (hess + hess.T)

    def hessian_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.real_hessian())

    def is_nondegenerate(self, tol: float = 1e-9) -> bool:
        return bool(np.min(np.abs(self.hessian_eigenvalues())) > tol)

    # --- norms / predicates ---------------------------------------------

    def hermitian_norm(self) -> float:
        return float(np.linalg.norm(self.H))

    def harmonic_norm(self) -> float:
        return float(np.linalg.norm(self.S))


def hermitian_diagonal(eigenvalues) -> QuadraticForm:
    """Form sum_j a_j |z_j|^2 with no harmonic part."""
    a = np.asarray(eigenvalues, dtype=float).ravel()
    return QuadraticForm(H=np.diag(a.astype(complex)), S=np.zeros((a.size, a.size), dtype=complex))


def harmonic_1d(b: complex) -> QuadraticForm:
    """Form Re(b z^2) on C."""
    return QuadraticForm(H=np.zeros((1, 1), dtype=complex), S=np.array([[b]], dtype=complex))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Gaussian matrix."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def unitary_change(form: QuadraticForm, u: np.ndarray) -> QuadraticForm:
    """The form of z |-> sigma(U z): (H, S) -> (U* H U, U^T S U)."""
    u = _as_square(u, form.n)
    return QuadraticForm(H=u.conj().T @ form.H @ u, S=u.T @ form.S @ u)
