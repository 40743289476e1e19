"""Closed-loop linear model and Lyapunov certification of the error metric.

With exact inversion the translational error dynamics are linear:
positions integrate velocities, velocities follow the virtual input,
yaw is first order. certify() solves A_c' P + P A_c = -Q for the gain
closed loop and checks the pieces a projection metric needs: P and Q
symmetric positive definite and a tiny residual.
"""

from __future__ import annotations

from dataclasses import dataclass
import warnings

import numpy as np

from .tracking import Gains


class NonHurwitzError(ValueError):
    """Closed-loop matrix has an eigenvalue with nonnegative real part."""


class CertificateError(ValueError):
    """Lyapunov certificate failed a positivity, symmetry or residual check."""


class IllConditionedLyapunovWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LinearSystem:
    """Error-state model z' = A z + B mu and the gain closed loop A_c = A + B K."""

    A: np.ndarray
    B: np.ndarray
    K: np.ndarray
    A_c: np.ndarray
    with_integral: bool


@dataclass(frozen=True)
class LyapunovCertificate:
    gains: Gains
    with_integral: bool
    A_c: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    residual: float
    min_eig_P: float
    min_eig_Q: float

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "with_integral": self.with_integral,
            "gains": {"k_p": self.gains.k_p, "k_d": self.gains.k_d,
                      "k_psi": self.gains.k_psi, "k_i": self.gains.k_i,
                      "eta_limit": self.gains.eta_limit},
            "A_c": self.A_c.tolist(),
            "Q": self.Q.tolist(),
            "P": self.P.tolist(),
            "residual": self.residual,
            "min_eig_P": self.min_eig_P,
            "min_eig_Q": self.min_eig_Q,
            "eig_P": sorted(np.linalg.eigvalsh(self.P).tolist()),
        }


def build_closed_loop(gains: Gains, with_integral: bool = False) -> LinearSystem:
    """Error-state matrices for the linearized loop.

    State ordering is [p(3), v(3), psi] (7 states), extended with the
    integral state eta(3) appended when with_integral is set (10 states).
    Inputs are [mu_p(3), mu_psi].
    """
    n = 10 if with_integral else 7
    A = np.zeros((n, n))
    A[0:3, 3:6] = np.eye(3)
    B = np.zeros((n, 4))
    B[3:6, 0:3] = np.eye(3)
    B[6, 3] = 1.0
    K = np.zeros((4, n))
    K[0:3, 0:3] = -gains.k_p * np.eye(3)
    K[0:3, 3:6] = -gains.k_d * np.eye(3)
    K[3, 6] = -gains.k_psi
    if with_integral:
        A[7:10, 0:3] = np.eye(3)  # eta' = position error
        K[0:3, 7:10] = -gains.k_i * np.eye(3)
    A_c = A + B @ K
    return LinearSystem(A=A, B=B, K=K, A_c=A_c, with_integral=with_integral)


def solve_lyapunov(a_c: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Solve A_c' P + P A_c = -Q by a dense vectorized linear solve.

    Small systems only (n <= 10 here), so the n^2 x n^2 Kronecker system
    is solved directly. Requires a_c Hurwitz; warns when the system is
    ill conditioned. The result is symmetrized before returning.
    """
    a_c = np.asarray(a_c, dtype=float)
    q = np.asarray(q, dtype=float)
    n = a_c.shape[0]
    if a_c.shape != (n, n) or q.shape != (n, n):
        raise ValueError("a_c and q must be square and of equal size")
    eigs = np.linalg.eigvals(a_c)
    if eigs.real.max() >= 0.0:
        raise NonHurwitzError(
            f"closed loop not Hurwitz: max real part {eigs.real.max():.6g}")
    eye = np.eye(n)
    M = np.kron(a_c.T, eye) + np.kron(eye, a_c.T)
    cond = np.linalg.cond(M)
    if cond > 1e12:
        warnings.warn(f"Lyapunov system condition number {cond:.3e}",
                      IllConditionedLyapunovWarning)
    vec_p = np.linalg.solve(M, -q.reshape(n * n))
    P = vec_p.reshape(n, n)
    return 0.5 * (P + P.T)


def _is_positive_definite(S: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(S)
        return True
    except np.linalg.LinAlgError:
        return False


def _state_blocks(n: int):
    # per-axis chains plus the yaw scalar; axis i couples p_i, v_i (and eta_i)
    if n == 7:
        return [(i, 3 + i) for i in range(3)] + [(6,)]
    return [(i, 3 + i, 7 + i) for i in range(3)] + [(6,)]


def _respects_blocks(S: np.ndarray, blocks) -> bool:
    mask = np.zeros_like(S, dtype=bool)
    for b in blocks:
        for i in b:
            for j in b:
                mask[i, j] = True
    off = np.abs(S[~mask])
    scale = max(np.abs(S).max(), 1.0)
    return off.size == 0 or off.max() <= 1e-12 * scale


def certify(gains: Gains, with_integral: bool = False,
            q: np.ndarray | None = None) -> LyapunovCertificate:
    """Solve for P under the gain closed loop and verify the certificate.

    Raises NonHurwitzError when the gains close an unstable loop (for the
    integral-augmented loop this is exactly the k_p*k_d > k_i Routh
    condition per axis) and CertificateError when any validity check
    fails. Q defaults to the identity.
    """
    sys = build_closed_loop(gains, with_integral)
    n = sys.A_c.shape[0]
    q = np.eye(n) if q is None else np.asarray(q, dtype=float)
    if q.shape != (n, n):
        raise ValueError(f"Q must be {n}x{n} for with_integral={with_integral}")
    if not np.allclose(q, q.T, rtol=0.0, atol=1e-12 * max(np.abs(q).max(), 1.0)):
        raise CertificateError("Q must be symmetric")
    if not _is_positive_definite(q):
        raise CertificateError("Q must be positive definite")

    P = solve_lyapunov(sys.A_c, q)
    scale = max(float(np.linalg.norm(q, "fro")), 1e-300)
    residual = float(np.linalg.norm(sys.A_c.T @ P + P @ sys.A_c + q, "fro"))
    if residual > 1e-9 * scale:
        raise CertificateError(f"Lyapunov residual {residual:.3e} too large")
    sym_err = float(np.abs(P - P.T).max())
    if sym_err > 1e-12 * max(np.abs(P).max(), 1.0):
        raise CertificateError(f"P asymmetric by {sym_err:.3e}")
    if not _is_positive_definite(P):
        raise CertificateError("P is not positive definite")
    blocks = _state_blocks(n)
    if _respects_blocks(q, blocks) and not _respects_blocks(P, blocks):
        raise CertificateError("P couples axes that Q leaves uncoupled")

    return LyapunovCertificate(
        gains=gains, with_integral=with_integral, A_c=sys.A_c, Q=q, P=P,
        residual=residual,
        min_eig_P=float(np.linalg.eigvalsh(P).min()),
        min_eig_Q=float(np.linalg.eigvalsh(q).min()),
    )


def default_projection_metric(gains: Gains) -> np.ndarray:
    """Projection metric: P certified for the 7-state loop with Q = I."""
    return certify(gains, with_integral=False).P
