"""Emulation design for LTI loops: block matrices, LMI check, certificate.

Given a plant  xp' = Ap xp + Bp u,  y = Cp xp  and a stabilizing
controller  xc' = Ac xc + Bc y,  u = Cc xc + Dc y  designed without the
network, the sampled closed loop in the coordinates (x, e) with
x = (xp, xc) and e = (ey, eu) is linear,

    x' = A1 x + B1 e,      e' = A2 x + B2 e,

with block matrices assembled by :func:`assemble`.  A quadratic
certificate V(x) = x^T P x with gains

    W(e) = |e|,  H(x) = |A2 x|,  L = |B2|,  gamma = sqrt(mu),
    alpha(s) = eps2 s^2,  delta(y) = eps1 |y|^2

is valid whenever the block matrix

    [ A1^T P + P A1 + A2^T A2 + eps1 Cbar^T Cbar + eps2 I    P B1 ]
    [ B1^T P                                                -mu I ]

is negative semidefinite (Cbar = [Cp 0]).  :func:`design_certificate`
produces such a (P, mu) constructively, without an external SDP solver:
pick P from a Lyapunov solve with slack rho, then mu just large enough
for the Schur complement, and search rho for the smallest gamma.

For static full-state feedback (y = x, u = K x) only x is transmitted;
the matrices collapse to A1 = A2 = A + B K and B1 = B2 = B K (the sign
of the true error dynamics e' = -(A1 x + B1 e) is immaterial here since
only |A2 x| and |B2| enter the certificate; the simulator restores it).
"""

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import CertificateError, DesignInfeasibleError, DimensionError
from .linalg import (
    as_matrix,
    is_hurwitz,
    is_positive_definite,
    solve_lyapunov,
    spectral_norm,
    sym_eigenvalues,
)
from .model import Certificate

_FEASIBILITY_RTOL = 1e-7


@dataclass(frozen=True)
class LtiPlant:
    """Plant matrices (Ap, Bp, Cp)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", as_matrix(self.A, "plant A"))
        object.__setattr__(self, "B", as_matrix(self.B, "plant B"))
        object.__setattr__(self, "C", as_matrix(self.C, "plant C"))
        n = self.A.shape[0]
        if self.A.shape[1] != n:
            raise DimensionError("plant A must be square")
        if self.B.shape[0] != n:
            raise DimensionError("plant B row count must match A")
        if self.C.shape[1] != n:
            raise DimensionError("plant C column count must match A")

    @property
    def n_p(self):
        return self.A.shape[0]

    @property
    def n_u(self):
        return self.B.shape[1]

    @property
    def n_y(self):
        return self.C.shape[0]


@dataclass(frozen=True)
class LtiController:
    """Dynamic output-feedback controller (Ac, Bc, Cc, Dc); may be static."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", as_matrix(self.A, "controller A"))
        object.__setattr__(self, "B", as_matrix(self.B, "controller B"))
        object.__setattr__(self, "C", as_matrix(self.C, "controller C"))
        object.__setattr__(self, "D", as_matrix(self.D, "controller D"))
        n = self.A.shape[0]
        if self.A.shape[1] != n:
            raise DimensionError("controller A must be square")
        if self.B.shape[0] != n:
            raise DimensionError("controller B row count must match A")
        if self.C.shape[1] != n:
            raise DimensionError("controller C column count must match A")

    @classmethod
    def static(cls, D):
        """A static gain u = D y (no controller state)."""
        D = as_matrix(D, "controller D")
        n_u, n_y = D.shape
        return cls(
            A=np.zeros((0, 0)),
            B=np.zeros((0, n_y)),
            C=np.zeros((n_u, 0)),
            D=D,
        )

    @property
    def n_c(self):
        return self.A.shape[0]

    @property
    def is_static(self):
        return self.n_c == 0


@dataclass(frozen=True)
class ClosedLoopMatrices:
    """The four closed-loop blocks plus the stacked output map."""

    A1: np.ndarray
    B1: np.ndarray
    A2: np.ndarray
    B2: np.ndarray
    Cbar: np.ndarray
    state_feedback: bool = False

    @property
    def n_x(self):
        return self.A1.shape[0]

    @property
    def n_e(self):
        return self.B1.shape[1]


@dataclass(frozen=True)
class LmiCertificate:
    """A candidate (P, eps1, eps2, mu) for the block matrix inequality."""

    P: np.ndarray
    eps1: float
    eps2: float
    mu: float

    def __post_init__(self):
        object.__setattr__(self, "P", as_matrix(self.P, "P"))
        if self.eps1 < 0:
            raise CertificateError("eps1 must be nonnegative")
        if self.eps2 <= 0:
            raise CertificateError("eps2 must be positive")
        if self.mu < 0:
            raise CertificateError("mu must be nonnegative")

    @property
    def gamma(self):
        return sqrt(self.mu)


def _is_identity(m):
    return m.shape[0] == m.shape[1] and np.array_equal(m, np.eye(m.shape[0]))


def assemble(plant: LtiPlant, ctrl: LtiController) -> ClosedLoopMatrices:
    """Build the closed-loop blocks from plant and controller matrices.

    Detects the static full-state-feedback special case (y = x, static
    u = K x) and returns the collapsed matrices for it; otherwise the
    general output-feedback blocks with e = (ey, eu).
    """
    Ap, Bp, Cp = plant.A, plant.B, plant.C
    Ac, Bc, Cc, Dc = ctrl.A, ctrl.B, ctrl.C, ctrl.D
    if Dc.shape != (plant.n_u, plant.n_y):
        raise DimensionError(
            f"controller D has shape {Dc.shape}, expected ({plant.n_u}, {plant.n_y})"
        )
    if ctrl.B.shape[1] != plant.n_y:
        raise DimensionError(
            f"controller B has {ctrl.B.shape[1]} inputs, expected n_y = {plant.n_y}"
        )
    if ctrl.C.shape[0] != plant.n_u:
        raise DimensionError(
            f"controller C has {ctrl.C.shape[0]} outputs, expected n_u = {plant.n_u}"
        )

    Acl = Ap + Bp @ Dc @ Cp

    if ctrl.is_static and _is_identity(Cp):
        # Full state transmitted, controller co-located with the actuator:
        # e = xhat - x, so x' = (A + BK)(x) + BK e and e' = -x'.
        BK = Bp @ Dc
        return ClosedLoopMatrices(
            A1=Acl,
            B1=BK,
            A2=Acl.copy(),
            B2=BK.copy(),
            Cbar=np.eye(plant.n_p),
            state_feedback=True,
        )

    A1 = np.block([[Acl, Bp @ Cc], [Bc @ Cp, Ac]])
    B1 = np.block([[Bp @ Dc, Bp], [Bc, np.zeros((ctrl.n_c, plant.n_u))]])
    A2 = np.block([[-Cp @ Acl, -Cp @ Bp @ Cc], [-Cc @ Bc @ Cp, -Cc @ Ac]])
    B2 = np.block(
        [[-Cp @ Bp @ Dc, -Cp @ Bp], [-Cc @ Bc, np.zeros((plant.n_u, plant.n_u))]]
    )
    Cbar = np.block([[Cp, np.zeros((plant.n_y, ctrl.n_c))]])
    return ClosedLoopMatrices(A1=A1, B1=B1, A2=A2, B2=B2, Cbar=Cbar)


def _lmi_blocks(clm: ClosedLoopMatrices, cand: LmiCertificate):
    P = 0.5 * (cand.P + cand.P.T)
    if P.shape != (clm.n_x, clm.n_x):
        raise DimensionError(
            f"P has shape {P.shape}, expected ({clm.n_x}, {clm.n_x})"
        )
    S = (
        clm.A1.T @ P
        + P @ clm.A1
        + clm.A2.T @ clm.A2
        + cand.eps1 * (clm.Cbar.T @ clm.Cbar)
        + cand.eps2 * np.eye(clm.n_x)
    )
    return S, P @ clm.B1


def lmi_residual(clm: ClosedLoopMatrices, cand: LmiCertificate) -> float:
    """Largest eigenvalue of the certificate block matrix.

    The candidate is feasible iff the value is <= 0 (up to a small
    numerical tolerance chosen by the caller).
    """
    S, PB = _lmi_blocks(clm, cand)
    M = np.block([[S, PB], [PB.T, -cand.mu * np.eye(clm.n_e)]])
    return float(sym_eigenvalues(M).max())


def lmi_schur_residual(clm: ClosedLoopMatrices, cand: LmiCertificate) -> float:
    """Largest eigenvalue of the Schur-complement form (mu > 0 required).

    Feasibility of the block matrix is equivalent to feasibility of
    S + (1/mu) P B1 B1^T P <= 0; the two residuals agree in sign.
    """
    if cand.mu <= 0:
        raise CertificateError("Schur form requires mu > 0")
    S, PB = _lmi_blocks(clm, cand)
    return float(sym_eigenvalues(S + (PB @ PB.T) / cand.mu).max())


def _feasibility_scale(clm, cand):
    return max(
        1.0,
        spectral_norm(clm.A2.T @ clm.A2) + cand.eps2,
        cand.mu,
    )


def is_feasible(clm: ClosedLoopMatrices, cand: LmiCertificate, rtol=_FEASIBILITY_RTOL):
    return lmi_residual(clm, cand) <= rtol * _feasibility_scale(clm, cand)


def default_slack_grid(clm: ClosedLoopMatrices, eps1, eps2, n=20):
    """Log-spaced slack values spanning [1e-3, 1e3] times the problem scale."""
    q0 = clm.A2.T @ clm.A2 + eps1 * (clm.Cbar.T @ clm.Cbar) + eps2 * np.eye(clm.n_x)
    scale = max(spectral_norm(q0), np.finfo(float).tiny)
    return list(scale * np.logspace(-3, 3, n))


def design_certificate(
    clm: ClosedLoopMatrices, eps1=1e-2, eps2=1e-2, slack_grid=None
) -> LmiCertificate:
    """Constructively produce a feasible (P, eps1, eps2, mu).

    For each slack rho, P(rho) solves the Lyapunov equation with
    right-hand side A2^T A2 + eps1 Cbar^T Cbar + eps2 I + rho I, and
    mu(rho) = |B1^T P(rho)|^2 / rho makes the Schur complement exactly
    balance.  The candidate with the smallest gamma = sqrt(mu) wins.
    The resulting gamma can exceed what a full SDP solve would find;
    it is always feasible.
    """
    if eps1 < 0:
        raise CertificateError("eps1 must be nonnegative")
    if eps2 <= 0:
        raise CertificateError("eps2 must be positive")
    if not is_hurwitz(clm.A1):
        raise DesignInfeasibleError(
            "A1 is not Hurwitz: the emulated controller does not stabilize the loop"
        )
    if slack_grid is None:
        slack_grid = default_slack_grid(clm, eps1, eps2)

    base = clm.A2.T @ clm.A2 + eps1 * (clm.Cbar.T @ clm.Cbar) + eps2 * np.eye(clm.n_x)
    best = None
    for rho in slack_grid:
        if rho <= 0:
            raise ValueError("slack grid entries must be positive")
        P = solve_lyapunov(clm.A1, base + rho * np.eye(clm.n_x))
        mu = spectral_norm(clm.B1.T @ P) ** 2 / rho
        if best is None or mu < best[0]:
            best = (mu, P, rho)

    mu, P, _rho = best
    cand = LmiCertificate(P=P, eps1=eps1, eps2=eps2, mu=mu)
    if not is_feasible(clm, cand):
        raise DesignInfeasibleError(
            f"constructed candidate fails the feasibility check "
            f"(residual {lmi_residual(clm, cand):.3e})"
        )
    return cand


def extract_assumption(clm: ClosedLoopMatrices, cand: LmiCertificate) -> Certificate:
    """Turn a feasible LMI candidate into the quadratic certificate."""
    if not is_feasible(clm, cand):
        raise CertificateError(
            f"candidate is not feasible (residual {lmi_residual(clm, cand):.3e})"
        )
    if not is_positive_definite(cand.P):
        raise CertificateError("P must be positive definite")
    P = 0.5 * (cand.P + cand.P.T)
    A2, B2, Cbar = clm.A2, clm.B2, clm.Cbar
    eigs = sym_eigenvalues(P)
    p_lo, p_hi = float(eigs[0]), float(eigs[-1])
    eps1, eps2 = cand.eps1, cand.eps2
    L = spectral_norm(B2)
    gamma = cand.gamma

    return Certificate(
        V=lambda x: float(x @ P @ x),
        W=lambda e: float(np.linalg.norm(e)),
        H=lambda x: float(np.linalg.norm(A2 @ x)),
        delta=lambda y: eps1 * float(np.atleast_1d(y) @ np.atleast_1d(y)),
        alpha=lambda s: eps2 * s * s,
        gamma=gamma,
        L=L,
        alpha_lower=lambda s: p_lo * s * s,
        alpha_upper=lambda s: p_hi * s * s,
        n_x=clm.n_x,
        n_e=clm.n_e,
        n_y=Cbar.shape[0],
        y_of_x=lambda x: Cbar @ x,
        name="lti-quadratic",
    )
