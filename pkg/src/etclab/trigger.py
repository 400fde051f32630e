"""Transmission scheduling: dwell-time ceiling and flow/jump membership.

The central quantity is the maximum allowable sampling period
masp(gamma, L): the largest inter-transmission time that time-driven
sampling could tolerate for a loop certified with gains (gamma, L).
The enforced dwell time T must be chosen strictly below it.

masp has a closed form with three branches,

    (1/(L r)) * arctan(r)    for gamma > L,   r = sqrt((gamma/L)^2 - 1)
    1/L                      for gamma = L
    (1/(L r)) * arctanh(r)   for gamma < L,   r = sqrt(1 - (gamma/L)^2)

and coincides with the limit of the transit time of a scalar comparison
ODE,

    zeta' = -2 L zeta - lam (zeta^2 + 1),   zeta(0) = 1/theta,

where lam = sqrt(gamma^2 + eta): the time zeta takes to fall from
1/theta to theta tends to masp(gamma, L) as (theta, eta) -> (0, 0).
``zeta_time`` computes that transit time numerically and doubles as an
independent cross-check of the closed form.

The module also implements membership tests for the flow set C and the
jump set D in four triggering modes:

    output-feedback   C: gamma^2 W(e)^2 <= delta(y)  or  tau in [0, T]
    state-feedback    C: gamma^2 W(e)^2 <= sigma (alpha(|x|) + H(x)^2
                         + delta(x))  or  tau in [0, T]
    pure-event        the state-feedback rule with T = 0 (baseline)
    periodic          C: tau in [0, T] (time-driven baseline)

Equality cases belong to both C and D; the simulator's jump policy
restores determinism.
"""

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError
from .model import Certificate, HybridState

MODES = ("output-feedback", "state-feedback", "pure-event", "periodic")

# Fraction of the linearized RK4 stability limit used for automatic
# step selection when integrating the comparison ODE.
_ZETA_STEP_SAFETY = 0.25


def masp(gamma, L):
    """Maximum allowable sampling period for gains (gamma, L).

    Degenerate cases: L = 0 returns the analytic limit pi/(2 gamma);
    gamma = 0 with L > 0 returns ``math.inf`` (the arctanh branch
    diverges); gamma = L = 0 is an error since the gains then carry no
    stabilizing information.
    """
    if gamma < 0 or L < 0:
        raise ValueError("masp: gamma and L must be nonnegative")
    if gamma == 0 and L == 0:
        raise ConfigError("masp is undefined for gamma = L = 0")
    if L == 0:
        return math.pi / (2.0 * gamma)
    if gamma == 0:
        return math.inf
    ratio = gamma / L
    if ratio > 1.0:
        r = math.sqrt(ratio * ratio - 1.0)
        return math.atan(r) / (L * r)
    if ratio < 1.0:
        r = math.sqrt(1.0 - ratio * ratio)
        return math.atanh(r) / (L * r)
    return 1.0 / L


@dataclass(frozen=True)
class ZetaParams:
    """Parameters (theta, eta) of the comparison ODE."""

    theta: float
    eta: float

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")
        if self.eta <= 0.0:
            raise ValueError("eta must be positive")

    def lam(self, gamma):
        """The ODE coefficient lam = sqrt(gamma^2 + eta)."""
        return math.sqrt(gamma * gamma + self.eta)


def _auto_zeta_step(L, lam, z0):
    # Quarter of the RK4 real-axis stability bound at the (stiffest)
    # initial point, where the linearized rate is 2 L + 2 lam z0.
    return _ZETA_STEP_SAFETY * 2.785 / (2.0 * L + 2.0 * lam * z0 + lam)


def _zeta_rk4(z, h, twoL, lam):
    k1 = -twoL * z - lam * (z * z + 1.0)
    z2 = z + 0.5 * h * k1
    k2 = -twoL * z2 - lam * (z2 * z2 + 1.0)
    z3 = z + 0.5 * h * k2
    k3 = -twoL * z3 - lam * (z3 * z3 + 1.0)
    z4 = z + h * k3
    k4 = -twoL * z4 - lam * (z4 * z4 + 1.0)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def zeta_time(gamma, L, zp, step=None):
    """Transit time of the comparison ODE from 1/theta down to theta.

    Fixed-step RK4; the crossing is then located by bisection inside
    the final step to a tolerance of step * 1e-3.  When ``step`` is not
    given, a step well inside the stability region of the stiff initial
    transient is chosen automatically.  The transit time is finite for
    every valid parameter set because the right-hand side is strictly
    negative.
    """
    if gamma < 0 or L < 0:
        raise ValueError("zeta_time: gamma and L must be nonnegative")
    lam = zp.lam(gamma)
    z0 = 1.0 / zp.theta
    target = zp.theta
    if step is None:
        step = _auto_zeta_step(L, lam, z0)
    if step <= 0:
        raise ValueError("zeta_time: step must be positive")

    twoL = 2.0 * L
    h = step
    h6 = h / 6.0
    h2 = 0.5 * h
    t = 0.0
    z = z0
    # Inlined RK4 loop; this is the hot path.
    while True:
        k1 = -twoL * z - lam * (z * z + 1.0)
        za = z + h2 * k1
        k2 = -twoL * za - lam * (za * za + 1.0)
        zb = z + h2 * k2
        k3 = -twoL * zb - lam * (zb * zb + 1.0)
        zc = z + h * k3
        k4 = -twoL * zc - lam * (zc * zc + 1.0)
        zn = z + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if zn <= target:
            break
        z = zn
        t += h

    # Bisect the crossing inside [t, t + h].
    lo, hi = 0.0, h
    tol = step * 1e-3
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _zeta_rk4(z, mid, twoL, lam) <= target:
            hi = mid
        else:
            lo = mid
    return t + 0.5 * (lo + hi)


class ZetaTracker:
    """Incremental integrator for the comparison ODE.

    Used by the R-monitor to evaluate zeta(tau) along a solution
    segment.  Once zeta crosses zero it is clamped there: only the
    positive part of zeta ever enters R.  Substeps adapt to the current
    zeta, so the stiff start (zeta = 1/theta) does not throttle the
    whole segment.
    """

    def __init__(self, gamma, L, zp):
        self.lam = zp.lam(gamma)
        self.twoL = 2.0 * L
        self.z = 1.0 / zp.theta
        self.dead = False

    def advance(self, dt):
        """Advance by dt >= 0 and return max(zeta, 0)."""
        if self.dead or dt <= 0.0:
            return 0.0 if self.dead else self.z
        remaining = dt
        z = self.z
        twoL, lam = self.twoL, self.lam
        while remaining > 0.0:
            cap = _ZETA_STEP_SAFETY * 2.785 / (twoL + 2.0 * lam * max(z, 1.0) + lam)
            h = remaining if remaining < cap else cap
            z = _zeta_rk4(z, h, twoL, lam)
            remaining -= h
            if z <= 0.0:
                self.dead = True
                self.z = 0.0
                return 0.0
        self.z = z
        return z


@dataclass(frozen=True)
class TriggerConfig:
    """When to transmit: mode, dwell time T and event scaling sigma."""

    mode: str
    T: float = 0.0
    sigma: Optional[float] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown trigger mode {self.mode!r}, expected one of {MODES}")
        if self.mode == "pure-event":
            if self.T != 0.0:
                raise ConfigError("pure-event mode requires T == 0")
        elif self.T <= 0.0:
            raise ConfigError(f"{self.mode} mode requires a dwell time T > 0")
        if self.mode in ("state-feedback", "pure-event"):
            if self.sigma is None or not 0.0 < self.sigma < 1.0:
                raise ConfigError(f"{self.mode} mode requires sigma in (0, 1)")

    def validate_against(self, cert: Certificate):
        """Check T against the dwell-time ceiling of the certificate."""
        if self.mode == "pure-event":
            return
        ceiling = masp(cert.gamma, cert.L)
        if not self.T < ceiling:
            raise ConfigError(
                f"dwell time exceeds MASP: T = {self.T:g} but "
                f"masp(gamma={cert.gamma:g}, L={cert.L:g}) = {ceiling:g}"
            )


def event_function(cert: Certificate, cfg: TriggerConfig):
    """The event excess h(x, e): jumps become possible once h >= 0.

    Returns None for periodic mode (which jumps on the clock alone).
    """
    g2 = cert.gamma * cert.gamma
    if cfg.mode == "output-feedback":

        def h(x, e):
            w = cert.W(e)
            return g2 * w * w - cert.delta(cert.y_of_x(x))

        return h
    if cfg.mode in ("state-feedback", "pure-event"):
        if cert.n_y != cert.n_x:
            raise ConfigError(
                f"{cfg.mode} mode requires a full-state output (n_y == n_x), "
                f"but the certificate has n_y = {cert.n_y}, n_x = {cert.n_x}"
            )
        sigma = cfg.sigma

        def h(x, e):
            w = cert.W(e)
            hx = cert.H(x)
            nx = math.sqrt(float(x @ x))
            return g2 * w * w - sigma * (cert.alpha(nx) + hx * hx + cert.delta(x))

        return h
    return None


def in_flow(q: HybridState, cert: Certificate, cfg: TriggerConfig):
    """Membership of q in the flow set C of the configured mode."""
    if cfg.mode == "periodic":
        return q.tau <= cfg.T
    h = event_function(cert, cfg)(q.x, q.e)
    if cfg.mode == "pure-event":
        return h <= 0.0
    return h <= 0.0 or q.tau <= cfg.T


def in_jump(q: HybridState, cert: Certificate, cfg: TriggerConfig, tol=0.0):
    """Membership of q in the jump set D of the configured mode.

    ``tol`` relaxes the equality comparisons, which is what sampled
    trajectory states need; the default is the exact set definition.
    """
    if cfg.mode == "periodic":
        return abs(q.tau - cfg.T) <= tol
    h = event_function(cert, cfg)(q.x, q.e)
    if cfg.mode == "pure-event":
        return h >= -tol
    on_boundary = abs(h) <= tol
    return (on_boundary and q.tau >= cfg.T - tol) or (
        h >= -tol and abs(q.tau - cfg.T) <= tol
    )
