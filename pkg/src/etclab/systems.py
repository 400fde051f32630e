"""Benchmark closed loops, their certificates, and a sampled checker.

Two benchmarks ship with the package:

``lorenz_loop``
    The controlled Lorenz convection model under the static output
    feedback u = -((p1/p2) a + b) y with y = x1, together with the
    published analytic certificate (V = p1 x1^2 + p2 x2^2 + p2 x3^2,
    W = |e|, H = a(|x1| + |x2|), L = 0).  Only the output is
    transmitted, so the network error is scalar.  Note: the published
    gains do not actually satisfy the V-decay inequality for the
    standard parameter choice; ``check_assumption_sampled`` detects
    this.  See the README's known-limitations section.

``tabuada_loop``
    The planar state-feedback benchmark x' = Ax + Bu, u = Kx with
    A = [[0, 1], [-2, 3]], B = [0; 1], K = [1, -4]: the loop matrices
    collapse to A1 = A2 = A + BK, B1 = B2 = BK, and the quadratic
    certificate uses the published gains (eps2 = 0.68,
    gamma = 17.3495) with a P produced by the constructive design.

``check_assumption_sampled`` verifies all three certificate
inequalities at randomly sampled states with finite-difference
gradients; it is deliberately independent of how a certificate was
constructed, so it doubles as a falsification tool.
"""

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .errors import ConfigError, DimensionError
from .lti import (
    ClosedLoopMatrices,
    LmiCertificate,
    LtiController,
    LtiPlant,
    assemble,
    design_certificate,
    extract_assumption,
    is_feasible,
)
from .model import Certificate, ClosedLoopSystem
from .sampling import uniform_ball

# Published gains for the planar state-feedback benchmark.
TABUADA_A = ((0.0, 1.0), (-2.0, 3.0))
TABUADA_B = ((0.0,), (1.0,))
TABUADA_K = ((1.0, -4.0),)
TABUADA_EPS2 = 0.68
TABUADA_GAMMA = 17.3495


def lorenz_loop(a=10.0, b=28.0, c=8.0 / 3.0, p1=2.0, p2=30.0):
    """The Lorenz output-feedback benchmark and its analytic certificate.

    Requires a, b, c > 0, p1 > 1 and p2 > 2a (strict).  The certificate
    components are:

        V(x) = p1 x1^2 + p2 x2^2 + p2 x3^2
        W(e) = |e|,  L = 0,  H(x) = a (|x1| + |x2|)
        alpha(s) = min(a (p1 - 1), p2 - 2a, 2 p2 c) s^2
        delta(y) = a (p1 - 1) y^2
        gamma = sqrt(p2) ((p1/p2) a + b)

    gamma arises from bounding the cross term of V-dot: the feedback
    gain (p1/p2) a + b couples x2 to the measurement error, and a Young
    split with weight p2 yields gamma^2 = p2 ((p1/p2) a + b)^2.  For
    the standard parameters (10, 28, 8/3, 2, 30) this gives
    gamma = 157.01 and a dwell-time ceiling of 0.010004, which is what
    makes the customary choice T = 0.01 valid; a widely circulated
    variant of the formula with c in place of b gives a ceiling of
    0.086 but a trigger too loose to stabilize the loop.
    """
    if not (a > 0 and b > 0 and c > 0):
        raise ValueError("lorenz_loop requires a, b, c > 0")
    if not p1 > 1:
        raise ValueError(f"lorenz_loop requires p1 > 1 (got p1 = {p1:g})")
    if not p2 > 2 * a:
        raise ValueError(f"lorenz_loop requires p2 > 2a (got p2 = {p2:g}, 2a = {2 * a:g})")

    gain = (p1 / p2) * a + b

    def f(x, e):
        x1, x2, x3 = x[0], x[1], x[2]
        u = -gain * (x1 + e[0])
        return np.array((a * (x2 - x1), b * x1 - x2 - x1 * x3 + u, x1 * x2 - c * x3))

    def g(x, e):
        # e = yhat - y with y = x1, so e' = -x1' = a (x1 - x2).
        return np.array((a * (x[0] - x[1]),))

    def y_of_x(x):
        return x[:1]

    sys = ClosedLoopSystem(n_x=3, n_e=1, f=f, g=g, y_of_x=y_of_x, name="lorenz")

    alpha_coef = min(a * (p1 - 1.0), p2 - 2.0 * a, 2.0 * p2 * c)
    delta_coef = a * (p1 - 1.0)
    gamma = math.sqrt(p2) * gain
    lo, hi = min(p1, p2), max(p1, p2)

    cert = Certificate(
        V=lambda x: p1 * x[0] ** 2 + p2 * x[1] ** 2 + p2 * x[2] ** 2,
        W=lambda e: float(np.linalg.norm(e)),
        H=lambda x: a * (abs(x[0]) + abs(x[1])),
        delta=lambda y: delta_coef * float(np.atleast_1d(y) @ np.atleast_1d(y)),
        alpha=lambda s: alpha_coef * s * s,
        gamma=gamma,
        L=0.0,
        alpha_lower=lambda s: lo * s * s,
        alpha_upper=lambda s: hi * s * s,
        n_x=3,
        n_e=1,
        n_y=1,
        y_of_x=y_of_x,
        name="lorenz",
    )
    return sys, cert


def lti_loop(plant: LtiPlant, ctrl: LtiController, cert: Certificate) -> ClosedLoopSystem:
    """The linear closed loop whose flow maps match the certificate.

    For the state-feedback special case the true error dynamics carry a
    sign flip relative to the collapsed certificate matrices:
    e' = -(A1 x + B1 e).
    """
    clm = assemble(plant, ctrl)
    if cert.n_x != clm.n_x or cert.n_e != clm.n_e:
        raise DimensionError(
            f"certificate dimensions ({cert.n_x}, {cert.n_e}) do not match the "
            f"assembled loop ({clm.n_x}, {clm.n_e})"
        )
    return lti_loop_from_matrices(clm, name="lti")


def lti_loop_from_matrices(clm: ClosedLoopMatrices, name="lti") -> ClosedLoopSystem:
    A1, B1, A2, B2, Cbar = clm.A1, clm.B1, clm.A2, clm.B2, clm.Cbar

    def f(x, e):
        return A1 @ x + B1 @ e

    if clm.state_feedback:

        def g(x, e):
            return -(A1 @ x + B1 @ e)

        stacked = np.block([[A1, B1], [-A1, -B1]])
    else:

        def g(x, e):
            return A2 @ x + B2 @ e

        stacked = np.block([[A1, B1], [A2, B2]])

    return ClosedLoopSystem(
        n_x=clm.n_x,
        n_e=clm.n_e,
        f=f,
        g=g,
        y_of_x=lambda x: Cbar @ x,
        stacked_matrix=stacked,
        name=name,
    )


def tabuada_loop() -> Tuple[ClosedLoopSystem, Certificate]:
    """The planar state-feedback benchmark with its published gains.

    P comes from the constructive design (smallest-gamma slack); the
    scalar gains are then pinned to the published values, which are
    feasible with that P because feasibility is monotone in mu.
    """
    plant = LtiPlant(A=TABUADA_A, B=TABUADA_B, C=np.eye(2))
    ctrl = LtiController.static(TABUADA_K)
    clm = assemble(plant, ctrl)
    designed = design_certificate(clm, eps1=0.0, eps2=TABUADA_EPS2)
    published = LmiCertificate(
        P=designed.P, eps1=0.0, eps2=TABUADA_EPS2, mu=TABUADA_GAMMA**2
    )
    if not is_feasible(clm, published):
        raise ConfigError("published gains are infeasible with the designed P")
    cert = extract_assumption(clm, published)
    sys = lti_loop_from_matrices(clm, name="lti-sf-tabuada")
    return sys, cert


BUILTIN_LOOPS: Dict[str, object] = {
    "lorenz": lorenz_loop,
    "lti-sf-tabuada": tabuada_loop,
}


def builtin_loop(name, **params):
    """Look up a built-in benchmark by its registry name."""
    try:
        factory = BUILTIN_LOOPS[name]
    except KeyError:
        raise ConfigError(
            f"unknown system {name!r}; built-ins: {sorted(BUILTIN_LOOPS)}"
        ) from None
    return factory(**params)


@dataclass
class AssumptionReport:
    """Sampled verification of the three certificate inequalities.

    ``max_violation`` maps each inequality to the largest observed
    excess of its left-hand side over its right-hand side (<= 0 means
    the inequality held at every sample); ``scale`` records the largest
    magnitude either side reached, which normalizes the pass threshold.
    """

    n_samples: int
    radius: float
    seed: int
    rtol: float
    max_violation: Dict[str, float]
    scale: Dict[str, float]
    worst_point: Dict[str, tuple]
    n_skipped: int

    INEQUALITIES = ("v-bounds", "v-decay", "w-growth")

    def violation_excess(self, key):
        """Violation beyond the tolerance; > 0 means the check failed."""
        return self.max_violation[key] - self.rtol * self.scale[key]

    @property
    def passed(self):
        return all(self.violation_excess(k) <= 0.0 for k in self.INEQUALITIES)

    def summary(self):
        lines = []
        for k in self.INEQUALITIES:
            verdict = "ok" if self.violation_excess(k) <= 0.0 else "VIOLATED"
            lines.append(
                f"{k}: max violation {self.max_violation[k]:.6g} "
                f"(tol {self.rtol * self.scale[k]:.3g}) {verdict}"
            )
        lines.append(f"skipped {self.n_skipped} samples near nondifferentiable points")
        return "\n".join(lines)


def _grad_fd(fn, z, h):
    g = np.empty(z.size)
    for i in range(z.size):
        zp = z.copy()
        zp[i] += h
        zm = z.copy()
        zm[i] -= h
        g[i] = (fn(zp) - fn(zm)) / (2.0 * h)
    return g


def check_assumption_sampled(
    sys: ClosedLoopSystem,
    cert: Certificate,
    n_samples=10_000,
    radius=50.0,
    seed=0,
    rtol=1e-5,
) -> AssumptionReport:
    """Check the certificate inequalities at sampled states.

    Draws (x, e) uniformly in the ball of the given radius, evaluates

        alpha_lower(|x|) <= V(x) <= alpha_upper(|x|)
        <grad V(x), f(x, e)> <= -alpha(|x|) - H(x)^2 - delta(y) + gamma^2 W(e)^2
        <grad W(e), g(x, e)> <= L W(e) + H(x)

    with central-difference gradients, and reports the worst violation
    of each.  Samples too close to the nondifferentiable set of W
    (e = 0 for norm-type W) are skipped for the W inequality only.
    Violations are data, not exceptions.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    for bound in (cert.delta_x, cert.delta_e):
        if bound is not None and radius > bound:
            raise ValueError(
                f"radius {radius:g} exceeds the certificate's locality bound {bound:g}"
            )
    rng = np.random.default_rng(seed)
    dim = sys.n_x + sys.n_e
    g2 = cert.gamma * cert.gamma
    skip_band = 1e-6 * max(1.0, radius)

    keys = AssumptionReport.INEQUALITIES
    max_v = {k: -np.inf for k in keys}
    scale = {k: 1.0 for k in keys}
    worst = {k: None for k in keys}
    skipped = 0

    for _ in range(n_samples):
        z = uniform_ball(rng, dim, radius)
        x, e = z[: sys.n_x], z[sys.n_x :]
        nx = float(np.linalg.norm(x))

        v = cert.V(x)
        lhs = max(cert.alpha_lower(nx) - v, v - cert.alpha_upper(nx))
        if lhs > max_v["v-bounds"]:
            max_v["v-bounds"], worst["v-bounds"] = lhs, (x.copy(), e.copy())
        scale["v-bounds"] = max(scale["v-bounds"], abs(v))

        h_v = 1e-6 * max(1.0, nx)
        grad_v = _grad_fd(cert.V, x, h_v)
        lhs = float(grad_v @ sys.f(x, e))
        w = cert.W(e)
        rhs = -cert.alpha(nx) - cert.H(x) ** 2 - cert.delta(sys.y_of_x(x)) + g2 * w * w
        if lhs - rhs > max_v["v-decay"]:
            max_v["v-decay"], worst["v-decay"] = lhs - rhs, (x.copy(), e.copy())
        scale["v-decay"] = max(scale["v-decay"], abs(lhs), abs(rhs))

        ne = float(np.linalg.norm(e))
        if ne < skip_band:
            skipped += 1
        else:
            h_w = 1e-6 * ne
            grad_w = _grad_fd(cert.W, e, h_w)
            lhs = float(grad_w @ sys.g(x, e))
            rhs = cert.L * w + cert.H(x)
            if lhs - rhs > max_v["w-growth"]:
                max_v["w-growth"], worst["w-growth"] = lhs - rhs, (x.copy(), e.copy())
            scale["w-growth"] = max(scale["w-growth"], abs(lhs), abs(rhs))

    for k in keys:
        if max_v[k] == -np.inf:
            max_v[k] = 0.0

    return AssumptionReport(
        n_samples=n_samples,
        radius=radius,
        seed=seed,
        rtol=rtol,
        max_violation=max_v,
        scale=scale,
        worst_point=worst,
        n_skipped=skipped,
    )
