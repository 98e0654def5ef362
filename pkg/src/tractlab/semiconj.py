"""Semiconjugacy between a hyperbolic exponential-type map and its
rescaled outside-model, built by iterated curve lifting.

The default instance is f(z) = lambda (e^z - 1) with |lambda| < 1, an
attracting fixed point at 0 and the single asymptotic value -lambda.
With U a disk around the postsingular set, W its complement, R >= K and
M = R/K, the rescaled map g(z) = f(z/M) is of disjoint type on W and the
levels

    theta_0 = id,  theta_1(z) = z/M,
    theta_{j+1}(z) = endpoint of the f-lift of gamma_j(g(z))
                     starting at theta_j(z)

converge geometrically.  W is the complement of a closed disk, so its
hyperbolic density is known in closed form,

    rho_W(z) = 1 / (|z| log(|z| / r_U)),

via the conformal map z -> r_U/z onto the punctured unit disk; both the
expansion certificate and the curve-length reports use this exact
density rather than one-sided estimates.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CertificateFailed,
    CertificateMissing,
    ContinuationError,
    HorizonError,
    RangeError,
    SetupInvalid,
)
from .models import TWO_PI, EntireMapSpec, require_finite

# polyline resolution of the level-1 segment; lifts refine adaptively
SEGMENT_SAMPLES = 17
MAX_LIFT_STEP = math.pi / 2
MAX_BISECTION_DEPTH = 48
POSTSINGULAR_ITERATES = 100


@dataclass(frozen=True)
class HyperbolicSetup:
    lam: complex
    r_U: float
    K: float
    R: float

    @property
    def M(self) -> float:
        return self.R / self.K

    @property
    def map_spec(self) -> EntireMapSpec:
        return EntireMapSpec.lambda_expm1(self.lam)

    def f(self, z: complex) -> complex:
        return self.map_spec.eval(z)

    def df(self, z: complex) -> complex:
        return self.map_spec.deriv(z)

    def g(self, z: complex) -> complex:
        return self.f(complex(z) / self.M)

    def in_W(self, z: complex) -> bool:
        return abs(z) > self.r_U

    def inverse_branch_f(self, w: complex, branch: int) -> complex:
        """Solve f(z) = w: z = Log(w/lam + 1) + 2 pi i b, explicit."""
        u = complex(w) / self.lam + 1.0
        if u == 0:
            raise RangeError("w is the asymptotic value; no preimage")
        return cmath.log(u) + TWO_PI * 1j * branch


def rho_W(setup: HyperbolicSetup, z: complex) -> float:
    """Exact hyperbolic density of W = {|z| > r_U} (curvature -1)."""
    z = require_finite(z)
    r = abs(z)
    if r <= setup.r_U:
        raise RangeError(f"|z| = {r:g} <= r_U = {setup.r_U:g}")
    return 1.0 / (r * math.log(r / setup.r_U))


def hyperbolic_derivative_W(setup: HyperbolicSetup, z: complex) -> float:
    """||Df(z)||_W = |f'(z)| rho_W(f(z)) / rho_W(z); exact density."""
    w = setup.f(z)
    return abs(setup.df(z)) * rho_W(setup, w) / rho_W(setup, z)


def build_setup(
    lam: complex, r_U: float, K: float, R: float, boundary_samples: int = 256
) -> HyperbolicSetup:
    """Validate the hyperbolic configuration; every failed check is named."""
    lam = require_finite(lam, "lambda")
    if abs(lam) >= 1.0:
        raise SetupInvalid(f"|lambda| = {abs(lam):g} must be < 1")
    if r_U <= 0:
        raise SetupInvalid("r_U must be positive")
    if K < 1.0:
        raise SetupInvalid(f"K = {K:g} must be >= 1")
    if r_U >= K / 2.0:
        raise SetupInvalid(
            f"cl U not inside D(0, K/2): r_U = {r_U:g} >= K/2 = {K / 2.0:g}"
        )
    if R < K:
        raise SetupInvalid(f"R = {R:g} must be >= K = {K:g}")
    if math.log(2.0 * R - 1.0) < K + 1.0:
        raise SetupInvalid(
            f"preimage condition log(2R-1) >= K+1 fails: "
            f"{math.log(2.0 * R - 1.0):g} < {K + 1.0:g}"
        )
    setup = HyperbolicSetup(lam, float(r_U), float(K), float(R))
    # compact containment f(cl U) inside U, on a boundary sample
    for i in range(boundary_samples):
        zb = r_U * cmath.exp(2j * math.pi * i / boundary_samples)
        if abs(setup.f(zb)) >= r_U:
            raise SetupInvalid(
                f"containment |f| < r_U fails on the boundary at {zb!r}"
            )
    # postsingular orbit: forward iterates of the asymptotic value -lambda
    p = -lam
    for step in range(POSTSINGULAR_ITERATES):
        if abs(p) >= r_U:
            raise SetupInvalid(
                f"postsingular orbit exits U at step {step}: |p| = {abs(p):g}"
            )
        p = setup.f(p)
    return setup


@dataclass
class SemiconjSample:
    z: complex
    thetas: list[complex]  # thetas[j] = theta_j(z)
    increments: list[float] = field(default_factory=list)
    gamma_lengths: list[float] = field(default_factory=list)  # hyp length in W
    theta: complex | None = None
    displacement_bound: float = math.inf
    mu: float = math.nan
    certified_C: float = math.nan
    tail_estimate: float = math.inf
    # deepest computed theta value per forward position, used to bound
    # the contraction of the levels the tower could not represent
    tops: list[complex] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "theta": None
            if self.theta is None
            else [self.theta.real, self.theta.imag],
            "levels": [[t.real, t.imag] for t in self.thetas],
            "increments": self.increments,
            "gamma_lengths": self.gamma_lengths,
            "certified_C": self.certified_C,
            "mu": self.mu,
            "displacement_bound": self.displacement_bound,
            "tail_estimate": self.tail_estimate,
        }


def mu_constant(setup: HyperbolicSetup) -> float:
    """Hyperbolic length bound of the level-1 segment: log(1 + log M / log 2)."""
    return math.log(1.0 + math.log(setup.M) / math.log(2.0))


def _g_positions(setup: HyperbolicSetup, z: complex, needed: int) -> list[complex]:
    """Forward g-orbit positions, stopping at the representability guard.

    Every returned position must lie in {|w| > R}; a violation within the
    requested range raises HorizonError.
    """
    pos = [require_finite(z)]
    if abs(z) <= setup.R:
        raise HorizonError(f"|z| = {abs(z):g} <= R = {setup.R:g}")
    while len(pos) < needed:
        try:
            nxt = setup.g(pos[-1])
        except OverflowError:
            break  # orbit is escaping faster than doubles represent
        if not (math.isfinite(nxt.real) and math.isfinite(nxt.imag)):
            break
        if abs(nxt) > 1e250:
            # the next lift would need log|w| past the exp guard; the
            # remaining levels contract by 1/|f'| ~ 1/|w| and are dropped
            pos.append(nxt)
            break
        if abs(nxt) <= setup.R:
            raise HorizonError(
                f"g-orbit of {z!r} drops to |w| = {abs(nxt):g} <= R "
                f"at step {len(pos)}"
            )
        pos.append(nxt)
    return pos


def _lift_polyline(
    setup: HyperbolicSetup, start: complex, path: list[complex]
) -> list[complex]:
    """Continuous f-preimage of a polyline, starting at the known
    preimage ``start`` of path[0]; plane-coordinate analog of half-plane
    path lifting with the same bisection rule.
    """
    f0 = setup.f(start)
    if abs(f0 - path[0]) > 1e-6 * (1.0 + abs(path[0])):
        raise ContinuationError(
            f"start {start!r} is not a preimage of the path head {path[0]!r}"
        )
    lift = [start]

    def step(z_cur: complex, w_from: complex, w_to: complex, depth: int) -> complex:
        base = setup.inverse_branch_f(w_to, 0)
        b = round((z_cur.imag - base.imag) / TWO_PI)
        z_next = base + TWO_PI * 1j * b
        if abs(z_next - z_cur) <= MAX_LIFT_STEP:
            lift.append(z_next)
            return z_next
        if depth >= MAX_BISECTION_DEPTH:
            raise ContinuationError(
                f"cannot keep the preimage branch continuous near {w_to!r}"
            )
        mid = 0.5 * (w_from + w_to)
        z_mid = step(z_cur, w_from, mid, depth + 1)
        return step(z_mid, mid, w_to, depth + 1)

    z_cur = start
    for w_prev, w_next in zip(path, path[1:]):
        z_cur = step(z_cur, complex(w_prev), complex(w_next), 0)
    return lift


def _polyline_hyp_length(setup: HyperbolicSetup, path: list[complex]) -> float:
    """Midpoint-quadrature hyperbolic length of a polyline in W."""
    total = 0.0
    for a, b in zip(path, path[1:]):
        seg = abs(b - a)
        if seg == 0.0:
            continue
        total += seg * rho_W(setup, 0.5 * (a + b))
    return total


def theta_level(setup: HyperbolicSetup, z: complex, k: int) -> SemiconjSample:
    """Levels theta_0 .. theta_k at z via the triangular curve tower."""
    if k < 0:
        raise RangeError("level must be nonnegative")
    z = require_finite(z)
    if k == 0:
        return SemiconjSample(z, [z], mu=mu_constant(setup))
    pos = _g_positions(setup, z, k)
    if len(pos) < k:
        raise HorizonError(
            f"g-orbit of {z!r} leaves the representable range after "
            f"{len(pos)} positions; level {k} needs {k}"
        )
    M = setup.M
    # level 1: straight segments from each position to its rescale
    curves = [
        [p + (p / M - p) * (t / (SEGMENT_SAMPLES - 1)) for t in range(SEGMENT_SAMPLES)]
        for p in pos
    ]
    thetas = [z, z / M]
    increments = [abs(z / M - z)]
    lengths = [_polyline_hyp_length(setup, curves[0])]
    tops = [c[-1] for c in curves]
    for level in range(2, k + 1):
        lifted = [
            _lift_polyline(setup, curves[i][-1], curves[i + 1])
            for i in range(len(curves) - 1)
        ]
        curves = lifted
        for i, c in enumerate(curves):
            tops[i] = c[-1]
        thetas.append(curves[0][-1])
        increments.append(abs(thetas[-1] - thetas[-2]))
        lengths.append(_polyline_hyp_length(setup, curves[0]))
    return SemiconjSample(
        z, thetas, increments, lengths, mu=mu_constant(setup), tops=tops
    )


def expansion_certificate(
    setup: HyperbolicSetup,
    samples: int = 400,
    radius: float = 1e3,
    seed: int = 0,
) -> float:
    """Certified lower bound C > 1 for ||Df||_W over V = f^{-1}(W) ∩ W.

    Samples the region {r_U < |z| <= radius}, keeps the points that lie
    in V, and minimizes the exact hyperbolic derivative over them.
    Fails loudly instead of returning a useless C <= 1.
    """
    rng = np.random.default_rng(seed)
    worst = math.inf
    worst_z = None
    counted = 0
    attempts = 0
    while counted < samples and attempts < 200 * samples:
        attempts += 1
        # log-uniform modulus reaches both ends of the annulus
        r = setup.r_U * math.exp(
            rng.uniform(0.0, math.log(radius / setup.r_U))
        )
        zs = r * cmath.exp(2j * math.pi * rng.uniform(0.0, 1.0))
        try:
            fz = setup.f(zs)
        except OverflowError:
            continue
        if abs(fz) <= setup.r_U:
            continue  # outside V; not counted
        counted += 1
        val = hyperbolic_derivative_W(setup, zs)
        if val < worst:
            worst, worst_z = val, zs
    if counted < samples:
        raise CertificateFailed(
            f"could only place {counted}/{samples} samples inside V"
        )
    if worst <= 1.0:
        raise CertificateFailed(
            f"||Df||_W = {worst:g} <= 1 at sample {worst_z!r}"
        )
    return worst


def _truncation_tail(
    setup: HyperbolicSetup, sample: SemiconjSample, certified_C: float
) -> float:
    """Tail estimate when the g-orbit outran the representable range.

    The first missing increment is a curve of bounded length at the last
    position, pulled down through one lift per position; each lift
    contracts by 1/|f'| near the deepest computed theta value there.
    The product is formed in log domain because |f'| at near-saturated
    positions is itself past double range.  The remaining levels decay
    by the certified constant on top of that.
    """
    c_top = abs(cmath.log(2.0 * setup.lam / setup.M)) + 1.0
    log_tail = math.log(c_top)
    for t in sample.tops[:-1]:
        # log |f'(t)| = log|lam| + Re t, exact for this map family
        log_df = math.log(abs(setup.lam)) + t.real
        log_tail -= max(0.0, log_df)
    log_tail += math.log(certified_C / (certified_C - 1.0))
    if log_tail < -700.0:
        return 0.0
    return math.exp(log_tail)


def semiconj_limit(
    setup: HyperbolicSetup,
    z: complex,
    tol: float,
    certified_C: float | None = None,
) -> SemiconjSample:
    """Converged theta(z) with depth chosen from mu / C^k <= tol.

    Escaping orbits usually saturate the representable range first; the
    remaining tail is then estimated from the last computed increment
    and the certified contraction and must itself be below tol.
    """
    if tol <= 0:
        raise RangeError("tol must be positive")
    if certified_C is None:
        certified_C = expansion_certificate(setup)
    if not (certified_C > 1.0):
        raise CertificateMissing(
            f"no expansion constant C > 1 available (got {certified_C!r})"
        )
    mu = mu_constant(setup)
    depth = max(1, math.ceil(math.log(mu / tol) / math.log(certified_C)))
    pos = _g_positions(setup, z, depth)
    usable = min(depth, len(pos))
    sample = theta_level(setup, z, usable)
    sample.certified_C = certified_C
    sample.displacement_bound = mu * certified_C / (certified_C - 1.0)
    if usable >= depth:
        sample.tail_estimate = mu / certified_C**depth
    else:
        sample.tail_estimate = _truncation_tail(setup, sample, certified_C)
    if sample.tail_estimate > tol:
        raise HorizonError(
            f"tail estimate {sample.tail_estimate:g} above tol {tol:g} "
            f"at the representability limit"
        )
    sample.theta = sample.thetas[-1]
    return sample


def functional_residual(
    setup: HyperbolicSetup,
    z: complex,
    tol: float,
    certified_C: float | None = None,
) -> float:
    """|f(theta(z)) - theta(g(z))| at convergence."""
    if certified_C is None:
        certified_C = expansion_certificate(setup)
    s_z = semiconj_limit(setup, z, tol, certified_C)
    s_gz = semiconj_limit(setup, setup.g(z), tol, certified_C)
    return abs(setup.f(s_z.theta) - s_gz.theta)


def write_report(path, setup: HyperbolicSetup, samples: list[SemiconjSample]) -> None:
    payload = {
        "setup": {
            "lambda": [setup.lam.real, setup.lam.imag],
            "r_U": setup.r_U,
            "K": setup.K,
            "R": setup.R,
            "M": setup.M,
            "mu": mu_constant(setup),
        },
        "samples": [s.to_json() for s in samples],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
