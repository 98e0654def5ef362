"""Pullback construction of the conjugacy near infinity.

For the translation family F_kappa(z) = F_0(z + kappa) the map Theta is
the limit of the tower

    Theta_0 = id,   Theta_{n+1}(z) = (F_0)_T^{-1}(Theta_n(F_0(z))) - kappa,

which is Cauchy at the a priori rate 2|kappa| / 2^n once Q > 2|kappa| + 1.
Depth is always selected from that explicit rate, never adaptively.  A
general two-map pullback with a user-supplied tract correspondence is
provided alongside, plus the displacement, inverse, uniqueness,
holomorphy, and dilatation-ceiling checks the construction admits.
"""

from __future__ import annotations

import csv
import json
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass

from .errors import (
    CorrespondenceGap,
    DepthExceeded,
    OrbitLeftJQ,
    PreconditionError,
    RangeError,
)
from .hypmetric import dist_half_plane
from .models import (
    KappaFamilyMember,
    Model,
    eval_dF,
    eval_F,
    require_finite,
)
from .orbits import EscapeFlag, ExternalAddress, iterate
from .tracts import TractAddress, inverse_branch, tract_of

DEFAULT_MAX_DEPTH = 400

Correspondence = Mapping[int, int] | Callable[[TractAddress], TractAddress] | None


@dataclass
class ConjugacySample:
    z: complex
    theta: complex
    depth: int
    tail_bound: float
    residual: float
    address_prefix: ExternalAddress

    def displacement(self) -> float:
        return abs(self.theta - self.z)

    def to_json(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "theta": [self.theta.real, self.theta.imag],
            "depth": self.depth,
            "tail_bound": self.tail_bound,
            "residual": self.residual,
            "displacement": self.displacement(),
            "address_prefix": [t.branch_index for t in self.address_prefix.entries],
        }


@dataclass(frozen=True)
class PullbackConfig:
    Q: float
    max_depth: int = DEFAULT_MAX_DEPTH
    tol: float = 1e-9
    mode: str = "kappa_family"  # or "general_pair"
    G: Model | None = None
    correspondence: Correspondence = None

    def __post_init__(self):
        if self.mode not in ("kappa_family", "general_pair"):
            raise RangeError(f"unknown pullback mode {self.mode!r}")
        if self.mode == "general_pair" and self.G is None:
            raise RangeError("general_pair mode requires a second model G")

    def check_kappa(self, kappa: complex) -> None:
        if self.Q <= 2.0 * abs(kappa) + 1.0:
            raise PreconditionError(
                f"Q = {self.Q:g} must exceed 2|kappa|+1 = "
                f"{2.0 * abs(kappa) + 1.0:g}"
            )


def _require_kappa_admissible(kappa: complex, Q: float) -> complex:
    kappa = require_finite(kappa, "kappa")
    if Q <= 2.0 * abs(kappa) + 1.0:
        raise PreconditionError(
            f"Q = {Q:g} must exceed 2|kappa|+1 = {2.0 * abs(kappa) + 1.0:g}"
        )
    return kappa


def _certified_orbit(
    base: Model,
    z: complex,
    n: int,
    Q: float,
    orbit: list[complex] | None = None,
) -> list[complex]:
    """Forward orbit of z to depth n with Re > Q after the first point.

    The list may be shorter than n+1 when the orbit escapes past the
    overflow guard while certifiably staying in the domain; deeper tower
    levels then act as the identity, with the truncation error tracked
    by the caller through the pullback contraction factors.

    A caller-supplied ``orbit`` (e.g. the exact cycle of a periodic
    point, where plain forward iteration would drift off the repelling
    cycle) is validated for consistency and membership instead.
    """
    if orbit is not None:
        return _validate_orbit(base, z, n, Q, orbit)
    if n == 0:
        return [require_finite(z)]
    rec = iterate(base, z, n, Q)
    if rec.escape_flag is not EscapeFlag.STAYED_IN_JQ:
        raise OrbitLeftJQ(
            f"orbit of {z!r} fails the J_Q certificate at step {rec.exit_step}"
        )
    if rec.min_Re_after_first <= Q:
        # boundary contact: the tower is only defined on strict membership
        raise OrbitLeftJQ(f"orbit of {z!r} touches the half-plane boundary")
    return rec.points


def _validate_orbit(
    base: Model, z: complex, n: int, Q: float, orbit: list[complex]
) -> list[complex]:
    if len(orbit) < n + 1:
        raise RangeError(f"supplied orbit covers {len(orbit) - 1} < {n} steps")
    pts = [require_finite(p, "orbit point") for p in orbit[: n + 1]]
    if abs(pts[0] - z) > 1e-9 * (1.0 + abs(z)):
        raise OrbitLeftJQ(f"supplied orbit does not start at {z!r}")
    for i in range(n):
        if i >= 1 and pts[i].real <= Q:
            raise OrbitLeftJQ(f"supplied orbit leaves {{Re > {Q:g}}} at step {i}")
        try:
            nxt = eval_F(base, pts[i])
        except Exception as exc:
            raise OrbitLeftJQ(f"supplied orbit invalid at step {i}: {exc}") from exc
        if abs(nxt - pts[i + 1]) > 1e-6 * (1.0 + abs(nxt)):
            raise OrbitLeftJQ(f"supplied orbit inconsistent at step {i}")
    if n >= 1 and pts[n].real <= Q:
        raise OrbitLeftJQ(f"supplied orbit leaves {{Re > {Q:g}}} at step {n}")
    return pts


def _pullback_tower(
    base: Model, kappa: complex, orbit: list[complex], n: int
) -> tuple[complex, float]:
    """Downward pass of the tower; returns (theta, truncation_error_bound).

    When the orbit list stops short of depth n the top levels are taken
    as the identity; the induced error starts at 2|kappa| and shrinks by
    the inverse-branch derivative 1/|F'| at every pullback level.
    """
    m = len(orbit) - 1
    theta = orbit[m]
    err = 0.0 if m >= n else 2.0 * abs(kappa)
    for j in range(m - 1, -1, -1):
        tract = tract_of(base, orbit[j])
        pre = inverse_branch(base, tract, theta, seed=orbit[j])
        if err > 0.0:
            err /= max(abs(eval_dF(base, pre)), 1.0)
        theta = pre - kappa
    return theta, err


def theta_n(
    base: Model,
    kappa: complex,
    z: complex,
    n: int,
    Q: float,
    orbit: list[complex] | None = None,
) -> complex:
    """Depth-n pullback approximation of the conjugacy at z.

    Requires Q > 2|kappa| + 1 and a finite-horizon certificate that the
    orbit of z stays in {Re > Q} to depth n.  ``orbit`` may supply the
    exact forward orbit (see _certified_orbit).
    """
    kappa = _require_kappa_admissible(kappa, Q)
    z = require_finite(z)
    if n < 0:
        raise RangeError("depth must be nonnegative")
    if n == 0 or kappa == 0:
        if n > 0:
            _certified_orbit(base, z, n, Q, orbit)
        return z
    pts = _certified_orbit(base, z, n, Q, orbit)
    theta, _ = _pullback_tower(base, kappa, pts, n)
    return theta


def depth_for_tolerance(kappa: complex, tol: float) -> int:
    """Smallest n with 2|kappa| * 2^(1-n) <= tol."""
    if tol <= 0:
        raise RangeError("tol must be positive")
    scale = 2.0 * abs(kappa)
    if scale == 0.0:
        return 0
    n = 0
    while scale * 2.0 ** (1 - n) > tol:
        n += 1
        if n > 4000:  # pragma: no cover - tol would have to underflow
            raise DepthExceeded("tolerance unreachable at double precision")
    return n


def theta_limit(
    base: Model,
    kappa: complex,
    z: complex,
    tol: float,
    Q: float,
    max_depth: int = DEFAULT_MAX_DEPTH,
    orbit: list[complex] | None = None,
) -> ConjugacySample:
    """Converged conjugacy value with the a priori tail bound <= tol."""
    kappa = _require_kappa_admissible(kappa, Q)
    z = require_finite(z)
    depth = depth_for_tolerance(kappa, tol)
    if depth > max_depth:
        raise DepthExceeded(
            f"required depth {depth} exceeds max_depth = {max_depth}"
        )
    if depth == 0:
        return ConjugacySample(z, z, 0, 0.0, 0.0, ExternalAddress(()))
    pts = _certified_orbit(base, z, depth, Q, orbit)
    theta, trunc_err = _pullback_tower(base, kappa, pts, depth)
    tail = 2.0 * abs(kappa) * 2.0 ** (1 - depth) + trunc_err
    prefix = ExternalAddress(
        tuple(tract_of(base, p) for p in pts[:-1]) or (tract_of(base, z),)
    )
    residual = _matched_residual(base, kappa, z, depth, Q, orbit)
    return ConjugacySample(z, theta, depth, tail, residual, prefix)


def _matched_residual(
    base: Model,
    kappa: complex,
    z: complex,
    n: int,
    Q: float,
    orbit: list[complex] | None = None,
) -> float:
    try:
        return conjugacy_residual(base, kappa, z, n, Q, orbit)
    except (OverflowError, OrbitLeftJQ, RangeError):
        # F(z) or its one-deeper certificate is out of reach; the value
        # itself is fine but the residual cannot be formed at this z
        return math.nan


def conjugacy_residual(
    base: Model,
    kappa: complex,
    z: complex,
    n: int,
    Q: float,
    orbit: list[complex] | None = None,
) -> float:
    """|Theta_n(F_0(z)) - F_kappa(Theta_{n+1}(z))| at matched depths.

    Zero in exact arithmetic by the recursion's definition; the returned
    value measures accumulated floating-point noise.  A supplied orbit
    must cover n+1 steps; its tail serves as the orbit of F_0(z).
    """
    kappa = _require_kappa_admissible(kappa, Q)
    z = require_finite(z)
    if kappa == 0:
        return 0.0
    fz = eval_F(base, z)
    lhs = theta_n(base, kappa, fz, n, Q, None if orbit is None else orbit[1:])
    member = KappaFamilyMember(base, kappa)
    rhs = eval_F(member, theta_n(base, kappa, z, n + 1, Q, orbit))
    return abs(lhs - rhs)


def inverse_theta_check(
    base: Model,
    kappa: complex,
    w: complex,
    tol: float,
    Q: float,
    address: ExternalAddress | None = None,
) -> float:
    """|Theta(Theta'(w)) - w| where Theta' is built over base F_kappa
    with translation parameter -kappa (so that (F_kappa)_{-kappa} = F_0).

    When w is the periodic point of F_kappa with the given periodic
    ``address``, exact cycle orbits are used for both towers: Theta'
    transports w to the F_0-periodic point with the same address, so the
    forward orbit of Theta'(w) is that cycle up to the tower tolerance.
    """
    from .orbits import periodic_orbit

    member = KappaFamilyMember(base, kappa)
    if address is None:
        inner = theta_limit(member, -kappa, w, tol, Q)
        outer = theta_limit(base, kappa, inner.theta, tol, Q)
        return abs(outer.theta - require_finite(w, "w"))
    depth = depth_for_tolerance(kappa, tol)
    w_orbit = periodic_orbit(member, address, Q, depth + 2)
    inner = theta_limit(member, -kappa, w, tol, Q, orbit=w_orbit)
    z_cycle = periodic_orbit(base, address, Q, depth + 2)
    pseudo = [inner.theta] + z_cycle[1:]
    outer = theta_limit(base, kappa, inner.theta, tol, Q, orbit=pseudo)
    return abs(outer.theta - require_finite(w, "w"))


def _resolve(correspondence: Correspondence, tract: TractAddress) -> TractAddress:
    if correspondence is None:
        return tract
    if callable(correspondence):
        out = correspondence(tract)
        if out is None:
            raise CorrespondenceGap(f"no image for tract {tract}")
        return out
    try:
        return TractAddress(correspondence[tract.branch_index], tract.inner_branch)
    except KeyError as exc:
        raise CorrespondenceGap(f"no image for tract {tract}") from exc


def general_pullback(
    F: Model,
    G: Model,
    correspondence: Correspondence,
    z: complex,
    n: int,
    Q: float,
    increments: list[tuple[float, float]] | None = None,
    orbit: list[complex] | None = None,
) -> complex:
    """Depth-n tower Theta_{j+1}(z) = G_corr(T)^{-1}(Theta_j(F(z))).

    When ``increments`` is given it receives, per level j >= 1, the pair
    (dist_half_plane(Theta_{j+1}(z), Theta_j(z)),
     dist_half_plane(Theta_j(F(z)), Theta_{j-1}(F(z)))) so the measured
    contraction constant of the pullback step can be extracted.
    """
    z = require_finite(z)
    if n < 0:
        raise RangeError("depth must be nonnegative")
    orbit = _certified_orbit(F, z, n, Q, orbit)
    m = len(orbit) - 1

    def tower(depth: int) -> complex:
        v = orbit[depth]
        for j in range(depth - 1, -1, -1):
            tract = _resolve(correspondence, tract_of(F, orbit[j]))
            v = inverse_branch(G, tract, v, seed=orbit[j])
        return v

    if increments is None:
        return tower(m)
    values = [tower(j) for j in range(m + 1)]
    # the towers over F(z) are the suffixes of the same orbit, shifted
    upstairs = []
    for j in range(m):
        v = orbit[j + 1]
        for i in range(j, 0, -1):
            tract = _resolve(correspondence, tract_of(F, orbit[i]))
            v = inverse_branch(G, tract, v, seed=orbit[i])
        upstairs.append(v)
    for j in range(1, m):
        d_new = dist_half_plane(Q, values[j + 1], values[j])
        d_arg = dist_half_plane(Q, upstairs[j], upstairs[j - 1])
        increments.append((d_new, d_arg))
    return values[m]


def uniqueness_crosscheck(
    base: Model,
    kappa: complex,
    samples: list[complex],
    tol: float,
    Q: float,
    orbits_by_sample: list[list[complex]] | None = None,
) -> float:
    """Max discrepancy between the translation-family tower and the
    general two-map pullback with the branch-preserving correspondence.
    """
    kappa = _require_kappa_admissible(kappa, Q)
    member = KappaFamilyMember(base, kappa)
    depth = depth_for_tolerance(kappa, tol)
    worst = 0.0
    for i, z in enumerate(samples):
        orb = None if orbits_by_sample is None else orbits_by_sample[i]
        a = theta_limit(base, kappa, z, tol, Q, orbit=orb).theta
        b = general_pullback(base, member, None, z, depth, Q, orbit=orb)
        worst = max(worst, abs(a - b))
    return worst


def displacement_bound_report(
    samples: list[ConjugacySample], Q_prime: float
) -> float:
    """Max hyperbolic displacement dist(z, Theta(z)) in {Re > Q_prime}."""
    worst = 0.0
    for s in samples:
        worst = max(worst, dist_half_plane(Q_prime, s.z, s.theta))
    return worst


def holomorphy_in_kappa(
    base: Model,
    z: complex,
    kappa0: complex,
    h: float,
    Q: float,
    depth: int = 40,
    orbit: list[complex] | None = None,
) -> float:
    """Central-difference Wirtinger quotient |dTheta/d(conj kappa)|.

    Four towers at kappa0 +/- h and kappa0 +/- ih at a common fixed
    depth; the tower orbit is always the base-map orbit of z, so one
    orbit serves all four.  For a kappa-holomorphic tower the quotient
    is O(h^2).
    """
    if h <= 0:
        raise RangeError("h must be positive")
    kappa0 = require_finite(kappa0, "kappa0")
    for k in (kappa0, kappa0 + h, kappa0 - h, kappa0 + 1j * h, kappa0 - 1j * h):
        _require_kappa_admissible(k, Q)
    tp = theta_n(base, kappa0 + h, z, depth, Q, orbit)
    tm = theta_n(base, kappa0 - h, z, depth, Q, orbit)
    tip = theta_n(base, kappa0 + 1j * h, z, depth, Q, orbit)
    tim = theta_n(base, kappa0 - 1j * h, z, depth, Q, orbit)
    return abs((tp - tm) + 1j * (tip - tim)) / (4.0 * h)


def kappa_derivative(
    base: Model,
    z: complex,
    kappa0: complex,
    h: float,
    Q: float,
    depth: int = 40,
    orbit: list[complex] | None = None,
) -> complex:
    """Central-difference holomorphic derivative dTheta/dkappa."""
    if h <= 0:
        raise RangeError("h must be positive")
    tp = theta_n(base, kappa0 + h, z, depth, Q, orbit)
    tm = theta_n(base, kappa0 - h, z, depth, Q, orbit)
    tip = theta_n(base, kappa0 + 1j * h, z, depth, Q, orbit)
    tim = theta_n(base, kappa0 - 1j * h, z, depth, Q, orbit)
    return ((tp - tm) - 1j * (tip - tim)) / (4.0 * h)


def motion_dilatation_ceiling(kappa: complex, Q_prime: float) -> float:
    """Reported dilatation ceiling 2|kappa|/(Q' - 1) for the holomorphic
    motion induced by the family; no coefficient is measured.
    """
    if Q_prime <= 1.0:
        raise RangeError(f"Q' = {Q_prime:g} must exceed 1")
    return 2.0 * abs(require_finite(kappa, "kappa")) / (Q_prime - 1.0)


# -- report emission ---------------------------------------------------

def write_sample_report(path, samples: list[ConjugacySample], summary: dict) -> None:
    payload = {"summary": summary, "samples": [s.to_json() for s in samples]}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_sample_csv(path, samples: list[ConjugacySample]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["z_re", "z_im", "theta_re", "theta_im", "depth", "tail_bound",
             "residual", "displacement"]
        )
        for s in samples:
            writer.writerow(
                [s.z.real, s.z.imag, s.theta.real, s.theta.imag, s.depth,
                 s.tail_bound, s.residual, s.displacement()]
            )
