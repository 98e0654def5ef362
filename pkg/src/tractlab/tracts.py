"""Tract identification, inverse branches, and continuous path lifting.

Branch indices are carried explicitly with every inverse evaluation;
they are never inferred from the principal argument after the fact.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass

from .errors import ContinuationError, DomainError, NewtonDiverged, RangeError
from .models import (
    TWO_PI,
    KappaFamilyMember,
    LogLiftModel,
    Model,
    domain_contains,
    eval_F,
    require_finite,
)

__all__ = [
    "TractAddress",
    "LiftedPath",
    "domain_contains",
    "tract_of",
    "inverse_branch",
    "lift_path",
]

# a lift step larger than this forces bisection of the source step, so a
# branch integer can never silently slip by a full period
MAX_LIFT_STEP = math.pi / 2
MAX_BISECTION_DEPTH = 48


@dataclass(frozen=True)
class TractAddress:
    branch_index: int
    inner_branch: int = 0


@dataclass
class LiftedPath:
    samples: list[complex]
    source_samples: list[complex]
    branch_log: list[int]

    def endpoint(self) -> complex:
        return self.samples[-1]

    def write_csv(self, path) -> None:
        n = len(self.samples)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["t", "source_re", "source_im", "lift_re", "lift_im", "branch"]
            )
            for i, (src, lift, b) in enumerate(
                zip(self.source_samples, self.samples, self.branch_log)
            ):
                t = i / (n - 1) if n > 1 else 0.0
                writer.writerow([t, src.real, src.imag, lift.real, lift.imag, b])


def tract_of(model: Model, z: complex) -> TractAddress:
    """Address of the unique tract containing z."""
    if isinstance(model, KappaFamilyMember):
        return tract_of(model.base, require_finite(z) + model.kappa)
    z = require_finite(z)
    if not domain_contains(model, z):
        raise DomainError(f"z = {z!r} is not in the domain")
    k = round(z.imag / TWO_PI)
    if model.family == "shifted_exp":
        return TractAddress(k)
    inner = 0
    if model.plane_map.family == "sinh" and math.cos(z.imag) < 0.0:
        # sinh has two tracts per period strip, toward Re exp(z) = +/-inf;
        # sign(Re exp(z)) = sign(cos Im z) picks the one containing z
        inner = 1
    return TractAddress(k, inner)


def inverse_branch(
    model: Model,
    tract: TractAddress,
    w: complex,
    seed: complex | None = None,
) -> complex:
    """The preimage of w in the given tract.

    Closed form for shifted_exp; Newton continuation for lifted entire
    maps, seeded from ``seed`` when given and from the tract's asymptotic
    base point otherwise.
    """
    if isinstance(model, KappaFamilyMember):
        inner = inverse_branch(
            model.base, tract, w, None if seed is None else seed + model.kappa
        )
        return inner - model.kappa
    w = require_finite(w, "w")
    if w.real <= model.half_plane_Q:
        raise RangeError(
            f"Re w = {w.real:g} is not inside the half-plane "
            f"{{Re > {model.half_plane_Q:g}}}"
        )
    if model.family == "shifted_exp":
        base = cmath.log(w + model.R + model.offset)
        return base + TWO_PI * 1j * tract.branch_index - model.offset
    return _newton_inverse(model, tract, w, seed)


def _asymptotic_seed(model: LogLiftModel, tract: TractAddress, w: complex) -> complex:
    """Approximate inverse from the exponential-dominated asymptotics."""
    pm = model.plane_map
    ws = w + model.offset
    if pm.family == "exp_affine":
        u = ws - cmath.log(pm.params[0])
    elif pm.family == "lambda_expm1":
        u = ws - cmath.log(pm.params[0])
    elif pm.family == "zexp":
        u = ws - cmath.log(ws) if ws != 0 else ws
    elif pm.family == "exp_plus_kappa":
        u = ws
    else:  # sinh
        lam_half = cmath.log(pm.params[0] / 2.0)
        if tract.inner_branch == 0:
            u = ws - lam_half
        else:
            u = lam_half - ws + 1j * math.pi
    if u == 0:
        u = 1.0
    zs = cmath.log(u) + TWO_PI * 1j * tract.branch_index
    return zs - model.offset


def _newton_inverse(
    model: LogLiftModel,
    tract: TractAddress,
    w: complex,
    seed: complex | None,
) -> complex:
    ws = w + model.offset
    if ws.real > 690.0:
        raise OverflowError("exp(w) overflows; cannot form the Newton target")
    target = cmath.exp(ws)
    z = seed if seed is not None else _asymptotic_seed(model, tract, w)
    pm = model.plane_map
    tol = model.newton_tol * (1.0 + abs(target))
    for _ in range(model.newton_max_iter):
        zeta = cmath.exp(z + model.offset)
        g = pm.eval(zeta) - target
        if abs(g) <= tol:
            return z
        dg = pm.deriv(zeta) * zeta
        if dg == 0:
            break
        step = g / dg
        # damp wild steps; the seed is close, so this rarely triggers
        if abs(step) > 1.0:
            step /= abs(step)
        z -= step
    raise NewtonDiverged(
        f"Newton failed to invert w = {w!r} in tract {tract} from seed {seed!r}"
    )


def _lift_step(model: Model, z_cur: complex, w: complex) -> tuple[complex, int]:
    """Lift of w chosen continuously from the current lift value z_cur."""
    if isinstance(model, KappaFamilyMember):
        z, b = _lift_step(model.base, z_cur + model.kappa, w)
        return z - model.kappa, b
    if model.family == "shifted_exp":
        base = cmath.log(w + model.R + model.offset)
        k = round((z_cur.imag - base.imag) / TWO_PI)
        return base + TWO_PI * 1j * k - model.offset, k
    tract = TractAddress(round(z_cur.imag / TWO_PI))
    z = _newton_inverse(model, tract, w, seed=z_cur)
    return z, round(z.imag / TWO_PI)


def lift_path(
    model: Model,
    tract_at_start: TractAddress,
    path: list[complex],
) -> LiftedPath:
    """Continuous lift of a half-plane curve under the inverse of F.

    Steps whose lift would jump by more than pi/2 are bisected in the
    source plane; refinement failure raises ContinuationError.
    """
    if not path:
        raise RangeError("path must contain at least one sample")
    Q = model.half_plane_Q
    for w in path:
        w = require_finite(w, "path sample")
        if w.real <= Q:
            raise RangeError(f"path sample {w!r} lies outside the half-plane")
    z0 = inverse_branch(model, tract_at_start, path[0])
    samples = [z0]
    sources = [complex(path[0])]
    branches = [tract_at_start.branch_index]

    def advance(z_cur: complex, w_from: complex, w_to: complex, depth: int):
        z_next, b = _lift_step(model, z_cur, w_to)
        if abs(z_next - z_cur) <= MAX_LIFT_STEP:
            samples.append(z_next)
            sources.append(complex(w_to))
            branches.append(b)
            return z_next
        if depth >= MAX_BISECTION_DEPTH:
            raise ContinuationError(
                f"cannot keep the branch continuous near w = {w_to!r}"
            )
        mid = 0.5 * (w_from + w_to)
        z_mid = advance(z_cur, w_from, mid, depth + 1)
        return advance(z_mid, mid, w_to, depth + 1)

    z_cur = z0
    for w_prev, w_next in zip(path, path[1:]):
        z_cur = advance(z_cur, complex(w_prev), complex(w_next), 0)
    return LiftedPath(samples, sources, branches)
