"""Catalog of model maps and their logarithmic lifts.

Two kinds of models are provided: the closed-form shifted exponential
``F(z) = e^z - R`` (the canonical explicit member of the class, already
normalized and of disjoint type for ``R >= 2``) and lifts of a small
catalog of entire plane maps, evaluated through the principal logarithm
with an explicit branch integer.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, SearchFailed

TWO_PI = 2.0 * math.pi

# double-precision exp overflows near Re z = 709; stay clear of it
EXP_OVERFLOW_GUARD = 700.0

_PLANE_FAMILIES = ("exp_affine", "lambda_expm1", "zexp", "sinh", "exp_plus_kappa")


def require_finite(z: complex, name: str = "z") -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"{name} must have finite components, got {z!r}")
    return z


@dataclass(frozen=True)
class EntireMapSpec:
    """A member of the plane-map catalog, with closed-form derivative."""

    family: str
    params: tuple[complex, ...] = ()

    def __post_init__(self):
        if self.family not in _PLANE_FAMILIES:
            raise ValueError(f"unknown map family {self.family!r}")
        for p in self.params:
            require_finite(p, "parameter")

    # -- constructors -------------------------------------------------
    @staticmethod
    def exp_affine(a: complex, b: complex) -> "EntireMapSpec":
        return EntireMapSpec("exp_affine", (complex(a), complex(b)))

    @staticmethod
    def lambda_expm1(lam: complex) -> "EntireMapSpec":
        return EntireMapSpec("lambda_expm1", (complex(lam),))

    @staticmethod
    def zexp() -> "EntireMapSpec":
        return EntireMapSpec("zexp")

    @staticmethod
    def sinh(lam: complex) -> "EntireMapSpec":
        return EntireMapSpec("sinh", (complex(lam),))

    @staticmethod
    def exp_plus_kappa(kappa: complex) -> "EntireMapSpec":
        return EntireMapSpec("exp_plus_kappa", (complex(kappa),))

    # -- evaluation ---------------------------------------------------
    def _guard(self, z: complex) -> None:
        bound = abs(z.real) if self.family == "sinh" else z.real
        if bound > EXP_OVERFLOW_GUARD:
            raise OverflowError(
                f"Re z = {z.real:g} exceeds the exponent-overflow guard"
            )

    def eval(self, z: complex) -> complex:
        z = require_finite(z)
        self._guard(z)
        if self.family == "exp_affine":
            a, b = self.params
            return a * cmath.exp(z) + b
        if self.family == "lambda_expm1":
            (lam,) = self.params
            return lam * (cmath.exp(z) - 1.0)
        if self.family == "zexp":
            return (z + 1.0) * cmath.exp(z) - 1.0
        if self.family == "sinh":
            (lam,) = self.params
            return lam * cmath.sinh(z)
        (kappa,) = self.params
        return cmath.exp(z) + kappa

    def deriv(self, z: complex) -> complex:
        z = require_finite(z)
        self._guard(z)
        if self.family == "exp_affine":
            a, _ = self.params
            return a * cmath.exp(z)
        if self.family == "lambda_expm1":
            (lam,) = self.params
            return lam * cmath.exp(z)
        if self.family == "zexp":
            return (z + 2.0) * cmath.exp(z)
        if self.family == "sinh":
            (lam,) = self.params
            return lam * cmath.cosh(z)
        return cmath.exp(z)

    def asymptotic_value(self) -> complex | None:
        """Limit of f(w) as Re w -> -infinity, where one exists."""
        if self.family == "exp_affine":
            return self.params[1]
        if self.family == "lambda_expm1":
            return -self.params[0]
        if self.family == "zexp":
            return -1.0 + 0.0j
        if self.family == "exp_plus_kappa":
            return self.params[0]
        return None  # sinh is unbounded in both real directions


@dataclass(frozen=True)
class LogLiftModel:
    """A log-coordinate model F: V -> {Re > Q} with V = F^{-1}({Re > Q}).

    ``offset`` records a normalization conjugation: the model evaluates
    F(z + offset) - offset, restricting the original domain to the part
    mapped ``offset`` deep into the half plane.
    """

    family: str  # "shifted_exp" | "lifted_entire"
    R: float = 10.0
    plane_map: EntireMapSpec | None = None
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    half_plane_Q: float = 0.0
    offset: float = 0.0

    def __post_init__(self):
        if self.family == "shifted_exp":
            if not math.isfinite(self.R):
                raise ValueError("R must be finite")
        elif self.family == "lifted_entire":
            if self.plane_map is None:
                raise ValueError("lifted_entire requires a plane_map")
        else:
            raise ValueError(f"unknown model family {self.family!r}")

    def shifted(self, extra_offset: float) -> "LogLiftModel":
        return replace(self, offset=self.offset + extra_offset)


@dataclass(frozen=True)
class KappaFamilyMember:
    """F_kappa(z) = F_0(z + kappa) on the translated domain V - kappa."""

    base: LogLiftModel
    kappa: complex

    def __post_init__(self):
        require_finite(self.kappa, "kappa")

    @property
    def half_plane_Q(self) -> float:
        return self.base.half_plane_Q


Model = LogLiftModel | KappaFamilyMember


def eval_F(model: Model, z: complex, branch: int = 0) -> complex:
    """Evaluate the log-coordinate map at z, checking domain membership.

    ``branch`` selects the 2*pi*i multiple added to the principal-log
    value of a lifted entire map; it is ignored for shifted_exp, whose
    value is single-valued and exact.
    """
    if isinstance(model, KappaFamilyMember):
        return eval_F(model.base, require_finite(z) + model.kappa, branch)
    z = require_finite(z)
    w = _eval_raw(model, z, branch)
    if w.real <= model.half_plane_Q:
        raise DomainError(
            f"z = {z!r} is outside the domain (Re F = {w.real:g} <= "
            f"{model.half_plane_Q:g})"
        )
    return w


def _eval_raw(model: LogLiftModel, z: complex, branch: int = 0) -> complex:
    zs = z + model.offset
    if zs.real > EXP_OVERFLOW_GUARD:
        raise OverflowError(
            f"Re z = {zs.real:g} exceeds the exponent-overflow guard"
        )
    if model.family == "shifted_exp":
        return cmath.exp(zs) - model.R - model.offset
    zeta = cmath.exp(zs)
    fv = model.plane_map.eval(zeta)
    if fv == 0:
        raise DomainError(f"f(exp z) = 0 at z = {z!r}; log lift undefined")
    w = cmath.log(fv) + TWO_PI * 1j * branch
    return w - model.offset


def eval_dF(model: Model, z: complex) -> complex:
    """Derivative of the log-coordinate map (branch independent)."""
    if isinstance(model, KappaFamilyMember):
        return eval_dF(model.base, require_finite(z) + model.kappa)
    z = require_finite(z)
    if not domain_contains(model, z):
        raise DomainError(f"z = {z!r} is outside the domain")
    zs = z + model.offset
    if zs.real > EXP_OVERFLOW_GUARD:
        raise OverflowError(
            f"Re z = {zs.real:g} exceeds the exponent-overflow guard"
        )
    if model.family == "shifted_exp":
        return cmath.exp(zs)
    zeta = cmath.exp(zs)
    fv = model.plane_map.eval(zeta)
    return model.plane_map.deriv(zeta) * zeta / fv


def domain_contains(model: Model, z: complex) -> bool:
    """Membership in V = F^{-1}({Re > Q}); never raises."""
    if isinstance(model, KappaFamilyMember):
        return domain_contains(model.base, complex(z) + model.kappa)
    try:
        z = require_finite(z)
    except DomainError:
        return False
    zs = z + model.offset
    if zs.real > EXP_OVERFLOW_GUARD:
        return _contains_beyond_guard(model, zs)
    try:
        w = _eval_raw(model, z)
    except DomainError:
        return False
    except OverflowError:
        return _overflowed_membership(model, z)
    return w.real > model.half_plane_Q

def _contains_beyond_guard(model: LogLiftModel, zs: complex) -> bool:
    # Re exp(zs) = e^{Re zs} cos(Im zs) with e^{Re zs} astronomically large,
    # so only the sign structure of cos decides membership.
    c = math.cos(zs.imag)
    if model.family == "shifted_exp":
        return c > 0.0
    if c > 0.0:
        # exp(zs) has a huge positive real part; every catalog map has
        # |f| -> infinity there, so log|f| certainly exceeds Q + offset.
        return True
    if model.plane_map.family == "sinh":
        return c < 0.0  # sinh also blows up toward -infinity
    limit = model.plane_map.asymptotic_value()
    if limit is None or limit == 0:
        return False
    return math.log(abs(limit)) - model.offset > model.half_plane_Q


def _overflowed_membership(model: LogLiftModel, z: complex) -> bool:
    # f(exp z) overflowed inside the plane map; |f| is then certainly
    # larger than e^{Q + offset}, so the point is in the domain.
    try:
        zeta = cmath.exp(z + model.offset)
    except OverflowError:
        return False
    bound = abs(zeta.real) if model.plane_map.family == "sinh" else zeta.real
    return bound > EXP_OVERFLOW_GUARD


def normalize(
    model: LogLiftModel,
    search: tuple[float, float] = (0.0, 64.0),
    samples: int = 1000,
    seed: int = 0,
) -> LogLiftModel:
    """Restrict-and-conjugate until |F'| >= 2 holds on a verification sample.

    Returns the model unchanged when its current sample already certifies
    the bound; otherwise bisects the extra offset and records it.
    """
    lo, hi = float(search[0]), float(search[1])
    if _certify_expansion(model.shifted(lo), samples, seed) and lo == 0.0:
        return model
    if not _certify_expansion(model.shifted(hi), samples, seed):
        raise SearchFailed(
            f"no offset in [{lo:g}, {hi:g}] certifies |F'| >= 2 on the sample"
        )
    if _certify_expansion(model.shifted(lo), samples, seed):
        return model.shifted(lo)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _certify_expansion(model.shifted(mid), samples, seed):
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-9:
            break
    return model.shifted(hi)


def _certify_expansion(model: LogLiftModel, samples: int, seed: int) -> bool:
    for z in sample_domain_points(model, samples, seed=seed):
        try:
            if abs(eval_dF(model, z)) < 2.0:
                return False
        except OverflowError:
            continue
    return True


def sample_domain_points(
    model: Model,
    count: int,
    seed: int = 0,
    re_range: tuple[float, float] = (-3.0, 8.0),
    tract_indices: int = 2,
) -> list[complex]:
    """Draw ``count`` domain points by rejection sampling; deterministic."""
    rng = np.random.default_rng(seed)
    points: list[complex] = []
    attempts = 0
    span = TWO_PI * (tract_indices + 0.5)
    while len(points) < count and attempts < 1000 * count:
        attempts += 1
        z = complex(
            rng.uniform(*re_range),
            rng.uniform(-span, span),
        )
        if domain_contains(model, z):
            points.append(z)
    if len(points) < count:
        raise SearchFailed(
            f"could only sample {len(points)}/{count} domain points"
        )
    return points


# -- JSON descriptors ------------------------------------------------

def _complex_from_json(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def plane_map_from_json(desc: dict) -> EntireMapSpec:
    family = desc["family"]
    if family == "exp_affine":
        return EntireMapSpec.exp_affine(
            _complex_from_json(desc["a"]), _complex_from_json(desc["b"])
        )
    if family == "lambda_expm1":
        return EntireMapSpec.lambda_expm1(_complex_from_json(desc["lambda"]))
    if family == "zexp":
        return EntireMapSpec.zexp()
    if family == "sinh":
        return EntireMapSpec.sinh(_complex_from_json(desc["lambda"]))
    if family == "exp_plus_kappa":
        return EntireMapSpec.exp_plus_kappa(_complex_from_json(desc["kappa"]))
    raise ValueError(f"unknown map family {family!r}")


def model_from_json(desc: dict) -> LogLiftModel:
    family = desc["family"]
    if family == "shifted_exp":
        return LogLiftModel(
            "shifted_exp",
            R=float(desc.get("R", 10.0)),
            half_plane_Q=float(desc.get("Q", 0.0)),
        )
    if family == "lifted_entire":
        newton = desc.get("newton", {})
        return LogLiftModel(
            "lifted_entire",
            plane_map=plane_map_from_json(desc["map"]),
            newton_tol=float(newton.get("tol", 1e-12)),
            newton_max_iter=int(newton.get("max_iter", 50)),
            half_plane_Q=float(desc.get("Q", 0.0)),
        )
    raise ValueError(f"unknown model family {family!r}")


def model_to_json(model: LogLiftModel) -> dict:
    if model.family == "shifted_exp":
        return {"family": "shifted_exp", "R": model.R, "Q": model.half_plane_Q}
    m = model.plane_map
    desc: dict = {"family": m.family}
    if m.family == "exp_affine":
        desc["a"] = [m.params[0].real, m.params[0].imag]
        desc["b"] = [m.params[1].real, m.params[1].imag]
    elif m.family in ("lambda_expm1", "sinh"):
        desc["lambda"] = [m.params[0].real, m.params[0].imag]
    elif m.family == "exp_plus_kappa":
        desc["kappa"] = [m.params[0].real, m.params[0].imag]
    return {
        "family": "lifted_entire",
        "map": desc,
        "newton": {"tol": model.newton_tol, "max_iter": model.newton_max_iter},
        "Q": model.half_plane_Q,
    }
