"""NumPy escape-time classification kernel (fallback for the compiled one).

Must mirror tractlab._gridcore.classify: same pixel-center convention,
same overflow guard, same classification codes.
"""

from __future__ import annotations

import numpy as np

FAMILY_CODES = {
    "exp_affine": 0,
    "lambda_expm1": 1,
    "zexp": 2,
    "sinh": 3,
    "exp_plus_kappa": 4,
}

_GUARD = 700.0
_HUGE = 1e300


def _apply_map(family: int, a: complex, b: complex, z: np.ndarray) -> np.ndarray:
    if family == 0:
        return a * np.exp(z) + b
    if family == 1:
        return a * (np.exp(z) - 1.0)
    if family == 2:
        return (z + 1.0) * np.exp(z) - 1.0
    if family == 3:
        return a * np.sinh(z)
    return np.exp(z) + b


def classify(
    family: int,
    a: complex,
    b: complex,
    xmin: float,
    xmax: float,
    ymin: float,
    ymax: float,
    width: int,
    height: int,
    escape_radius: float,
    horizon: int,
) -> np.ndarray:
    dx = (xmax - xmin) / width
    dy = (ymax - ymin) / height
    x = xmin + (np.arange(width) + 0.5) * dx
    y = ymax - (np.arange(height) + 0.5) * dy  # row 0 is the top
    z = (x[None, :] + 1j * y[:, None]).astype(np.complex128)

    out = np.zeros((height, width), dtype=np.uint8)
    active = np.ones((height, width), dtype=bool)
    for _ in range(horizon):
        if family == 3:
            guarded = np.abs(z.real) > _GUARD
        else:
            guarded = z.real > _GUARD
        hit_guard = active & guarded
        out[hit_guard] = 2
        active &= ~guarded

        idx = np.nonzero(active)
        if idx[0].size == 0:
            break
        with np.errstate(over="ignore", invalid="ignore"):
            w = _apply_map(family, a, b, z[idx])
        mag = np.abs(w)
        bad = ~np.isfinite(w) | (mag > _HUGE)
        small = ~bad & (mag < escape_radius)
        rows, cols = idx
        out[rows[bad], cols[bad]] = 2
        out[rows[small], cols[small]] = 1
        keep = ~bad & ~small
        active[rows[~keep], cols[~keep]] = False
        z[rows[keep], cols[keep]] = w[keep]
    return out
