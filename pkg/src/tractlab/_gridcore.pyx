# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled escape-time classification kernel.

Mirrors tractlab._gridpy.classify exactly: same pixel-center convention,
same overflow guard, same classification codes (0 = stayed large,
1 = orbit dropped below the escape radius, 2 = overflowed).
"""

import numpy as np

cimport numpy as cnp

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex csinh(double complex)
    double cabs(double complex)
    double creal(double complex)

DEF FAM_EXP_AFFINE = 0
DEF FAM_LAMBDA_EXPM1 = 1
DEF FAM_ZEXP = 2
DEF FAM_SINH = 3
DEF FAM_EXP_PLUS_KAPPA = 4

DEF GUARD = 700.0


cdef inline int overflow_guard(int family, double complex z) nogil:
    if family == FAM_SINH:
        return creal(z) > GUARD or creal(z) < -GUARD
    return creal(z) > GUARD


cdef inline double complex apply_map(
    int family, double complex a, double complex b, double complex z
) nogil:
    if family == FAM_EXP_AFFINE:
        return a * cexp(z) + b
    if family == FAM_LAMBDA_EXPM1:
        return a * (cexp(z) - 1.0)
    if family == FAM_ZEXP:
        return (z + 1.0) * cexp(z) - 1.0
    if family == FAM_SINH:
        return a * csinh(z)
    return cexp(z) + b


def classify(
    int family,
    double complex a,
    double complex b,
    double xmin,
    double xmax,
    double ymin,
    double ymax,
    int width,
    int height,
    double escape_radius,
    int horizon,
):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.empty(
        (height, width), dtype=np.uint8
    )
    cdef double dx = (xmax - xmin) / width
    cdef double dy = (ymax - ymin) / height
    cdef int i, j, n
    cdef double x, y
    cdef double complex z, w
    cdef int code
    with nogil:
        for i in range(height):
            # row 0 is the top of the window
            y = ymax - (i + 0.5) * dy
            for j in range(width):
                x = xmin + (j + 0.5) * dx
                z = x + 1j * y
                code = 0
                for n in range(horizon):
                    if overflow_guard(family, z):
                        code = 2
                        break
                    w = apply_map(family, a, b, z)
                    if w != w:  # NaN from an internal overflow
                        code = 2
                        break
                    if cabs(w) < escape_radius:
                        code = 1
                        break
                    if cabs(w) > 1e300:
                        code = 2
                        break
                    z = w
                out[i, j] = code
    return out
