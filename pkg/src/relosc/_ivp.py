"""Embedded Dormand-Prince 5(4) stepping with PI control.

Shared tableau plus a small driver for fixed-size linear systems
(monodromy columns and their parameter derivatives).  The Prufer engine
keeps its own loop because it carries integer winding bookkeeping; both
use the coefficients below.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

from .errors import StepUnderflow

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# difference between the 5th and 4th order weights (error estimator)
E1 = 35 / 384 - 5179 / 57600
E3 = 500 / 1113 - 7571 / 16695
E4 = 125 / 192 - 393 / 640
E5 = -2187 / 6784 + 92097 / 339200
E6 = 11 / 84 - 187 / 2100
E7 = -1 / 40

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
ALPHA = 0.7 / 5.0
BETA = 0.4 / 5.0


def integrate_vector(
    f: Callable[[float, tuple[float, ...]], tuple[float, ...]],
    x0: float,
    y0: Sequence[float],
    x1: float,
    tol: float,
    breakpoints: Sequence[float] = (),
) -> tuple[float, ...]:
    """Integrate y' = f(x, y) from x0 to x1; returns y(x1).

    Error controlled per component against tol * (1 + |y|); breakpoints are
    forced step boundaries so discontinuous right-hand sides stay accurate.
    """
    y = tuple(float(v) for v in y0)
    if x1 == x0:
        return y
    sign = 1.0 if x1 > x0 else -1.0
    stops = sorted((b for b in breakpoints if min(x0, x1) < b < max(x0, x1)), reverse=(sign < 0))
    stops.append(x1)

    x = x0
    h = sign * min(0.1 * (1.0 + abs(x0)), abs(x1 - x0))
    errold = 1e-4
    for stop in stops:
        while sign * (stop - x) > 0.0:
            if abs(h) < 1e-14 * (1.0 + abs(x)):
                raise StepUnderflow(f"step size underflow at x={x}")
            if sign * (x + h - stop) > 0.0:
                h = stop - x
            ynew, err = _dopri_step(f, x, y, h, tol)
            if err <= 1.0:
                x = stop if abs(stop - (x + h)) <= 1e-12 * (1.0 + abs(stop)) else x + h
                y = ynew
                fac = SAFETY * err ** (-ALPHA) * errold ** BETA if err > 0 else MAX_FACTOR
                h *= min(MAX_FACTOR, max(MIN_FACTOR, fac))
                errold = max(err, 1e-4)
            else:
                h *= max(MIN_FACTOR, SAFETY * err ** (-0.2))
    return y


def _dopri_step(f, x, y, h, tol):
    # boundary stages read the right-hand side a hair inside the step so a
    # right-continuous coefficient jump on a forced stop stays on its own side
    bias = math.copysign(min(1e-12 * (1.0 + abs(x)), 0.125 * abs(h)), h)
    k1 = f(x + bias, y)
    k2 = f(x + C2 * h, tuple(yi + h * A21 * a for yi, a in zip(y, k1)))
    k3 = f(x + C3 * h, tuple(yi + h * (A31 * a + A32 * b) for yi, a, b in zip(y, k1, k2)))
    k4 = f(x + C4 * h, tuple(yi + h * (A41 * a + A42 * b + A43 * c) for yi, a, b, c in zip(y, k1, k2, k3)))
    k5 = f(
        x + C5 * h,
        tuple(yi + h * (A51 * a + A52 * b + A53 * c + A54 * d) for yi, a, b, c, d in zip(y, k1, k2, k3, k4)),
    )
    x_end = x + h - bias
    k6 = f(
        x_end,
        tuple(
            yi + h * (A61 * a + A62 * b + A63 * c + A64 * d + A65 * e)
            for yi, a, b, c, d, e in zip(y, k1, k2, k3, k4, k5)
        ),
    )
    ynew = tuple(
        yi + h * (B1 * a + B3 * c + B4 * d + B5 * e + B6 * g)
        for yi, a, c, d, e, g in zip(y, k1, k3, k4, k5, k6)
    )
    k7 = f(x_end, ynew)
    err = 0.0
    for yi, yn, a, c, d, e, g, s in zip(y, ynew, k1, k3, k4, k5, k6, k7):
        est = h * (E1 * a + E3 * c + E4 * d + E5 * e + E6 * g + E7 * s)
        scale = tol * (1.0 + max(abs(yi), abs(yn)))
        err = max(err, abs(est) / scale)
    return ynew, err
