"""Prufer-angle integration of Sturm-Liouville solutions.

A solution u of -(p u')' + q u = lam r u is represented in polar form
u = rho sin(theta), p u' = rho cos(theta).  The angle obeys

    theta' = cos^2(theta) / p + (lam r - q) sin^2(theta)

and the log-amplitude (log rho)' = (1/p - (lam r - q)) sin(theta) cos(theta).
Counting zeros and Wronskian sign flips reduces to reading theta at two
points, so the angle is integrated directly -- never the linear system --
and stored as an integer winding k plus a residual in [0, pi).  That keeps
the count arithmetic exact even when theta reaches thousands of radians on
half-line runs, and the amplitude can never overflow.

At a multiple of pi the angle derivative is cos^2/p > 0, so theta crosses
each level kπ strictly upward in the direction of increasing x; the step
controller caps single-step angle increments well below pi, which makes the
winding bookkeeping loss-free.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import _ivp
from .coefficients import SLProblem, _compiled, breakpoints_in, domain_start, eval_coefficients
from .errors import AboveEssentialSpectrum, NotCovered, OutOfDomain, SingularLeftEndpoint, StepUnderflow

__all__ = ["PruferTrajectory", "integrate_prufer", "psi_minus", "psi_plus"]

_PI = math.pi
_MAX_ANGLE_STEP = 1.2  # max |dtheta| per accepted step, keeps winding carry exact


@dataclass(frozen=True)
class PruferTrajectory:
    """Continuous Prufer angle and log-amplitude of one solution on a grid.

    ``theta(x) = winding[i] * pi + residual[i]`` at ``grid[i]`` with
    residual in [0, pi).  The grid is stored ascending regardless of the
    integration direction.  ``angle_tolerance`` accumulates the embedded
    error estimates of every accepted step (a running bound on |theta error|).
    """

    lam: float
    grid: np.ndarray
    winding: np.ndarray
    residual: np.ndarray
    log_rho: np.ndarray
    direction: str  # "forward" (from a) or "backward" (from b / the tail)
    angle_tolerance: float
    problem: SLProblem

    @property
    def theta(self) -> np.ndarray:
        return self.winding * _PI + self.residual

    @property
    def x_min(self) -> float:
        return float(self.grid[0])

    @property
    def x_max(self) -> float:
        return float(self.grid[-1])

    def covers(self, x: float) -> bool:
        return self.x_min - 1e-12 <= x <= self.x_max + 1e-12

    def node_index(self, x: float) -> int:
        """Index of the grid node matching x, or -1 when x is not a node."""
        i = bisect_left(self.grid, x - 1e-12 * (1.0 + abs(x)))
        if i < len(self.grid) and abs(self.grid[i] - x) <= 1e-12 * (1.0 + abs(x)):
            return i
        return -1

    def winding_at(self, x: float) -> tuple[int, float]:
        """Exact (winding, residual) at a grid node; NotCovered otherwise."""
        i = self.node_index(x)
        if i < 0:
            raise NotCovered(f"x={x} is not a node of this trajectory")
        return int(self.winding[i]), float(self.residual[i])

    def theta_at(self, x: float) -> float:
        """Angle at x: exact on nodes, cubic Hermite between nodes."""
        i = self.node_index(x)
        if i >= 0:
            return float(self.winding[i]) * _PI + float(self.residual[i])
        if not self.covers(x):
            raise NotCovered(f"x={x} outside [{self.x_min}, {self.x_max}]")
        j = bisect_left(self.grid, x)
        xa, xb = float(self.grid[j - 1]), float(self.grid[j])
        ya = float(self.winding[j - 1]) * _PI + float(self.residual[j - 1])
        yb = float(self.winding[j]) * _PI + float(self.residual[j])
        fa = _theta_slope(self.problem, self.lam, xa, ya)
        fb = _theta_slope(self.problem, self.lam, xb, yb)
        h = xb - xa
        t = (x - xa) / h
        h00 = (1 + 2 * t) * (1 - t) ** 2
        h10 = t * (1 - t) ** 2
        h01 = t * t * (3 - 2 * t)
        h11 = t * t * (t - 1)
        return h00 * ya + h10 * h * fa + h01 * yb + h11 * h * fb

    def log_rho_at(self, x: float) -> float:
        i = self.node_index(x)
        if i >= 0:
            return float(self.log_rho[i])
        if not self.covers(x):
            raise NotCovered(f"x={x} outside [{self.x_min}, {self.x_max}]")
        j = bisect_left(self.grid, x)
        xa, xb = float(self.grid[j - 1]), float(self.grid[j])
        t = (x - xa) / (xb - xa)
        return float((1 - t) * self.log_rho[j - 1] + t * self.log_rho[j])

    def shifted(self, m: int) -> "PruferTrajectory":
        """Copy with theta shifted by m*pi (flip counts are invariant under this)."""
        return replace(self, winding=self.winding + int(m))


def _theta_slope(problem: SLProblem, lam: float, x: float, theta: float) -> float:
    p, q, r = eval_coefficients(problem.coefficients, x)
    s, c = math.sin(theta), math.cos(theta)
    return c * c / p + (lam * r - q) * s * s


# ---------------------------------------------------------------------------
# the integrator
# ---------------------------------------------------------------------------

def _split_angle(theta: float) -> tuple[int, float]:
    k = math.floor(theta / _PI)
    res = theta - k * _PI
    if res >= _PI:  # representable rounding edge
        k += 1
        res = theta - k * _PI
    if res < 0.0:
        res = 0.0
    return k, res


def integrate_prufer(
    problem: SLProblem,
    lam: float,
    x_start: float,
    theta_start: float,
    x_end: float,
    tol: float = 1e-9,
    checkpoints: Sequence[float] = (),
) -> PruferTrajectory:
    """Integrate the Prufer angle from (x_start, theta_start) to x_end.

    The controller keeps the local angle error below ``tol`` per unit
    length, so |theta(x) - exact| <= tol * (1 + |x - x_start|) along the
    run.  Breakpoints of piecewise coefficients and every requested
    checkpoint are forced step boundaries and exact grid nodes.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    lo, hi = min(x_start, x_end), max(x_start, x_end)
    if lo < domain_start(problem.coefficients) - 1e-12:
        raise OutOfDomain("integration range leaves the coefficient domain")
    pqr = _compiled(problem.coefficients)

    def rhs(x: float, theta: float) -> tuple[float, float]:
        p, q, r = pqr(x)
        s, c = math.sin(theta), math.cos(theta)
        w = lam * r - q
        return c * c / p + w * s * s, (1.0 / p - w) * s * c

    sign = 1.0 if x_end >= x_start else -1.0
    stops = set(breakpoints_in(problem.coefficients, lo, hi))
    stops.update(c for c in checkpoints if lo < c < hi and c != x_start)
    stops = sorted(stops, reverse=(sign < 0))
    stops.append(x_end)

    k, res = _split_angle(theta_start)
    xs = [x_start]
    ks = [k]
    rs = [res]
    ss = [0.0]
    logrho = 0.0
    acc_err = 0.0

    if x_end == x_start:
        return _finalize(problem, lam, xs, ks, rs, ss, sign, acc_err)

    x = x_start
    h = sign * min(0.1 * (1.0 + abs(x_start)), hi - lo)
    errold = 1e-4
    for stop in stops:
        while sign * (stop - x) > 0.0:
            if abs(h) < 1e-14 * (1.0 + abs(x)):
                raise StepUnderflow(f"Prufer step underflow at x={x} (lam={lam})")
            if sign * (x + h - stop) > 0.0:
                h = stop - x
            dth, dlr, est = _prufer_step(rhs, x, res, h)
            err = est / (tol * abs(h))
            if err <= 1.0 and abs(dth) <= _MAX_ANGLE_STEP:
                x = stop if abs(stop - (x + h)) <= 1e-12 * (1.0 + abs(stop)) else x + h
                raw = res + dth
                carry = math.floor(raw / _PI)
                k += carry
                res = raw - carry * _PI
                if res < 0.0:  # fp edge of the floor above
                    res += _PI
                    k -= 1
                elif res >= _PI:
                    res -= _PI
                    k += 1
                logrho += dlr
                acc_err += abs(est)
                xs.append(x)
                ks.append(k)
                rs.append(res)
                ss.append(logrho)
                fac = _ivp.SAFETY * err ** (-_ivp.ALPHA) * errold**_ivp.BETA if err > 0 else _ivp.MAX_FACTOR
                h *= min(_ivp.MAX_FACTOR, max(_ivp.MIN_FACTOR, fac))
                errold = max(err, 1e-4)
            else:
                shrink = _ivp.SAFETY * err ** (-0.2) if err > 1.0 else 0.5
                h *= max(_ivp.MIN_FACTOR, min(0.9, shrink))
    return _finalize(problem, lam, xs, ks, rs, ss, sign, acc_err)


def _prufer_step(rhs, x, theta, h):
    """One Dormand-Prince step on (theta, log rho); log rho is slaved to theta.

    The two stages that sit exactly on the step boundary read the
    coefficients a hair inside the step, so a step that starts or lands on
    a breakpoint of a right-continuous piecewise family samples the cell it
    actually traverses.
    """
    bias = math.copysign(min(1e-12 * (1.0 + abs(x)), 0.125 * abs(h)), h)
    k1t, k1s = rhs(x + bias, theta)
    k2t, k2s = rhs(x + _ivp.C2 * h, theta + h * _ivp.A21 * k1t)
    k3t, k3s = rhs(x + _ivp.C3 * h, theta + h * (_ivp.A31 * k1t + _ivp.A32 * k2t))
    k4t, k4s = rhs(x + _ivp.C4 * h, theta + h * (_ivp.A41 * k1t + _ivp.A42 * k2t + _ivp.A43 * k3t))
    k5t, k5s = rhs(
        x + _ivp.C5 * h,
        theta + h * (_ivp.A51 * k1t + _ivp.A52 * k2t + _ivp.A53 * k3t + _ivp.A54 * k4t),
    )
    x_end = x + h - bias
    k6t, k6s = rhs(
        x_end,
        theta + h * (_ivp.A61 * k1t + _ivp.A62 * k2t + _ivp.A63 * k3t + _ivp.A64 * k4t + _ivp.A65 * k5t),
    )
    dth = h * (_ivp.B1 * k1t + _ivp.B3 * k3t + _ivp.B4 * k4t + _ivp.B5 * k5t + _ivp.B6 * k6t)
    dlr = h * (_ivp.B1 * k1s + _ivp.B3 * k3s + _ivp.B4 * k4s + _ivp.B5 * k5s + _ivp.B6 * k6s)
    k7t, k7s = rhs(x_end, theta + dth)
    est_t = abs(h * (_ivp.E1 * k1t + _ivp.E3 * k3t + _ivp.E4 * k4t + _ivp.E5 * k5t + _ivp.E6 * k6t + _ivp.E7 * k7t))
    est_s = abs(h * (_ivp.E1 * k1s + _ivp.E3 * k3s + _ivp.E4 * k4s + _ivp.E5 * k5s + _ivp.E6 * k6s + _ivp.E7 * k7s))
    return dth, dlr, max(est_t, est_s)


def _finalize(problem, lam, xs, ks, rs, ss, sign, acc_err) -> PruferTrajectory:
    grid = np.asarray(xs, dtype=float)
    winding = np.asarray(ks, dtype=np.int64)
    residual = np.asarray(rs, dtype=float)
    log_rho = np.asarray(ss, dtype=float)
    if sign < 0:
        grid = grid[::-1].copy()
        winding = winding[::-1].copy()
        residual = residual[::-1].copy()
        log_rho = log_rho[::-1].copy()
    return PruferTrajectory(
        lam=lam,
        grid=grid,
        winding=winding,
        residual=residual,
        log_rho=log_rho,
        direction="forward" if sign > 0 else "backward",
        angle_tolerance=acc_err,
        problem=problem,
    )


# ---------------------------------------------------------------------------
# canonical solutions
# ---------------------------------------------------------------------------

def psi_minus(
    problem: SLProblem,
    lam: float,
    x_cut: float,
    tol: float = 1e-9,
    checkpoints: Sequence[float] = (),
) -> PruferTrajectory:
    """Solution satisfying the left boundary condition: theta(a) = alpha."""
    if not problem.regular_a:
        raise SingularLeftEndpoint("psi_minus needs a regular left endpoint")
    if problem.regular_b and x_cut > problem.b + 1e-12:
        raise ValueError("x_cut beyond the right endpoint")
    return integrate_prufer(problem, lam, problem.a, problem.alpha, x_cut, tol, checkpoints)


def psi_plus(
    problem: SLProblem,
    lam: float,
    x_cut: float,
    tol: float = 1e-9,
    checkpoints: Sequence[float] = (),
    x_max: float | None = None,
    tail_period: float | None = None,
) -> PruferTrajectory:
    """Solution attached to the right endpoint, integrated backward to x_cut.

    Regular b: theta(b) = beta - pi, which lies in (-pi, 0].

    Singular b: the trajectory starts on the exponentially decaying branch
    at ``x_max``.  For decaying tails the frozen-coefficient branch is
    tan(theta) = -1 / sqrt(p (q - lam r)), pinned into (-pi, 0]; it requires
    q - lam r > 0 on the tail (otherwise AboveEssentialSpectrum).  When the
    tail is periodic with period ``tail_period``, the decaying direction is
    taken from the contracting eigenvector of the period map over
    [x_max, x_max + period] instead (the frozen branch is its
    constant-coefficient special case).  Either way the initialization error
    decays backward at the dichotomy rate; doubling x_max must leave the
    trajectory unchanged before it is trusted (see the stabilization tests).
    """
    if problem.regular_b:
        start = problem.b
        theta0 = problem.beta - _PI
        if x_cut > problem.b:
            raise ValueError("x_cut beyond the right endpoint")
    else:
        if x_max is None:
            if problem.truncation is None:
                raise ValueError("singular right endpoint needs x_max or a truncation schedule")
            x_max = problem.truncation.x_max_sequence[-1]
        start = float(x_max)
        theta0 = _decaying_branch_angle(problem, lam, start, tail_period, tol)
    if x_cut >= start:
        raise ValueError("x_cut must lie strictly left of the start abscissa")
    return integrate_prufer(problem, lam, start, theta0, x_cut, tol, checkpoints)


def _decaying_branch_angle(
    problem: SLProblem, lam: float, x_max: float, tail_period: float | None, tol: float
) -> float:
    coeffs = problem.coefficients
    if tail_period is None:
        for xi in (x_max, 1.25 * x_max, 1.5 * x_max, 2.0 * x_max):
            p, q, r = eval_coefficients(coeffs, xi)
            if q - lam * r <= 0.0:
                raise AboveEssentialSpectrum(
                    f"q - lam*r = {q - lam * r} <= 0 at x={xi}: no decaying dichotomy at lam={lam}"
                )
        p, q, r = eval_coefficients(coeffs, x_max)
        return -math.atan(1.0 / math.sqrt(p * (q - lam * r)))

    # periodic tail: contracting Floquet direction of the period map at x_max
    pqr = _compiled(coeffs)

    def rhs(x: float, y: tuple[float, ...]) -> tuple[float, ...]:
        p, q, r = pqr(x)
        w = q - lam * r
        u1, v1, u2, v2 = y
        return (v1 / p, w * u1, v2 / p, w * u2)

    bps = breakpoints_in(coeffs, x_max, x_max + tail_period)
    m = _ivp.integrate_vector(rhs, x_max, (1.0, 0.0, 0.0, 1.0), x_max + tail_period, min(tol, 1e-10), bps)
    m11, m21, m12, m22 = m  # columns (u1,v1), (u2,v2)
    disc = m11 + m22
    if disc * disc <= 4.0:
        raise AboveEssentialSpectrum(f"|discriminant| <= 2 at lam={lam}: inside an essential spectral band")
    root = math.sqrt(disc * disc - 4.0)
    mu = 0.5 * (disc - root) if disc > 0 else 0.5 * (disc + root)  # |mu| < 1 branch
    # eigenvector of the period map for mu, in (u, pu') coordinates
    if abs(m12) >= abs(m21):
        vec = (m12, mu - m11)
    else:
        vec = (mu - m22, m21)
    theta = math.atan2(vec[0], vec[1])
    while theta > 0.0:
        theta -= _PI
    while theta <= -_PI:
        theta += _PI
    return theta
