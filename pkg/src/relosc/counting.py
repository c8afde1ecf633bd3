"""Weighted sign-flip counts of Wronskians via Prufer angle differences.

For two solutions u0, u1 (of possibly different operators sharing p and r)
the modified Wronskian W_x(u0, u1) = u0 p u1' - p u0' u1 satisfies

    W_x(u0, u1) = -rho0 rho1 sin(Delta(x)),    Delta = theta1 - theta0,

so it vanishes exactly where the angles differ by a multiple of pi.  The
weighted number of sign flips on (c, d) is the intrinsic integer

    count = ceil(Delta(d)/pi) - floor(Delta(c)/pi) - 1.

The count is computed only from Delta at the two interval endpoints, in
exact integer arithmetic on the (winding, residual) representation; zero
scanning exists purely as a cross-check because it misses tangential zeros.
Endpoints whose Delta sits within ``eps_pi`` of a multiple of pi are
flagged and both rounding candidates are reported instead of silently
picking a side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

from .coefficients import SLProblem, TruncationSchedule, pr_signature
from .errors import AboveEssentialSpectrum, NotCovered
from .prufer import PruferTrajectory, psi_minus, psi_plus

__all__ = [
    "FlipCount",
    "LimitFlipCount",
    "OscillationClassification",
    "delta_angle",
    "wronskian_value",
    "flip_count",
    "limit_flip_count",
    "classify_relative_oscillation",
]

_PI = math.pi
_LOG_CLAMP = 700.0  # exp stays finite; the sign is exact regardless

Side = Literal["plus", "minus"]


@dataclass(frozen=True)
class FlipCount:
    """Weighted sign flips of W(u0, u1) on one interval.

    ``count_on_interval`` follows the exact endpoint formula.  A flagged
    endpoint means |Delta mod pi| < eps_pi there; ``ambiguity`` then holds
    the (min, max) counts over the admissible rounding choices.
    """

    count_on_interval: int
    interval: tuple[float, float]
    delta_at_c: float
    delta_at_d: float
    endpoint_flags: tuple[str, str]  # "clear" | "near_multiple_of_pi"
    ambiguity: tuple[int, int] | None = None

    @property
    def flagged(self) -> bool:
        return self.endpoint_flags != ("clear", "clear")


@dataclass(frozen=True)
class LimitFlipCount:
    """liminf/limsup data of flip counts over an expanding-interval schedule."""

    underline: float  # int-valued, or -inf when the tail diverges downward
    overline: float
    stabilized: bool
    history: tuple[FlipCount, ...]

    @property
    def value(self) -> int:
        if not self.stabilized:
            raise ValueError("count did not stabilize; inspect history")
        return self.history[-1].count_on_interval


@dataclass(frozen=True)
class OscillationClassification:
    verdict: str  # relatively_nonoscillatory | relatively_oscillatory | undetermined_at_scale
    x_max_reached: float
    limit: LimitFlipCount


# ---------------------------------------------------------------------------
# exact endpoint arithmetic
# ---------------------------------------------------------------------------

def _delta_parts(first: PruferTrajectory, second: PruferTrajectory, x: float) -> tuple[int, float]:
    """Delta(x) = theta_second - theta_first as (integer*pi, fraction in (-pi, pi))."""
    k1, r1 = first.winding_at(x)
    k2, r2 = second.winding_at(x)
    return k2 - k1, r2 - r1


def _ceil_part(k: int, t: float) -> int:
    return k + (1 if t > 0.0 else 0)


def _floor_part(k: int, t: float) -> int:
    return k + (-1 if t < 0.0 else 0)


def _near_multiple(t: float, eps_pi: float) -> bool:
    return min(abs(t), _PI - abs(t)) < eps_pi


def _count_from_parts(
    kc: int, tc: float, kd: int, td: float, eps_pi: float
) -> tuple[int, tuple[str, str], tuple[int, int] | None]:
    count = _ceil_part(kd, td) - _floor_part(kc, tc) - 1
    flag_c = _near_multiple(tc, eps_pi)
    flag_d = _near_multiple(td, eps_pi)
    flags = (
        "near_multiple_of_pi" if flag_c else "clear",
        "near_multiple_of_pi" if flag_d else "clear",
    )
    if not (flag_c or flag_d):
        return count, flags, None
    tc_opts = (tc - 2 * eps_pi, tc + 2 * eps_pi) if flag_c else (tc,)
    td_opts = (td - 2 * eps_pi, td + 2 * eps_pi) if flag_d else (td,)
    candidates = [
        (kd + math.ceil(td_o / _PI)) - (kc + math.floor(tc_o / _PI)) - 1
        for tc_o in tc_opts
        for td_o in td_opts
    ]
    return count, flags, (min(candidates), max(candidates))


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def delta_angle(first: PruferTrajectory, second: PruferTrajectory, x: float) -> float:
    """theta_second(x) - theta_first(x); exact on shared grid nodes."""
    try:
        k, t = _delta_parts(first, second, x)
        return k * _PI + t
    except NotCovered:
        if not (first.covers(x) and second.covers(x)):
            raise
        return second.theta_at(x) - first.theta_at(x)


def wronskian_value(first: PruferTrajectory, second: PruferTrajectory, x: float) -> float:
    """W_x(first, second) = -rho_first rho_second sin(Delta).

    The sign equals the sign of -sin(Delta) exactly; when the summed
    log-amplitudes would overflow, the magnitude is clamped (the sign is
    still trustworthy).
    """
    try:
        k, t = _delta_parts(first, second, x)
        sin_delta = math.sin(t) if (k % 2 == 0) else -math.sin(t)
    except NotCovered:
        if not (first.covers(x) and second.covers(x)):
            raise
        sin_delta = math.sin(second.theta_at(x) - first.theta_at(x))
    log_sum = first.log_rho_at(x) + second.log_rho_at(x)
    return -math.exp(min(log_sum, _LOG_CLAMP)) * sin_delta


def flip_count(
    first: PruferTrajectory,
    second: PruferTrajectory,
    c: float,
    d: float,
    eps_pi: float = 1e-7,
) -> FlipCount:
    """Weighted sign flips of W(first, second) in (c, d) via the endpoint formula.

    Both trajectories must hold c and d as exact grid nodes (integrate with
    checkpoints to force this); the count is then pure integer arithmetic.
    """
    if not c < d:
        raise ValueError("need c < d")
    kc, tc = _delta_parts(first, second, c)
    kd, td = _delta_parts(first, second, d)
    count, flags, ambiguity = _count_from_parts(kc, tc, kd, td, eps_pi)
    return FlipCount(
        count_on_interval=count,
        interval=(c, d),
        delta_at_c=kc * _PI + tc,
        delta_at_d=kd * _PI + td,
        endpoint_flags=flags,
        ambiguity=ambiguity,
    )


def _solution(problem: SLProblem, lam: float, side: Side, x_lo: float, x_hi: float,
              checkpoints: Sequence[float], tol: float, tail_period: float | None) -> PruferTrajectory:
    if side == "minus":
        return psi_minus(problem, lam, x_hi, tol, checkpoints)
    if side == "plus":
        x_max = x_hi if not problem.regular_b else None
        return psi_plus(problem, lam, x_lo, tol, checkpoints, x_max=x_max, tail_period=tail_period)
    raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")


def limit_flip_count(
    problem0: SLProblem,
    problem1: SLProblem,
    lambda0: float,
    lambda1: float,
    schedule: TruncationSchedule,
    sides: tuple[Side, Side] = ("plus", "minus"),
    eps_pi: float = 1e-7,
    tol: float = 1e-9,
    tail_period: float | None = None,
) -> LimitFlipCount:
    """Flip-count history #(u0, u1) over the expanding intervals (c_n, d_n).

    ``sides`` picks the solution attached to each problem (u0 from
    problem0, u1 from problem1); the default is the (psi_plus, psi_minus)
    pairing used by the counting theorems.  Both solutions are fixed once
    (psi_plus starts at the last schedule abscissa) and the intervals grow
    underneath them, matching the liminf/limsup definition.  The limit is
    declared stabilized when the last K counts are equal and unflagged.
    """
    if pr_signature(problem0.coefficients) != pr_signature(problem1.coefficients):
        raise ValueError("flip counts require operators sharing p and r")
    cs = schedule.x_min_sequence
    ds = schedule.x_max_sequence
    x_lo, x_hi = min(cs), max(ds)
    marks = sorted(set(cs) | set(ds))
    u0 = _solution(problem0, lambda0, sides[0], x_lo, x_hi, marks, tol, tail_period)
    u1 = _solution(problem1, lambda1, sides[1], x_lo, x_hi, marks, tol, tail_period)
    history = tuple(flip_count(u0, u1, c, d, eps_pi) for c, d in zip(cs, ds))
    return _summarize(history, schedule.stabilization_window)


def _summarize(history: tuple[FlipCount, ...], window: int) -> LimitFlipCount:
    tail = history[-window:]
    counts = [fc.count_on_interval for fc in tail]
    stabilized = len(set(counts)) == 1 and not any(fc.flagged for fc in tail)
    under: float = float(min(counts))
    over: float = float(max(counts))
    if not stabilized and len(history) >= window + 1:
        last = [fc.count_on_interval for fc in history[-(window + 1):]]
        if all(b <= a - 1 for a, b in zip(last, last[1:])):
            under = -math.inf
        if all(b >= a + 1 for a, b in zip(last, last[1:])):
            over = math.inf
    return LimitFlipCount(underline=under, overline=over, stabilized=stabilized, history=history)


def classify_relative_oscillation(
    problem0: SLProblem,
    problem1: SLProblem,
    lam: float,
    schedule: TruncationSchedule,
    sides: tuple[Side, Side] | None = None,
    eps_pi: float = 1e-7,
    tol: float = 1e-9,
    tail_period: float | None = None,
) -> OscillationClassification:
    """Relative (non)oscillation verdict of problem1 against problem0 at lam.

    Stabilized history => relatively_nonoscillatory.  A |count| that keeps
    growing by at least one over each of the last three schedule steps (a
    monotone trend) => relatively_oscillatory; anything else is reported as
    undetermined at the reached scale.  With ``sides=None`` the
    (plus, minus) pairing is used when a decaying branch exists at lam and
    the all-forward pairing otherwise (any solution pair decides the class).
    """
    if sides is None:
        try:
            limit = limit_flip_count(
                problem0, problem1, lam, lam, schedule, ("plus", "minus"), eps_pi, tol, tail_period
            )
        except AboveEssentialSpectrum:
            limit = limit_flip_count(
                problem0, problem1, lam, lam, schedule, ("minus", "minus"), eps_pi, tol, tail_period
            )
    else:
        limit = limit_flip_count(problem0, problem1, lam, lam, schedule, sides, eps_pi, tol, tail_period)
    x_max = schedule.x_max_sequence[-1]
    if limit.stabilized:
        return OscillationClassification("relatively_nonoscillatory", x_max, limit)
    counts = [fc.count_on_interval for fc in limit.history]
    if len(counts) >= 4:
        last = counts[-4:]
        steps = [b - a for a, b in zip(last, last[1:])]
        if all(s >= 1 for s in steps) or all(s <= -1 for s in steps):
            return OscillationClassification("relatively_oscillatory", x_max, limit)
    return OscillationClassification("undetermined_at_scale", x_max, limit)
