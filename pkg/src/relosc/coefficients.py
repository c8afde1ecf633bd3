"""Coefficient catalog and problem descriptors.

A Sturm-Liouville expression is determined by the triple (p, q, r) on an
interval: it acts as r^-1 ( -(p u')' + q u ).  Coefficients come from a
closed catalog of families rather than arbitrary callables, so every problem
serializes to JSON and reproduces bit-for-bit across runs and machines.

Conventions fixed here (and relied on by the tests):

* piecewise families are right-continuous at their breakpoints;
* the two operators of a comparison share p and r (enforced for sums);
* tail families declare an explicit left domain edge x0 and refuse to
  extrapolate below it;
* a finite endpoint carries a boundary angle, an infinite one is "singular".

Boundary angles follow cos(angle) u - sin(angle) p u' = 0, with the left
angle in [0, pi) and the right angle in (0, pi] so that Dirichlet is 0 on
the left and pi on the right.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal, Union

from .errors import NonPositiveCoefficient, OutOfDomain

__all__ = [
    "Constant",
    "PiecewiseConstant",
    "TrigPolynomial",
    "EulerTail",
    "LogRefinedTail",
    "CoefficientSum",
    "WellPerturbation",
    "Coefficients",
    "SLProblem",
    "TruncationSchedule",
    "geometric_schedule",
    "eval_coefficients",
    "difference_sign",
    "domain_start",
    "breakpoints_in",
    "pr_signature",
    "q_average",
    "r_average",
    "p_harmonic_average",
    "mix_coefficients",
    "coefficients_to_dict",
    "coefficients_from_dict",
    "problem_to_dict",
    "problem_from_dict",
    "schedule_to_dict",
    "schedule_from_dict",
]

SINGULAR = "singular"


# ---------------------------------------------------------------------------
# coefficient families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    """p, q, r constant on the whole line."""

    p: float = 1.0
    q: float = 0.0
    r: float = 1.0

    def __post_init__(self):
        if not (self.p > 0.0 and self.r > 0.0):
            raise NonPositiveCoefficient(f"constant family needs p, r > 0, got p={self.p}, r={self.r}")
        for v in (self.p, self.q, self.r):
            if not math.isfinite(v):
                raise NonPositiveCoefficient("constant family needs finite values")


@dataclass(frozen=True)
class PiecewiseConstant:
    """Cellwise-constant triple.

    ``values[i]`` holds on [breakpoints[i-1], breakpoints[i]); the first cell
    extends to -inf and the last to +inf.  Right-continuous at breakpoints.
    """

    breakpoints: tuple[float, ...]
    p_values: tuple[float, ...]
    q_values: tuple[float, ...]
    r_values: tuple[float, ...]

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "p_values", tuple(float(v) for v in self.p_values))
        object.__setattr__(self, "q_values", tuple(float(v) for v in self.q_values))
        object.__setattr__(self, "r_values", tuple(float(v) for v in self.r_values))
        n = len(bps) + 1
        if any(len(vals) != n for vals in (self.p_values, self.q_values, self.r_values)):
            raise ValueError("need one value per cell: len(values) == len(breakpoints) + 1")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if not all(map(math.isfinite, bps + self.p_values + self.q_values + self.r_values)):
            raise ValueError("breakpoints and cell values must be finite")
        if any(v <= 0.0 for v in self.p_values) or any(v <= 0.0 for v in self.r_values):
            raise NonPositiveCoefficient("piecewise family needs p, r > 0 in every cell")


@dataclass(frozen=True)
class TrigPolynomial:
    """q is a trigonometric polynomial of the given period; p = r = 1.

    q(x) = cos_coeffs[0] + sum_k cos_coeffs[k] cos(2 pi k x / period)
                         + sum_k sin_coeffs[k-1] sin(2 pi k x / period)
    """

    period: float
    cos_coeffs: tuple[float, ...] = (0.0,)
    sin_coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cos_coeffs", tuple(float(v) for v in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(v) for v in self.sin_coeffs))
        if not (self.period > 0.0 and math.isfinite(self.period)):
            raise ValueError("period must be positive and finite")
        if not self.cos_coeffs:
            raise ValueError("cos_coeffs needs at least the constant term")


@dataclass(frozen=True)
class EulerTail:
    """q(x) = c / x^2 on x >= x0 > 0; p = r = 1."""

    c: float
    x0: float = 1.0

    def __post_init__(self):
        if not (self.x0 > 0.0):
            raise ValueError("EulerTail needs x0 > 0")


@dataclass(frozen=True)
class LogRefinedTail:
    """q(x) = c1 / x^2 + c2 / (x^2 ln^2 x) on x >= x0 > 1; p = r = 1."""

    c1: float
    c2: float
    x0: float = math.e

    def __post_init__(self):
        if not (self.x0 > 1.0):
            raise ValueError("LogRefinedTail needs x0 > 1")


@dataclass(frozen=True)
class CoefficientSum:
    """Sum of member q's; all members must share identical p and r descriptors."""

    members: tuple["Coefficients", ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("sum needs at least one member")
        sig = pr_signature(self.members[0])
        for m in self.members[1:]:
            if pr_signature(m) != sig:
                raise ValueError("sum members must share identical p and r descriptors")


@dataclass(frozen=True)
class WellPerturbation:
    """Base coefficients plus a constant additive bump on q over [c, d).

    The bump window follows the same right-continuity convention as
    piecewise cells: active on [support[0], support[1]).
    """

    base: "Coefficients"
    bump: float
    support: tuple[float, float]

    def __post_init__(self):
        c, d = self.support
        object.__setattr__(self, "support", (float(c), float(d)))
        if not (c < d):
            raise ValueError("support must satisfy c < d")
        if not math.isfinite(self.bump):
            raise ValueError("bump must be finite")


Coefficients = Union[
    Constant,
    PiecewiseConstant,
    TrigPolynomial,
    EulerTail,
    LogRefinedTail,
    CoefficientSum,
    WellPerturbation,
]


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def domain_start(coeffs: Coefficients) -> float:
    """Left edge of the validity domain (inclusive); -inf for global families."""
    if isinstance(coeffs, (EulerTail, LogRefinedTail)):
        return coeffs.x0
    if isinstance(coeffs, CoefficientSum):
        return max(domain_start(m) for m in coeffs.members)
    if isinstance(coeffs, WellPerturbation):
        return domain_start(coeffs.base)
    return -math.inf


def pr_signature(coeffs: Coefficients):
    """Canonical description of the (p, r) part, used to check shared p, r."""
    if isinstance(coeffs, Constant):
        return ("const", coeffs.p, coeffs.r)
    if isinstance(coeffs, PiecewiseConstant):
        if all(v == coeffs.p_values[0] for v in coeffs.p_values) and all(
            v == coeffs.r_values[0] for v in coeffs.r_values
        ):
            return ("const", coeffs.p_values[0], coeffs.r_values[0])
        return ("pw", coeffs.breakpoints, coeffs.p_values, coeffs.r_values)
    if isinstance(coeffs, (TrigPolynomial, EulerTail, LogRefinedTail)):
        return ("const", 1.0, 1.0)
    if isinstance(coeffs, CoefficientSum):
        return pr_signature(coeffs.members[0])
    if isinstance(coeffs, WellPerturbation):
        return pr_signature(coeffs.base)
    raise TypeError(f"unknown coefficient family: {coeffs!r}")


@lru_cache(maxsize=512)
def _compiled(coeffs: Coefficients) -> Callable[[float], tuple[float, float, float]]:
    """Build a fast x -> (p, q, r) closure for a descriptor (cached)."""
    if isinstance(coeffs, Constant):
        pqr = (coeffs.p, coeffs.q, coeffs.r)
        return lambda x: pqr
    if isinstance(coeffs, PiecewiseConstant):
        bps = list(coeffs.breakpoints)
        pv, qv, rv = coeffs.p_values, coeffs.q_values, coeffs.r_values

        def _pw(x, _bps=bps, _pv=pv, _qv=qv, _rv=rv):
            i = bisect.bisect_right(_bps, x)
            return (_pv[i], _qv[i], _rv[i])

        return _pw
    if isinstance(coeffs, TrigPolynomial):
        w = 2.0 * math.pi / coeffs.period
        cos_c = coeffs.cos_coeffs
        sin_c = coeffs.sin_coeffs

        def _trig(x, _w=w, _c=cos_c, _s=sin_c):
            q = _c[0]
            for k in range(1, len(_c)):
                q += _c[k] * math.cos(_w * k * x)
            for k, b in enumerate(_s, start=1):
                q += b * math.sin(_w * k * x)
            return (1.0, q, 1.0)

        return _trig
    if isinstance(coeffs, EulerTail):
        c, x0 = coeffs.c, coeffs.x0

        def _euler(x, _c=c, _x0=x0):
            if x < _x0:
                raise OutOfDomain(f"x={x} below tail start x0={_x0}")
            return (1.0, _c / (x * x), 1.0)

        return _euler
    if isinstance(coeffs, LogRefinedTail):
        c1, c2, x0 = coeffs.c1, coeffs.c2, coeffs.x0

        def _logref(x, _c1=c1, _c2=c2, _x0=x0):
            if x < _x0:
                raise OutOfDomain(f"x={x} below tail start x0={_x0}")
            lx = math.log(x)
            return (1.0, _c1 / (x * x) + _c2 / (x * x * lx * lx), 1.0)

        return _logref
    if isinstance(coeffs, CoefficientSum):
        fns = tuple(_compiled(m) for m in coeffs.members)

        def _sum(x, _fns=fns):
            p, q, r = _fns[0](x)
            for fn in _fns[1:]:
                q += fn(x)[1]
            return (p, q, r)

        return _sum
    if isinstance(coeffs, WellPerturbation):
        base_fn = _compiled(coeffs.base)
        c, d = coeffs.support
        bump = coeffs.bump

        def _well(x, _fn=base_fn, _c=c, _d=d, _b=bump):
            p, q, r = _fn(x)
            if _c <= x < _d:
                q += _b
            return (p, q, r)

        return _well
    raise TypeError(f"unknown coefficient family: {coeffs!r}")


def eval_coefficients(coeffs: Coefficients, x: float) -> tuple[float, float, float]:
    """Pointwise (p(x), q(x), r(x)); raises OutOfDomain below a tail's x0."""
    lo = domain_start(coeffs)
    if x < lo:
        raise OutOfDomain(f"x={x} below domain start {lo}")
    return _compiled(coeffs)(x)


def breakpoints_in(coeffs: Coefficients, lo: float, hi: float) -> list[float]:
    """Discontinuity abscissas of the descriptor inside (lo, hi), sorted."""
    pts: set[float] = set()

    def collect(c: Coefficients):
        if isinstance(c, PiecewiseConstant):
            pts.update(c.breakpoints)
        elif isinstance(c, CoefficientSum):
            for m in c.members:
                collect(m)
        elif isinstance(c, WellPerturbation):
            pts.update(c.support)
            collect(c.base)

    collect(coeffs)
    return sorted(b for b in pts if lo < b < hi)


DifferenceSign = Literal[-1, 0, 1, "mixed"]


def difference_sign(coeffs0: Coefficients, coeffs1: Coefficients, x: float, h: float) -> DifferenceSign:
    """Almost-everywhere sign of q0 - q1 on (x-h, x+h), "mixed" if it changes.

    Sampled on a breakpoint-aware grid.  Diagnostic only: the flip counts
    never consult this, they are intrinsic ceil/floor quantities.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    lo, hi = x - h, x + h
    for c in (coeffs0, coeffs1):
        if lo < domain_start(c):
            raise OutOfDomain(f"interval ({lo}, {hi}) leaves the coefficient domain")
    cuts = [lo] + breakpoints_in(coeffs0, lo, hi) + breakpoints_in(coeffs1, lo, hi) + [hi]
    cuts = sorted(set(cuts))
    samples: list[float] = []
    for left, right in zip(cuts, cuts[1:]):
        samples.extend(left + (right - left) * (j + 0.5) / 9.0 for j in range(9))
    f0 = _compiled(coeffs0)
    f1 = _compiled(coeffs1)
    diffs = [f0(s)[1] - f1(s)[1] for s in samples]
    if all(d == 0.0 for d in diffs):
        return 0
    if all(d > 0.0 for d in diffs):
        return 1
    if all(d < 0.0 for d in diffs):
        return -1
    return "mixed"


# ---------------------------------------------------------------------------
# cell averages (used by the finite-difference inertia oracle)
# ---------------------------------------------------------------------------

def _overlap(lo: float, hi: float, c: float, d: float) -> float:
    return max(0.0, min(hi, d) - max(lo, c))


def _pw_average(bps, vals, lo, hi, harmonic=False):
    edges = [lo] + [b for b in bps if lo < b < hi] + [hi]
    total = 0.0
    for left, right in zip(edges, edges[1:]):
        i = bisect.bisect_right(list(bps), 0.5 * (left + right))
        v = vals[i]
        total += (right - left) / v if harmonic else (right - left) * v
    return (hi - lo) / total if harmonic else total / (hi - lo)


def q_average(coeffs: Coefficients, lo: float, hi: float) -> float:
    """Exact cell average of q for piecewise families, midpoint value otherwise."""
    if isinstance(coeffs, Constant):
        return coeffs.q
    if isinstance(coeffs, PiecewiseConstant):
        return _pw_average(coeffs.breakpoints, coeffs.q_values, lo, hi)
    if isinstance(coeffs, CoefficientSum):
        return sum(q_average(m, lo, hi) for m in coeffs.members)
    if isinstance(coeffs, WellPerturbation):
        c, d = coeffs.support
        return q_average(coeffs.base, lo, hi) + coeffs.bump * _overlap(lo, hi, c, d) / (hi - lo)
    return eval_coefficients(coeffs, 0.5 * (lo + hi))[1]


def r_average(coeffs: Coefficients, lo: float, hi: float) -> float:
    if isinstance(coeffs, Constant):
        return coeffs.r
    if isinstance(coeffs, PiecewiseConstant):
        return _pw_average(coeffs.breakpoints, coeffs.r_values, lo, hi)
    if isinstance(coeffs, CoefficientSum):
        return r_average(coeffs.members[0], lo, hi)
    if isinstance(coeffs, WellPerturbation):
        return r_average(coeffs.base, lo, hi)
    return eval_coefficients(coeffs, 0.5 * (lo + hi))[2]


def p_harmonic_average(coeffs: Coefficients, lo: float, hi: float) -> float:
    """Harmonic mean of p over a cell: the exact 1-D effective conductance."""
    if isinstance(coeffs, Constant):
        return coeffs.p
    if isinstance(coeffs, PiecewiseConstant):
        return _pw_average(coeffs.breakpoints, coeffs.p_values, lo, hi, harmonic=True)
    if isinstance(coeffs, CoefficientSum):
        return p_harmonic_average(coeffs.members[0], lo, hi)
    if isinstance(coeffs, WellPerturbation):
        return p_harmonic_average(coeffs.base, lo, hi)
    return eval_coefficients(coeffs, 0.5 * (lo + hi))[0]


# ---------------------------------------------------------------------------
# interpolation between two descriptors: q_eps = (1-eps) q0 + eps q1
# ---------------------------------------------------------------------------

def _as_piecewise(coeffs: Coefficients) -> PiecewiseConstant:
    if isinstance(coeffs, PiecewiseConstant):
        return coeffs
    if isinstance(coeffs, Constant):
        return PiecewiseConstant((0.0,), (coeffs.p, coeffs.p), (coeffs.q, coeffs.q), (coeffs.r, coeffs.r))
    if isinstance(coeffs, WellPerturbation):
        base = _as_piecewise(coeffs.base)
        c, d = coeffs.support
        bps = sorted(set(base.breakpoints) | {c, d})
        cells = [-math.inf] + bps
        base_fn = _compiled(base)
        pv, qv, rv = [], [], []
        for left, right in zip(cells, cells[1:] + [math.inf]):
            probe = left if math.isfinite(left) else right - 1.0
            p, q, r = base_fn(probe)
            if c <= probe < d:
                q += coeffs.bump
            pv.append(p)
            qv.append(q)
            rv.append(r)
        return PiecewiseConstant(tuple(bps), tuple(pv), tuple(qv), tuple(rv))
    if isinstance(coeffs, CoefficientSum):
        parts = [_as_piecewise(m) for m in coeffs.members]
        bps = sorted(set().union(*(p.breakpoints for p in parts)))
        cells = [-math.inf] + bps
        fns = [_compiled(p) for p in parts]
        pv, qv, rv = [], [], []
        for left, right in zip(cells, cells[1:] + [math.inf]):
            probe = left if math.isfinite(left) else right - 1.0
            p, _, r = fns[0](probe)
            q = sum(fn(probe)[1] for fn in fns)
            pv.append(p)
            qv.append(q)
            rv.append(r)
        return PiecewiseConstant(tuple(bps), tuple(pv), tuple(qv), tuple(rv))
    raise TypeError(f"family {type(coeffs).__name__} cannot be converted to a piecewise mix")


def mix_coefficients(coeffs0: Coefficients, coeffs1: Coefficients, eps: float) -> Coefficients:
    """Descriptor for q = (1-eps) q0 + eps q1 with the shared p, r.

    The endpoints return the original descriptors unchanged so the family
    reproduces its ends exactly.
    """
    if eps == 0.0:
        return coeffs0
    if eps == 1.0:
        return coeffs1
    if pr_signature(coeffs0) != pr_signature(coeffs1):
        raise ValueError("interpolation requires shared p and r descriptors")
    if isinstance(coeffs0, Constant) and isinstance(coeffs1, Constant):
        return Constant(coeffs0.p, (1 - eps) * coeffs0.q + eps * coeffs1.q, coeffs0.r)
    if isinstance(coeffs0, TrigPolynomial) and isinstance(coeffs1, TrigPolynomial) and coeffs0.period == coeffs1.period:
        n_cos = max(len(coeffs0.cos_coeffs), len(coeffs1.cos_coeffs))
        n_sin = max(len(coeffs0.sin_coeffs), len(coeffs1.sin_coeffs))
        pad = lambda t, n: t + (0.0,) * (n - len(t))
        mixc = tuple((1 - eps) * a + eps * b for a, b in zip(pad(coeffs0.cos_coeffs, n_cos), pad(coeffs1.cos_coeffs, n_cos)))
        mixs = tuple((1 - eps) * a + eps * b for a, b in zip(pad(coeffs0.sin_coeffs, n_sin), pad(coeffs1.sin_coeffs, n_sin)))
        return TrigPolynomial(coeffs0.period, mixc, mixs)
    pw0 = _as_piecewise(coeffs0)
    pw1 = _as_piecewise(coeffs1)
    bps = sorted(set(pw0.breakpoints) | set(pw1.breakpoints))
    cells = [-math.inf] + bps
    f0, f1 = _compiled(pw0), _compiled(pw1)
    pv, qv, rv = [], [], []
    for left, right in zip(cells, cells[1:] + [math.inf]):
        probe = left if math.isfinite(left) else right - 1.0
        p, q0, r = f0(probe)
        q1 = f1(probe)[1]
        pv.append(p)
        qv.append((1 - eps) * q0 + eps * q1)
        rv.append(r)
    return PiecewiseConstant(tuple(bps), tuple(pv), tuple(qv), tuple(rv))


# ---------------------------------------------------------------------------
# problems and truncation schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationSchedule:
    """Expanding-interval abscissas c_n (down to a) and d_n (up to b)."""

    x_min_sequence: tuple[float, ...]
    x_max_sequence: tuple[float, ...]
    stabilization_window: int = 3

    def __post_init__(self):
        object.__setattr__(self, "x_min_sequence", tuple(float(v) for v in self.x_min_sequence))
        object.__setattr__(self, "x_max_sequence", tuple(float(v) for v in self.x_max_sequence))
        k = self.stabilization_window
        if k < 1:
            raise ValueError("stabilization window must be positive")
        if len(self.x_min_sequence) != len(self.x_max_sequence):
            raise ValueError("x_min and x_max sequences must pair up")
        if len(self.x_max_sequence) < k + 2:
            raise ValueError(f"schedule needs at least K+2 = {k + 2} entries")
        if any(b <= a for a, b in zip(self.x_max_sequence, self.x_max_sequence[1:])):
            raise ValueError("x_max_sequence must be strictly increasing")
        if any(b >= a for a, b in zip(self.x_min_sequence, self.x_min_sequence[1:])):
            raise ValueError("x_min_sequence must be strictly decreasing")

    @property
    def steps(self) -> int:
        return len(self.x_max_sequence)


def geometric_schedule(
    a: float,
    x0: float,
    factor: float,
    steps: int,
    stabilization_window: int = 3,
) -> TruncationSchedule:
    """Geometric d_n = x0 * factor^n with matching c_n shrinking toward a.

    The left sequence stays strictly decreasing (never touching a), so the
    schedule is valid for regular and singular left endpoints alike.
    """
    if not (factor > 1.0 and steps >= stabilization_window + 2):
        raise ValueError("need factor > 1 and steps >= window + 2")
    d = tuple(x0 * factor**n for n in range(steps))
    if not math.isfinite(a):
        raise ValueError("geometric schedules require a finite left endpoint")
    w0 = 0.5 * (d[0] - a)
    shrink = min(factor, 2.0)  # keep the left entries representably distinct
    c = tuple(a + w0 * shrink ** (-n) for n in range(steps))
    return TruncationSchedule(c, d, stabilization_window)


@dataclass(frozen=True)
class SLProblem:
    """Coefficients + interval + separated boundary conditions (+ schedule).

    ``bc_a`` is an angle in [0, pi) or "singular"; ``bc_b`` an angle in
    (0, pi] or "singular".  An infinite endpoint must be singular, a finite
    one must carry an angle.
    """

    coefficients: Coefficients
    interval: tuple[float, float]
    bc_a: float | str = 0.0
    bc_b: float | str = math.pi
    truncation: TruncationSchedule | None = None

    def __post_init__(self):
        a, b = self.interval
        object.__setattr__(self, "interval", (float(a), float(b)))
        a, b = self.interval
        if not a < b:
            raise ValueError("interval must satisfy a < b")
        for end, bc, finite_range in (
            (a, self.bc_a, "left"),
            (b, self.bc_b, "right"),
        ):
            if math.isinf(end):
                if bc != SINGULAR:
                    raise ValueError(f"infinite {finite_range} endpoint must be marked '{SINGULAR}'")
            else:
                if bc == SINGULAR:
                    raise ValueError(f"finite {finite_range} endpoint needs a boundary angle")
                if not math.isfinite(float(bc)):
                    raise ValueError("boundary angles must be finite")
        if self.bc_a != SINGULAR and not (0.0 <= float(self.bc_a) < math.pi):
            raise ValueError("left angle must lie in [0, pi)")
        if self.bc_b != SINGULAR and not (0.0 < float(self.bc_b) <= math.pi):
            raise ValueError("right angle must lie in (0, pi]")
        if max(a, -1e300) < domain_start(self.coefficients) - 1e-12:
            raise OutOfDomain("interval extends below the coefficient domain")

    @property
    def a(self) -> float:
        return self.interval[0]

    @property
    def b(self) -> float:
        return self.interval[1]

    @property
    def regular_a(self) -> bool:
        return self.bc_a != SINGULAR

    @property
    def regular_b(self) -> bool:
        return self.bc_b != SINGULAR

    @property
    def alpha(self) -> float:
        if not self.regular_a:
            raise ValueError("left endpoint is singular")
        return float(self.bc_a)

    @property
    def beta(self) -> float:
        if not self.regular_b:
            raise ValueError("right endpoint is singular")
        return float(self.bc_b)


def truncated_problem(problem: SLProblem, x_cut: float, bc: float = math.pi) -> SLProblem:
    """Regular restriction to (a, x_cut) with the given right angle (Dirichlet default)."""
    if not problem.regular_a:
        raise ValueError("truncation helper assumes a regular left endpoint")
    if not (problem.a < x_cut):
        raise ValueError("x_cut must exceed a")
    if problem.regular_b and x_cut > problem.b:
        raise ValueError("x_cut beyond the right endpoint")
    return SLProblem(problem.coefficients, (problem.a, x_cut), problem.bc_a, bc)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def _num_out(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _num_in(v) -> float:
    if isinstance(v, str):
        return {"inf": math.inf, "-inf": -math.inf}[v]
    return float(v)


def coefficients_to_dict(coeffs: Coefficients) -> dict:
    if isinstance(coeffs, Constant):
        return {"family": "constant", "p": coeffs.p, "q": coeffs.q, "r": coeffs.r}
    if isinstance(coeffs, PiecewiseConstant):
        return {
            "family": "piecewise_constant",
            "breakpoints": list(coeffs.breakpoints),
            "p_values": list(coeffs.p_values),
            "q_values": list(coeffs.q_values),
            "r_values": list(coeffs.r_values),
        }
    if isinstance(coeffs, TrigPolynomial):
        return {
            "family": "trig_polynomial",
            "period": coeffs.period,
            "cos_coeffs": list(coeffs.cos_coeffs),
            "sin_coeffs": list(coeffs.sin_coeffs),
        }
    if isinstance(coeffs, EulerTail):
        return {"family": "euler_tail", "c": coeffs.c, "x0": coeffs.x0}
    if isinstance(coeffs, LogRefinedTail):
        return {"family": "log_refined_tail", "c1": coeffs.c1, "c2": coeffs.c2, "x0": coeffs.x0}
    if isinstance(coeffs, CoefficientSum):
        return {"family": "sum", "members": [coefficients_to_dict(m) for m in coeffs.members]}
    if isinstance(coeffs, WellPerturbation):
        return {
            "family": "well_perturbation",
            "base": coefficients_to_dict(coeffs.base),
            "bump": coeffs.bump,
            "support": list(coeffs.support),
        }
    raise TypeError(f"unknown coefficient family: {coeffs!r}")


def coefficients_from_dict(data: dict) -> Coefficients:
    family = data["family"]
    if family == "constant":
        return Constant(data.get("p", 1.0), data.get("q", 0.0), data.get("r", 1.0))
    if family == "piecewise_constant":
        return PiecewiseConstant(
            tuple(data["breakpoints"]),
            tuple(data["p_values"]),
            tuple(data["q_values"]),
            tuple(data["r_values"]),
        )
    if family == "trig_polynomial":
        return TrigPolynomial(data["period"], tuple(data["cos_coeffs"]), tuple(data.get("sin_coeffs", ())))
    if family == "euler_tail":
        return EulerTail(data["c"], data.get("x0", 1.0))
    if family == "log_refined_tail":
        return LogRefinedTail(data["c1"], data["c2"], data.get("x0", math.e))
    if family == "sum":
        return CoefficientSum(tuple(coefficients_from_dict(m) for m in data["members"]))
    if family == "well_perturbation":
        return WellPerturbation(coefficients_from_dict(data["base"]), data["bump"], tuple(data["support"]))
    raise ValueError(f"unknown coefficient family tag: {family!r}")


def schedule_to_dict(schedule: TruncationSchedule) -> dict:
    return {
        "x_min_sequence": list(schedule.x_min_sequence),
        "x_max_sequence": list(schedule.x_max_sequence),
        "stabilization_window": schedule.stabilization_window,
    }


def schedule_from_dict(data: dict) -> TruncationSchedule:
    return TruncationSchedule(
        tuple(data["x_min_sequence"]),
        tuple(data["x_max_sequence"]),
        int(data.get("stabilization_window", 3)),
    )


def problem_to_dict(problem: SLProblem) -> dict:
    return {
        "coefficients": coefficients_to_dict(problem.coefficients),
        "interval": [_num_out(problem.a), _num_out(problem.b)],
        "bc_a": problem.bc_a,
        "bc_b": problem.bc_b,
        "truncation": None if problem.truncation is None else schedule_to_dict(problem.truncation),
    }


def problem_from_dict(data: dict) -> SLProblem:
    trunc = data.get("truncation")
    return SLProblem(
        coefficients_from_dict(data["coefficients"]),
        (_num_in(data["interval"][0]), _num_in(data["interval"][1])),
        data["bc_a"] if data["bc_a"] == SINGULAR else float(data["bc_a"]),
        data["bc_b"] if data["bc_b"] == SINGULAR else float(data["bc_b"]),
        None if trunc is None else schedule_from_dict(trunc),
    )
