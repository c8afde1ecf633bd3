"""Eigenvalue counting for regular problems, two independent ways.

Shooting: the left Prufer angle theta_-(lam, b) is strictly increasing in
lam and passes a multiple of pi above beta exactly when lam crosses an
eigenvalue, so the number of eigenvalues strictly below lam is
max(0, ceil((theta_-(lam, b) - beta) / pi)).

Inertia: the symmetric three-point discretization of -(p u')' + (q - lam r) u
with the problem's separated boundary conditions is factorized LDL^T; the
number of negative pivots equals the number of eigenvalues below lam
(Sylvester).  Cell-averaged coefficients (harmonic for p) keep the discrete
counts second-order accurate even across coefficient jumps, and every
reported count must survive a grid doubling.

The two methods share no code path, which is the point: inertia is the
oracle that every Prufer-side count is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from .coefficients import SLProblem, p_harmonic_average, q_average, r_average
from .errors import FactorizationBreakdown, NotConverged
from .prufer import psi_minus

__all__ = ["SpectralCount", "count_below", "inertia_count", "eigenvalues_in"]

_PI = math.pi

ANGLE_EIGEN_TOL = 1e-6  # angle distance to a multiple of pi that counts as "on the spectrum"


@dataclass(frozen=True)
class SpectralCount:
    lam: float
    count_strictly_below: int
    lambda_is_eigenvalue: bool
    method: Literal["shooting", "inertia"]
    notes: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# shooting
# ---------------------------------------------------------------------------

def _require_regular(problem: SLProblem):
    if not (problem.regular_a and problem.regular_b):
        raise ValueError("both endpoints must be regular for this operation")


def count_below(problem: SLProblem, lam: float, tol: float = 1e-9) -> SpectralCount:
    """Eigenvalues strictly below lam by Prufer shooting from the left."""
    _require_regular(problem)
    traj = psi_minus(problem, lam, problem.b, tol)
    k, res = traj.winding_at(problem.b)
    t = res - problem.beta  # theta(b) - beta = k*pi + t with t in (-pi, pi)
    count = k + (1 if t > 0.0 else 0)  # ceil((theta - beta)/pi)
    dist = min(abs(t), _PI - abs(t))
    return SpectralCount(
        lam=lam,
        count_strictly_below=max(0, count),
        lambda_is_eigenvalue=dist < ANGLE_EIGEN_TOL,
        method="shooting",
    )


# ---------------------------------------------------------------------------
# inertia oracle
# ---------------------------------------------------------------------------

def _assemble_tridiag(problem: SLProblem, lam: float, n: int):
    """Symmetric tridiagonal of the discretized form at spectral parameter lam.

    Finite-volume rows scaled by the cell width: interior diag
    (p_{i-1/2} + p_{i+1/2})/h + h (q_i - lam r_i); Robin ends keep their
    half cell plus the cot-angle boundary term, Dirichlet ends drop the node.
    """
    a, b = problem.interval
    coeffs = problem.coefficients
    h = (b - a) / n
    xs = a + h * np.arange(n + 1)
    p_half = np.array([p_harmonic_average(coeffs, xs[j], xs[j + 1]) for j in range(n)])

    def cell_avg(i):
        lo = max(a, xs[i] - 0.5 * h)
        hi = min(b, xs[i] + 0.5 * h)
        return q_average(coeffs, lo, hi) - lam * r_average(coeffs, lo, hi), hi - lo

    alpha, beta = problem.alpha, problem.beta
    dir_a = alpha == 0.0
    dir_b = beta == _PI
    idx = range(0 if not dir_a else 1, n + 1 if not dir_b else n)
    diag, off = [], []
    for i in idx:
        w, width = cell_avg(i)
        if i == 0:
            d = p_half[0] / h + width * w + 1.0 / math.tan(alpha)
        elif i == n:
            d = p_half[n - 1] / h + width * w - 1.0 / math.tan(beta)
        else:
            d = (p_half[i - 1] + p_half[i]) / h + width * w
        diag.append(d)
        if i + 1 in idx:
            off.append(-p_half[i] / h)
    return np.asarray(diag), np.asarray(off)


def _negative_pivots(diag: np.ndarray, off: np.ndarray) -> int:
    scale = float(np.max(np.abs(diag))) + float(np.max(np.abs(off), initial=0.0))
    tiny = 1e-300 * max(scale, 1.0)
    neg = 0
    d = diag[0]
    if abs(d) < tiny:
        raise FactorizationBreakdown("zero pivot in Sturm sequence")
    if d < 0:
        neg += 1
    for i in range(1, len(diag)):
        d = diag[i] - off[i - 1] * off[i - 1] / d
        if abs(d) < tiny:
            raise FactorizationBreakdown("zero pivot in Sturm sequence")
        if d < 0:
            neg += 1
    return neg


def _inertia_once(problem: SLProblem, lam: float, n: int) -> tuple[int, tuple[str, ...]]:
    notes: tuple[str, ...] = ()
    shift = 0.0
    for attempt in range(4):
        try:
            diag, off = _assemble_tridiag(problem, lam + shift, n)
            return _negative_pivots(diag, off), notes
        except FactorizationBreakdown:
            shift = (attempt + 1) * 1e-12 * (1.0 + abs(lam))
            notes = (f"pivot jitter {shift:.1e}",)
    raise FactorizationBreakdown(f"factorization failed for lam={lam} after jitter retries")


def inertia_count(problem: SLProblem, lam: float, n_grid: int = 1024) -> SpectralCount:
    """Eigenvalues below lam from the inertia of the discretized form.

    The count is only reported once a grid doubling reproduces it
    (one further doubling is attempted before giving up with NotConverged).
    """
    _require_regular(problem)
    if n_grid < 64:
        raise ValueError("n_grid must be at least 64")
    notes: list[str] = []
    c1, nt1 = _inertia_once(problem, lam, n_grid)
    notes.extend(nt1)
    c2, nt2 = _inertia_once(problem, lam, 2 * n_grid)
    notes.extend(nt2)
    if c1 != c2:
        c3, nt3 = _inertia_once(problem, lam, 4 * n_grid)
        notes.extend(nt3)
        if c2 != c3:
            raise NotConverged(f"inertia count unstable under doubling: {c1}, {c2}, {c3}")
        notes.append("converged on refined grid")
        c2 = c3
    # eigenvalue flag at the resolution of the discrete pencil
    delta = 1e-6 * (1.0 + abs(lam))
    lo, _ = _inertia_once(problem, lam - delta, 2 * n_grid)
    hi, _ = _inertia_once(problem, lam + delta, 2 * n_grid)
    return SpectralCount(
        lam=lam,
        count_strictly_below=c2,
        lambda_is_eigenvalue=hi > lo,
        method="inertia",
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# eigenvalue location
# ---------------------------------------------------------------------------

def _shoot_angle(problem: SLProblem, lam: float, tol: float) -> float:
    traj = psi_minus(problem, lam, problem.b, tol)
    k, res = traj.winding_at(problem.b)
    return k * _PI + res


def eigenvalues_in(problem: SLProblem, lambda0: float, lambda1: float, tol: float = 1e-8) -> list[float]:
    """All eigenvalues in (lambda0, lambda1], bisected on the shooting angle.

    theta_-(lam, b) is strictly increasing in lam, so the k-th eigenvalue is
    the unique root of theta_-(lam, b) = beta + k pi.
    """
    _require_regular(problem)
    if not lambda0 < lambda1:
        raise ValueError("need lambda0 < lambda1")
    itol = min(1e-9, tol * 1e-2)
    g0 = _shoot_angle(problem, lambda0, itol)
    g1 = _shoot_angle(problem, lambda1, itol)
    beta = problem.beta
    k_lo = math.ceil((g0 - beta) / _PI)  # first k with beta + k pi > g0
    k_hi = math.floor((g1 - beta) / _PI)  # last k with beta + k pi <= g1
    found = []
    for k in range(k_lo, k_hi + 1):
        target = beta + k * _PI
        root = brentq(
            lambda lam: _shoot_angle(problem, lam, itol) - target,
            lambda0,
            lambda1,
            xtol=tol,
            rtol=4 * np.finfo(float).eps,
        )
        found.append(float(root))
    return found
