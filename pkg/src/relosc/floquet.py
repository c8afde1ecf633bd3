"""Monodromy matrix, discriminant, band edges, and critical couplings.

For periodic coefficients with period L, the fundamental system c, s with
c(0) = p(0) s'(0) = 1 and s(0) = p(0) c'(0) = 0 defines the period map

    M(lam) = [[c(L), s(L)], [p(0) c'(L), p(0) s'(L)]],   D(lam) = tr M(lam).

The essential spectrum of the associated half-line operator is
{lam : |D(lam)| <= 2}.  The lambda-derivative D'(lam) is integrated jointly
through the variational system (never by differencing; the finite
difference is only a cross-check), because the critical coupling

    kappa_n = L^2 / (4 |D|'(E_n)),    |D|'(E) = sign(D(E)) D'(E)

feeds threshold classifications where derivative noise flips verdicts.
kappa is positive at lower gap edges (odd index) and negative at upper
edges (even index), with the gap below the spectrum counting as gap zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._ivp import integrate_vector
from .coefficients import Coefficients, _compiled, breakpoints_in
from .errors import CollapsedGap, ScanTooCoarse

__all__ = ["MonodromyRecord", "BandEdge", "monodromy", "band_edges", "critical_kappa"]


@dataclass(frozen=True)
class MonodromyRecord:
    lam: float
    M: np.ndarray  # 2x2 period map in (u, p u') coordinates
    M_prime: np.ndarray  # d/dlam of M
    D: float
    D_prime: float
    period_length: float


@dataclass(frozen=True)
class BandEdge:
    """Root of |D| = 2.  kind is seen in increasing lambda:

    * "lower_gap_edge": |D| grows through 2 (a gap opens above),
    * "upper_gap_edge": |D| falls through 2 (a band starts above),
    * "collapsed": D is tangent to +-2, the gap is closed and kappa infinite.
    """

    E: float
    kind: str
    index: int
    kappa: float


def monodromy(coeffs: Coefficients, period_length: float, lam: float, tol: float = 1e-12) -> MonodromyRecord:
    """Period map and its lambda-derivative by one joint variational integration."""
    if period_length <= 0:
        raise ValueError("period_length must be positive")
    pqr = _compiled(coeffs)

    def rhs(x: float, y: tuple[float, ...]) -> tuple[float, ...]:
        p, q, r = pqr(x)
        w = q - lam * r
        c, pc, cl, pcl, s, ps, sl, psl = y
        return (
            pc / p,
            w * c,
            pcl / p,
            w * cl - r * c,
            ps / p,
            w * s,
            psl / p,
            w * sl - r * s,
        )

    y0 = (1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
    bps = breakpoints_in(coeffs, 0.0, period_length)
    y = integrate_vector(rhs, 0.0, y0, period_length, tol, bps)
    c, pc, cl, pcl, s, ps, sl, psl = y
    M = np.array([[c, s], [pc, ps]])
    M_prime = np.array([[cl, sl], [pcl, psl]])
    return MonodromyRecord(
        lam=lam,
        M=M,
        M_prime=M_prime,
        D=c + ps,
        D_prime=cl + psl,
        period_length=period_length,
    )


def critical_kappa(record: MonodromyRecord, edge_tol: float = 1e-6, derivative_tol: float = 1e-8) -> float:
    """kappa = L^2 / (4 |D|'(E)) at a band edge record; CollapsedGap when D is tangent."""
    if abs(abs(record.D) - 2.0) > edge_tol:
        raise ValueError(f"not at a band edge: |D| = {abs(record.D)}")
    slope = math.copysign(1.0, record.D) * record.D_prime
    if abs(record.D_prime) < derivative_tol:
        raise CollapsedGap(f"D tangent to {math.copysign(2, record.D):+.0f} at lam={record.lam}")
    return record.period_length**2 / (4.0 * slope)


def band_edges(
    coeffs: Coefficients,
    period_length: float,
    lambda_min: float,
    lambda_max: float,
    tol: float = 1e-10,
    n_scan: int = 512,
) -> list[BandEdge]:
    """All roots of D = +-2 in [lambda_min, lambda_max], indexed in ascending order.

    Simple roots come from sign changes of D -+ 2 on an adaptively refined
    scan; tangential touchings (collapsed gaps) are located as extrema of D
    with |D| = 2 and flagged with infinite kappa.  Indices follow the paper
    convention when the scan starts below the spectrum: edge 0 is the bottom
    of the first band.
    """
    if not lambda_min < lambda_max:
        raise ValueError("need lambda_min < lambda_max")
    # the scan only brackets; roots are polished on full-accuracy records
    coarse: dict[float, MonodromyRecord] = {}
    fine: dict[float, MonodromyRecord] = {}

    def scan_rec(lam: float) -> MonodromyRecord:
        if lam not in coarse:
            coarse[lam] = monodromy(coeffs, period_length, lam, tol=1e-8)
        return coarse[lam]

    def rec(lam: float) -> MonodromyRecord:
        if lam not in fine:
            fine[lam] = monodromy(coeffs, period_length, lam, tol=min(tol, 1e-12))
        return fine[lam]

    grid = np.linspace(lambda_min, lambda_max, n_scan)
    edges: list[tuple[float, str, float]] = []  # (E, kind, kappa)

    def add_simple(level: float, a: float, b: float):
        root = brentq(lambda lam: rec(lam).D - level, a, b, xtol=1e-13, rtol=8 * np.finfo(float).eps)
        r = rec(root)
        slope = math.copysign(1.0, level) * r.D_prime
        if abs(r.D_prime) < 1e-8:
            edges.append((root, "collapsed", math.inf))
        else:
            kind = "lower_gap_edge" if slope > 0 else "upper_gap_edge"
            edges.append((root, kind, period_length**2 / (4.0 * slope)))

    def add_collapsed(ext: float):
        if all(abs(ext - e) > 1e-9 * (1 + abs(ext)) for e, _, _ in edges):
            edges.append((ext, "collapsed", math.inf))

    for a, b in zip(grid, grid[1:]):
        ra, rb = scan_rec(a), scan_rec(b)
        crossed = [level for level in (2.0, -2.0) if (ra.D - level) * (rb.D - level) < 0]
        interior_extremum = ra.D_prime * rb.D_prime < 0
        if len(crossed) > 1 and not interior_extremum:
            raise ScanTooCoarse(f"cell ({a}, {b}) brackets crossings of both levels")
        if interior_extremum:
            # an extremum of D inside the cell: either a tangential (collapsed)
            # touching of +-2, or a shield hiding a double crossing of one level
            ext = brentq(lambda lam: rec(lam).D_prime, a, b, xtol=1e-13, rtol=8 * np.finfo(float).eps)
            re = rec(ext)
            if abs(abs(re.D) - 2.0) < 1e-7:
                add_collapsed(ext)
            else:
                for level in (2.0, -2.0):
                    for lo, hi in ((a, ext), (ext, b)):
                        if (rec(lo).D - level) * (rec(hi).D - level) < 0:
                            add_simple(level, lo, hi)
        else:
            for level in crossed:
                add_simple(level, a, b)

    edges.sort(key=lambda t: t[0])
    return [BandEdge(E=e, kind=kind, index=i, kappa=kappa) for i, (e, kind, kappa) in enumerate(edges)]
