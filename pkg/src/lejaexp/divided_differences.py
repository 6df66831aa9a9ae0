"""Divided differences of the exponential at scaled Leja points.

The table for degree m holds exp[xi_0,...,xi_j] for j = 0..m.  They are the
first column of the exponential of the (m+1)x(m+1) lower bidiagonal matrix
with the points on the diagonal and ones on the subdiagonal, evaluated by a
Taylor series with scaling and squaring in extended precision.  Coefficients
are returned in double precision; entries whose magnitude is below the double
range underflow to zero, which is harmless for evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import NumericError, ParameterError
from .leja_points import LejaSequence, scale

MAX_TABLE_POINTS = 121

# Entry (i,0) of B^t is zero until t >= i, so the series must run past the
# dimension; 25 extra terms push the per-entry relative truncation below
# 1/25! ~ 6e-26, well under the 1e-18 relative target.
_EXTRA_TERMS = 25


@dataclass(frozen=True)
class DividedDiffTable:
    """Divided differences of exp at a scaled Leja point set."""

    points: np.ndarray        # scaled interpolation points
    coefficients: np.ndarray  # coefficient j = exp[xi_0,...,xi_j]
    interval_halfwidth: float
    kind: str                 # 'real' or 'conjugate'

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def newton_eval(self, z):
        """Evaluate the Newton form at scalar z (for diagnostics and tests)."""
        acc = self.coefficients[-1]
        for j in range(len(self.coefficients) - 2, -1, -1):
            acc = acc * (z - self.points[j]) + self.coefficients[j]
        return acc


def _required_dps(points, squarings):
    """Precision so every representable coefficient comes out to ~1e-13.

    The spread between the largest and smallest divided difference follows
    from |exp[m+1 points in [-c,c]]| in [e^{-c}, e^{c}]/m! (real case) and
    ~ (c/2)^m/m! for imaginary points; resolving below the double-precision
    floor is pointless, so the tail estimate is capped at 1e-330.  Squaring
    complex triangular factors can amplify entry-wise errors by up to
    2^(i-j) per pass, which costs an extra 0.302*n digits per squaring.
    """
    m = len(points) - 1
    if m == 0:
        return 30
    c = max(abs(complex(p)) for p in points)
    log_mfact = math.lgamma(m + 1) / math.log(10)
    head = 0.434 * c
    tail = -log_mfact + m * math.log10(max(c / 2, 1e-16)) - 0.434 * c
    spread = head - max(tail, -330.0)
    dps = spread + 45
    if any(complex(p).imag != 0 for p in points):
        dps += 0.302 * (m + 1) * squarings
    return int(min(max(dps, 60), 600))


def _bidiagonal_expm_first_col(points, dps=None):
    """First column of expm of the lower bidiagonal matrix (mpmath internals)."""
    is_complex = any(complex(p).imag != 0 for p in points)
    maxd = max(abs(complex(p)) for p in points)
    squarings = max(0, math.ceil(math.log2(maxd))) if maxd > 1 else 0
    if dps is None:
        dps = _required_dps(points, squarings)
    n = len(points)
    with mp.workdps(dps):
        conv = (lambda p: mp.mpc(p)) if is_complex else (lambda p: mp.mpf(complex(p).real))
        sfac = mp.mpf(2) ** squarings
        d = [conv(p) / sfac for p in points]
        zero = mp.mpc(0) if is_complex else mp.mpf(0)
        one = mp.mpf(1)
        sub = one / sfac

        F = [[zero] * (i + 1) for i in range(n)]
        V = [[zero] * (i + 1) for i in range(n)]
        for i in range(n):
            F[i][i] = one
            V[i][i] = one
        for term in range(1, n + _EXTRA_TERMS + 1):
            t = mp.mpf(term)
            newV = []
            for i in range(n):
                Vi = V[i]
                Vim1 = V[i - 1] if i > 0 else None
                row = [zero] * (i + 1)
                for j in range(i + 1):
                    v = d[i] * Vi[j]
                    if Vim1 is not None and j <= i - 1:
                        v += sub * Vim1[j]
                    row[j] = v / t
                newV.append(row)
            V = newV
            for i in range(n):
                Fi = F[i]
                Vi = V[i]
                for j in range(i + 1):
                    Fi[j] += Vi[j]
        if not mp.isfinite(F[n - 1][0]):
            raise NumericError(f"overflow in dd_exp Taylor stage at scale 2^{squarings}")
        for _ in range(squarings):
            G = []
            for i in range(n):
                Fi = F[i]
                row = [zero] * (i + 1)
                for j in range(i + 1):
                    s = zero
                    for l in range(j, i + 1):
                        s += Fi[l] * F[l][j]
                    row[j] = s
                G.append(row)
            F = G
        col = [F[i][0] for i in range(n)]
        if is_complex:
            return np.array([complex(v) for v in col])
        return np.array([float(v) for v in col])


def dd_exp(points, kind=None, halfwidth=None, dps=None) -> DividedDiffTable:
    """Divided differences of exp at the given points (bidiagonal-matrix method).

    Points must be finite, at most 121 of them.  Accuracy target: relative
    error <= 1e-13 per coefficient against a high-precision oracle, down to
    the double-precision range.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim != 1 or len(pts) == 0:
        raise ParameterError("points must be a nonempty 1-D sequence")
    if len(pts) > MAX_TABLE_POINTS:
        raise ParameterError(f"at most {MAX_TABLE_POINTS} points supported")
    if not np.all(np.isfinite(pts)):
        raise ParameterError("nonfinite interpolation point")
    coeffs = _bidiagonal_expm_first_col(list(pts), dps)
    if not np.all(np.isfinite(coeffs)):
        raise NumericError("divided differences overflowed double precision")
    is_real = bool(np.all(pts.imag == 0))
    if kind is None:
        kind = "real" if is_real else "conjugate"
    if halfwidth is None:
        halfwidth = float(np.max(np.abs(pts)))
    out_pts = pts.real.astype(float) if is_real else pts
    return DividedDiffTable(points=out_pts, coefficients=coeffs,
                            interval_halfwidth=float(halfwidth), kind=kind)


def taylor_table(count, kind="real") -> DividedDiffTable:
    """Confluent (c=0) table: coefficients 1/j!."""
    coeffs = np.array([1.0 / math.factorial(j) if j < 171 else 0.0 for j in range(count)])
    pts = np.zeros(count) if kind == "real" else np.zeros(count, dtype=complex)
    return DividedDiffTable(points=pts, coefficients=coeffs,
                            interval_halfwidth=0.0, kind=kind)


def precompute_all(theta_values, seq: LejaSequence, degree=100, dps=None):
    """One DividedDiffTable per stored interval, plus the confluent entry.

    theta_values maps interval index j to halfwidth theta_j.  Returns a dict
    {0: confluent table, j: table at halfwidth theta_j}.  The stored degree
    covers any planned interpolation (m_max = 100); conjugate tables end on a
    completed pair.
    """
    count = degree + 1
    if seq.kind == "conjugate" and count % 2 == 0:
        count += 1
    if seq.length < count:
        raise ParameterError(f"sequence too short: need {count} points, have {seq.length}")
    tables = {0: taylor_table(count, seq.kind)}
    for j, theta in sorted(theta_values.items()):
        pts = scale(seq, theta)[:count]
        tables[j] = dd_exp(pts, kind=seq.kind, halfwidth=theta, dps=dps)
    return tables
