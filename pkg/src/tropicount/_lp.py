"""Small exact linear programs.

Two-phase tableau simplex with Bland's rule, kept in integers by
fraction-free pivoting: every entry is an integer over one shared positive
denominator, and each pivot divides exactly by the previous one.  Both
objective rows ride along from the start so they stay integral too.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


def _int_row(values) -> list[int]:
    vals = [Fraction(v) for v in values]
    den = 1
    for v in vals:
        den = lcm(den, v.denominator)
    return [v.numerator * (den // v.denominator) for v in vals]


class _Tableau:
    def __init__(self, rows, basis, m):
        self.t = rows  # m constraint rows, then objective rows (as -c)
        self.basis = basis
        self.m = m
        self.den = 1

    def pivot(self, r, c):
        t, den = self.t, self.den
        p = t[r][c]
        prow = t[r]
        for i, row in enumerate(t):
            if i == r:
                continue
            f = row[c]
            if f == 0:
                t[i] = [(a * p) // den for a in row]
            else:
                t[i] = [(a * p - f * b) // den for a, b in zip(row, prow)]
        self.den = p
        self.basis[r] = c
        if p < 0:
            self.t = [[-a for a in row] for row in t]
            self.den = -p

    def run(self, obj_row, ncols) -> bool:
        """Optimise objective row ``obj_row`` over columns ``< ncols``. False if unbounded."""
        while True:
            obj = self.t[obj_row]
            col = next((j for j in range(ncols) if obj[j] < 0), None)
            if col is None:
                return True
            best = None
            for i in range(self.m):
                a = self.t[i][col]
                if a > 0:
                    rhs = self.t[i][-1]
                    if best is None:
                        best = (rhs, a, i)
                        continue
                    lhs, cur = rhs * best[1], best[0] * a
                    if lhs < cur or (lhs == cur and self.basis[i] < self.basis[best[2]]):
                        best = (rhs, a, i)
            if best is None:
                return False
            self.pivot(best[2], col)


def maximize(c: Sequence, a_ub: Sequence[Sequence], b_ub: Sequence,
             a_eq: Sequence[Sequence] = (), b_eq: Sequence = ()):
    """``max c.x`` over free ``x`` with ``a_ub x <= b_ub`` and ``a_eq x = b_eq``.

    Returns ``("optimal", value, x)``, ``("infeasible", None, None)`` or
    ``("unbounded", None, None)``.
    """
    n = len(c)
    rows = [(list(r), b, False) for r, b in zip(a_ub, b_ub)]
    rows += [(list(r), b, True) for r, b in zip(a_eq, b_eq)]
    m = len(rows)
    nslack = sum(1 for *_, eq in rows if not eq)
    art0 = 2 * n + nslack
    width = art0 + m
    tab, basis = [], []
    s = 0
    for i, (r, b, eq) in enumerate(rows):
        ints = _int_row(list(r) + [b])
        coeffs, rhs = ints[:-1], ints[-1]
        line = coeffs + [-v for v in coeffs] + [0] * (nslack + m) + [rhs]
        if not eq:
            line[2 * n + s] = 1
            s += 1
        if rhs < 0:
            line = [-v for v in line]
        line[art0 + i] = 1
        tab.append(line)
        basis.append(art0 + i)
    cint = _int_row(c)
    tab.append([-v for v in cint] + cint + [0] * (nslack + m) + [0])
    phase1 = [0] * (width + 1)
    for line in tab[:m]:
        phase1 = [o - v for o, v in zip(phase1, line)]
    for j in range(art0, width):
        phase1[j] = 0
    tab.append(phase1)
    tb = _Tableau(tab, basis, m)
    tb.run(m + 1, art0)
    if tb.t[m + 1][-1] != 0:
        return "infeasible", None, None
    for i in range(m):
        if tb.basis[i] >= art0:
            col = next((j for j in range(art0) if tb.t[i][j] != 0), None)
            if col is not None:
                tb.pivot(i, col)
    if not tb.run(m, art0):
        return "unbounded", None, None
    z = [Fraction(0)] * width
    for i, bcol in enumerate(tb.basis):
        z[bcol] = Fraction(tb.t[i][-1], tb.den)
    x = [z[j] - z[n + j] for j in range(n)]
    value = sum((Fraction(cv) * xv for cv, xv in zip(c, x)), Fraction(0))
    return "optimal", value, x
