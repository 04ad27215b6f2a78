"""Dense two-phase simplex solver for the small LPs behind geometric queries.

The solver works over exact rationals (``fractions.Fraction``) or floats; the
arithmetic mode is inferred from the input data.  Bland's rule keeps pivoting
deterministic and cycle-free, which matters more than speed at the problem
sizes used here (tens of variables and constraints).
"""

from __future__ import annotations

from fractions import Fraction

_FLOAT_EPS = 1e-11


class LPError(Exception):
    """Base class for solver failures."""


class LPInfeasible(LPError):
    """The constraint system has no solution (often a malformed body)."""


class LPUnbounded(LPError):
    """The objective is unbounded below on the feasible set."""


def _all_exact(rows):
    for row in rows:
        for v in row:
            if not isinstance(v, (int, Fraction)):
                return False
    return True


def solve_lp(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), free=()):
    """Minimize ``c . x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    Variable indices listed in ``free`` are unrestricted in sign (they are
    split internally).  Returns ``(x, value)`` with the same arithmetic as the
    inputs: exact ``Fraction`` results when every coefficient is an int or
    Fraction, floats otherwise.
    """
    nvar = len(c)
    A_ub = [list(row) for row in A_ub]
    A_eq = [list(row) for row in A_eq]
    b_ub = list(b_ub)
    b_eq = list(b_eq)
    for row in A_ub + A_eq:
        if len(row) != nvar:
            raise ValueError("constraint row length does not match objective")

    exact = _all_exact([c, b_ub, b_eq] + A_ub + A_eq)
    if exact:
        conv = Fraction
        eps = Fraction(0)
    else:
        conv = float
        eps = _FLOAT_EPS

    free = sorted(set(free))
    # Split free variables into positive and negative parts.
    def extend(row):
        ext = [conv(v) for v in row]
        ext.extend(-conv(row[j]) for j in free)
        return ext

    c_ext = extend(c)
    rows = [extend(r) for r in A_ub] + [extend(r) for r in A_eq]
    rhs = [conv(v) for v in b_ub] + [conv(v) for v in b_eq]
    n_ext = nvar + len(free)
    m_ub = len(A_ub)
    m = len(rows)

    # Slack columns for inequality rows, then artificials where the slack
    # cannot serve as the initial basis (negative rhs or equality row).
    n_slack = m_ub
    zero, one = conv(0), conv(1)
    tableau = []
    basis = []
    art_cols = []
    n_art = 0
    for i in range(m):
        row = rows[i] + [zero] * n_slack
        if i < m_ub:
            row[n_ext + i] = one
        r = rhs[i]
        if r < 0:
            row = [-v for v in row]
            r = -r
        tableau.append(row + [r])
        basis.append(None)
    for i in range(m):
        slack_ok = i < m_ub and tableau[i][n_ext + i] == one
        if slack_ok:
            basis[i] = n_ext + i
        else:
            art_cols.append(i)
            n_art += 1
    total = n_ext + n_slack + n_art
    k = 0
    for i in art_cols:
        col = n_ext + n_slack + k
        for row in tableau:
            row.insert(-1, zero)
        tableau[i][col] = one
        basis[i] = col
        k += 1

    def pivot(ti, tj):
        piv = tableau[ti][tj]
        inv = one / piv
        tableau[ti] = [v * inv for v in tableau[ti]]
        prow = tableau[ti]
        for r in range(m):
            if r == ti:
                continue
            f = tableau[r][tj]
            if f != 0:
                tableau[r] = [a - f * b for a, b in zip(tableau[r], prow)]
        basis[ti] = tj

    def reduced_costs(cost):
        red = list(cost)
        obj = zero
        for i in range(m):
            cb = cost[basis[i]]
            if cb != 0:
                row = tableau[i]
                red = [a - cb * b for a, b in zip(red, row[:-1])]
                obj += cb * row[-1]
        return red, obj

    def run_simplex(cost, allowed):
        while True:
            red, _ = reduced_costs(cost)
            enter = -1
            for j in range(allowed):
                if red[j] < -eps:
                    enter = j  # Bland: lowest eligible index
                    break
            if enter < 0:
                return
            leave, best = -1, None
            for i in range(m):
                a = tableau[i][enter]
                if a > eps:
                    ratio = tableau[i][-1] / a
                    if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leave]
                    ):
                        best, leave = ratio, i
            if leave < 0:
                raise LPUnbounded("objective unbounded below")
            pivot(leave, enter)

    if n_art:
        phase1 = [zero] * (n_ext + n_slack) + [one] * n_art
        run_simplex(phase1, total)
        _, val = reduced_costs(phase1)
        if val > (eps * 10 if not exact else 0):
            raise LPInfeasible("phase-1 optimum positive")
        # Drive surviving artificials out of the basis.
        for i in range(m):
            if basis[i] >= n_ext + n_slack:
                for j in range(n_ext + n_slack):
                    if abs(tableau[i][j]) > eps:
                        pivot(i, j)
                        break

    cost2 = c_ext + [zero] * (n_slack + n_art)
    run_simplex(cost2, n_ext + n_slack)

    x_ext = [zero] * total
    for i in range(m):
        if basis[i] < total:
            x_ext[basis[i]] = tableau[i][-1]
    x = [x_ext[j] for j in range(nvar)]
    for k, j in enumerate(free):
        x[j] = x[j] - x_ext[nvar + k]
    value = sum(ci * xi for ci, xi in zip(c, x))
    if not exact:
        x = [float(v) for v in x]
        value = float(value)
    return x, value
