"""Exact rational linear algebra for angle feasibility.

Angle values are rational multiples of pi plus rational combinations of
free angle symbols.  An equation is a dict of Fraction coefficients over
named unknowns together with a Fraction constant, the constant measured
in units of pi (so the constant 2/3 stands for 2*pi/3).  Systems are kept
in reduced row echelon form and every feasibility question (consistency,
forced equality of two unknowns, strict range bounds) is decided exactly.
No floating point enters this module.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

Q = Fraction

# An inequality is (coeffs, const) meaning  sum(coeffs[v]*v) + const > 0,
# with const in units of pi.
Ineq = tuple[dict[str, Fraction], Fraction]


class Inconsistent(ValueError):
    """An equation contradicts the current system."""


def _clean(coeffs: Mapping[str, Fraction]) -> dict[str, Fraction]:
    return {v: Q(c) for v, c in coeffs.items() if c != 0}


class LinearSystem:
    """Affine equations over named unknowns, in reduced echelon form.

    Rows map a pivot variable to (coeffs, const) with coeffs[pivot] == 1
    and no pivot of any other row appearing in coeffs.
    """

    def __init__(self, variables: Iterable[str], _rows=None):
        self.variables = tuple(variables)
        self._pos = {v: i for i, v in enumerate(self.variables)}
        self.rows: dict[str, tuple[dict[str, Fraction], Fraction]] = (
            {} if _rows is None else _rows
        )

    def copy(self) -> "LinearSystem":
        rows = {p: (dict(c), k) for p, (c, k) in self.rows.items()}
        return LinearSystem(self.variables, rows)

    # ------------------------------------------------------------------
    # construction

    def _reduce(self, coeffs: Mapping[str, Fraction], const) -> tuple[dict, Fraction]:
        """Eliminate all pivots from an equation, returning the residue."""
        c = _clean(coeffs)
        k = Q(const)
        for p in list(c):
            row = self.rows.get(p)
            if row is None:
                continue
            f = c.pop(p)
            rc, rk = row
            for v, x in rc.items():
                if v == p:
                    continue
                nv = c.get(v, Q(0)) - f * x
                if nv:
                    c[v] = nv
                else:
                    c.pop(v, None)
            k -= f * rk
        return c, k

    def add_equation(self, coeffs: Mapping[str, Fraction], const) -> None:
        """Add sum(coeffs[v]*v) = const (const in units of pi).

        Raises Inconsistent if the equation contradicts the system.
        A redundant equation is a no-op.
        """
        c, k = self._reduce(coeffs, const)
        if not c:
            if k != 0:
                raise Inconsistent(f"0 = {k}")
            return
        pivot = min(c, key=self._pos.__getitem__)
        f = c[pivot]
        row = {v: x / f for v, x in c.items()}
        rk = k / f
        # eliminate the new pivot from existing rows
        for p, (rc, pk) in self.rows.items():
            g = rc.get(pivot)
            if g is None:
                continue
            for v, x in row.items():
                if v == pivot:
                    rc.pop(pivot, None)
                    continue
                nv = rc.get(v, Q(0)) - g * x
                if nv:
                    rc[v] = nv
                else:
                    rc.pop(v, None)
            self.rows[p] = (rc, pk - g * rk)
        self.rows[pivot] = (row, rk)

    def consistent_with(self, coeffs: Mapping[str, Fraction], const) -> bool:
        c, k = self._reduce(coeffs, const)
        return bool(c) or k == 0

    def implies(self, coeffs: Mapping[str, Fraction], const) -> bool:
        """True iff the equation holds identically on the solution set."""
        c, k = self._reduce(coeffs, const)
        return not c and k == 0

    # ------------------------------------------------------------------
    # queries

    @property
    def dim(self) -> int:
        return len(self.variables) - len(self.rows)

    def free_variables(self) -> list[str]:
        return [v for v in self.variables if v not in self.rows]

    def express(self, var: str) -> tuple[dict[str, Fraction], Fraction]:
        """Write var as (coeffs over free variables, constant)."""
        if var in self.rows:
            rc, rk = self.rows[var]
            return {v: -x for v, x in rc.items() if v != var}, rk
        return {var: Q(1)}, Q(0)

    def value_of(self, var: str) -> Fraction | None:
        c, k = self.express(var)
        return None if c else k

    def forces_equal(self, x: str, y: str) -> bool:
        return self.implies({x: Q(1), y: Q(-1)}, 0)

    def never_equal(self, x: str, y: str) -> bool:
        c, k = self._reduce({x: Q(1), y: Q(-1)}, 0)
        return not c and k != 0

    def forced_pair(self, labels: Iterable[str]) -> tuple[str, str] | None:
        """First pair of distinct labels whose values coincide identically."""
        labels = list(labels)
        for i, x in enumerate(labels):
            for y in labels[i + 1 :]:
                if self.forces_equal(x, y):
                    return (x, y)
        return None

    # ------------------------------------------------------------------
    # strict feasibility (Fourier-Motzkin over the free variables)

    def _box_inequalities(self, lo, hi) -> list[Ineq]:
        lo, hi = Q(lo), Q(hi)
        ineqs: list[Ineq] = []
        for var in self.variables:
            c, k = self.express(var)
            ineqs.append((dict(c), k - lo))  # var - lo > 0
            ineqs.append(({v: -x for v, x in c.items()}, hi - k))  # hi - var > 0
        return ineqs

    def feasible_open_box(self, lo=0, hi=2) -> bool:
        """Is there a point with every variable strictly in (lo, hi)*pi?"""
        return _fm_feasible(self._box_inequalities(lo, hi), self.free_variables())

    def variable_interval(self, var: str, lo=0, hi=2) -> tuple[Fraction | None, Fraction | None]:
        """Open range of var over the open box solution set.

        Returns (inf, sup) in units of pi; None means unbounded, which
        cannot happen for box-constrained systems but is kept for safety.
        """
        c, k = self.express(var)
        ineqs = self._box_inequalities(lo, hi)
        free = self.free_variables()
        t = "__t__"
        # substitute t for the expression: pick a free var occurring in it
        if not c:
            return (k, k)
        piv = min(c, key=self._pos.__getitem__)
        f = c[piv]
        # piv = (t - k - sum(other terms)) / f
        sub = {t: Q(1) / f}
        for v, x in c.items():
            if v != piv:
                sub[v] = -x / f
        sub_const = -k / f
        out: list[Ineq] = []
        for ic, ik in ineqs:
            nc = dict(ic)
            g = nc.pop(piv, Q(0))
            kk = ik + g * sub_const
            for v, x in sub.items():
                nv = nc.get(v, Q(0)) + g * x
                if nv:
                    nc[v] = nv
                else:
                    nc.pop(v, None)
            out.append((nc, kk))
        order = [v for v in free if v != piv] + [t]
        rest = _fm_eliminate(out, [v for v in order if v != t])
        lo_b, hi_b = None, None
        feas = True
        for ic, ik in rest:
            a = ic.get(t, Q(0))
            if a == 0:
                if ik <= 0:
                    feas = False
                continue
            bound = -ik / a
            if a > 0:  # t > bound
                lo_b = bound if lo_b is None else max(lo_b, bound)
            else:  # t < bound
                hi_b = bound if hi_b is None else min(hi_b, bound)
        if not feas or (lo_b is not None and hi_b is not None and lo_b >= hi_b):
            raise Inconsistent("empty range")
        return lo_b, hi_b

    def sample(self, lo=0, hi=2) -> dict[str, Fraction]:
        """An exact strictly interior point of the open box solution set."""
        sys = self.copy()
        for var in self.free_variables():
            a, b = sys.variable_interval(var, lo, hi)
            if a is None and b is None:
                val = Q(0)
            elif a is None:
                val = b - 1
            elif b is None:
                val = a + 1
            else:
                val = (a + b) / 2
            sys.add_equation({var: Q(1)}, val)
        return {v: sys.value_of(v) for v in sys.variables}

    # ------------------------------------------------------------------
    # rendering

    def relation_strings(self) -> list[str]:
        out = []
        for var in self.variables:
            if var in self.rows:
                c, k = self.express(var)
                out.append(f"{var} = {render_expr(c, k)}")
        return out

    def canonical_key(self):
        rows = []
        for p in sorted(self.rows, key=self._pos.__getitem__):
            rc, rk = self.rows[p]
            rows.append((p, tuple(sorted(rc.items())), rk))
        return tuple(rows)


def _fm_eliminate(ineqs: list[Ineq], variables: list[str]) -> list[Ineq]:
    """Fourier-Motzkin elimination for strict inequalities."""
    cur = [( _clean(c), Q(k)) for c, k in ineqs]
    for t in variables:
        lows, highs, rest = [], [], []
        for c, k in cur:
            a = c.get(t, Q(0))
            if a == 0:
                rest.append((c, k))
            elif a > 0:
                lows.append((c, k, a))
            else:
                highs.append((c, k, a))
        for lc, lk, la in lows:
            for hc, hk, ha in highs:
                # combine: (1/la)*(low) + (-1/ha)*(high) eliminates t
                nc: dict[str, Fraction] = {}
                for v, x in lc.items():
                    if v != t:
                        nc[v] = x / la
                for v, x in hc.items():
                    if v == t:
                        continue
                    nv = nc.get(v, Q(0)) - x / ha
                    if nv:
                        nc[v] = nv
                    else:
                        nc.pop(v, None)
                nk = lk / la - hk / ha
                rest.append((nc, nk))
        cur = rest
    return cur


def _fm_feasible(ineqs: list[Ineq], variables: list[str]) -> bool:
    for c, k in _fm_eliminate(ineqs, variables):
        if not c and k <= 0:
            return False
        if c:  # leftover variable not asked to be eliminated
            raise ValueError("unexpected free variable in feasibility check")
    return True


def render_expr(coeffs: Mapping[str, Fraction], const: Fraction) -> str:
    """Human-readable form of const*pi + sum(coeffs[v]*v)."""
    parts = []
    if const != 0:
        parts.append(("+", _coef_str(abs(const)) + "pi", const < 0))
    for v in sorted(coeffs):
        c = coeffs[v]
        if c == 0:
            continue
        mag = abs(c)
        term = v if mag == 1 else _coef_str(mag) + v
        parts.append(("+", term, c < 0))
    if not parts:
        return "0"
    out = ""
    for i, (_, term, neg) in enumerate(parts):
        if i == 0:
            out = ("-" if neg else "") + term
        else:
            out += (" - " if neg else " + ") + term
    return out


def _coef_str(q: Fraction) -> str:
    if q.denominator == 1:
        return f"{q.numerator}*"
    return f"{q.numerator}/{q.denominator}*"
