"""Truncated super-commutative power series and genus-0 generating functions.

The series engine works over formal variables t_{a,i} indexed by a
descendant level a >= 0 and a basis index i (1-based, as everywhere in the
package).  A variable inherits the parity of its cohomology class, so
odd-degree classes give odd (anticommuting) variables; a Novikov variable
q tracks the curve degree.  All coefficients are exact rationals.

Monomials are stored in a canonical sorted order.  Reordering costs the
usual Koszul sign (a factor -1 for every transposition of two odd
variables) and the square of an odd variable is zero.  Derivatives act
from the left: differentiating by an odd variable first anticommutes it
to the front of the monomial.

``build_potentials`` assembles the five genus-0 generating functions of a
solved invariant table:

* ``complex_primary``     -- primary-insertion potential, one q power per
  curve degree, coefficient <mu>/prod(mult!);
* ``complex_descendant``  -- the same with descendant variables up to a
  configurable depth;
* ``complex_doubled``     -- the primary potential re-indexed so a curve of
  degree d' contributes q^(2d') (its image under degree doubling), the form
  that couples to the real potential;
* ``real_primary``        -- real-curve potential with the half-weight
  convention, coefficient <mu>/(2^ell * prod(mult!));
* ``real_descendant``     -- its descendant extension.

Only the genus-0 coefficient window of each potential is materialized; the
loop-counting variable is tracked symbolically as a single exponent per
series (lam_power: -2 for complex, -1 for real), which is all the dilaton
residual needs.  A third truncation entry, when supplied, is validated and
recorded but does not enlarge the materialized window.

The residual_* functions evaluate the differential equations satisfied by
the potentials (string, dilaton, associativity PDEs and their real
analogues) and return the residual restricted to the window where the
truncated data determines it exactly; on a correct table every residual is
the zero series.
"""

import math
from fractions import Fraction

from .combinatorics import sort_insertions_sign
from .graded_algebra import frac_to_str
from .invariant_store import COMPLEX, REAL, InvariantKey, real_insertion_vanishes
from .complex_solver import filter_complex, vdim_complex
from .real_solver import filter_real, vdim_real


class SeriesError(Exception):
    """Raised for malformed series operations (truncation mismatch etc.)."""


class MissingInvariantError(SeriesError):
    """A potential coefficient needs an invariant the table does not hold."""

    def __init__(self, key):
        self.key = key
        SeriesError.__init__(self, "missing invariant for key %r" % (key,))


def _check_var(var):
    if (not isinstance(var, tuple) or len(var) != 2
            or not isinstance(var[0], int) or not isinstance(var[1], int)
            or var[0] < 0 or var[1] < 1):
        raise SeriesError("variable must be a pair (level >= 0, basis >= 1), got %r" % (var,))


class GradedSeries:
    """Sparse truncated series in the t_{a,i} variables and q.

    terms: dict mapping (q_exp, vars) -> Fraction, where vars is a sorted
    tuple of ((a, i), mult) pairs with positive multiplicities.  Terms with
    total t-degree above t_max or q exponent above q_max are discarded by
    every operation, so arithmetic is closed on the truncation.
    """

    __slots__ = ("target", "t_max", "q_max", "depth", "lam_power", "terms")

    def __init__(self, target, t_max, q_max, depth=0, lam_power=None):
        if t_max < 0 or q_max < 0:
            raise SeriesError("truncation bounds must be non-negative")
        self.target = target
        self.t_max = t_max
        self.q_max = q_max
        self.depth = depth
        self.lam_power = lam_power
        self.terms = {}

    # ----- basic structure -------------------------------------------------

    def var_parity(self, var):
        """Parity (0 or 1) of the variable: that of its cohomology class."""
        return self.target.degree(var[1]) % 2

    def _like(self):
        return GradedSeries(self.target, self.t_max, self.q_max,
                            depth=self.depth, lam_power=self.lam_power)

    def _compatible(self, other):
        if self.target is not other.target and self.target != other.target:
            raise SeriesError("series over different targets")
        if (self.t_max, self.q_max) != (other.t_max, other.q_max):
            raise SeriesError("truncation mismatch: %r vs %r" %
                              ((self.t_max, self.q_max), (other.t_max, other.q_max)))

    @staticmethod
    def _t_degree(vars_tuple):
        return sum(m for _, m in vars_tuple)

    def add_term(self, q_exp, vars_tuple, coeff):
        """Accumulate coeff * q^q_exp * t^vars (vars already canonical).

        vars_tuple is an iterable of ((a, i), mult); it must already be in
        canonical (sorted, merged) order -- use monomial() to build one from
        an ordered variable list with the Koszul sign.
        """
        coeff = Fraction(coeff)
        if coeff == 0:
            return
        vars_tuple = tuple((tuple(v), m) for v, m in vars_tuple)
        prev = None
        for v, m in vars_tuple:
            _check_var(v)
            if m <= 0:
                raise SeriesError("non-positive multiplicity in monomial")
            if self.var_parity(v) and m > 1:
                return  # square of an odd variable
            if prev is not None and not (prev < v):
                raise SeriesError("monomial not canonical: %r" % (vars_tuple,))
            prev = v
        if q_exp < 0:
            raise SeriesError("negative q exponent")
        if q_exp > self.q_max or self._t_degree(vars_tuple) > self.t_max:
            return
        key = (q_exp, vars_tuple)
        val = self.terms.get(key, Fraction(0)) + coeff
        if val == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = val

    def monomial(self, ordered_vars):
        """Canonicalize an ordered variable sequence.

        Returns (sign, vars_tuple): the Koszul sign of sorting the sequence
        and the sorted, multiplicity-merged tuple -- or (0, None) when the
        monomial vanishes (repeated odd variable).
        """
        for v in ordered_vars:
            _check_var(tuple(v))
        items, sign = sort_insertions_sign(
            [tuple(v) for v in ordered_vars],
            lambda v: self.target.degree(v[1]))
        vars_tuple = []
        for v in items:
            if vars_tuple and vars_tuple[-1][0] == v:
                if self.var_parity(v):
                    return 0, None
                vars_tuple[-1][1] += 1
            else:
                vars_tuple.append([v, 1])
        return sign, tuple((v, m) for v, m in vars_tuple)

    def coefficient(self, q_exp, ordered_vars=()):
        """Coefficient of q^q_exp times the given variable sequence."""
        sign, vars_tuple = self.monomial(ordered_vars)
        if sign == 0:
            return Fraction(0)
        return sign * self.terms.get((q_exp, vars_tuple), Fraction(0))

    def is_zero(self):
        return not self.terms

    def items(self):
        """Terms in a deterministic order: ((q_exp, vars), coeff)."""
        return sorted(self.terms.items())

    def __eq__(self, other):
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return ((self.t_max, self.q_max) == (other.t_max, other.q_max)
                and self.terms == other.terms)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    # ----- arithmetic ------------------------------------------------------

    def __add__(self, other):
        self._compatible(other)
        out = self._like()
        out.terms = dict(self.terms)
        for key, c in other.terms.items():
            val = out.terms.get(key, Fraction(0)) + c
            if val == 0:
                out.terms.pop(key, None)
            else:
                out.terms[key] = val
        return out

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = Fraction(c)
        out = self._like()
        if c != 0:
            out.terms = {key: c * v for key, v in self.terms.items()}
        return out

    def __mul__(self, other):
        """Super-commutative product, truncated.

        The sign of merging two canonical monomials is -1 to the number of
        pairs (x from the left factor, y from the right factor) of odd
        variables with y < x; a shared odd variable kills the term.
        """
        self._compatible(other)
        out = self._like()
        if self.lam_power is not None and other.lam_power is not None:
            out.lam_power = self.lam_power + other.lam_power
        for (q1, a_vars), c1 in self.terms.items():
            deg1 = self._t_degree(a_vars)
            for (q2, b_vars), c2 in other.terms.items():
                q = q1 + q2
                if q > self.q_max:
                    continue
                if deg1 + self._t_degree(b_vars) > self.t_max:
                    continue
                merged, sign = self._merge_vars(a_vars, b_vars)
                if merged is None:
                    continue
                key = (q, merged)
                val = out.terms.get(key, Fraction(0)) + sign * c1 * c2
                if val == 0:
                    out.terms.pop(key, None)
                else:
                    out.terms[key] = val
        return out

    def _merge_vars(self, a_vars, b_vars):
        odd_a = [v for v, _ in a_vars if self.var_parity(v)]
        crossings = 0
        for v, _ in b_vars:
            if self.var_parity(v):
                for w in odd_a:
                    if v < w:
                        crossings += 1
                    elif v == w:
                        return None, 0  # odd variable squared
        counts = {}
        for v, m in a_vars:
            counts[v] = counts.get(v, 0) + m
        for v, m in b_vars:
            counts[v] = counts.get(v, 0) + m
        merged = tuple((v, counts[v]) for v in sorted(counts))
        return merged, (-1 if crossings % 2 else 1)

    def partial_derivative(self, var):
        """Left derivative by t_var with the Koszul sign.

        For an odd variable the sign is -1 to the number of odd variables
        standing before it in the canonical monomial.
        """
        var = tuple(var)
        _check_var(var)
        v_odd = self.var_parity(var)
        out = self._like()
        for (q, vars_tuple), coeff in self.terms.items():
            mult = None
            for v, m in vars_tuple:
                if v == var:
                    mult = m
                    break
            if mult is None:
                continue
            sign = 1
            if v_odd:
                before = sum(1 for v, _ in vars_tuple
                             if v < var and self.var_parity(v))
                sign = -1 if before % 2 else 1
            new_vars = tuple((v, m if v != var else m - 1)
                             for v, m in vars_tuple if v != var or m > 1)
            key = (q, new_vars)
            val = out.terms.get(key, Fraction(0)) + sign * mult * coeff
            if val == 0:
                out.terms.pop(key, None)
            else:
                out.terms[key] = val
        return out

    def truncated(self, t_max=None, q_max=None):
        """Copy with a tighter truncation (terms beyond it dropped)."""
        new_t = self.t_max if t_max is None else min(t_max, self.t_max)
        new_q = self.q_max if q_max is None else min(q_max, self.q_max)
        if new_t < 0:
            new_t = 0
            keep_none = True
        else:
            keep_none = False
        out = GradedSeries(self.target, new_t, new_q,
                           depth=self.depth, lam_power=self.lam_power)
        if not keep_none:
            for (q, vars_tuple), c in self.terms.items():
                if q <= new_q and self._t_degree(vars_tuple) <= new_t:
                    out.terms[(q, vars_tuple)] = c
        return out

    # ----- serialization ---------------------------------------------------

    @staticmethod
    def monomial_string(q_exp, vars_tuple):
        parts = []
        if q_exp:
            parts.append("q^%d" % q_exp)
        for (a, i), m in vars_tuple:
            s = "t[%d,%d]" % (a, i)
            if m > 1:
                s += "^%d" % m
            parts.append(s)
        return " ".join(parts) if parts else "1"

    def to_json(self):
        return {
            "truncation": [self.t_max, self.q_max],
            "lam_power": self.lam_power,
            "terms": {self.monomial_string(q, vt): frac_to_str(c)
                      for (q, vt), c in self.items()},
        }


# ----- building the potentials ---------------------------------------------


def _multisets_exact(items, weights, count, total, start=0):
    """Multisets over items[start:] with exact size count and weight total.

    items must be listed with weights in non-decreasing order.  Yields
    tuples of (item, mult) with mult > 0, in lexicographic item order.
    """
    if count == 0:
        if total == 0:
            yield ()
        return
    if start >= len(items):
        return
    if total < count * weights[start]:
        return  # weights only grow from here on
    w = weights[start]
    it = items[start]
    max_take = count if w == 0 else min(count, total // w if w > 0 else count)
    for take in range(max_take, -1, -1):
        rest_total = total - take * w
        if rest_total < 0:
            continue
        for rest in _multisets_exact(items, weights, count - take,
                                     rest_total, start + 1):
            yield ((it, take),) + rest if take else rest


def _resolve_value(table, value_fn, key, kind_filter, target):
    if kind_filter(key, target) is not None:
        return Fraction(0)
    val = table.get(key)
    if val is not None:
        return val
    if value_fn is not None:
        return value_fn(key)
    raise MissingInvariantError(key)


def _aut_factor(vars_tuple):
    f = 1
    for _, m in vars_tuple:
        f *= math.factorial(m)
    return f


def _build_one(table, target, kind, depth, t_max, q_max, value_fn,
               doubled=False):
    lam = -2 if kind == COMPLEX else -1
    out = GradedSeries(target, t_max, q_max, depth=depth, lam_power=lam)
    n = target.complex_dim
    variables = []
    for a in range(depth + 1):
        for i in range(1, target.num_basis + 1):
            if kind == REAL and real_insertion_vanishes(target, a, i):
                continue
            variables.append((a, i))
    variables.sort(key=lambda v: 2 * v[0] + target.degree(v[1]))
    weights = [2 * a + target.degree(i) for a, i in variables]
    if kind == COMPLEX:
        degrees = range(0, q_max + 1)
    else:
        degrees = range(1, q_max + 1)
    for d in degrees:
        if doubled and 2 * d > q_max:
            break
        for ell in range(0, t_max + 1):
            if kind == COMPLEX:
                want = vdim_complex(0, ell, d, target)
            else:
                want = vdim_real(0, ell, d, target)
            if want < 0:
                continue
            for multiset in _multisets_exact(variables, weights, ell, want):
                insertions = []
                for (a, i), m in multiset:
                    insertions.extend([(a, i)] * m)
                insertions.sort()
                key = InvariantKey(kind, 0, d, tuple(insertions))
                if kind == COMPLEX:
                    val = _resolve_value(table, value_fn, key,
                                         filter_complex, target)
                else:
                    val = _resolve_value(table, value_fn, key,
                                         filter_real, target)
                if val == 0:
                    continue
                coeff = Fraction(val, _aut_factor(multiset))
                if kind == REAL:
                    coeff /= 2 ** ell
                vars_tuple = tuple(sorted(multiset))
                out.add_term(2 * d if doubled else d, vars_tuple, coeff)
    return out


def build_potentials(tables, truncation, descendant_depth=2,
                     complex_value=None, real_value=None):
    """Assemble the genus-0 generating functions from an invariant table.

    tables: an InvariantTable (its target is used throughout).
    truncation: (t_max, q_max) or (t_max, q_max, loop_window); the optional
        third entry is validated but only the genus-0 coefficient is ever
        materialized.
    descendant_depth: highest descendant level included as a variable.
    complex_value / real_value: optional callables mapping a canonical key
        to its value; when omitted, every needed invariant must already be
        stored and a missing one raises MissingInvariantError.

    Returns a dict with keys complex_primary, complex_descendant,
    complex_doubled and, when the target carries a real theory (odd complex
    dimension), real_primary and real_descendant.

    Coefficient conventions: the coefficient of a complex monomial is the
    invariant divided by the product of variable-multiplicity factorials
    (equivalently, the sum over ordered insertion sequences carries 1/ell!);
    real coefficients carry an extra 1/2 per insertion.  All basis classes
    of the built-in targets are even, so the ordered-to-canonical monomial
    conversion is sign-free.
    """
    if not (isinstance(truncation, (tuple, list)) and len(truncation) in (2, 3)):
        raise SeriesError("truncation must be (t_max, q_max[, loop_window])")
    t_max, q_max = int(truncation[0]), int(truncation[1])
    if t_max < 0 or q_max < 0:
        raise SeriesError("truncation bounds must be non-negative")
    if len(truncation) == 3 and int(truncation[2]) < 0:
        raise SeriesError("loop window must be non-negative")
    if descendant_depth < 0:
        raise SeriesError("descendant depth must be non-negative")
    table = tables
    target = table.target
    for i in range(1, target.num_basis + 1):
        if target.degree(i) % 2:
            raise SeriesError(
                "potentials need an even-degree basis; class %d is odd" % i)
    out = {
        "complex_primary": _build_one(table, target, COMPLEX, 0,
                                      t_max, q_max, complex_value),
        "complex_descendant": _build_one(table, target, COMPLEX,
                                         descendant_depth, t_max, q_max,
                                         complex_value),
        "complex_doubled": _build_one(table, target, COMPLEX, 0,
                                      t_max, q_max, complex_value,
                                      doubled=True),
    }
    if target.complex_dim % 2 == 1:
        out["real_primary"] = _build_one(table, target, REAL, 0,
                                         t_max, q_max, real_value)
        out["real_descendant"] = _build_one(table, target, REAL,
                                            descendant_depth, t_max, q_max,
                                            real_value)
    return out


# ----- differential-equation residuals --------------------------------------


def _apply_window(res, truncation):
    if truncation is None:
        return res
    if isinstance(truncation, (tuple, list)) and len(truncation) in (2, 3):
        return res.truncated(int(truncation[0]), int(truncation[1]))
    raise SeriesError("truncation must be (t_max, q_max[, loop_window])")


def residual_string_complex(F, truncation=None):
    """Residual of the string equation on a complex potential.

    dF/dt_{0,1} minus the classical quadratic term (1/2) sum g_{ij} t_{0,i}
    t_{0,j} minus sum_{a,i} t_{a+1,i} dF/dt_{a,i}, restricted to total
    t-degree <= t_max - 1 where the truncated data determines it exactly.
    Zero on a potential built from a correct table.
    """
    target = F.target
    res = F.partial_derivative((0, 1))
    quad = F._like()
    nb = target.num_basis
    for i in range(1, nb + 1):
        gii = target.pairing_entry(i, i)
        if gii:
            quad.add_term(0, (((0, i), 2),), Fraction(gii, 2))
        for j in range(i + 1, nb + 1):
            gji = target.pairing_entry(j, i)
            if gji:
                sign, vt = quad.monomial([(0, i), (0, j)])
                if sign:
                    quad.add_term(0, vt, sign * gji)
    res = res - quad
    for a in range(F.depth):
        for i in range(1, nb + 1):
            dF = F.partial_derivative((a, i))
            if dF.is_zero():
                continue
            tvar = F._like()
            tvar.add_term(0, (((a + 1, i), 1),), 1)
            res = res - tvar * dF
    res = res.truncated(F.t_max - 1)
    return _apply_window(res, truncation)


def _residual_dilaton(F):
    if F.lam_power is None:
        raise SeriesError("dilaton residual needs the loop exponent "
                          "(lam_power) of the series window")
    res = F.partial_derivative((1, 1)) - F.scale(F.lam_power)
    for a in range(F.depth + 1):
        for i in range(1, F.target.num_basis + 1):
            dF = F.partial_derivative((a, i))
            if dF.is_zero():
                continue
            tvar = F._like()
            tvar.add_term(0, (((a, i), 1),), 1)
            res = res - tvar * dF
    return res.truncated(F.t_max - 1)


def residual_dilaton_complex(F, truncation=None):
    """Residual of the dilaton equation on a complex genus-0 potential.

    dF/dt_{1,1} + 2F - sum_{a,i} t_{a,i} dF/dt_{a,i}; the +2F term is the
    loop-counting derivative evaluated on the genus-0 window (exponent -2).
    The constant-map correction term enters only one loop level up, outside
    the materialized window.  Exact on t-degree <= t_max - 1.
    """
    if F.lam_power != -2:
        raise SeriesError("expected a complex genus-0 window (lam_power -2)")
    return _apply_window(_residual_dilaton(F), truncation)


def residual_dilaton_real(F, truncation=None):
    """Residual of the real dilaton equation (genus-0 window, exponent -1):
    dF/dt_{1,1} + F - sum t dF.  Exact on t-degree <= t_max - 1."""
    if F.lam_power != -1:
        raise SeriesError("expected a real genus-0 window (lam_power -1)")
    return _apply_window(_residual_dilaton(F), truncation)


def residual_string_real(F, truncation=None):
    """Residual of the real string equation: dF/dt_{0,1}, expected to be
    identically zero (the unit class never appears in a nonzero real
    invariant).  Exact on t-degree <= t_max - 1."""
    res = F.partial_derivative((0, 1)).truncated(F.t_max - 1)
    return _apply_window(res, truncation)


def residual_wdvv_pde(F, indices, truncation=None):
    """Associativity PDE residual of a complex primary potential.

    indices = (i1, i2, i3, i4): the residual is

        sum_{j,k} F_{i1 i2 j} g^{jk} F_{k i3 i4}  -  (i2 <-> i3)

    with F_{abc} third partials in the t_{0,*} directions.  Exact on total
    t-degree <= t_max - 3; zero for every index quadruple on a potential
    built from a consistent table.
    """
    i1, i2, i3, i4 = indices
    for i in (i1, i2, i3, i4):
        if not (1 <= i <= F.target.num_basis):
            raise SeriesError("basis index out of range: %r" % (i,))

    def third(a, b):
        return (F.partial_derivative((0, a))
                .partial_derivative((0, b)))

    diag = F.target.diagonal_decomposition()
    res = F._like()
    for sgn, (a, b, c, e) in ((1, (i1, i2, i3, i4)), (-1, (i1, i3, i2, i4))):
        left = third(a, b)
        right_base = third(c, e)
        for coeff, (j, k) in diag:
            lj = left.partial_derivative((0, j))
            if lj.is_zero():
                continue
            rk = right_base.partial_derivative((0, k))
            if rk.is_zero():
                continue
            res = res + (lj * rk).scale(sgn * coeff)
    res = res.truncated(F.t_max - 3)
    return _apply_window(res, truncation)


def residual_rwdvv_pde(F_doubled, F_real, indices, truncation=None):
    """Residual of the real associativity PDE coupling the doubled complex
    potential to the real potential.

    indices = (i1, i2, i3) with the class of i1 in the +1 eigenspace of
    the involution and the classes of i2, i3 in the -1 eigenspace (raises
    SeriesError otherwise).  The residual is

        sum_{j,k} Fc_{i1 i2 j} g^{jk} Fr_{k i3}  -  (i2 <-> i3)

    with Fc third partials of the doubled complex potential and Fr second
    partials of the real potential, restricted to monomials whose variables
    all carry -1-eigenspace classes: the identity is the generating-function
    form of a relation family whose extra insertions range over the -1
    eigenspace only, and coefficients of mixed monomials are genuinely
    nonzero on correct tables.  Exact on t-degree <= t_max - 3.
    """
    target = F_real.target
    F_doubled._compatible(F_real)
    i1, i2, i3 = indices
    for i in (i1, i2, i3):
        if not (1 <= i <= target.num_basis):
            raise SeriesError("basis index out of range: %r" % (i,))
    if target.sign(i1) != 1:
        raise SeriesError(
            "first index must carry a +1-eigenspace class, got sign %d"
            % target.sign(i1))
    if target.sign(i2) != -1 or target.sign(i3) != -1:
        raise SeriesError(
            "second and third indices must carry -1-eigenspace classes")

    diag = target.diagonal_decomposition()
    swap_sign = -1 if (target.degree(i2) % 2) and (target.degree(i3) % 2) else 1
    res = F_real._like()
    for sgn, (b, c) in ((1, (i2, i3)), (-swap_sign, (i3, i2))):
        left_base = (F_doubled.partial_derivative((0, i1))
                     .partial_derivative((0, b)))
        right_base = F_real.partial_derivative((0, c))
        for coeff, (j, k) in diag:
            lj = left_base.partial_derivative((0, j))
            if lj.is_zero():
                continue
            rk = right_base.partial_derivative((0, k))
            if rk.is_zero():
                continue
            res = res + (lj * rk).scale(sgn * coeff)
    for (q, vars_tuple) in list(res.terms):
        if any(target.sign(v[1]) != -1 for v, _ in vars_tuple):
            del res.terms[(q, vars_tuple)]
    res = res.truncated(F_real.t_max - 3)
    return _apply_window(res, truncation)
