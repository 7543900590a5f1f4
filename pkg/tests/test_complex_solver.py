"""Complex-side recursions: primary counts, descendants, relations."""

import math
import random
from fractions import Fraction

import pytest

from gwcalc.graded_algebra import make_p2, make_projective
from gwcalc.invariant_store import (COMPLEX, InvariantKey, InvariantTable,
                                    StoreConflictError)
from gwcalc.complex_solver import (AxiomPreconditionError, ComplexSession,
                                   InconsistentSystemError, SolverError,
                                   classical_3pt, degree_zero_value,
                                   filter_complex, key_degree_sum,
                                   kontsevich_p2, psi_multinomial_recursive,
                                   reduce_axioms, reduce_descendant_trr,
                                   solve_primary_complex, vdim_complex,
                                   wdvv_instances, wdvv_relation)


def key(d, ins, genus=0):
    return InvariantKey(COMPLEX, genus, d, sorted(ins))


def test_vdim_complex(p2, p3):
    # 2 * ((1-g)(n-3) + ell + (n+1) d)
    assert vdim_complex(0, 2, 1, p2) == 2 * (-1 + 2 + 3)
    assert vdim_complex(0, 8, 3, p2) == 2 * (-1 + 8 + 9)
    assert vdim_complex(1, 0, 2, p2) == 2 * 6
    assert vdim_complex(0, 2, 1, p3) == 2 * (0 + 2 + 4)
    assert vdim_complex(2, 1, 0, p3) == 2 * 1


def test_key_degree_sum(p2):
    k = key(1, [(0, 3), (2, 2)])
    assert key_degree_sum(k, p2) == 4 + (4 + 2)


def test_filter_complex(p2):
    assert filter_complex(key(-1, []), p2) == "effectivity"
    assert filter_complex(key(0, [(0, 3), (0, 3)]), p2) == "effectivity"
    # grading: <pt, pt> at d = 1 needs degree sum 8
    assert filter_complex(key(1, [(0, 3), (0, 3)]), p2) is None
    assert filter_complex(key(1, [(0, 2), (0, 3)]), p2) == "grading"
    # <h, h, h> at degree 0 misses the grading (integral of h^3 is 0)
    assert filter_complex(key(0, [(0, 2), (0, 2), (0, 2)]), p2) == "grading"
    assert filter_complex(key(0, [(0, 1), (0, 2), (0, 2)]), p2) is None


def test_kontsevich_oracle_frozen():
    assert [kontsevich_p2(d) for d in range(1, 7)] == [
        1, 1, 12, 620, 87304, 26312976]


def test_psi_multinomial_matches_closed_form(p2):
    rng = random.Random(3)
    for _ in range(200):
        ell = rng.randint(3, 8)
        powers = [rng.randint(0, 3) for _ in range(ell)]
        if sum(powers) != ell - 3:
            continue
        closed = math.factorial(ell - 3)
        for a in powers:
            closed //= math.factorial(a)
        assert psi_multinomial_recursive(powers) == closed
    assert psi_multinomial_recursive([0, 0, 0]) == 1
    assert psi_multinomial_recursive([1, 0, 0, 0]) == 1
    assert psi_multinomial_recursive([2, 0, 0, 0, 0]) == 1
    assert psi_multinomial_recursive([1, 1, 0, 0, 0]) == 2
    assert psi_multinomial_recursive([1, 0, 0]) == 0


def test_degree_zero_values(p2, p3):
    assert degree_zero_value(p2, [(0, 2), (0, 2), (0, 2)]) == 0
    assert degree_zero_value(p2, [(0, 1), (0, 2), (0, 2)]) == 1
    assert degree_zero_value(p2, [(0, 1), (0, 1), (0, 3)]) == 1
    assert degree_zero_value(p2, [(0, 2), (0, 2)]) == 0  # too few points
    assert degree_zero_value(p2, [(1, 1), (0, 2), (0, 2), (0, 2)]) == 0
    assert degree_zero_value(p2, [(1, 2), (0, 2), (0, 1), (0, 1)]) == 1
    assert degree_zero_value(p3, [(0, 2), (0, 2), (0, 3)]) == 0
    assert degree_zero_value(p3, [(0, 2), (0, 2), (0, 2)]) == 1


def test_classical_3pt(p2):
    assert classical_3pt(p2, 1, 1, 3) == 1
    assert classical_3pt(p2, 2, 2, 1) == 1
    assert classical_3pt(p2, 2, 2, 2) == 0
    assert classical_3pt(p2, p2.h(1), p2.h(1), p2.h(0)) == 1


def test_p2_counts_match_oracle(p2_session):
    for d in range(1, 6):
        k = key(d, [(0, 3)] * (3 * d - 1))
        assert p2_session.value(k) == kontsevich_p2(d)


def test_p3_schubert_counts(p3_sessions):
    cs, _ = p3_sessions
    # one line through two points; one line through a point and two lines;
    # two lines meeting four lines
    assert cs.value(key(1, [(0, 4), (0, 4)])) == 1
    assert cs.value(key(1, [(0, 4), (0, 3), (0, 3)])) == 1
    assert cs.value(key(1, [(0, 3)] * 4)) == 2
    # conics and twisted cubics through points
    assert cs.value(key(2, [(0, 4)] * 4)) == 0
    assert cs.value(key(2, [(0, 4), (0, 4), (0, 4), (0, 3), (0, 3)])) == 1
    assert cs.value(key(3, [(0, 4)] * 6)) == 1


def test_p5_line_counts():
    p5 = make_projective(3, "tau")
    cs = ComplexSession(p5)
    cs.ensure_primary(1)
    # classical line counts in P5 (all 1 by Schubert calculus):
    # through two points; meeting two 2-planes and a point-condition
    # partner; and the mixed codimension splittings of total 22
    assert cs.value(key(1, [(0, 6), (0, 6)])) == 1
    assert cs.value(key(1, [(0, 5), (0, 5), (0, 4)])) == 1
    assert cs.value(key(1, [(0, 6), (0, 5), (0, 3)])) == 1
    assert cs.value(key(1, [(0, 6), (0, 4), (0, 4)])) == 1


def one_point_series_coeffs(n, d):
    """Independent one-point descendant oracle.

    Expands prod_{m=1..d} (h + m)^(-(n+1)) modulo h^(n+1) with exact
    binomial series; the h^c coefficient equals
    <tau_{(n+1)d + c - 2}(h^(n-c))>_{0,d}.
    """
    poly = [Fraction(0)] * (n + 1)
    poly[0] = Fraction(1)
    for m in range(1, d + 1):
        factor = [Fraction((-1) ** k * math.comb(n + k, k),
                           m ** (n + 1 + k)) for k in range(n + 1)]
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            if not poly[i]:
                continue
            for j in range(n + 1 - i):
                out[i + j] += poly[i] * factor[j]
        poly = out
    return poly


def test_one_point_descendants_match_series(p2_session, p3_sessions):
    for session, n in ((p2_session, 2), (p3_sessions[0], 3)):
        for d in (1, 2):
            coeffs = one_point_series_coeffs(n, d)
            for c in range(n + 1):
                a = (n + 1) * d + c - 2
                k = key(d, [(a, n - c + 1)])
                assert session.value(k) == coeffs[c], (n, d, c)


def test_one_point_descendants_frozen(p2_session, p3_sessions):
    cs3 = p3_sessions[0]
    frozen = [
        (p2_session, 1, [((1, 3), 1), ((2, 2), -3), ((3, 1), 6)]),
        (p2_session, 2, [((4, 3), Fraction(1, 8)), ((5, 2), Fraction(-9, 16)),
                         ((6, 1), Fraction(3, 2))]),
        (cs3, 1, [((2, 4), 1), ((3, 3), -4), ((4, 2), 10), ((5, 1), -20)]),
        (cs3, 2, [((6, 4), Fraction(1, 16)), ((7, 3), Fraction(-3, 8)),
                  ((8, 2), Fraction(41, 32)), ((9, 1), Fraction(-105, 32))]),
    ]
    for session, d, pairs in frozen:
        for (a, b), want in pairs:
            assert session.value(key(d, [(a, b)])) == want


def test_point_descendant_tower(p2_session):
    # <tau_{3d-2}(pt)>_{0,d} = 1/(d!)^3
    for d in (1, 2, 3):
        got = p2_session.value(key(d, [(3 * d - 2, 3)]))
        assert got == Fraction(1, math.factorial(d) ** 3)


def test_descendant_small_values(p2_session):
    assert p2_session.value(key(1, [(1, 2), (0, 3)])) == -1
    assert p2_session.value(key(1, [(1, 3)])) == 1
    assert p2_session.value(key(1, [(0, 1), (0, 3), (1, 3)])) == 1


def test_reduce_axioms_string(p2):
    k = key(1, [(0, 1), (1, 3), (0, 3)])
    terms = reduce_axioms(k, p2)
    assert terms == [(Fraction(1), key(1, [(0, 3), (0, 3)]))]
    # no descendant to lower: the sum is empty
    k = key(1, [(0, 1), (0, 3), (0, 3), (0, 3)])
    assert reduce_axioms(k, p2) == []


def test_reduce_axioms_dilaton(p2):
    # 2g - 2 + ell = 0 for two remaining points at genus 0: term drops
    k = key(1, [(1, 1), (0, 3), (0, 3)])
    assert reduce_axioms(k, p2) == []
    k = key(1, [(1, 1), (0, 3), (0, 3), (0, 2)])
    terms = reduce_axioms(k, p2)
    assert terms == [(Fraction(1), key(1, [(0, 2), (0, 3), (0, 3)]))]


def test_reduce_axioms_divisor(p2):
    # <h, pt, pt>_1 = 1 * <pt, pt>_1
    k = key(1, [(0, 2), (0, 3), (0, 3)])
    terms = reduce_axioms(k, p2)
    assert terms == [(Fraction(1), key(1, [(0, 3), (0, 3)]))]
    # descendant correction: divisor against tau_1 adds a cup term
    k = key(1, [(0, 2), (1, 3), (0, 3)])
    terms = dict((kk, c) for c, kk in reduce_axioms(k, p2))
    assert terms[key(1, [(1, 3), (0, 3)])] == 1
    # tau_0(pt * h) drops (h * pt = 0 in P2), so only the plain term stays
    assert len(terms) == 1


def test_reduce_axioms_preconditions(p2):
    with pytest.raises(AxiomPreconditionError):
        reduce_axioms(key(1, [(0, 3), (0, 3)]), p2)
    with pytest.raises(AxiomPreconditionError):
        reduce_axioms(key(0, [(0, 1), (0, 3), (0, 3)]), p2)


def test_reduce_descendant_trr_terms_are_smaller(p2):
    k = key(2, [(2, 3), (1, 3), (0, 2)])
    total = k.total_descendant_power()
    for coeff, factors in reduce_descendant_trr(k, p2):
        assert 1 <= len(factors) <= 2
        assert sum(f.total_descendant_power() for f in factors) < total
        for f in factors:
            assert f.is_canonical()
            assert filter_complex(f, p2) is None or f.degree == 0


def test_trr_cross_agreement(p2_session):
    """The two reduction routes agree wherever both apply."""
    from gwcalc.cli import _descendant_keys

    p2 = p2_session.target
    checked = 0
    for d in (1, 2):
        for k in _descendant_keys(p2, COMPLEX, d, 5, 2):
            try:
                axiom_terms = reduce_axioms(k, p2)
            except AxiomPreconditionError:
                continue
            via_axiom = sum((c * p2_session.value(kk)
                             for c, kk in axiom_terms), Fraction(0))
            via_trr = Fraction(0)
            for c, factors in reduce_descendant_trr(k, p2):
                prod = c
                for f in factors:
                    prod *= p2_session.value(f)
                via_trr += prod
            assert via_axiom == via_trr, k
            checked += 1
    assert checked >= 10


def test_wdvv_relation_sums_to_zero(p2_session):
    p2 = p2_session.target
    for mu, d in (((2, 2, 3, 3), 2), ((2, 3, 2, 3, 3), 3),
                  ((2, 2, 2, 3), 1)):
        total = Fraction(0)
        for coeff, factors in wdvv_relation(p2, mu, d):
            prod = coeff
            for f in factors:
                prod *= p2_session.value(f)
            total += prod
        assert total == 0, (mu, d)


def test_wdvv_relation_rejects(p2):
    with pytest.raises(ValueError):
        wdvv_relation(p2, (2, 2, 3), 1)
    with pytest.raises(ValueError):
        wdvv_relation(p2, (2, 2, 3, 9), 1)


def test_wdvv_instances_structure(p2):
    seen = list(wdvv_instances(p2, 2, 7))
    assert seen == list(wdvv_instances(p2, 2, 7))  # deterministic
    assert seen
    n = p2.complex_dim
    for mu in seen:
        assert 4 <= len(mu) <= 7
        total = sum(p2.degree(b) // 2 for b in mu)
        assert total == (n - 4) + len(mu) + (n + 1) * 2
        assert all(1 <= b - 1 <= n for b in mu)


def test_relation_residuals_vanish(p2_session):
    p2 = p2_session.target
    for d in (1, 2, 3):
        for mu in wdvv_instances(p2, d, 7):
            assert p2_session.relation_residual(mu, d) == 0, (mu, d)


def test_session_value_guards(p2_session):
    with pytest.raises(ValueError):
        p2_session.value(InvariantKey("real", 0, 1, [(0, 3)]))
    with pytest.raises(SolverError):
        p2_session.value(InvariantKey(COMPLEX, 1, 1, [(0, 3)]))
    # non-canonical input is canonicalized, not rejected
    v = p2_session.value(InvariantKey(COMPLEX, 0, 1, [(0, 3), (0, 2)]))
    assert v == p2_session.value(InvariantKey(COMPLEX, 0, 1,
                                              [(0, 2), (0, 3)]))


def test_session_rejects_non_projective(torus):
    with pytest.raises(SolverError):
        ComplexSession(torus)


def test_solve_primary_wrapper(p2):
    table = solve_primary_complex(p2, 3)
    assert table.get(key(3, [(0, 3)] * 8)) == 12
    assert table.provenance(key(1, [(0, 3), (0, 3)])) == "seed"


def test_poisoned_table_fails_relation_residuals(p2):
    # a wrong degree-2 count cannot satisfy the degree-2 relations, which
    # pin that count down from degree 1
    table = InvariantTable(p2)
    table.put(key(2, [(0, 3)] * 5), Fraction(7), "seed")
    session = ComplexSession(p2, table)
    session.ensure_primary(3)
    bad = [mu for mu in wdvv_instances(p2, 2, 9)
           if session.relation_residual(mu, 2) != 0]
    assert bad


def test_eliminator_detects_contradiction():
    from gwcalc.complex_solver import _Eliminator

    elim = _Eliminator()
    x = key(1, [(0, 3), (0, 3)])
    assert elim.add_row({x: Fraction(1)}, Fraction(1)) is True
    with pytest.raises(InconsistentSystemError):
        elim.add_row({x: Fraction(1)}, Fraction(2))


def test_seed_conflict_detected(p2):
    table = InvariantTable(p2)
    table.put(key(1, [(0, 3), (0, 3)]), Fraction(2), "seed")
    session = ComplexSession(p2, table)
    with pytest.raises((InconsistentSystemError, StoreConflictError)):
        session.ensure_primary(2)
