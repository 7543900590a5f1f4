"""Truncated super-commutative series and the generating-function PDEs."""

import random
from fractions import Fraction

import pytest

from gwcalc.invariant_store import InvariantTable
from gwcalc.potentials import (GradedSeries, MissingInvariantError,
                               SeriesError, build_potentials,
                               residual_dilaton_complex,
                               residual_dilaton_real, residual_rwdvv_pde,
                               residual_string_complex, residual_string_real,
                               residual_wdvv_pde)


def test_series_basics(p2):
    s = GradedSeries(p2, 4, 2)
    s.add_term(1, (((0, 3), 2),), Fraction(1, 2))
    s.add_term(0, (), 5)
    assert s.coefficient(1, [(0, 3), (0, 3)]) == Fraction(1, 2)
    assert s.coefficient(0) == 5
    assert s.coefficient(2, [(0, 2)]) == 0
    assert not s.is_zero()
    # terms beyond the truncation are silently dropped
    s.add_term(3, (((0, 2), 1),), 7)
    s.add_term(0, (((0, 2), 5),), 7)
    assert s.coefficient(3, [(0, 2)]) == 0
    # adding the negative of a term removes it
    s.add_term(0, (), -5)
    assert s.coefficient(0) == 0


def test_series_rejects_malformed(p2):
    s = GradedSeries(p2, 4, 2)
    with pytest.raises(SeriesError):
        s.add_term(0, (((0, 3), 1), ((0, 2), 1)), 1)  # not sorted
    with pytest.raises(SeriesError):
        s.add_term(0, (((0, 0), 1),), 1)  # basis index < 1
    with pytest.raises(SeriesError):
        s.add_term(-1, (), 1)
    with pytest.raises(SeriesError):
        GradedSeries(p2, -1, 0)
    other = GradedSeries(p2, 3, 2)
    with pytest.raises(SeriesError):
        s + other  # truncation mismatch
    with pytest.raises(SeriesError):
        s * other


def test_monomial_koszul_signs(torus):
    s = GradedSeries(torus, 4, 2)
    # torus classes 2 and 3 are odd: swapping them costs a sign
    sign, vt = s.monomial([(0, 2), (0, 3)])
    assert sign == 1
    sign_swapped, vt2 = s.monomial([(0, 3), (0, 2)])
    assert sign_swapped == -1 and vt2 == vt
    # a repeated odd variable kills the monomial
    assert s.monomial([(0, 2), (0, 2)]) == (0, None)
    # even variables merge into multiplicities
    sign, vt = s.monomial([(0, 4), (0, 1), (0, 4)])
    assert sign == 1
    assert vt == (((0, 1), 1), ((0, 4), 2))


def test_odd_variables_anticommute(torus):
    x = GradedSeries(torus, 4, 2)
    x.add_term(0, (((0, 2), 1),), 1)
    y = GradedSeries(torus, 4, 2)
    y.add_term(0, (((0, 3), 1),), 1)
    assert (x * y) == (y * x).scale(-1)
    assert (x * x).is_zero()
    even = GradedSeries(torus, 4, 2)
    even.add_term(1, (((0, 4), 1),), 3)
    assert (x * even) == (even * x)


def test_product_associative_with_signs(torus):
    rng = random.Random(20240819)

    def random_series():
        s = GradedSeries(torus, 5, 3)
        for _ in range(rng.randrange(1, 6)):
            length = rng.randrange(0, 4)
            ordered = [(0, rng.randrange(1, 5)) for _ in range(length)]
            sign, vt = s.monomial(ordered)
            if sign == 0:
                continue
            s.add_term(rng.randrange(0, 3), vt,
                       sign * Fraction(rng.randrange(-5, 6), 3))
        return s

    for _ in range(60):
        a, b, c = random_series(), random_series(), random_series()
        assert ((a * b) * c) == (a * (b * c))


def test_partial_derivative_signs(torus):
    s = GradedSeries(torus, 4, 2)
    sign, vt = s.monomial([(0, 2), (0, 3)])
    s.add_term(0, vt, sign)
    # d/dx (x y) = y; d/dy (x y) = -x for odd x < y
    dx = s.partial_derivative((0, 2))
    assert dx.coefficient(0, [(0, 3)]) == 1
    dy = s.partial_derivative((0, 3))
    assert dy.coefficient(0, [(0, 2)]) == -1
    # odd derivatives anticommute
    dxy = s.partial_derivative((0, 3)).partial_derivative((0, 2))
    dyx = s.partial_derivative((0, 2)).partial_derivative((0, 3))
    assert dxy == dyx.scale(-1)


def test_partial_derivative_multiplicity(p2):
    s = GradedSeries(p2, 5, 1)
    s.add_term(0, (((0, 2), 3),), Fraction(1, 6))
    d = s.partial_derivative((0, 2))
    assert d.coefficient(0, [(0, 2), (0, 2)]) == Fraction(1, 2)
    assert s.partial_derivative((0, 3)).is_zero()


def test_truncated_copy(p2):
    s = GradedSeries(p2, 5, 3)
    s.add_term(2, (((0, 3), 4),), 1)
    s.add_term(1, (((0, 3), 1),), 2)
    cut = s.truncated(2, 1)
    assert cut.coefficient(1, [(0, 3)]) == 2
    assert cut.terms.get((2, (((0, 3), 4),))) is None
    assert (cut.t_max, cut.q_max) == (2, 1)


def test_monomial_string_and_json(p2):
    assert GradedSeries.monomial_string(0, ()) == "1"
    assert GradedSeries.monomial_string(
        2, (((0, 3), 5),)) == "q^2 t[0,3]^5"
    s = GradedSeries(p2, 4, 2, lam_power=-2)
    s.add_term(1, (((0, 3), 2),), Fraction(1, 2))
    blob = s.to_json()
    assert blob["truncation"] == [4, 2]
    assert blob["lam_power"] == -2
    assert blob["terms"] == {"q^1 t[0,3]^2": "1/2"}


def test_frozen_complex_potential_coefficients(p2_session):
    pots = build_potentials(p2_session.table, (8, 3), descendant_depth=0,
                            complex_value=p2_session.value)
    F = pots["complex_primary"]
    assert F.coefficient(3, [(0, 3)] * 8) == Fraction(1, 3360)
    assert F.coefficient(0, [(0, 1), (0, 2), (0, 2)]) == Fraction(1, 2)
    assert F.coefficient(0, [(0, 1), (0, 1), (0, 3)]) == Fraction(1, 2)
    assert F.coefficient(1, [(0, 2), (0, 3), (0, 3)]) == Fraction(1, 2)
    assert F.coefficient(2, [(0, 3)] * 5) == Fraction(1, 120)
    # the doubled series is the primary series with q -> q^2
    D = pots["complex_doubled"]
    for (q, vt), c in D.items():
        assert q % 2 == 0
        assert F.terms.get((q // 2, vt)) == c
    for (q, vt), c in F.items():
        if 2 * q <= D.q_max:
            assert D.terms.get((2 * q, vt)) == c


def test_frozen_real_potential_coefficient(p3_sessions):
    cs, rs = p3_sessions
    pots = build_potentials(rs.table, (6, 3), descendant_depth=0,
                            complex_value=cs.value, real_value=rs.value)
    R = pots["real_primary"]
    assert R.coefficient(1, [(0, 4)]) == Fraction(1, 2)
    assert R.coefficient(2, [(0, 4), (0, 4)]) == 0
    # <pt^3>_3 = -1 over 2^3 * 3!
    assert R.coefficient(3, [(0, 4)] * 3) == Fraction(-1, 48)


def test_descendant_series_size_regression(p2_session):
    pots = build_potentials(p2_session.table, (8, 3), descendant_depth=1,
                            complex_value=p2_session.value)
    assert len(pots["complex_descendant"].terms) == 604


def test_complex_residuals_vanish(p2_session):
    pots = build_potentials(p2_session.table, (6, 3), descendant_depth=1,
                            complex_value=p2_session.value)
    F = pots["complex_descendant"]
    assert residual_string_complex(F).is_zero()
    assert residual_dilaton_complex(F).is_zero()
    P = pots["complex_primary"]
    for indices in ((1, 2, 3, 3), (2, 2, 3, 3), (2, 3, 2, 3), (3, 3, 3, 3)):
        assert residual_wdvv_pde(P, indices).is_zero()


def test_real_residuals_vanish(p3_sessions):
    cs, rs = p3_sessions
    pots = build_potentials(rs.table, (6, 3), descendant_depth=1,
                            complex_value=cs.value, real_value=rs.value)
    R = pots["real_descendant"]
    assert residual_string_real(R).is_zero()
    assert residual_dilaton_real(R).is_zero()
    D, P = pots["complex_doubled"], pots["real_primary"]
    for indices in ((1, 2, 2), (1, 2, 4), (3, 2, 4), (3, 2, 2)):
        assert residual_rwdvv_pde(D, P, indices).is_zero()


def test_rwdvv_pde_rejects_bad_indices(p3_sessions):
    cs, rs = p3_sessions
    pots = build_potentials(rs.table, (4, 2), descendant_depth=0,
                            complex_value=cs.value, real_value=rs.value)
    D, P = pots["complex_doubled"], pots["real_primary"]
    with pytest.raises(SeriesError):
        residual_rwdvv_pde(D, P, (2, 2, 4))  # first index not +1-eigenspace
    with pytest.raises(SeriesError):
        residual_rwdvv_pde(D, P, (1, 3, 4))  # second index not -1-eigenspace


def test_dilaton_window_guards(p3_sessions):
    cs, rs = p3_sessions
    pots = build_potentials(rs.table, (4, 2), descendant_depth=1,
                            complex_value=cs.value, real_value=rs.value)
    with pytest.raises(SeriesError):
        residual_dilaton_complex(pots["real_descendant"])
    with pytest.raises(SeriesError):
        residual_dilaton_real(pots["complex_descendant"])


def test_missing_invariant_in_strict_mode(p2):
    table = InvariantTable(p2)
    with pytest.raises(MissingInvariantError):
        build_potentials(table, (4, 1))


def test_build_rejects_odd_basis(torus):
    table = InvariantTable(torus)
    with pytest.raises(SeriesError):
        build_potentials(table, (4, 1))


def test_build_validates_truncation(p2_session):
    with pytest.raises(SeriesError):
        build_potentials(p2_session.table, (4,),
                         complex_value=p2_session.value)
    with pytest.raises(SeriesError):
        build_potentials(p2_session.table, (-1, 2),
                         complex_value=p2_session.value)
    with pytest.raises(SeriesError):
        build_potentials(p2_session.table, (4, 1), descendant_depth=-1,
                         complex_value=p2_session.value)
