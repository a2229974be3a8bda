"""Generalized-form algebra: product, derivative, conjugation, real basis,
exactness of closed forms, and agreement with the brute-force multiplier."""

from random import Random

import pytest
import sympy as sp

from gfcalc.forms import Chart, OrdForm, ext_d, wedge
from gfcalc.genforms import (
    GenForm,
    NotClosedError,
    NType,
    from_real_basis,
    gf_conj,
    gf_d,
    gf_wedge,
    potential_of_closed,
    to_real_basis,
)
from gfcalc.monomial import bruteforce_wedge
from gfcalc.randomgen import random_gen_form, random_ord_form
from gfcalc.symexpr import ScalarExpr, Verdict, parse_scalar


@pytest.fixture(scope="module")
def chart():
    return Chart.make("t x y z")


def proven_zero(gen) -> bool:
    return gen.zero_verdict().kind == Verdict.PROVEN_ZERO


# -- product ------------------------------------------------------------------


def test_m_mbar_anticommute(chart):
    m = GenForm.m(chart)
    mb = GenForm.mbar(chart)
    assert proven_zero(gf_wedge(m, mb) + gf_wedge(mb, m))
    assert gf_wedge(m, m).is_structurally_zero
    assert gf_wedge(mb, mb).is_structurally_zero


def test_tau_m_term_dies(chart):
    # (theta - tau m) ^ m = theta ^ m
    theta = GenForm.from_ordinary(random_ord_form(chart, 1, Random(1), allow_complex=False))
    tau = random_ord_form(chart, 2, Random(2))
    m = GenForm.m(chart)
    lhs = gf_wedge(theta.as_n2() - gf_wedge(GenForm.from_ordinary(tau), m), m)
    rhs = gf_wedge(theta.as_n2(), m)
    assert proven_zero(lhs - rhs)


def test_wedge_agrees_with_bruteforce_random(chart):
    rng = Random(42)
    for _ in range(25):
        p = rng.randint(-2, chart.n)
        q = rng.randint(-2, chart.n)
        a = random_gen_form(chart, p, rng)
        b = random_gen_form(chart, q, rng)
        assert proven_zero(gf_wedge(a, b) - bruteforce_wedge(a, b))


def test_graded_commutativity_all_degree_pairs(chart):
    rng = Random(7)
    for p in range(-2, chart.n + 1):
        for q in range(-2, chart.n + 1):
            a = random_gen_form(chart, p, rng)
            b = random_gen_form(chart, q, rng)
            sign = (-1) ** (p * q)
            assert proven_zero(gf_wedge(a, b) - gf_wedge(b, a).scaled(sign)), (p, q)


def test_associativity_random(chart):
    rng = Random(8)
    for _ in range(10):
        a = random_gen_form(chart, rng.randint(-2, 2), rng)
        b = random_gen_form(chart, rng.randint(-2, 2), rng)
        c = random_gen_form(chart, rng.randint(-2, 2), rng)
        assert proven_zero(gf_wedge(gf_wedge(a, b), c) - gf_wedge(a, gf_wedge(b, c)))


# -- derivative ---------------------------------------------------------------


def test_d_of_generators(chart):
    one = GenForm.from_scalar(chart, 1)
    assert proven_zero(gf_d(GenForm.m(chart)) - one.as_n2())
    assert proven_zero(gf_d(GenForm.mbar(chart)) - one.as_n2())


def test_d_m_mbar(chart):
    # d(m mbar) = mbar - m by the Leibniz rule with dm = dmbar = 1
    lhs = gf_d(GenForm.m_mbar(chart))
    rhs = GenForm.mbar(chart) - GenForm.m(chart)
    assert proven_zero(lhs - rhs)


def test_d_squared_zero_all_degrees(chart):
    rng = Random(9)
    for p in range(-2, chart.n + 1):
        a = random_gen_form(chart, p, rng)
        assert proven_zero(gf_d(gf_d(a))), p


def test_leibniz_random(chart):
    rng = Random(10)
    for _ in range(12):
        p = rng.randint(-2, 3)
        a = random_gen_form(chart, p, rng)
        b = random_gen_form(chart, rng.randint(-2, 3), rng)
        lhs = gf_d(gf_wedge(a, b))
        rhs = gf_wedge(gf_d(a), b) + gf_wedge(a, gf_d(b)).scaled((-1) ** p)
        assert proven_zero(lhs - rhs)


# -- conjugation ----------------------------------------------------------------


def test_conj_swaps_generators(chart):
    assert proven_zero(gf_conj(GenForm.m(chart)) - GenForm.mbar(chart))
    assert proven_zero(gf_conj(GenForm.mbar(chart)) - GenForm.m(chart))


def test_conj_fixes_real_forms(chart):
    # real form: pi real, pi2 = conj(pi1), pitop purely imaginary
    rng = Random(11)
    pi = random_ord_form(chart, 1, rng, allow_complex=False)
    pi1 = random_ord_form(chart, 2, rng, allow_complex=True)
    pitop = random_ord_form(chart, 3, rng, allow_complex=False).scaled(ScalarExpr.i())
    a = GenForm(chart, 1, pi, pi1, pi1.conj(), pitop)
    assert a.is_real_form()
    assert proven_zero(gf_conj(a) - a)


def test_conj_involutive_and_multiplicative(chart):
    rng = Random(12)
    for _ in range(6):
        a = random_gen_form(chart, rng.randint(-2, 2), rng)
        b = random_gen_form(chart, rng.randint(-2, 2), rng)
        assert proven_zero(gf_conj(gf_conj(a)) - a)
        assert proven_zero(gf_conj(gf_wedge(a, b)) - gf_wedge(gf_conj(a), gf_conj(b)))
        assert proven_zero(gf_conj(gf_d(a)) - gf_d(gf_conj(a)))


def test_conj_of_imaginary_top_form(chart):
    # i theta m mbar is a real generalized form, so conjugation fixes it
    theta = random_ord_form(chart, 2, Random(13), allow_complex=False)
    a = GenForm(chart, 0, pitop=theta.scaled(ScalarExpr.i()))
    assert a.is_real_form()
    assert proven_zero(gf_conj(a) - a)


def test_realness_preserved_by_wedge_and_d(chart):
    rng = Random(14)

    def random_real_form(p):
        pi = random_ord_form(chart, p, rng, allow_complex=False)
        pi1 = random_ord_form(chart, p + 1, rng, allow_complex=True)
        pitop = random_ord_form(chart, p + 2, rng, allow_complex=False).scaled(ScalarExpr.i())
        return GenForm(chart, p, pi, pi1, pi1.conj(), pitop)

    for _ in range(5):
        a = random_real_form(rng.randint(-1, 2))
        b = random_real_form(rng.randint(-1, 2))
        assert gf_wedge(a, b).is_real_form()
        assert gf_d(a).is_real_form()


# -- real basis ------------------------------------------------------------------


def test_real_basis_of_m(chart):
    rb = to_real_basis(GenForm.m(chart))
    one = OrdForm.from_scalar(chart, 1)
    assert rb.rho1 == one
    assert rb.rho2 == one.scaled(ScalarExpr.i())
    assert rb.rho12.is_structurally_zero


def test_d_m2_zero_through_basis_change(chart):
    # m2 = (m - mbar)/(2i); its derivative vanishes
    m2 = (GenForm.m(chart) - GenForm.mbar(chart)).scaled(ScalarExpr.one() / (ScalarExpr.i() * ScalarExpr.of(2)))
    assert to_real_basis(m2).rho2 == OrdForm.from_scalar(chart, 1)
    assert proven_zero(gf_d(m2))
    # and d m1 = 1
    m1 = GenForm.n1_m(chart)
    assert proven_zero(gf_d(m1) - GenForm.from_scalar(chart, 1).as_n2())


def test_real_basis_roundtrip(chart):
    rng = Random(15)
    for _ in range(8):
        a = random_gen_form(chart, rng.randint(-2, 3), rng)
        rb = to_real_basis(a)
        back = from_real_basis(chart, a.degree, rb)
        assert proven_zero(back - a)


# -- exactness --------------------------------------------------------------------


def test_potential_of_one(chart):
    one = GenForm.from_scalar(chart, 1)
    c = potential_of_closed(one)
    assert proven_zero(c - GenForm.n1_m(chart))
    assert proven_zero(gf_d(c) - one)


def test_potential_n1_generic_closed(chart):
    rng = Random(16)
    for p in range(0, 3):
        beta = random_ord_form(chart, p, rng, allow_complex=False)
        a = GenForm.n1(beta, ext_d(beta).scaled((-1) ** p), degree=p)
        c = potential_of_closed(a)
        assert c.ntype is NType.N1
        expected = GenForm.n1(OrdForm.zero(chart, p - 1), beta.scaled((-1) ** p), degree=p - 1)
        assert proven_zero(c - expected)
        assert proven_zero(gf_d(c) - a)


def test_potential_random_closed_n2(chart):
    rng = Random(17)
    for _ in range(8):
        seed_form = random_gen_form(chart, rng.randint(-2, 2), rng)
        a = gf_d(seed_form)
        c = potential_of_closed(a)
        assert proven_zero(gf_d(c) - a)


def test_potential_rejects_non_closed(chart):
    a = GenForm.from_ordinary(OrdForm(chart, 1, {(0,): ScalarExpr(chart.coords[1])}))
    with pytest.raises(NotClosedError) as exc:
        potential_of_closed(a.as_n2())
    assert exc.value.component in ("pi", "pi1", "pi2", "piTop")


# -- N1 embedding ------------------------------------------------------------------


def test_n1_embedding_homomorphism(chart):
    rng = Random(18)
    for _ in range(6):
        p = rng.randint(-1, 2)
        q = rng.randint(-1, 2)
        a = random_gen_form(chart, p, rng, ntype=NType.N1)
        b = random_gen_form(chart, q, rng, ntype=NType.N1)
        ab = gf_wedge(a, b)
        assert ab.ntype is NType.N1
        da = gf_d(a)
        assert da.ntype is NType.N1
        # the N1 product computed in N1 component form matches:
        # (pi_a + ma m1)(pi_b + mb m1) = pi_a пi_b + (pi_a mb + (-1)^q ma pi_b) m1
        expected_pi = wedge(a.pi, b.pi)
        expected_m = wedge(a.pi, b.n1_m_part) + wedge(a.n1_m_part, b.pi).scaled((-1) ** q)
        assert proven_zero(ab - GenForm.n1(expected_pi, expected_m, degree=p + q))


def test_n1_d_in_component_form(chart):
    rng = Random(19)
    p = 1
    a = random_gen_form(chart, p, rng, ntype=NType.N1)
    da = gf_d(a)
    expected_pi = ext_d(a.pi) + a.n1_m_part.scaled((-1) ** (p + 1))
    expected_m = ext_d(a.n1_m_part)
    assert proven_zero(da - GenForm.n1(expected_pi, expected_m, degree=p + 1))


# -- degree bounds --------------------------------------------------------------------


def test_degree_bounds(chart):
    # nonzero content is impossible outside [-2, n]; empty husks may carry
    # any degree so products can overflow gracefully
    with pytest.raises(ValueError):
        GenForm(chart, -3, pitop=OrdForm.from_scalar(chart, 1))
    assert GenForm(chart, -3).is_structurally_zero
    assert gf_wedge(GenForm.m_mbar(chart), GenForm.m_mbar(chart)).is_structurally_zero
    # degree -2 forms carry only the top slot
    bottom = GenForm.m_mbar(chart)
    assert bottom.pi.is_structurally_zero and bottom.pi1.is_structurally_zero
    assert not bottom.pitop.is_structurally_zero


def test_json_roundtrip_shape(chart):
    a = random_gen_form(chart, 1, Random(20))
    d = a.to_json_dict()
    assert set(d) == {"degree", "pi", "pi1", "pi2", "piTop"}
    assert d["degree"] == 1
