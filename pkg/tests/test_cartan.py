"""Generalized Cartan equations, flat connections, gf-coordinates, group elements."""

from random import Random

import pytest
import sympy as sp

from gfcalc.cartan import (
    G2Element,
    CartanExpansion,
    FlatnessError,
    NotClosedError,
    affine_freedom_apply,
    check_gen_bianchi,
    closed_gauge_lift,
    decompose_connection,
    expand_cartan_n2,
    first_cartan_residual,
    flat_connection_n1,
    flat_connection_n2,
    gen_curvature,
    n1_L,
    n1_gf_coords,
    n1_recover_coframe,
)
from gfcalc.forms import (
    DegenerateCoframeError,
    FrameMetric,
    MatOrdForm,
    OrdForm,
    covariant_d,
    covariant_d_vector,
    curvature,
    ext_d,
    gauge_transform,
    levi_civita,
    wedge,
)
from gfcalc.genforms import GenForm, GenMatForm, NType, gen_identity, gf_d, gf_wedge
from gfcalc.randomgen import (
    random_gen_form,
    random_ord_form,
    random_so_function_matrix,
    random_so_matrix_form,
)
from gfcalc.symexpr import ScalarExpr, Verdict


def proven_zero(x) -> bool:
    return x.zero_verdict().kind == Verdict.PROVEN_ZERO


def vec_proven_zero(vec) -> bool:
    return all(v.zero_verdict().kind == Verdict.PROVEN_ZERO for v in vec)


def embed_vec(theta):
    return [GenForm.from_ordinary(t) for t in theta]


# -- generalized curvature ----------------------------------------------------


def test_gen_curvature_of_zero(minkowski):
    A = GenMatForm.zero(minkowski.chart, 1, 4)
    assert proven_zero(gen_curvature(A))


def test_gen_curvature_of_g2_maurer_cartan(schwarzschild):
    spec = schwarzschild
    rng = Random(3)
    g = G2Element(
        L=random_so_function_matrix(spec.chart, spec.eta, rng, coordinate_dependent=True),
        lam1=random_so_matrix_form(spec.chart, spec.eta, 1, rng, density=0.3),
        lam2=random_so_matrix_form(spec.chart, spec.eta, 1, rng, density=0.3),
        lam=random_so_matrix_form(spec.chart, spec.eta, 2, rng, density=0.3),
        eta=spec.eta,
    )
    M = g.assemble()
    Mi = g.assemble_inverse()
    assert proven_zero(M.mat_wedge(Mi) - gen_identity(spec.chart, 4))
    mc = Mi.mat_wedge(M.mat_d())
    assert proven_zero(gen_curvature(mc))


def test_gen_curvature_n1_flat_connection(sphere2):
    chart, eta, coframe = sphere2
    om = levi_civita(coframe, eta)
    assert not proven_zero(curvature(om))  # the sphere is curved
    A = flat_connection_n1(om)  # yet its N=1 lift is flat (verified inside)
    assert proven_zero(gen_curvature(A))


# -- first structure equation ----------------------------------------------------


def test_first_cartan_flat_chart(minkowski):
    chart = minkowski.chart
    e = embed_vec([OrdForm.d_coord(chart, k) for k in range(4)])
    A = GenMatForm.zero(chart, 1, 4)
    assert vec_proven_zero(first_cartan_residual(e, A))


def test_first_cartan_maurer_cartan_solution(schwarzschild):
    # e = L^-1 dx, A = L^-1 dL solves the first equation for any x
    spec = schwarzschild
    rng = Random(5)
    om = levi_civita(spec.coframe, spec.eta)
    L, Linv = n1_L(om)
    x = [random_gen_form(spec.chart, 0, rng, ntype=NType.N1, allow_complex=False) for _ in range(4)]
    e = Linv.mat_vec([gf_d(xa) for xa in x])
    A = Linv.mat_wedge(L.mat_d())
    assert vec_proven_zero(first_cartan_residual(e, A))


def test_first_cartan_ordinary_connection(schwarzschild):
    spec = schwarzschild
    om = levi_civita(spec.coframe, spec.eta)
    from gfcalc.genforms import gen_mat_from_ordinary

    A = gen_mat_from_ordinary(om)
    e = embed_vec(list(spec.coframe))
    assert vec_proven_zero(first_cartan_residual(e, A))


# -- generalized Bianchi ---------------------------------------------------------


def test_gen_bianchi_triples(schwarzschild):
    spec = schwarzschild
    om = levi_civita(spec.coframe, spec.eta)
    from gfcalc.genforms import gen_mat_from_ordinary

    A = gen_mat_from_ordinary(om)
    F = gen_curvature(A)
    e = embed_vec(list(spec.coframe))
    first, second = check_gen_bianchi(F, e, A)
    assert first.kind == Verdict.PROVEN_ZERO
    assert second.kind == Verdict.PROVEN_ZERO


# -- N=2 expansion ------------------------------------------------------------------


def test_expand_cartan_ordinary_solution(schwarzschild):
    # e = theta, A = flat N2 connection of the Levi-Civita alpha:
    # every line holds and the two-form remainder f vanishes
    spec = schwarzschild
    om = levi_civita(spec.coframe, spec.eta)
    A, _L = flat_connection_n2(om)
    e = embed_vec(list(spec.coframe))
    ex = expand_cartan_n2(e, A, spec.eta)
    assert ex.all_lines_proven_zero()
    assert proven_zero(ex.f)
    assert ex.f_first_pair_verdict.kind == Verdict.PROVEN_ZERO
    assert ex.f_cyclic_verdict.kind == Verdict.PROVEN_ZERO
    assert ex.verdicts["gamma_theta"].kind == Verdict.PROVEN_ZERO


def test_expand_cartan_torsion_shows_in_first_line(schwarzschild):
    spec = schwarzschild
    chart = spec.chart
    om = levi_civita(spec.coframe, spec.eta)
    rng = Random(8)
    perturb = random_so_matrix_form(chart, spec.eta, 1, rng, density=0.5)
    alpha = om + perturb
    from gfcalc.genforms import gen_mat_from_ordinary

    A = gen_mat_from_ordinary(alpha)
    e = embed_vec(list(spec.coframe))
    ex = expand_cartan_n2(e, A, spec.eta)
    torsion = covariant_d_vector(alpha, list(spec.coframe))
    assert vec_proven_zero([ex.torsion_line[a] - torsion[a] for a in range(4)])
    assert not vec_proven_zero(ex.torsion_line)


def test_expand_cartan_on_shell_with_imaginary_parts(schwarzschild):
    # torsion-free alpha; tau = i psi, beta = digamma/2 + i b,
    # zeta = i(D psi - b theta), gamma = i D b: all lines hold exactly
    spec = schwarzschild
    chart = spec.chart
    om = levi_civita(spec.coframe, spec.eta)
    digamma = curvature(om)
    rng = Random(9)
    i = ScalarExpr.i()
    psi = [random_ord_form(chart, 2, rng, allow_complex=False, density=0.4) for _ in range(4)]
    b = random_so_matrix_form(chart, spec.eta, 2, rng, density=0.4)

    tau = [p.scaled(i) for p in psi]
    taubar = [p.scaled(-i) for p in psi]
    Dpsi = covariant_d_vector(om, psi)
    btheta = b.mat_vec(list(spec.coframe))
    zeta = [(Dpsi[a] - btheta[a]).scaled(i) for a in range(4)]
    e = [
        GenForm(chart, 1, spec.coframe[a], -tau[a], -taubar[a], zeta[a])
        for a in range(4)
    ]
    beta = digamma.scaled(sp.Rational(1, 2)) + b.map_entries(lambda f: f.scaled(i))
    betabar = digamma.scaled(sp.Rational(1, 2)) - b.map_entries(lambda f: f.scaled(i))
    gamma = covariant_d(om, b).map_entries(lambda f: f.scaled(i))
    A = GenMatForm(
        chart,
        1,
        [
            [GenForm(chart, 1, om[a, c], -beta[a, c], -betabar[a, c], gamma[a, c]) for c in range(4)]
            for a in range(4)
        ],
    )
    ex = expand_cartan_n2(e, A, spec.eta)
    assert ex.all_lines_proven_zero()
    assert ex.verdicts["gamma_theta"].kind == Verdict.PROVEN_ZERO
    # the expansion lines are exactly the components of the direct residual
    res = first_cartan_residual(e, A)
    for a in range(4):
        assert proven_zero(res[a])


def test_expand_lines_match_direct_residual_components(schwarzschild):
    # for random data: D e = L1 - L2 m - L2bar mbar + L3 m mbar
    spec = schwarzschild
    chart = spec.chart
    rng = Random(10)
    e = [
        GenForm(
            chart,
            1,
            spec.coframe[a],
            random_ord_form(chart, 2, rng, density=0.3),
            random_ord_form(chart, 2, rng, density=0.3),
            random_ord_form(chart, 3, rng, density=0.3),
        )
        for a in range(4)
    ]
    alpha = random_so_matrix_form(chart, spec.eta, 1, rng, density=0.3)
    beta = random_so_matrix_form(chart, spec.eta, 2, rng, density=0.3)
    gamma = random_so_matrix_form(chart, spec.eta, 3, rng, density=0.3)
    A = GenMatForm(
        chart,
        1,
        [
            [GenForm(chart, 1, alpha[a, c], -beta[a, c], -beta[a, c], gamma[a, c]) for c in range(4)]
            for a in range(4)
        ],
    )
    ex = expand_cartan_n2(e, A, spec.eta)
    res = first_cartan_residual(e, A)
    for a in range(4):
        assert proven_zero(res[a].pi - ex.torsion_line[a])
        assert proven_zero(res[a].pi1 + ex.tau_line[a])
        assert proven_zero(res[a].pi2 + ex.taubar_line[a])
        assert proven_zero(res[a].pitop - ex.zeta_line[a])


def test_expand_cartan_needs_coframe(minkowski):
    chart = minkowski.chart
    e = [GenForm.zero(chart, 1) for _ in range(4)]
    A = GenMatForm.zero(chart, 1, 4)
    with pytest.raises(DegenerateCoframeError):
        expand_cartan_n2(e, A, minkowski.eta)


# -- flat N=1 connections --------------------------------------------------------------


def test_flat_connection_n1_zero(minkowski):
    A = flat_connection_n1(MatOrdForm.zero(minkowski.chart, 1, 4, "so"))
    assert proven_zero(A)


@pytest.mark.parametrize("name", ["minkowski_spherical", "schwarzschild", "de_sitter"])
def test_flat_connection_n1_catalog(catalog, name):
    spec = catalog[name]
    om = levi_civita(spec.coframe, spec.eta)
    A = flat_connection_n1(om)
    assert proven_zero(gen_curvature(A))
    parts = decompose_connection(A)
    # m-part carries the ordinary curvature (both halves of the N1 embedding)
    digamma = curvature(om)
    assert proven_zero(parts.beta + parts.betabar - digamma)


def test_n1_L_zero_is_identity(minkowski):
    L, Linv = n1_L(MatOrdForm.zero(minkowski.chart, 1, 4, "so"))
    assert proven_zero(L - gen_identity(minkowski.chart, 4))


def test_n1_L_random_so13(schwarzschild):
    spec = schwarzschild
    rng = Random(11)
    alpha = random_so_matrix_form(spec.chart, spec.eta, 1, rng, density=0.4)
    L, Linv = n1_L(alpha)  # verifies L^-1 dL internally
    # eta condition at the generalized level
    n = 4
    etaL = GenMatForm(
        spec.chart, 0, [[L[i, j].scaled(spec.eta.diag[i]) for j in range(n)] for i in range(n)]
    )
    prod = L.transpose().mat_wedge(etaL)
    from gfcalc.cartan import gen_mat_from_scalars

    eta_gen = gen_mat_from_scalars(
        spec.chart, [[ScalarExpr.of(spec.eta.eta(i, j)) for j in range(n)] for i in range(n)]
    )
    assert proven_zero(prod - eta_gen)


# -- gf-coordinates ---------------------------------------------------------------------


def test_n1_gf_coords_flat_cartesian(minkowski):
    chart = minkowski.chart
    xi = [ScalarExpr(c) for c in chart.coords]
    x = n1_gf_coords(list(minkowski.coframe), xi)
    for a in range(4):
        assert x[a].is_ordinary  # d xi = theta exactly, so no m part survives
        assert proven_zero(x[a] - GenForm.from_scalar(chart, xi[a]))


def test_n1_gf_coords_zero_xi(schwarzschild):
    spec = schwarzschild
    x = n1_gf_coords(list(spec.coframe))
    for a in range(4):
        assert proven_zero(x[a].pi)
        assert proven_zero(x[a].n1_m_part + spec.coframe[a])
        # d x = theta - (d theta) m
        dx = gf_d(x[a])
        assert proven_zero(dx.pi - spec.coframe[a])
        assert proven_zero(dx.n1_m_part + ext_d(spec.coframe[a]))


@pytest.mark.parametrize("name", ["minkowski_spherical", "schwarzschild"])
def test_n1_recover_coframe_exact(catalog, name):
    spec = catalog[name]
    om = levi_civita(spec.coframe, spec.eta)
    rec = n1_recover_coframe(om, spec.coframe)
    assert rec.residual_verdict.kind == Verdict.PROVEN_ZERO
    assert rec.torsion_match_verdict.kind == Verdict.PROVEN_ZERO


def test_n1_recover_coframe_with_torsion(schwarzschild):
    spec = schwarzschild
    rng = Random(12)
    om = levi_civita(spec.coframe, spec.eta)
    alpha = om + random_so_matrix_form(spec.chart, spec.eta, 1, rng, density=0.5)
    rec = n1_recover_coframe(alpha, spec.coframe)
    assert rec.residual_verdict.kind != Verdict.PROVEN_ZERO
    # m-part of residual is minus the torsion of alpha, exactly
    assert rec.torsion_match_verdict.kind == Verdict.PROVEN_ZERO


def test_n1_recovery_gauge_covariant(schwarzschild):
    # recovering after an ordinary gauge transformation reproduces the
    # transformed coframe, with the coordinates moved by the closed lift
    spec = schwarzschild
    chart = spec.chart
    om = levi_civita(spec.coframe, spec.eta)
    Om = curvature(om)
    rng = Random(13)
    L = random_so_function_matrix(chart, spec.eta, rng, coordinate_dependent=True)
    Lrows = [[v.re for v in row] for row in L]
    theta1, om1, _ = gauge_transform(spec.coframe, om, Om, Lrows, spec.eta)

    x = n1_gf_coords(list(spec.coframe))
    cL = closed_gauge_lift(chart, L, generator="m1", eta=spec.eta)
    x1 = affine_freedom_apply(x, cL, [GenForm.zero(chart, 0, NType.N1)] * 4)
    _, Linv1 = n1_L(om1)
    e1 = Linv1.mat_vec([gf_d(xa) for xa in x1])
    assert vec_proven_zero([e1[a] - GenForm.from_ordinary(theta1[a]) for a in range(4)])


def test_affine_freedom_identity(schwarzschild):
    spec = schwarzschild
    chart = spec.chart
    x = n1_gf_coords(list(spec.coframe), [ScalarExpr(c) for c in chart.coords])
    cL = gen_identity(chart, 4)
    x1 = affine_freedom_apply(x, cL, [GenForm.zero(chart, 0, NType.N1)] * 4)
    assert vec_proven_zero([x1[a] - x[a] for a in range(4)])


def test_affine_freedom_translation_cancels_xi(schwarzschild):
    spec = schwarzschild
    chart = spec.chart
    xi = [ScalarExpr(c) for c in chart.coords]
    x = n1_gf_coords(list(spec.coframe), xi)
    # translations are closed N1 zero-forms: cp = -(xi + (d xi) m)
    cp = []
    for a in range(4):
        xi_form = OrdForm.from_scalar(chart, xi[a])
        cp.append(-GenForm.n1(xi_form, ext_d(xi_form), degree=0))
    x1 = affine_freedom_apply(x, gen_identity(chart, 4), cp)
    target = n1_gf_coords(list(spec.coframe))  # the xi = 0 gauge
    assert vec_proven_zero([x1[a] - target[a] for a in range(4)])


def test_affine_freedom_rejects_nonclosed(schwarzschild):
    spec = schwarzschild
    chart = spec.chart
    x = n1_gf_coords(list(spec.coframe))
    bad = [GenForm.from_scalar(chart, ScalarExpr(chart.coords[1]))] * 4
    with pytest.raises(NotClosedError):
        affine_freedom_apply(x, gen_identity(chart, 4), bad)


# -- flat N=2 connections ----------------------------------------------------------------


def test_flat_connection_n2_trivial(minkowski):
    A, L = flat_connection_n2(MatOrdForm.zero(minkowski.chart, 1, 4, "so"))
    assert proven_zero(A)
    assert proven_zero(L - gen_identity(minkowski.chart, 4))


def test_flat_connection_n2_schwarzschild(schwarzschild):
    spec = schwarzschild
    om = levi_civita(spec.coframe, spec.eta)
    A, L = flat_connection_n2(om)  # flatness and L^-1 dL verified inside
    parts = decompose_connection(A)
    digamma = curvature(om)
    # with im_beta = 0: beta = betabar = digamma/2
    assert proven_zero(parts.beta - digamma.scaled(sp.Rational(1, 2)))
    assert proven_zero(parts.betabar - digamma.scaled(sp.Rational(1, 2)))
    assert proven_zero(parts.gamma)


def test_flat_connection_n2_lambda2_freedom(schwarzschild):
    # different lambda2 give the same connection but different L;
    # the mismatch L2 L1^-1 is closed
    spec = schwarzschild
    rng = Random(14)
    om = levi_civita(spec.coframe, spec.eta)
    l2a = random_so_matrix_form(spec.chart, spec.eta, 1, rng, density=0.4)
    A1, L1 = flat_connection_n2(om, None, None)
    A2, L2 = flat_connection_n2(om, None, l2a)
    assert proven_zero(A1 - A2)
    assert not proven_zero(L1 - L2)
    from gfcalc.genforms import gen_mat_inverse_deg0

    quotient = L2.mat_wedge(gen_mat_inverse_deg0(L1))
    assert proven_zero(quotient.mat_d())


# -- group elements ------------------------------------------------------------------------


def test_g2_group_law(schwarzschild):
    spec = schwarzschild
    rng = Random(15)

    def rand_el():
        return G2Element(
            L=random_so_function_matrix(spec.chart, spec.eta, rng),
            lam1=random_so_matrix_form(spec.chart, spec.eta, 1, rng, density=0.3),
            lam2=random_so_matrix_form(spec.chart, spec.eta, 1, rng, density=0.3),
            lam=random_so_matrix_form(spec.chart, spec.eta, 2, rng, density=0.3),
            eta=spec.eta,
        )

    g1, g2 = rand_el(), rand_el()
    assert proven_zero(g1.eta_residual())
    assert proven_zero(g2.eta_residual())
    prod = g1.assemble().mat_wedge(g2.assemble())
    # the product satisfies the group condition as well
    n = 4
    etaM = GenMatForm(
        spec.chart, 0, [[prod[i, j].scaled(spec.eta.diag[i]) for j in range(n)] for i in range(n)]
    )
    from gfcalc.cartan import gen_mat_from_scalars

    eta_gen = gen_mat_from_scalars(
        spec.chart, [[ScalarExpr.of(spec.eta.eta(i, j)) for j in range(n)] for i in range(n)]
    )
    assert proven_zero(prod.transpose().mat_wedge(etaM) - eta_gen)
