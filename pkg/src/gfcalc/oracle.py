"""Independent coordinate-basis curvature oracle.

Works directly on the metric components g_{mu nu} = eta_ab E^a_mu E^b_nu
through Christoffel symbols, never through the frame/connection machinery it
is used to cross-check.
"""

from __future__ import annotations

from typing import Sequence

import sympy as sp

from .forms import Chart, FrameMetric, MatOrdForm, OrdForm, coframe_matrix
from .symexpr import SamplingPolicy, ScalarExpr, ZeroVerdict, combine_verdicts, is_zero

__all__ = [
    "metric_components",
    "christoffel",
    "riemann",
    "ricci",
    "ricci_verdict",
    "curvature_forms_from_metric",
    "np_weyl_psi2",
]


def metric_components(coframe: Sequence[OrdForm], eta: FrameMetric) -> sp.Matrix:
    E = coframe_matrix(coframe)
    return sp.Matrix(E.T * eta.matrix() * E).applyfunc(sp.cancel)


def christoffel(g: sp.Matrix, coords: Sequence[sp.Symbol]) -> list[list[list[sp.Expr]]]:
    """Gamma[rho][mu][nu] of the metric-compatible torsion-free connection."""
    n = len(coords)
    ginv = g.inv().applyfunc(sp.cancel)
    out = [[[sp.S.Zero] * n for _ in range(n)] for _ in range(n)]
    for rho in range(n):
        for mu in range(n):
            for nu in range(mu, n):
                acc = sp.S.Zero
                for sig in range(n):
                    acc += ginv[rho, sig] * (
                        sp.diff(g[sig, nu], coords[mu])
                        + sp.diff(g[sig, mu], coords[nu])
                        - sp.diff(g[mu, nu], coords[sig])
                    )
                val = sp.cancel(acc / 2)
                out[rho][mu][nu] = val
                out[rho][nu][mu] = val
    return out


def riemann(g: sp.Matrix, coords: Sequence[sp.Symbol]) -> list[list[list[list[sp.Expr]]]]:
    """R[rho][sig][mu][nu] = dx^rho(R(d_mu, d_nu) d_sig)."""
    n = len(coords)
    Gamma = christoffel(g, coords)
    R = [[[[sp.S.Zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for rho in range(n):
        for sig in range(n):
            for mu in range(n):
                for nu in range(mu + 1, n):
                    acc = sp.diff(Gamma[rho][nu][sig], coords[mu]) - sp.diff(Gamma[rho][mu][sig], coords[nu])
                    for lam in range(n):
                        acc += Gamma[rho][mu][lam] * Gamma[lam][nu][sig] - Gamma[rho][nu][lam] * Gamma[lam][mu][sig]
                    acc = sp.cancel(sp.together(acc))
                    R[rho][sig][mu][nu] = acc
                    R[rho][sig][nu][mu] = -acc
    return R


def ricci(g: sp.Matrix, coords: Sequence[sp.Symbol]) -> sp.Matrix:
    n = len(coords)
    R = riemann(g, coords)
    out = sp.zeros(n, n)
    for sig in range(n):
        for nu in range(sig, n):
            acc = sp.S.Zero
            for mu in range(n):
                acc += R[mu][sig][mu][nu]
            out[sig, nu] = out[nu, sig] = sp.cancel(sp.together(acc))
    return out


def ricci_verdict(coframe: Sequence[OrdForm], eta: FrameMetric, policy: SamplingPolicy | None = None) -> ZeroVerdict:
    """Zero test of the Ricci tensor computed straight from g_{mu nu}."""
    chart = coframe[0].chart
    g = metric_components(coframe, eta)
    ric = ricci(g, chart.coords)
    return combine_verdicts(
        is_zero(ScalarExpr(ric[i, j]), policy, chart.assumptions)
        for i in range(chart.n)
        for j in range(i, chart.n)
    )


def curvature_forms_from_metric(coframe: Sequence[OrdForm], eta: FrameMetric) -> MatOrdForm:
    """Frame curvature two-forms assembled from the coordinate Riemann
    tensor: (1/2) E^a_rho (E^-1)^sig_b R^rho_sig_mu_nu dx^mu dx^nu."""
    chart = coframe[0].chart
    n = chart.n
    E = coframe_matrix(coframe)
    Einv = E.inv().applyfunc(sp.cancel)
    g = metric_components(coframe, eta)
    R = riemann(g, chart.coords)
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            terms = {}
            for mu in range(n):
                for nu in range(mu + 1, n):
                    acc = sp.S.Zero
                    for rho in range(n):
                        for sig in range(n):
                            if R[rho][sig][mu][nu] != 0:
                                acc += E[a, rho] * Einv[sig, b] * R[rho][sig][mu][nu]
                    acc = sp.cancel(sp.together(acc))
                    if acc != 0:
                        terms[(mu, nu)] = ScalarExpr(acc)
            row.append(OrdForm(chart, 2, terms))
        rows.append(row)
    return MatOrdForm(chart, 2, rows, "so")


def np_weyl_psi2(coframe: Sequence[OrdForm], eta: FrameMetric) -> ScalarExpr:
    """Psi_2 = R_{abcd} l^a m^b mbar^c n^d for a vacuum Lorentzian 4-metric,
    with the null tetrad built from the frame vectors:
    l = (e0+e3)/sqrt2, n = (e0-e3)/sqrt2, m = (e1+i e2)/sqrt2.
    """
    chart = coframe[0].chart
    if chart.n != 4 or eta.signature != (1, 3):
        raise ValueError("Weyl oracle requires a Lorentzian four-metric")
    E = coframe_matrix(coframe)
    Einv = E.inv().applyfunc(sp.cancel)  # columns are the frame vectors e_a
    g = metric_components(coframe, eta)
    R = riemann(g, chart.coords)
    n_dim = 4
    # lower the first index
    R_low = [[[[sp.S.Zero] * n_dim for _ in range(n_dim)] for _ in range(n_dim)] for _ in range(n_dim)]
    for rho in range(n_dim):
        for sig in range(n_dim):
            for mu in range(n_dim):
                for nu in range(mu + 1, n_dim):
                    acc = sp.S.Zero
                    for lam in range(n_dim):
                        if R[lam][sig][mu][nu] != 0:
                            acc += g[rho, lam] * R[lam][sig][mu][nu]
                    acc = sp.cancel(acc)
                    R_low[rho][sig][mu][nu] = acc
                    R_low[rho][sig][nu][mu] = -acc

    e = [[Einv[mu, a] for mu in range(4)] for a in range(4)]  # e[a] = frame vector components
    half = 1 / sp.sqrt(2)
    l_vec = [half * (e[0][mu] + e[3][mu]) for mu in range(4)]
    n_vec = [half * (e[0][mu] - e[3][mu]) for mu in range(4)]
    m_re = [half * e[1][mu] for mu in range(4)]
    m_im = [half * e[2][mu] for mu in range(4)]

    psi_re = sp.S.Zero
    psi_im = sp.S.Zero
    for a in range(4):
        for b in range(4):
            for c in range(4):
                for d in range(4):
                    coeff = R_low[a][b][c][d]
                    if coeff == 0:
                        continue
                    # m^b mbar^c = (mr + i mi)(mr - i mi)
                    re_part = m_re[b] * m_re[c] + m_im[b] * m_im[c]
                    im_part = m_im[b] * m_re[c] - m_re[b] * m_im[c]
                    psi_re += coeff * l_vec[a] * n_vec[d] * re_part
                    psi_im += coeff * l_vec[a] * n_vec[d] * im_part
    return ScalarExpr(sp.cancel(sp.together(psi_re)), sp.cancel(sp.together(psi_im)))
