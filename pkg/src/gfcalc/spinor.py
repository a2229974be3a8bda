"""Two-component spinor formalism for Lorentzian four-metrics.

Conventions (fixed here, validated by the reconstruction identity rather
than by matching any printed components): soldering theta^{AA'} =
sigma_a theta^a / sqrt2 with sigma = (I, Pauli x, y, z); epsilon_{01} = 1
with north-west raising xi^A = eps^{AB} xi_B, xi_B = xi^A eps_{AB}; the
anti-self-dual connection acts on unprimed indices from the left, its
conjugate on primed indices through the transpose.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import sympy as sp

from .forms import (
    Chart,
    FrameMetric,
    MatOrdForm,
    OrdForm,
    coframe_matrix,
    ext_d,
    wedge,
)
from .symexpr import (
    Assumptions,
    SamplingPolicy,
    ScalarExpr,
    Verdict,
    ZeroVerdict,
    combine_verdicts,
    eval_at,
    is_zero,
)

__all__ = [
    "SpinorError",
    "EPSILON",
    "sigma_matrices",
    "SpinorCoframe",
    "to_spinor_coframe",
    "from_spinor_coframe",
    "line_element_residual",
    "split_connection",
    "recombine_connection",
    "spinor_curvature",
    "recombine_curvature",
    "vacuum_residual",
    "spinor_first_cartan",
    "spinor_bianchi",
    "lorentz_to_sl2",
    "sl2_gauge_transform",
    "weyl_psi2",
    "mat2_wedge",
    "primed_act",
    "mat2_inverse_unimodular",
]

LORENTZ = (1, -1, -1, -1)

# epsilon_{01} = 1
EPSILON = ((0, 1), (-1, 0))


class SpinorError(ValueError):
    pass


def sigma_matrices() -> list[list[list[ScalarExpr]]]:
    i = ScalarExpr.i()
    one = ScalarExpr.one()
    zero = ScalarExpr.zero()
    s0 = [[one, zero], [zero, one]]
    s1 = [[zero, one], [one, zero]]
    s2 = [[zero, -i], [i, zero]]
    s3 = [[one, zero], [zero, -one]]
    return [s0, s1, s2, s3]


def _check_lorentzian(eta: FrameMetric) -> None:
    if tuple(eta.diag) != LORENTZ:
        raise SpinorError(f"spinor layer requires signature (1,3) as +---, got {eta}")


# ---------------------------------------------------------------------------
# 2x2 matrices of forms: helpers
# ---------------------------------------------------------------------------


def mat2(chart: Chart, degree: int, entries) -> MatOrdForm:
    return MatOrdForm(chart, degree, entries, "none")


def mat2_wedge(a: MatOrdForm, b: MatOrdForm) -> MatOrdForm:
    return a.mat_wedge(b)


def primed_act(N: MatOrdForm, X: MatOrdForm) -> MatOrdForm:
    """Entries N^{A'}_{B'} ^ X^{A B'}: the primed connection acting on the
    second index of X, with N written first (wedge order matters)."""
    chart = X.chart
    rows = []
    for A in range(2):
        row = []
        for Ap in range(2):
            acc = OrdForm.zero(chart, N.degree + X.degree)
            for Bp in range(2):
                acc = acc + wedge(N[Ap, Bp], X[A, Bp])
            row.append(acc)
        rows.append(row)
    return MatOrdForm(chart, N.degree + X.degree, rows)


def mat2_dagger(S: Sequence[Sequence[ScalarExpr]]) -> list[list[ScalarExpr]]:
    return [[S[j][i].conj() for j in range(2)] for i in range(2)]


def mat2_inverse_unimodular(S: Sequence[Sequence[ScalarExpr]]) -> list[list[ScalarExpr]]:
    """Inverse of a unit-determinant 2x2 scalar matrix (adjugate)."""
    return [[S[1][1], -S[0][1]], [-S[1][0], S[0][0]]]


def _scalar_mat_mul(A, B):
    return [
        [sum((A[i][k] * B[k][j] for k in range(2)), ScalarExpr.zero()) for j in range(2)]
        for i in range(2)
    ]


def const_mul_form_left(S: Sequence[Sequence[ScalarExpr]], M: MatOrdForm) -> MatOrdForm:
    rows = []
    for i in range(2):
        row = []
        for j in range(2):
            acc = OrdForm.zero(M.chart, M.degree)
            for k in range(2):
                acc = acc + M[k, j].scaled(S[i][k])
            row.append(acc)
        rows.append(row)
    return MatOrdForm(M.chart, M.degree, rows)


def const_mul_form_right(M: MatOrdForm, S: Sequence[Sequence[ScalarExpr]]) -> MatOrdForm:
    rows = []
    for i in range(2):
        row = []
        for j in range(2):
            acc = OrdForm.zero(M.chart, M.degree)
            for k in range(2):
                acc = acc + M[i, k].scaled(S[k][j])
            row.append(acc)
        rows.append(row)
    return MatOrdForm(M.chart, M.degree, rows)


# ---------------------------------------------------------------------------
# soldering
# ---------------------------------------------------------------------------


@dataclass
class SpinorCoframe:
    """Hermitian 2x2 matrix of one-forms; row index A, column index A'."""

    mat: MatOrdForm
    eta: FrameMetric

    def __getitem__(self, key) -> OrdForm:
        return self.mat[key]

    @property
    def chart(self) -> Chart:
        return self.mat.chart

    def hermiticity_residuals(self) -> ZeroVerdict:
        res = []
        for A in range(2):
            for Ap in range(2):
                res.append((self.mat[A, Ap] - self.mat[Ap, A].conj()).zero_verdict())
        return combine_verdicts(res)


def to_spinor_coframe(coframe: Sequence[OrdForm], eta: FrameMetric, verify: bool = True) -> SpinorCoframe:
    """theta^{AA'} = sigma_a theta^a / sqrt2; Hermiticity and the line
    element reconstruction are re-verified."""
    _check_lorentzian(eta)
    chart = coframe[0].chart
    sig = sigma_matrices()
    inv_sqrt2 = ScalarExpr(sp.sqrt(2) / 2)
    rows = []
    for A in range(2):
        row = []
        for Ap in range(2):
            acc = OrdForm.zero(chart, 1)
            for a in range(4):
                c = sig[a][A][Ap]
                if not c.is_structurally_zero:
                    acc = acc + coframe[a].scaled(c * inv_sqrt2)
            row.append(acc)
        rows.append(row)
    out = SpinorCoframe(mat2(chart, 1, rows), eta)
    if verify:
        h = out.hermiticity_residuals()
        if h.kind != Verdict.PROVEN_ZERO:
            raise SpinorError(f"soldered coframe is not Hermitian: {h}")
        r = combine_verdicts(v for v in line_element_residual(out, coframe).values())
        if r.kind != Verdict.PROVEN_ZERO:
            raise SpinorError(f"line element reconstruction failed: {r}")
    return out


def from_spinor_coframe(ts: SpinorCoframe) -> list[OrdForm]:
    """theta^a = tr(sigma_a theta) / sqrt2."""
    chart = ts.chart
    sig = sigma_matrices()
    inv_sqrt2 = ScalarExpr(sp.sqrt(2) / 2)
    out = []
    for a in range(4):
        acc = OrdForm.zero(chart, 1)
        for A in range(2):
            for B in range(2):
                c = sig[a][A][B]
                if not c.is_structurally_zero:
                    acc = acc + ts.mat[B, A].scaled(c * inv_sqrt2)
        out.append(acc)
    return out


def _sym_tensor_from_coframe(coframe: Sequence[OrdForm], weights) -> dict[tuple[int, int], ScalarExpr]:
    """Components of sum_a w_a theta^a (x) theta^a in the coordinate basis."""
    chart = coframe[0].chart
    n = chart.n
    E = [[coframe[a].coeff((mu,)) for mu in range(n)] for a in range(len(coframe))]
    out = {}
    for mu in range(n):
        for nu in range(mu, n):
            acc = ScalarExpr.zero()
            for a, w in enumerate(weights):
                acc = acc + E[a][mu] * E[a][nu] * ScalarExpr.of(w)
            out[(mu, nu)] = acc
    return out


def line_element_residual(ts: SpinorCoframe, coframe: Sequence[OrdForm], policy: SamplingPolicy | None = None) -> dict:
    """eps_AB eps_{A'B'} theta^{AA'} (x) theta^{BB'} minus eta_ab theta^a (x)
    theta^b, componentwise in the coordinate basis."""
    chart = ts.chart
    n = chart.n
    target = _sym_tensor_from_coframe(coframe, ts.eta.diag)
    comp = [[[ts.mat[A, Ap].coeff((mu,)) for mu in range(n)] for Ap in range(2)] for A in range(2)]
    out = {}
    for mu in range(n):
        for nu in range(mu, n):
            acc = ScalarExpr.zero()
            for A in range(2):
                for B in range(2):
                    eab = EPSILON[A][B]
                    if eab == 0:
                        continue
                    for Ap in range(2):
                        for Bp in range(2):
                            epq = EPSILON[Ap][Bp]
                            if epq == 0:
                                continue
                            half = ScalarExpr.of(sp.Rational(eab * epq, 2))
                            acc = acc + (
                                comp[A][Ap][mu] * comp[B][Bp][nu]
                                + comp[A][Ap][nu] * comp[B][Bp][mu]
                            ) * half
            res = acc - target[(mu, nu)]
            out[(mu, nu)] = is_zero(res, policy, chart.assumptions)
    return out


# ---------------------------------------------------------------------------
# connection split / recombination
# ---------------------------------------------------------------------------


def split_connection(omega: MatOrdForm, eta: FrameMetric, verify: bool = True) -> tuple[MatOrdForm, MatOrdForm]:
    """Anti-self-dual and self-dual parts of an so(1,3) connection:
    omega^A_B = sigma_k omega^k_0 / 2 + (i/4) eps_{klj} omega^l_j sigma_k,
    with the conjugate acting on primed indices; the recombination is
    re-verified entrywise."""
    _check_lorentzian(eta)
    chart = omega.chart
    deg = omega.degree
    sig = sigma_matrices()
    i = ScalarExpr.i()
    quarter_i = i * ScalarExpr.of(sp.Rational(1, 4))
    half = ScalarExpr.of(sp.Rational(1, 2))
    rows = [[OrdForm.zero(chart, deg) for _ in range(2)] for _ in range(2)]

    def add_sigma(k, form: OrdForm, factor: ScalarExpr):
        for A in range(2):
            for B in range(2):
                c = sig[k][A][B]
                if not c.is_structurally_zero:
                    rows[A][B] = rows[A][B] + form.scaled(c * factor)

    eps3 = {(1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1, (1, 3, 2): -1, (3, 2, 1): -1, (2, 1, 3): -1}
    for k in (1, 2, 3):
        add_sigma(k, omega[k, 0], half)
        for l in (1, 2, 3):
            for j in (1, 2, 3):
                s = eps3.get((k, l, j), 0)
                if s:
                    add_sigma(k, omega[l, j], quarter_i * ScalarExpr.of(s))
    unprimed = MatOrdForm(chart, deg, rows, "sl2")
    primed = unprimed.conj()
    if verify:
        tf = unprimed.check_sl2()
        if tf.kind != Verdict.PROVEN_ZERO:
            raise SpinorError(f"split is not trace-free: {tf}")
        back = recombine_connection(unprimed, primed, chart, deg)
        v = (back - omega).zero_verdict()
        if v.kind != Verdict.PROVEN_ZERO:
            raise SpinorError(f"split/recombine round trip failed: {v}")
    return unprimed, primed


def recombine_connection(unprimed: MatOrdForm, primed: MatOrdForm, chart: Chart, degree: int) -> MatOrdForm:
    """omega^a_b = tr(sigma_a (M sigma_b + sigma_b Mbar^T)) / 2 for the pair
    acting on unprimed/primed indices."""
    sig = sigma_matrices()
    rows = []
    for a in range(4):
        row = []
        for b in range(4):
            acc = OrdForm.zero(chart, degree)
            # tr(sigma_a M sigma_b) + tr(sigma_a sigma_b Mbar^T)
            for A in range(2):
                for B in range(2):
                    for C in range(2):
                        c1 = sig[a][A][B] * sig[b][C][A]
                        if not c1.is_structurally_zero:
                            acc = acc + unprimed[B, C].scaled(c1)
                        c2 = sig[a][A][B] * sig[b][B][C]
                        if not c2.is_structurally_zero:
                            acc = acc + primed[A, C].scaled(c2)
            row.append(acc.scaled(sp.Rational(1, 2)))
        rows.append(row)
    return MatOrdForm(chart, degree, rows, "so")


def spinor_curvature(omega_s: MatOrdForm, verify: bool = True) -> MatOrdForm:
    """Omega^A_B = d omega^A_B + omega^A_C omega^C_B; trace-free."""
    out = omega_s.mat_d() + omega_s.mat_wedge(omega_s)
    out = out.canonical()
    out.tag = "sl2"
    if verify:
        tf = out.check_sl2()
        if tf.kind != Verdict.PROVEN_ZERO:
            raise SpinorError(f"spinor curvature not trace-free: {tf}")
    return out


def recombine_curvature(Omega_s: MatOrdForm, Omega_s_bar: MatOrdForm, chart: Chart) -> MatOrdForm:
    return recombine_connection(Omega_s, Omega_s_bar, chart, 2)


# ---------------------------------------------------------------------------
# field equations and identities
# ---------------------------------------------------------------------------


def vacuum_residual(Omega_s: MatOrdForm, ts: SpinorCoframe) -> MatOrdForm:
    """Omega^A_B ^ theta^{BA'}: identically zero exactly on Ricci-flat data."""
    return Omega_s.mat_wedge(ts.mat)


def spinor_first_cartan(ts: SpinorCoframe, omega_s: MatOrdForm, omega_s_bar: MatOrdForm) -> MatOrdForm:
    """d theta^{AA'} + omega^A_B theta^{BA'} + omegabar^{A'}_{B'} theta^{AB'}."""
    return ts.mat.mat_d() + omega_s.mat_wedge(ts.mat) + primed_act(omega_s_bar, ts.mat)


def spinor_bianchi(
    Omega_s: MatOrdForm,
    Omega_s_bar: MatOrdForm,
    ts: SpinorCoframe,
    omega_s: MatOrdForm,
    omega_s_bar: MatOrdForm,
    policy: SamplingPolicy | None = None,
) -> tuple[ZeroVerdict, ZeroVerdict]:
    """First: Omega^A_B theta^{BA'} + Omegabar^{A'}_{B'} theta^{AB'} == 0;
    second: D Omega == 0 for both chiralities."""
    first = (Omega_s.mat_wedge(ts.mat) + primed_act(Omega_s_bar, ts.mat)).zero_verdict(policy)
    d1 = Omega_s.mat_d() + omega_s.mat_wedge(Omega_s) - Omega_s.mat_wedge(omega_s)
    d2 = Omega_s_bar.mat_d() + omega_s_bar.mat_wedge(Omega_s_bar) - Omega_s_bar.mat_wedge(omega_s_bar)
    second = combine_verdicts((d1.zero_verdict(policy), d2.zero_verdict(policy)))
    return first, second


# ---------------------------------------------------------------------------
# the double cover
# ---------------------------------------------------------------------------


def _phi_of_basis(L: Sequence[Sequence[ScalarExpr]], jk: tuple[int, int]) -> list[list[ScalarExpr]]:
    """Image of the matrix unit E_jk under X -> sigma_a L^a_b <sigma_b, X>."""
    sig = sigma_matrices()
    half = ScalarExpr.of(sp.Rational(1, 2))
    # E_jk = sum_b c_b sigma_b with c_b = tr(sigma_b E_jk)/2 = sigma_b[k][j]/2
    out = [[ScalarExpr.zero(), ScalarExpr.zero()], [ScalarExpr.zero(), ScalarExpr.zero()]]
    for b in range(4):
        cb = sig[b][jk[1]][jk[0]] * half
        if cb.is_structurally_zero:
            continue
        for a in range(4):
            Lab = L[a][b]
            if Lab.is_structurally_zero:
                continue
            for A in range(2):
                for B in range(2):
                    s = sig[a][A][B]
                    if not s.is_structurally_zero:
                        out[A][B] = out[A][B] + s * Lab * cb
    return out


def lorentz_to_sl2(L: Sequence[Sequence], eta: FrameMetric, assumptions=None) -> tuple[list[list[ScalarExpr]], list[list[ScalarExpr]]]:
    """Lift a proper orthochronous SO(1,3) matrix through the double cover:
    S sigma_b S^dagger = sigma_a L^a_b, det S = 1, sign fixed by requiring a
    nonnegative real trace (ties resolved toward +identity).

    The lift normalizes by sqrt(det); inputs whose intermediate determinant
    is not provably real positive are rejected rather than guessed at.
    """
    _check_lorentzian(eta)
    Ls = [[e if isinstance(e, ScalarExpr) else ScalarExpr.of(e) for e in row] for row in L]
    assume = assumptions if assumptions is not None else Assumptions.empty()

    det = _det4(Ls)
    v = is_zero(det - ScalarExpr.one(), assumptions=assume)
    if v.kind != Verdict.PROVEN_ZERO:
        raise SpinorError(f"not a unit-determinant Lorentz matrix (det residual {v})")
    # orthochronicity: L^0_0 >= 1 on samples
    l00 = Ls[0][0]
    neg = is_zero(l00 + ScalarExpr.one(), assumptions=assume)
    if neg.kind == Verdict.PROVEN_ZERO:
        raise SpinorError("not orthochronous: L^0_0 = -1")

    P = _phi_of_basis(Ls, (0, 0))  # = s1 s1^dagger
    Q = _phi_of_basis(Ls, (0, 1))  # = s1 s2^dagger

    piv = is_zero(P[0][0], assumptions=assume)
    if not piv.is_nonzero_verdict:
        # pivot on the other column: R = Phi(E11) = s2 s2^dagger
        R = _phi_of_basis(Ls, (1, 1))
        s2 = _column_from_rank_one(R, 1, assume)
        QT = _phi_of_basis(Ls, (1, 0))  # = s2 s1^dagger
        s1 = _recover_partner(QT, s2, assume, transposed=True)
    else:
        s1 = _column_from_rank_one(P, 0, assume)
        s2 = _recover_partner(Q, s1, assume, transposed=False)
    S = [[s1[0], s2[0]], [s1[1], s2[1]]]
    detS = S[0][0] * S[1][1] - S[0][1] * S[1][0]
    if not is_zero(ScalarExpr(detS.im), assumptions=assume).is_zero_verdict:
        raise SpinorError("double-cover lift needs a provably real intermediate determinant")
    root = ScalarExpr(sp.sqrt(detS.re))
    S = [[S[i][j] / root for j in range(2)] for i in range(2)]
    tr = S[0][0] + S[1][1]
    tr_sign = is_zero(tr, assumptions=assume)
    if not tr_sign.is_zero_verdict:
        # fix the sheet: nonnegative real part of the trace
        try:
            sample = {str(s): 0.5 for s in tr.free_symbols()}
            if eval_at(tr, sample).real < 0:
                S = [[-S[i][j] for j in range(2)] for i in range(2)]
        except Exception:
            pass
    Sbar = [[S[i][j].conj() for j in range(2)] for i in range(2)]
    _verify_sl2_lift(S, Ls, assume)
    return S, Sbar


def _det4(L: Sequence[Sequence[ScalarExpr]]) -> ScalarExpr:
    m = sp.Matrix([[L[i][j].re + sp.I * L[i][j].im for j in range(4)] for i in range(4)])
    re, im = sp.cancel(m.det()).as_real_imag()
    return ScalarExpr(sp.cancel(re), sp.cancel(im))


def _column_from_rank_one(P, col_index: int, assume) -> list[ScalarExpr]:
    """s from P = s s^dagger with P[c][c] provably nonzero; s = P[:,c]/sqrt(P[c][c])."""
    c = col_index
    pcc = P[c][c]
    if not is_zero(ScalarExpr(pcc.im), assumptions=assume).is_zero_verdict:
        raise SpinorError("rank-one diagonal must be real")
    root = ScalarExpr(sp.sqrt(pcc.re))
    return [P[0][c] / root, P[1][c] / root]


def _recover_partner(Q, s, assume, transposed: bool) -> list[ScalarExpr]:
    """Given Q = s t^dagger (or t s^dagger when transposed), recover t using
    the known s: t^dagger = (s^dagger Q)/(s^dagger s)."""
    norm = s[0] * s[0].conj() + s[1] * s[1].conj()
    if transposed:
        # Q = t s^dagger: t = Q s / (s^dagger s)
        return [(Q[0][0] * s[0] + Q[0][1] * s[1]) / norm, (Q[1][0] * s[0] + Q[1][1] * s[1]) / norm]
    # Q = s t^dagger: t^dagger_j = (conj(s_0) Q[0][j] + conj(s_1) Q[1][j]) / norm
    t_dag = [(s[0].conj() * Q[0][j] + s[1].conj() * Q[1][j]) / norm for j in range(2)]
    return [t_dag[0].conj(), t_dag[1].conj()]


def _verify_sl2_lift(S, Ls, assume) -> None:
    sig = sigma_matrices()
    Sd = mat2_dagger(S)
    for b in range(4):
        lhs = _scalar_mat_mul(_scalar_mat_mul(S, sig[b]), Sd)
        for A in range(2):
            for B in range(2):
                rhs = ScalarExpr.zero()
                for a in range(4):
                    rhs = rhs + sig[a][A][B] * Ls[a][b]
                v = is_zero(lhs[A][B] - rhs, assumptions=assume)
                if v.kind != Verdict.PROVEN_ZERO:
                    raise SpinorError(f"sigma-conjugation check failed at b={b}, entry ({A},{B}): {v}")
    det = S[0][0] * S[1][1] - S[0][1] * S[1][0]
    v = is_zero(det - ScalarExpr.one(), assumptions=assume)
    if v.kind != Verdict.PROVEN_ZERO:
        raise SpinorError(f"lift determinant is not provably 1: {v}")


def sl2_gauge_transform(
    ts: SpinorCoframe,
    omega_s: MatOrdForm,
    omega_s_bar: MatOrdForm,
    S: Sequence[Sequence[ScalarExpr]],
) -> tuple[SpinorCoframe, MatOrdForm, MatOrdForm]:
    """theta -> S^-1 theta (Sbar^-1)^T, omega -> S^-1 dS + S^-1 omega S."""
    chart = ts.chart
    Sinv = mat2_inverse_unimodular(S)
    Sbar = [[S[i][j].conj() for j in range(2)] for i in range(2)]
    Sbar_inv = mat2_inverse_unimodular(Sbar)
    theta1 = const_mul_form_right(const_mul_form_left(Sinv, ts.mat), _transpose2(Sbar_inv))
    dS = MatOrdForm(
        chart,
        1,
        [
            [
                OrdForm(
                    chart,
                    1,
                    {(k,): ScalarExpr(sp.diff(S[i][j].re, x), sp.diff(S[i][j].im, x)) for k, x in enumerate(chart.coords)},
                )
                for j in range(2)
            ]
            for i in range(2)
        ],
    )
    omega1 = const_mul_form_left(Sinv, dS) + const_mul_form_left(Sinv, const_mul_form_right(omega_s, S))
    dSbar = dS.conj()
    omega1_bar = const_mul_form_left(Sbar_inv, dSbar) + const_mul_form_left(Sbar_inv, const_mul_form_right(omega_s_bar, Sbar))
    omega1.tag = "sl2"
    omega1_bar.tag = "sl2"
    return SpinorCoframe(theta1, ts.eta), omega1, omega1_bar


def _transpose2(S):
    return [[S[j][i] for j in range(2)] for i in range(2)]


# ---------------------------------------------------------------------------
# Weyl scalar extraction
# ---------------------------------------------------------------------------


def _lower_first(M: MatOrdForm) -> list[list[OrdForm]]:
    """X_{AB} = X^C_B eps_{CA}."""
    out = [[None, None], [None, None]]
    for A in range(2):
        for B in range(2):
            acc = OrdForm.zero(M.chart, M.degree)
            for C in range(2):
                e = EPSILON[C][A]
                if e:
                    acc = acc + M[C, B].scaled(e)
            out[A][B] = acc
    return out


def asd_basis_two_forms(ts: SpinorCoframe) -> dict[tuple[int, int], OrdForm]:
    """T^{AB} = theta^{AA'} ^ theta^{BB'} eps_{A'B'} (symmetric in AB)."""
    chart = ts.chart
    out = {}
    for A in range(2):
        for B in range(A, 2):
            acc = OrdForm.zero(chart, 2)
            for Ap in range(2):
                for Bp in range(2):
                    e = EPSILON[Ap][Bp]
                    if e:
                        acc = acc + wedge(ts.mat[A, Ap], ts.mat[B, Bp]).scaled(e)
            out[(A, B)] = acc.canonical()
    return out


def _solve_in_basis(target: OrdForm, basis: list[OrdForm]):
    """Exact coefficients x_k with target = sum x_k basis_k, or None."""
    chart = target.chart
    idxs = sorted(set(target.terms) | {i for b in basis for i in b.terms})
    unknowns = [sp.Dummy(f"c{k}") for k in range(len(basis))]
    eqs = []
    for idx in idxs:
        lhs = sp.S.Zero
        for k, b in enumerate(basis):
            c = b.coeff(idx)
            lhs += unknowns[k] * (c.re + sp.I * c.im)
        t = target.coeff(idx)
        eqs.append(sp.Eq(lhs, t.re + sp.I * t.im))
    sol = sp.linsolve(eqs, unknowns)
    if not sol:
        return None
    values = list(sol)[0]
    out = []
    for v in values:
        re, im = sp.cancel(sp.together(v)).as_real_imag()
        out.append(ScalarExpr(sp.cancel(re), sp.cancel(im)))
    return out


def weyl_psi2(Omega_s: MatOrdForm, ts: SpinorCoframe) -> ScalarExpr:
    """Psi_2 from the anti-self-dual curvature expanded over the
    anti-self-dual two-form basis: Omega_{01} = ... + 2 Psi_2 T^{01} + ...

    Valid on vacuum data (where the expansion exists); raises otherwise.
    """
    T = asd_basis_two_forms(ts)
    low = _lower_first(Omega_s)
    basis = [T[(0, 0)], T[(0, 1)], T[(1, 1)]]
    coeffs = _solve_in_basis(low[0][1].canonical(), basis)
    if coeffs is None:
        raise SpinorError("curvature does not lie in the anti-self-dual basis (non-vacuum data?)")
    return coeffs[1].canon() * ScalarExpr.of(sp.Rational(1, 2))
