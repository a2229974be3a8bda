"""Seeded random generators for forms, connections and group elements.

Everything stays polynomial (small integer coefficients, low-degree
monomials) or rationally parametrized, so identity residuals are decided
exactly by the rational rewrite set.
"""

from __future__ import annotations

from random import Random
from itertools import combinations

import sympy as sp

from .forms import Chart, FrameMetric, MatOrdForm, OrdForm
from .genforms import GenForm, NType
from .symexpr import ScalarExpr

__all__ = [
    "random_scalar",
    "random_ord_form",
    "random_gen_form",
    "random_so_matrix_form",
    "random_so_function_matrix",
]


def random_scalar(chart: Chart, rng: Random, allow_complex: bool = True, density: float = 0.8) -> ScalarExpr:
    def part():
        if rng.random() > density:
            return sp.S.Zero
        c = rng.choice([-2, -1, 1, 2, 3])
        mono = sp.S.One
        for _ in range(rng.randint(0, 2)):
            mono *= chart.coords[rng.randrange(chart.n)]
        return c * mono

    re = part()
    im = part() if allow_complex and rng.random() < 0.4 else sp.S.Zero
    return ScalarExpr(re, im)


def random_ord_form(chart: Chart, degree: int, rng: Random, allow_complex: bool = True, density: float = 0.6) -> OrdForm:
    if not 0 <= degree <= chart.n:
        return OrdForm.zero(chart, degree)
    terms = {}
    for idx in combinations(range(chart.n), degree):
        if rng.random() > density:
            continue
        c = random_scalar(chart, rng, allow_complex)
        if not c.is_structurally_zero:
            terms[idx] = c
    return OrdForm(chart, degree, terms)


def random_gen_form(chart: Chart, degree: int, rng: Random, ntype: NType = NType.N2, allow_complex: bool = True) -> GenForm:
    if ntype is NType.N1:
        pi = random_ord_form(chart, degree, rng, allow_complex)
        m_part = random_ord_form(chart, degree + 1, rng, allow_complex)
        return GenForm.n1(pi, m_part, degree=degree)
    return GenForm(
        chart,
        degree,
        random_ord_form(chart, degree, rng, allow_complex),
        random_ord_form(chart, degree + 1, rng, allow_complex),
        random_ord_form(chart, degree + 1, rng, allow_complex),
        random_ord_form(chart, degree + 2, rng, allow_complex),
        NType.N2,
    )


def random_so_matrix_form(chart: Chart, eta: FrameMetric, degree: int, rng: Random, density: float = 0.5) -> MatOrdForm:
    """so(p,q)-valued matrix of real p-forms: eta-lowered antisymmetry."""
    n = eta.n
    z = OrdForm.zero(chart, degree)
    rows = [[z for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            low = random_ord_form(chart, degree, rng, allow_complex=False, density=density)
            # entry^a_b = eta^aa low_ab, entry^b_a = -eta^bb low_ab
            rows[a][b] = low.scaled(eta.diag[a])
            rows[b][a] = low.scaled(-eta.diag[b])
    return MatOrdForm(chart, degree, rows, "so")


def _plane_rotation(n: int, i: int, j: int, u: sp.Rational) -> sp.Matrix:
    c = sp.cancel((1 - u**2) / (1 + u**2))
    s = sp.cancel(2 * u / (1 + u**2))
    L = sp.eye(n)
    L[i, i] = c
    L[j, j] = c
    L[i, j] = -s
    L[j, i] = s
    return L

def _plane_boost(n: int, i: int, j: int, u: sp.Rational) -> sp.Matrix:
    ch = sp.cancel((1 + u**2) / (1 - u**2))
    sh = sp.cancel(2 * u / (1 - u**2))
    L = sp.eye(n)
    L[i, i] = ch
    L[j, j] = ch
    L[i, j] = sh
    L[j, i] = sh
    return L


def random_so_function_matrix(chart: Chart, eta: FrameMetric, rng: Random, coordinate_dependent: bool = False) -> list[list[ScalarExpr]]:
    """Random SO(p,q) matrix from rationally parametrized plane rotations
    and boosts (exactly eta-orthogonal, no radicals).  Kept to at most two
    plane factors with linear-coordinate parameters so downstream products
    stay small."""
    n = eta.n
    out = sp.eye(n)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(pairs)
    for (i, j) in pairs[: rng.randint(1, 2)]:
        u = sp.Rational(rng.choice([-2, -1, 1, 2]), rng.randint(4, 9))
        if coordinate_dependent and rng.random() < 0.5:
            u = u * chart.coords[rng.randrange(chart.n)]
        if eta.diag[i] == eta.diag[j]:
            out = out * _plane_rotation(n, i, j, u)
        else:
            out = out * _plane_boost(n, i, j, u)
    out = out.applyfunc(sp.cancel)
    return [[ScalarExpr(out[i, j]) for j in range(n)] for i in range(n)]
