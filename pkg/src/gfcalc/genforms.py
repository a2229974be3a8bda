"""Type N=2 (and N=1) generalized forms.

A generalized p-form expands over the basis {1, m, mbar, m mbar} built from
the complex-conjugate pair of degree -1 generators with d m = d mbar = 1:

    a  =  pi  +  pi1 m  +  pi2 mbar  +  pitop m mbar,

with ordinary degrees p, p+1, p+1, p+2.  Type N=1 forms are the subalgebra
with m = mbar (pi2 = pi1, pitop = 0), i.e. forms over {1, m1} in the real
basis.  The product and derivative component formulas below are the single
transcription point for the signs; monomial.bruteforce_wedge is the
permanently kept independent multiplier used to cross-check them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import sympy as sp

from .forms import Chart, FrameMetric, MatOrdForm, OrdForm, ext_d, wedge
from .symexpr import (
    SamplingPolicy,
    ScalarExpr,
    Verdict,
    ZeroVerdict,
    combine_verdicts,
)

__all__ = [
    "NType",
    "GenForm",
    "GenMatForm",
    "RealBasis",
    "NotClosedError",
    "gf_wedge",
    "gf_d",
    "gf_conj",
    "to_real_basis",
    "from_real_basis",
    "potential_of_closed",
    "gen_identity",
    "gen_mat_from_ordinary",
    "gen_mat_inverse_deg0",
]

MIN_DEGREE = -2


class NType(Enum):
    N1 = "N1"
    N2 = "N2"


class NotClosedError(ValueError):
    def __init__(self, component: str, verdict: ZeroVerdict):
        super().__init__(f"form is not closed: d-residual component {component} is {verdict}")
        self.component = component
        self.verdict = verdict


@dataclass(frozen=True)
class RealBasis:
    """Components over {1, m1, m2, m1 m2} with m = m1 + i m2, dm1 = 1, dm2 = 0."""

    rho: OrdForm
    rho1: OrdForm
    rho2: OrdForm
    rho12: OrdForm


class GenForm:
    """Type N=2 generalized form; N=1 stored as the constrained special case."""

    __slots__ = ("chart", "degree", "pi", "pi1", "pi2", "pitop", "ntype")

    def __init__(
        self,
        chart: Chart,
        degree: int,
        pi: OrdForm | None = None,
        pi1: OrdForm | None = None,
        pi2: OrdForm | None = None,
        pitop: OrdForm | None = None,
        ntype: NType = NType.N2,
    ):
        in_range = MIN_DEGREE <= degree <= chart.n
        self.chart = chart
        self.degree = int(degree)

        def fit(component: OrdForm | None, deg: int, name: str) -> OrdForm:
            if component is None:
                return OrdForm.zero(chart, deg)
            if component.chart != chart:
                raise ValueError(f"component {name} lives on a different chart")
            if not in_range and not component.is_structurally_zero:
                raise ValueError(f"nonzero generalized form must have degree in [{MIN_DEGREE}, {chart.n}], got {degree}")
            if component.degree != deg and not component.is_structurally_zero:
                raise ValueError(f"component {name} must have ordinary degree {deg}, got {component.degree}")
            if component.degree != deg:
                return OrdForm.zero(chart, deg)
            return component

        self.pi = fit(pi, degree, "pi")
        self.pi1 = fit(pi1, degree + 1, "pi1")
        self.pi2 = fit(pi2, degree + 1, "pi2")
        self.pitop = fit(pitop, degree + 2, "pitop")
        if ntype is NType.N1:
            if self.pi1 != self.pi2 or not self.pitop.is_structurally_zero:
                raise ValueError("N1 forms need pi2 == pi1 and pitop == 0")
        self.ntype = ntype

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(chart: Chart, degree: int, ntype: NType = NType.N2) -> "GenForm":
        return GenForm(chart, degree, ntype=ntype)

    @staticmethod
    def from_ordinary(a: OrdForm, ntype: NType = NType.N1) -> "GenForm":
        return GenForm(a.chart, a.degree, pi=a, ntype=ntype)

    @staticmethod
    def from_scalar(chart: Chart, value, ntype: NType = NType.N1) -> "GenForm":
        return GenForm.from_ordinary(OrdForm.from_scalar(chart, value), ntype)

    @staticmethod
    def m(chart: Chart) -> "GenForm":
        return GenForm(chart, -1, pi1=OrdForm.from_scalar(chart, 1))

    @staticmethod
    def mbar(chart: Chart) -> "GenForm":
        return GenForm(chart, -1, pi2=OrdForm.from_scalar(chart, 1))

    @staticmethod
    def m_mbar(chart: Chart) -> "GenForm":
        return GenForm(chart, -2, pitop=OrdForm.from_scalar(chart, 1))

    @staticmethod
    def n1_m(chart: Chart) -> "GenForm":
        """The N=1 minus one-form, i.e. m1 = (m + mbar)/2."""
        half = OrdForm.from_scalar(chart, sp.Rational(1, 2))
        return GenForm(chart, -1, pi1=half, pi2=half, ntype=NType.N1)

    @staticmethod
    def n1(pi: OrdForm | None, m_part: OrdForm | None = None, degree: int | None = None) -> "GenForm":
        """N=1 form pi + m_part * m1 from its two N=1 components."""
        if pi is None and m_part is None:
            raise ValueError("need at least one component")
        chart = (pi or m_part).chart
        if degree is None:
            degree = pi.degree if pi is not None else m_part.degree - 1
        half = m_part.scaled(sp.Rational(1, 2)) if m_part is not None else None
        return GenForm(chart, degree, pi=pi, pi1=half, pi2=half, ntype=NType.N1)

    # -- accessors ---------------------------------------------------------

    @property
    def n1_m_part(self) -> OrdForm:
        """Coefficient of the N=1 generator m1 (only for N1 forms)."""
        if self.ntype is not NType.N1:
            raise ValueError("n1_m_part requires an N1 form")
        return self.pi1.scaled(2)

    def components(self) -> tuple[OrdForm, OrdForm, OrdForm, OrdForm]:
        return (self.pi, self.pi1, self.pi2, self.pitop)

    @property
    def is_structurally_zero(self) -> bool:
        return all(c.is_structurally_zero for c in self.components())

    @property
    def is_ordinary(self) -> bool:
        return self.pi1.is_structurally_zero and self.pi2.is_structurally_zero and self.pitop.is_structurally_zero

    def as_n2(self) -> "GenForm":
        if self.ntype is NType.N2:
            return self
        return GenForm(self.chart, self.degree, self.pi, self.pi1, self.pi2, self.pitop, NType.N2)

    # -- arithmetic ----------------------------------------------------------

    def _join(self, other: "GenForm") -> NType:
        if self.chart != other.chart:
            raise ValueError("generalized forms live on different charts")
        return NType.N1 if (self.ntype is NType.N1 and other.ntype is NType.N1) else NType.N2

    def __add__(self, other: "GenForm") -> "GenForm":
        nt = self._join(other)
        if self.is_structurally_zero:
            return other
        if other.is_structurally_zero:
            return self
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        if nt is NType.N1:
            half = self.pi1 + other.pi1
            return GenForm(self.chart, self.degree, self.pi + other.pi, half, half, None, nt)
        return GenForm(
            self.chart,
            self.degree,
            self.pi + other.pi,
            self.pi1 + other.pi1,
            self.pi2 + other.pi2,
            self.pitop + other.pitop,
            nt,
        )

    def __sub__(self, other: "GenForm") -> "GenForm":
        return self + (-other)

    def __neg__(self) -> "GenForm":
        return self.map_components(lambda c: -c)

    def scaled(self, s) -> "GenForm":
        sv = s if isinstance(s, ScalarExpr) else ScalarExpr.of(s)
        return self.map_components(lambda c: c.scaled(sv))

    def map_components(self, fn: Callable[[OrdForm], OrdForm]) -> "GenForm":
        if self.ntype is NType.N1:
            half = fn(self.pi1)
            return GenForm(self.chart, self.degree, fn(self.pi), half, half, None, NType.N1)
        return GenForm(self.chart, self.degree, fn(self.pi), fn(self.pi1), fn(self.pi2), fn(self.pitop), self.ntype)

    def canonical(self) -> "GenForm":
        return self.map_components(lambda c: c.canonical())

    def __eq__(self, other) -> bool:
        if not isinstance(other, GenForm):
            return NotImplemented
        return self.degree == other.degree and self.components() == other.components()

    def __hash__(self):
        return hash((self.degree, self.components()))

    # -- verdicts ---------------------------------------------------------------

    def zero_verdict(self, policy: SamplingPolicy | None = None) -> ZeroVerdict:
        return combine_verdicts(c.zero_verdict(policy) for c in self.components())

    def component_verdicts(self, policy: SamplingPolicy | None = None) -> dict[str, ZeroVerdict]:
        names = ("pi", "pi1", "pi2", "piTop")
        return {n: c.zero_verdict(policy) for n, c in zip(names, self.components())}

    def realness_residuals(self) -> dict[str, ZeroVerdict]:
        """Residuals of: pi real, pi2 = conj(pi1), pitop purely imaginary."""
        im_pi = self.pi.map_coeffs(lambda c: ScalarExpr(c.im))
        conj_res = self.pi2 - self.pi1.conj()
        re_top = self.pitop.map_coeffs(lambda c: ScalarExpr(c.re))
        return {
            "pi_imag": im_pi.zero_verdict(),
            "pi2_minus_conj_pi1": conj_res.zero_verdict(),
            "pitop_real": re_top.zero_verdict(),
        }

    def is_real_form(self) -> bool:
        return all(v.kind == Verdict.PROVEN_ZERO for v in self.realness_residuals().values())

    def __repr__(self) -> str:
        bits = []
        if not self.pi.is_structurally_zero:
            bits.append(f"{self.pi!r}")
        if not self.pi1.is_structurally_zero:
            bits.append(f"[{self.pi1!r}] m")
        if not self.pi2.is_structurally_zero:
            bits.append(f"[{self.pi2!r}] mb")
        if not self.pitop.is_structurally_zero:
            bits.append(f"[{self.pitop!r}] m mb")
        inner = " + ".join(bits) if bits else "0"
        return f"<{self.ntype.value} deg {self.degree}: {inner}>"

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "pi": self.pi.to_json_dict(),
            "pi1": self.pi1.to_json_dict(),
            "pi2": self.pi2.to_json_dict(),
            "piTop": self.pitop.to_json_dict(),
        }


def gf_wedge(a: GenForm, b: GenForm) -> GenForm:
    """Product of generalized forms (component display transcription)."""
    nt = a._join(b)
    q = b.degree
    sq = (-1) ** (q & 1)
    pi = wedge(a.pi, b.pi)
    if nt is NType.N1:
        # the N1 subalgebra in {1, m1} components; the shared pi1 = pi2
        # object keeps the constraint structurally exact
        half = wedge(a.pi, b.pi1) + wedge(a.pi1, b.pi).scaled(sq)
        return GenForm(a.chart, a.degree + q, pi, half, half, None, nt)
    pi1 = wedge(a.pi, b.pi1) + wedge(a.pi1, b.pi).scaled(sq)
    pi2 = wedge(a.pi, b.pi2) + wedge(a.pi2, b.pi).scaled(sq)
    pitop = (
        wedge(a.pi, b.pitop)
        + wedge(a.pi1, b.pi2).scaled(-sq)
        + wedge(a.pi2, b.pi1).scaled(sq)
        + wedge(a.pitop, b.pi)
    )
    return GenForm(a.chart, a.degree + q, pi, pi1, pi2, pitop, nt)


def gf_d(a: GenForm) -> GenForm:
    """Exterior derivative (component display transcription); d^2 = 0."""
    s = (-1) ** ((a.degree + 1) & 1)
    if a.ntype is NType.N1:
        pi = ext_d(a.pi) + a.pi1.scaled(2 * s)
        half = ext_d(a.pi1)
        return GenForm(a.chart, a.degree + 1, pi, half, half, None, a.ntype)
    pi = ext_d(a.pi) + (a.pi1 + a.pi2).scaled(s)
    pi1 = ext_d(a.pi1) + a.pitop.scaled(s)
    pi2 = ext_d(a.pi2) + a.pitop.scaled(-s)
    pitop = ext_d(a.pitop)
    return GenForm(a.chart, a.degree + 1, pi, pi1, pi2, pitop, a.ntype)


def gf_conj(a: GenForm) -> GenForm:
    """Complex conjugation: swaps the m and mbar directions.

    In the real basis it conjugates coefficients; in the m basis that is
    (pi, pi1, pi2, pitop) -> (conj pi, conj pi2, conj pi1, -conj pitop),
    so real forms (purely imaginary pitop) are fixed.
    """
    if a.ntype is NType.N1:
        half = a.pi1.conj()
        return GenForm(a.chart, a.degree, a.pi.conj(), half, half, None, a.ntype)
    return GenForm(
        a.chart,
        a.degree,
        a.pi.conj(),
        a.pi2.conj(),
        a.pi1.conj(),
        -(a.pitop.conj()),
        a.ntype,
    )


def to_real_basis(a: GenForm) -> RealBasis:
    """Components over {1, m1, m2, m1 m2}; m = m1 + i m2, m mbar = -2i m1 m2."""
    i = ScalarExpr.i()
    return RealBasis(
        rho=a.pi,
        rho1=a.pi1 + a.pi2,
        rho2=(a.pi1 - a.pi2).scaled(i),
        rho12=a.pitop.scaled(i * ScalarExpr.of(-2)),
    )


def from_real_basis(chart: Chart, degree: int, rb: RealBasis) -> GenForm:
    i = ScalarExpr.i()
    half = ScalarExpr.of(sp.Rational(1, 2))
    return GenForm(
        chart,
        degree,
        pi=rb.rho,
        pi1=(rb.rho1 - rb.rho2.scaled(i)).scaled(half),
        pi2=(rb.rho1 + rb.rho2.scaled(i)).scaled(half),
        pitop=rb.rho12.scaled(i * half),
    )


def potential_of_closed(a: GenForm, policy: SamplingPolicy | None = None) -> GenForm:
    """A generalized (p-1)-form c with d c = a, for closed a of type N>=1.

    Uses the derivative display: with d a = 0,
        c = (-1)^p [ (pi/2)(m + mbar) + ((pi1 - pi2)/2) m mbar ]
    does the job; the N=1 case collapses to (-1)^p pi m1.
    """
    da = gf_d(a)
    for name, verdict in da.component_verdicts(policy).items():
        if verdict.kind != Verdict.PROVEN_ZERO:
            raise NotClosedError(name, verdict)
    sign = (-1) ** (a.degree & 1)
    half = ScalarExpr.of(sp.Rational(sign, 2))
    return GenForm(
        a.chart,
        a.degree - 1,
        pi=None,
        pi1=a.pi.scaled(half),
        pi2=a.pi.scaled(half),
        pitop=(a.pi1 - a.pi2).scaled(half),
        ntype=a.ntype,
    )


# ---------------------------------------------------------------------------
# matrices of generalized forms
# ---------------------------------------------------------------------------


class GenMatForm:
    """Square matrix of equal-degree generalized forms with an algebra tag."""

    __slots__ = ("chart", "degree", "entries", "tag")

    def __init__(self, chart: Chart, degree: int, entries: Sequence[Sequence[GenForm]], tag: str = "none"):
        self.chart = chart
        self.degree = degree
        self.entries = [list(row) for row in entries]
        n = len(self.entries)
        if any(len(row) != n for row in self.entries):
            raise ValueError("matrix form must be square")
        self.tag = tag

    @staticmethod
    def zero(chart: Chart, degree: int, size: int, tag: str = "none") -> "GenMatForm":
        z = GenForm.zero(chart, degree)
        return GenMatForm(chart, degree, [[z] * size for _ in range(size)], tag)

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, key) -> GenForm:
        i, j = key
        return self.entries[i][j]

    def map_entries(self, fn) -> "GenMatForm":
        return GenMatForm(self.chart, self.degree, [[fn(e) for e in row] for row in self.entries], self.tag)

    def canonical(self) -> "GenMatForm":
        return self.map_entries(lambda e: e.canonical())

    def __add__(self, other: "GenMatForm") -> "GenMatForm":
        tag = self.tag if self.tag == other.tag else "none"
        return GenMatForm(
            self.chart,
            self.degree,
            [[self.entries[i][j] + other.entries[i][j] for j in range(self.size)] for i in range(self.size)],
            tag,
        )

    def __sub__(self, other: "GenMatForm") -> "GenMatForm":
        return self + (-other)

    def __neg__(self) -> "GenMatForm":
        return self.map_entries(lambda e: -e)

    def scaled(self, s) -> "GenMatForm":
        return self.map_entries(lambda e: e.scaled(s))

    def mat_wedge(self, other: "GenMatForm") -> "GenMatForm":
        n = self.size
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = GenForm.zero(self.chart, self.degree + other.degree)
                for k in range(n):
                    acc = acc + gf_wedge(self.entries[i][k], other.entries[k][j])
                row.append(acc)
            out.append(row)
        return GenMatForm(self.chart, self.degree + other.degree, out, "none")

    def mat_d(self) -> "GenMatForm":
        return GenMatForm(self.chart, self.degree + 1, [[gf_d(e) for e in row] for row in self.entries], "none")

    def mat_vec(self, vec: Sequence[GenForm]) -> list[GenForm]:
        out_deg = self.degree + vec[0].degree
        out = []
        for i in range(self.size):
            acc = GenForm.zero(self.chart, out_deg)
            for k in range(self.size):
                acc = acc + gf_wedge(self.entries[i][k], vec[k])
            out.append(acc)
        return out

    def transpose(self) -> "GenMatForm":
        n = self.size
        return GenMatForm(self.chart, self.degree, [[self.entries[j][i] for j in range(n)] for i in range(n)], "none")

    def gconj(self) -> "GenMatForm":
        return self.map_entries(gf_conj)

    def trace(self) -> GenForm:
        acc = GenForm.zero(self.chart, self.degree)
        for i in range(self.size):
            acc = acc + self.entries[i][i]
        return acc

    def zero_verdict(self, policy: SamplingPolicy | None = None) -> ZeroVerdict:
        return combine_verdicts(e.zero_verdict(policy) for row in self.entries for e in row)

    def check_so(self, eta: FrameMetric, policy: SamplingPolicy | None = None) -> ZeroVerdict:
        verdicts = []
        for a in range(self.size):
            for b in range(a, self.size):
                lowered = self.entries[a][b].scaled(eta.diag[a]) + self.entries[b][a].scaled(eta.diag[b])
                verdicts.append(lowered.zero_verdict(policy))
        return combine_verdicts(verdicts)

    def __repr__(self) -> str:
        return "[" + ",\n ".join(repr(row) for row in self.entries) + "]"


def gen_identity(chart: Chart, size: int) -> GenMatForm:
    one = GenForm.from_scalar(chart, 1)
    zero = GenForm.zero(chart, 0, NType.N1)
    return GenMatForm(chart, 0, [[one if i == j else zero for j in range(size)] for i in range(size)])


def gen_mat_from_ordinary(m: MatOrdForm, ntype: NType = NType.N1) -> GenMatForm:
    tag = m.tag
    return GenMatForm(m.chart, m.degree, [[GenForm.from_ordinary(e, ntype) for e in row] for row in m.entries], tag)


def gen_mat_inverse_deg0(L: GenMatForm) -> GenMatForm:
    """Inverse of a degree-0 generalized matrix whose ordinary part is an
    invertible scalar matrix.  The generalized remainder is nilpotent
    (cubes of the minus-one directions vanish), so a finite Neumann series
    is exact; the result is verified by multiplication."""
    n = L.size
    chart = L.chart
    for row in L.entries:
        for e in row:
            if e.degree != 0:
                raise ValueError("inverse needs a degree-0 matrix")
            if not e.pi.degree == 0:
                raise ValueError("bad component degrees")
    L0 = sp.Matrix([[L.entries[i][j].pi.coeff(()).re + sp.I * L.entries[i][j].pi.coeff(()).im for j in range(n)] for i in range(n)])
    L0inv = L0.inv()

    def scal(expr) -> ScalarExpr:
        re, im = expr.as_real_imag()
        return ScalarExpr(sp.cancel(re), sp.cancel(im))

    L0inv_s = [[scal(L0inv[i, j]) for j in range(n)] for i in range(n)]
    ident = gen_identity(chart, n)
    # K = L - L0 has only m/mbar/mmbar components
    K = GenMatForm(
        chart,
        0,
        [
            [GenForm(chart, 0, None, L.entries[i][j].pi1, L.entries[i][j].pi2, L.entries[i][j].pitop) for j in range(n)]
            for i in range(n)
        ],
    )
    # N = L0^-1 K
    N_rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = GenForm.zero(chart, 0)
            for k in range(n):
                acc = acc + K.entries[k][j].scaled(L0inv_s[i][k])
            row.append(acc)
        N_rows.append(row)
    N = GenMatForm(chart, 0, N_rows)
    N2 = N.mat_wedge(N)
    series = ident - N + N2
    out_rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = GenForm.zero(chart, 0)
            for k in range(n):
                acc = acc + series.entries[i][k].scaled(L0inv_s[k][j])
            row.append(acc)
        out_rows.append(row)
    inv = GenMatForm(chart, 0, out_rows)
    check = inv.mat_wedge(L) - gen_identity(chart, n)
    v = check.zero_verdict()
    if v.kind != Verdict.PROVEN_ZERO:
        raise ValueError(f"inverse verification failed: {v}")
    return inv
