"""Exact symbolic scalar layer.

Complex scalars are stored as an ordered pair of real sympy expressions,
so conjugation and realness checks never depend on sympy's complex
assumption engine.  The zero test is a semi-decision with a fixed rewrite
set: rational normalization (cancel), sin^2+cos^2 -> 1, and elimination of
radicals / rational powers / exponentials by fresh generators reduced
modulo their defining polynomial relations (Groebner normal form).  A
sampling fallback handles whatever the rewrite set does not decide.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from math import gcd
from random import Random
from typing import Callable, Iterable, Mapping, Sequence

import sympy as sp

__all__ = [
    "ScalarExpr",
    "Verdict",
    "ZeroVerdict",
    "SamplingPolicy",
    "Assumptions",
    "DomainEvalError",
    "ExprSyntaxError",
    "UnknownSymbolError",
    "SamplingError",
    "make_symbol",
    "parse_scalar",
    "canon",
    "is_zero",
    "is_zero_expr",
    "eval_at",
    "diff",
    "combine_verdicts",
]


class ExprSyntaxError(ValueError):
    """Raised on malformed expression text; carries line/column."""

    def __init__(self, message: str, line: int = 1, col: int = 0):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnknownSymbolError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unknown symbol '{name}'")
        self.name = name


class DomainEvalError(ArithmeticError):
    """Division by zero or a negative radicand under the real-evaluation policy."""


class SamplingError(RuntimeError):
    """No sample point satisfying the declared assumptions was found."""


def make_symbol(name: str) -> sp.Symbol:
    """Chart coordinates and parameters are plain real symbols; range
    information lives in Assumptions, never in the symbol itself."""
    return sp.Symbol(name, real=True)


# ---------------------------------------------------------------------------
# complex scalars as Re/Im pairs
# ---------------------------------------------------------------------------


def _sympify_real(v) -> sp.Expr:
    e = sp.sympify(v)
    if e.has(sp.I):
        raise ValueError("real part/imag part must be real expressions; use ScalarExpr for complex values")
    return e


@dataclass(frozen=True)
class ScalarExpr:
    """Exact complex scalar: a pair of real sympy expressions."""

    re: sp.Expr
    im: sp.Expr = sp.S.Zero

    @staticmethod
    def of(re, im=0) -> "ScalarExpr":
        return ScalarExpr(_sympify_real(re), _sympify_real(im))

    @staticmethod
    def zero() -> "ScalarExpr":
        return _ZERO

    @staticmethod
    def one() -> "ScalarExpr":
        return _ONE

    @staticmethod
    def i() -> "ScalarExpr":
        return _I

    # -- structure ----------------------------------------------------

    @property
    def is_structurally_zero(self) -> bool:
        return self.re is sp.S.Zero and self.im is sp.S.Zero or (self.re == 0 and self.im == 0)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def free_symbols(self) -> set:
        return set(self.re.free_symbols) | set(self.im.free_symbols)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other) -> "ScalarExpr":
        o = _coerce(other)
        return ScalarExpr(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other) -> "ScalarExpr":
        o = _coerce(other)
        return ScalarExpr(self.re - o.re, self.im - o.im)

    def __rsub__(self, other) -> "ScalarExpr":
        return _coerce(other).__sub__(self)

    def __neg__(self) -> "ScalarExpr":
        return ScalarExpr(-self.re, -self.im)

    def __mul__(self, other) -> "ScalarExpr":
        o = _coerce(other)
        if self.im == 0 and o.im == 0:
            return ScalarExpr(self.re * o.re, sp.S.Zero)
        return ScalarExpr(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScalarExpr":
        o = _coerce(other)
        if o.im == 0:
            return ScalarExpr(self.re / o.re, self.im / o.re)
        den = o.re**2 + o.im**2
        return ScalarExpr(
            (self.re * o.re + self.im * o.im) / den,
            (self.im * o.re - self.re * o.im) / den,
        )

    def __rtruediv__(self, other) -> "ScalarExpr":
        return _coerce(other).__truediv__(self)

    def __pow__(self, k) -> "ScalarExpr":
        if isinstance(k, sp.Rational) and not isinstance(k, sp.Integer):
            if self.im != 0:
                raise ValueError("rational powers require a real base")
            return ScalarExpr(sp.Pow(self.re, k))
        k = int(k)
        if k < 0:
            return (_ONE / self) ** (-k)
        out = _ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "ScalarExpr":
        return ScalarExpr(self.re, -self.im)

    # -- real-only function application --------------------------------

    def _real_fn(self, fn, name: str) -> "ScalarExpr":
        if self.im != 0:
            raise ValueError(f"{name} is only defined for real subexpressions here")
        return ScalarExpr(fn(self.re))

    def sqrt(self) -> "ScalarExpr":
        return self._real_fn(sp.sqrt, "sqrt")

    def sin(self) -> "ScalarExpr":
        return self._real_fn(sp.sin, "sin")

    def cos(self) -> "ScalarExpr":
        return self._real_fn(sp.cos, "cos")

    def exp(self) -> "ScalarExpr":
        return self._real_fn(sp.exp, "exp")

    def diff(self, x: sp.Symbol) -> "ScalarExpr":
        return ScalarExpr(sp.diff(self.re, x), sp.diff(self.im, x))

    def canon(self) -> "ScalarExpr":
        return ScalarExpr(canon(self.re), canon(self.im))

    def __repr__(self) -> str:
        if self.im == 0:
            return f"{self.re}"
        return f"({self.re}) + ({self.im})*i"


_ZERO = ScalarExpr(sp.S.Zero, sp.S.Zero)
_ONE = ScalarExpr(sp.S.One, sp.S.Zero)
_I = ScalarExpr(sp.S.Zero, sp.S.One)


def _coerce(v) -> ScalarExpr:
    if isinstance(v, ScalarExpr):
        return v
    return ScalarExpr(_sympify_real(v))


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------


class Verdict(Enum):
    PROVEN_ZERO = "ProvenZero"
    PROVEN_NONZERO = "ProvenNonZero"
    NUMERICALLY_ZERO = "NumericallyZero"
    NUMERICALLY_NONZERO = "NumericallyNonzero"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ZeroVerdict:
    kind: Verdict
    samples: int = 0
    max_abs: float = 0.0

    @property
    def is_zero_verdict(self) -> bool:
        return self.kind in (Verdict.PROVEN_ZERO, Verdict.NUMERICALLY_ZERO)

    @property
    def is_nonzero_verdict(self) -> bool:
        return self.kind in (Verdict.PROVEN_NONZERO, Verdict.NUMERICALLY_NONZERO)

    @property
    def proven(self) -> bool:
        return self.kind in (Verdict.PROVEN_ZERO, Verdict.PROVEN_NONZERO)

    def __str__(self) -> str:
        if self.kind in (Verdict.NUMERICALLY_ZERO, Verdict.NUMERICALLY_NONZERO):
            return f"{self.kind.value}(samples={self.samples}, maxAbs={self.max_abs:.3g})"
        return self.kind.value


PROVEN_ZERO = ZeroVerdict(Verdict.PROVEN_ZERO)
PROVEN_NONZERO = ZeroVerdict(Verdict.PROVEN_NONZERO)
INCONCLUSIVE = ZeroVerdict(Verdict.INCONCLUSIVE)

_RANK = {
    Verdict.PROVEN_ZERO: 0,
    Verdict.NUMERICALLY_ZERO: 1,
    Verdict.INCONCLUSIVE: 2,
    Verdict.NUMERICALLY_NONZERO: 3,
    Verdict.PROVEN_NONZERO: 4,
}


def combine_verdicts(verdicts: Iterable[ZeroVerdict]) -> ZeroVerdict:
    """Aggregate verdicts for a compound object that is zero iff every part is.

    Any nonzero part makes the whole nonzero; otherwise the weakest zero
    evidence wins (ProvenZero < NumericallyZero < Inconclusive).
    """
    out = PROVEN_ZERO
    for v in verdicts:
        if v.is_nonzero_verdict:
            return v
        if _RANK[v.kind] > _RANK[out.kind]:
            out = v
    return out


@dataclass(frozen=True)
class SamplingPolicy:
    seed: int = 0
    n_samples: int = 10
    tol: float = 1e-9
    nonzero_tol: float = 1e-6
    max_retries: int = 40


# ---------------------------------------------------------------------------
# assumptions and sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Assumptions:
    """Declared strict inequalities between symbols and expressions.

    Drives sampling ranges and the positivity hints attached to radical
    and trig generators during the symbolic zero test.
    """

    relations: tuple[sp.core.relational.Relational, ...] = ()

    @staticmethod
    def empty() -> "Assumptions":
        return _NO_ASSUMPTIONS

    def __iter__(self):
        return iter(self.relations)

    def merged(self, other: "Assumptions") -> "Assumptions":
        if not other.relations:
            return self
        if not self.relations:
            return other
        return Assumptions(tuple(dict.fromkeys(self.relations + other.relations)))

    def bounds_for(self, sym: sp.Symbol) -> tuple[list[sp.Expr], list[sp.Expr]]:
        """Lower and upper bound expressions declared directly for sym."""
        lows: list[sp.Expr] = []
        highs: list[sp.Expr] = []
        for rel in self.relations:
            lhs, rhs = rel.lhs, rel.rhs
            if isinstance(rel, sp.StrictGreaterThan) or isinstance(rel, sp.GreaterThan):
                pass
            elif isinstance(rel, (sp.StrictLessThan, sp.LessThan)):
                lhs, rhs = rhs, lhs
            else:
                continue
            # now lhs > rhs
            if lhs == sym:
                lows.append(rhs)
            if rhs == sym:
                highs.append(lhs)
        return lows, highs

    def implies_positive(self, expr: sp.Expr) -> bool:
        """True when the declared bounds directly force expr > 0."""
        if expr.is_positive:
            return True
        if isinstance(expr, sp.Symbol):
            lows, _ = self.bounds_for(expr)
            for lo in lows:
                if lo.is_nonnegative:
                    return True
                if isinstance(lo, sp.Symbol) and self.implies_positive(lo):
                    return True
            return False
        if isinstance(expr, sp.Mul):
            return all(self.implies_positive(f) for f in expr.args)
        if isinstance(expr, sp.Pow):
            return self.implies_positive(expr.base)
        return False

    def interval_in(self, sym: sp.Symbol, lo, hi) -> bool:
        """True when the declared bounds confine sym to [lo, hi]."""
        lows, highs = self.bounds_for(sym)
        ok_lo = any((b - lo).is_nonnegative for b in lows)
        ok_hi = any((hi - b).is_nonnegative for b in highs)
        return ok_lo and ok_hi

    def sample_point(self, symbols: Sequence[sp.Symbol], rng: Random, max_retries: int = 40) -> dict:
        """Random assignment respecting the declared strict inequalities."""
        syms = list(symbols)
        for rel in self.relations:
            for s in rel.free_symbols:
                if s not in syms:
                    syms.append(s)
        order = _dependency_order(syms, self)
        for _ in range(max_retries):
            assignment: dict = {}
            ok = True
            for s in order:
                lo, hi = -4.0, 4.0
                lows, highs = self.bounds_for(s)
                try:
                    for b in lows:
                        lo = max(lo, float(b.subs(assignment)))
                    for b in highs:
                        hi = min(hi, float(b.subs(assignment)))
                except TypeError:
                    ok = False
                    break
                if not (hi > lo):
                    ok = False
                    break
                margin = 0.05 * (hi - lo)
                assignment[s] = rng.uniform(lo + margin, hi - margin)
            if not ok:
                continue
            if all(_rel_holds(rel, assignment) for rel in self.relations):
                return assignment
        raise SamplingError("could not find a sample point satisfying the assumptions")


_NO_ASSUMPTIONS = Assumptions()


def _rel_holds(rel, assignment) -> bool:
    try:
        v = rel.subs(assignment)
    except Exception:
        return False
    return bool(v)


def _dependency_order(symbols: Sequence[sp.Symbol], assumptions: Assumptions) -> list[sp.Symbol]:
    remaining = list(symbols)
    deps = {}
    for s in remaining:
        lows, highs = assumptions.bounds_for(s)
        d = set()
        for b in lows + highs:
            d |= set(b.free_symbols)
        deps[s] = d & set(remaining)
    out: list[sp.Symbol] = []
    while remaining:
        progressed = False
        for s in list(remaining):
            if deps[s] <= set(out):
                out.append(s)
                remaining.remove(s)
                progressed = True
        if not progressed:
            out.extend(remaining)  # cyclic bounds: fall back to rejection
            break
    return out


# ---------------------------------------------------------------------------
# symbolic zero proof: generator elimination + Groebner normal form
# ---------------------------------------------------------------------------


_SPECIAL_FUNCS = (sp.sin, sp.cos, sp.exp)


def _needs_translation(e: sp.Expr) -> bool:
    if e.has(*_SPECIAL_FUNCS):
        return True
    return any(p.exp.is_Rational and not p.exp.is_Integer for p in e.atoms(sp.Pow))


def _is_denominator_free(e: sp.Expr) -> bool:
    return all(p.exp.is_Integer and p.exp > 0 for p in e.atoms(sp.Pow))


class _GeneratorTable:
    """Maps sin/cos/exp/rational-power atoms to fresh generators with
    polynomial side relations."""

    def __init__(self, assumptions: Assumptions):
        self.assumptions = assumptions
        self.trig: dict[sp.Expr, tuple[sp.Symbol, sp.Symbol]] = {}
        self.exps: dict[sp.Expr, sp.Symbol] = {}
        # base -> [denominator q, generator symbol for base**(1/q)]
        self.roots: dict[sp.Expr, list] = {}
        self.upgraded = False

    def trig_pair(self, arg: sp.Expr) -> tuple[sp.Symbol, sp.Symbol]:
        key = sp.cancel(arg)
        if key not in self.trig:
            n = len(self.trig)
            sin_pos = False
            if isinstance(key, sp.Symbol):
                sin_pos = self.assumptions.interval_in(key, sp.S.Zero, sp.pi)
            s = sp.Dummy(f"gsin{n}", real=True, positive=True if sin_pos else None)
            c = sp.Dummy(f"gcos{n}", real=True)
            self.trig[key] = (s, c)
        return self.trig[key]

    def exp_gen(self, arg: sp.Expr) -> sp.Symbol:
        key = sp.cancel(arg)
        if key not in self.exps:
            self.exps[key] = sp.Dummy(f"gexp{len(self.exps)}", positive=True)
        return self.exps[key]

    def root_power(self, base: sp.Expr, exponent: sp.Rational) -> sp.Expr:
        """base**exponent with non-integer rational exponent, as an integer
        power of the base's root generator."""
        key = sp.cancel(sp.together(base))
        q = int(exponent.q)
        ent = self.roots.get(key)
        if ent is None:
            ent = [q, sp.Dummy(f"grt{len(self.roots)}", positive=True)]
            self.roots[key] = ent
        elif ent[0] % q != 0:
            new_q = ent[0] * q // gcd(ent[0], q)
            ent[0] = new_q
            ent[1] = sp.Dummy(f"grt{len(self.roots)}_{new_q}", positive=True)
            self.upgraded = True
        k = int(exponent.p) * (ent[0] // q)
        return sp.Pow(ent[1], k)

    def relations(self) -> list[sp.Expr]:
        rels = []
        for s, c in self.trig.values():
            rels.append(s**2 + c**2 - 1)
        for base, (q, t) in self.roots.items():
            num, den = sp.fraction(base)
            rels.append(sp.expand(den * t**q - num))
        return rels

    def generators(self) -> list[sp.Symbol]:
        gens: list[sp.Symbol] = []
        for s, c in self.trig.values():
            gens.extend((s, c))
        gens.extend(self.exps.values())
        gens.extend(t for _, t in self.roots.values())
        return gens

    def backmap(self) -> dict:
        back: dict = {}
        for arg, (s, c) in self.trig.items():
            back[s] = sp.sin(arg)
            back[c] = sp.cos(arg)
        for arg, e in self.exps.items():
            back[e] = sp.exp(arg)
        for base, (q, t) in self.roots.items():
            back[t] = sp.Pow(base, sp.Rational(1, q))
        return back


def _translate(e: sp.Expr, table: _GeneratorTable) -> sp.Expr:
    """Rewrite e over the extended generator set. Two passes are avoided by
    letting root generators upgrade; callers must re-run until stable."""
    if e.is_Atom:
        return e
    if isinstance(e, (sp.sin, sp.cos)):
        arg = _translate(e.args[0], table)
        s, c = table.trig_pair(arg)
        return s if isinstance(e, sp.sin) else c
    if isinstance(e, sp.exp):
        arg = sp.expand(_translate(e.args[0], table))
        out = sp.S.One
        for term in sp.Add.make_args(arg):
            coeff, rest = term.as_coeff_Mul()
            if coeff.is_Rational and coeff != 0:
                g = table.exp_gen(rest)
                if coeff.is_Integer:
                    out *= sp.Pow(g, int(coeff))
                else:
                    out *= table.root_power(g, coeff)
            elif term != 0:
                out *= table.exp_gen(term)
        return out
    if isinstance(e, sp.Pow):
        base = _translate(e.base, table)
        ex = e.exp
        if ex.is_Rational and not ex.is_Integer:
            return table.root_power(base, ex)
        if ex.is_Integer:
            return sp.Pow(base, ex)
        # symbolic exponent: treat the whole power as exp(ex*log) is out of
        # scope for the grammar; keep it opaque
        return sp.Pow(base, _translate(ex, table))
    return e.func(*[_translate(a, table) for a in e.args])


@lru_cache(maxsize=None)
def _groebner_cached(rel_key: tuple, gen_key: tuple):
    return sp.groebner(list(rel_key), *gen_key, order="grevlex")


def _normal_form(e: sp.Expr, assumptions: Assumptions) -> tuple[sp.Expr, sp.Expr, dict]:
    """(numerator NF, denominator NF, backmap): e == num/den modulo the
    generator relations, with num in Groebner normal form."""
    if not _needs_translation(e):
        if _is_denominator_free(e):
            return sp.expand(e), sp.S.One, {}
        num, den = sp.fraction(sp.cancel(e))
        return sp.expand(num), sp.expand(den), {}
    table = _GeneratorTable(assumptions)
    t = _translate(e, table)
    for _ in range(4):  # root upgrades invalidate earlier translations
        if not table.upgraded:
            break
        table.upgraded = False
        t = _translate(e, table)
    rat = sp.cancel(sp.together(t))
    num, den = sp.fraction(rat)
    num = sp.expand(num)
    den = sp.expand(den)
    rels = table.relations()
    if rels and num.free_symbols:
        gens = table.generators()
        ring_syms = sorted(
            (num.free_symbols | den.free_symbols | {s for r in rels for s in r.free_symbols}),
            key=sp.default_sort_key,
        )
        # generator symbols must lead the order so relations eliminate them
        lead = [g for g in gens if g in ring_syms]
        rest = [s for s in ring_syms if s not in lead]
        order = tuple(lead + rest)
        G = _groebner_cached(tuple(rels), order)
        num = sp.expand(sp.reduced(num, G)[1])
        if den.free_symbols:
            den_nf = sp.expand(sp.reduced(den, G)[1])
            if den_nf != 0:
                den = den_nf
    return num, den, table.backmap()


@lru_cache(maxsize=None)
def _canon_cached(e: sp.Expr, assumptions: Assumptions) -> sp.Expr:
    if e.is_Number:
        return e
    num, den, back = _normal_form(e, assumptions)
    if num == 0:
        return sp.S.Zero
    out = sp.cancel(num / den)
    if back:
        out = out.xreplace(back)
    return out


def canon(e, assumptions: Assumptions = _NO_ASSUMPTIONS) -> sp.Expr:
    """Canonical form: unique for rational functions; radical/trig/exp
    handled by the fixed rewrite set."""
    return _canon_cached(sp.sympify(e), assumptions)


@lru_cache(maxsize=None)
def _prove_zero(e: sp.Expr, assumptions: Assumptions):
    """Returns True (zero), False (nonzero) or None (undecided)."""
    if e.is_Number:
        return e == 0
    num, den, _ = _normal_form(e, assumptions)
    if num == 0:
        return True
    if num.is_Number:
        return False
    factored = sp.factor(num)
    nz = factored.is_nonzero
    if nz is True:
        return False
    if isinstance(factored, (sp.Mul, sp.Pow, sp.Symbol)):
        factors = factored.args if isinstance(factored, sp.Mul) else (factored,)
        if all(_factor_nonzero(f, assumptions) for f in factors):
            return False
    return None


def _factor_nonzero(f: sp.Expr, assumptions: Assumptions) -> bool:
    if f.is_Number:
        return f != 0
    if isinstance(f, sp.Pow):
        return _factor_nonzero(f.base, assumptions)
    if isinstance(f, sp.Symbol):
        if f.is_positive:
            return True
        return assumptions.implies_positive(f)
    if f.is_nonzero is True:
        return True
    return False


def _eval_real(e: sp.Expr, point: Mapping) -> float:
    v = e.evalf(subs=point, chop=False)
    if v.has(sp.zoo, sp.oo, -sp.oo, sp.nan):
        raise DomainEvalError(f"singular evaluation of {e}")
    if not v.is_real:
        c = complex(v)
        if abs(c.imag) > 1e-12 * (1 + abs(c.real)):
            raise DomainEvalError(f"non-real value {v} for {e} (negative radicand?)")
        return c.real
    return float(v)


def is_zero_expr(
    e: sp.Expr,
    policy: SamplingPolicy | None = None,
    assumptions: Assumptions = _NO_ASSUMPTIONS,
) -> ZeroVerdict:
    """Zero test for one real sympy expression."""
    proof = _prove_zero(sp.sympify(e), assumptions)
    if proof is True:
        return PROVEN_ZERO
    if proof is False:
        return PROVEN_NONZERO
    if policy is None:
        return INCONCLUSIVE
    rng = Random(policy.seed)
    syms = sorted(e.free_symbols, key=sp.default_sort_key)
    values = []
    attempts = 0
    while len(values) < policy.n_samples and attempts < policy.max_retries:
        attempts += 1
        try:
            point = assumptions.sample_point(syms, rng, policy.max_retries)
            values.append(abs(_eval_real(e, point)))
        except (DomainEvalError, SamplingError):
            continue
    if len(values) < policy.n_samples:
        return INCONCLUSIVE
    worst = max(values)
    if worst < policy.tol:
        return ZeroVerdict(Verdict.NUMERICALLY_ZERO, samples=len(values), max_abs=worst)
    if min(values) > policy.nonzero_tol:
        return ZeroVerdict(Verdict.NUMERICALLY_NONZERO, samples=len(values), max_abs=worst)
    return INCONCLUSIVE


def is_zero(
    e: ScalarExpr | sp.Expr,
    policy: SamplingPolicy | None = None,
    assumptions: Assumptions = _NO_ASSUMPTIONS,
) -> ZeroVerdict:
    """Tri-state zero test; a complex scalar is zero iff both parts are."""
    if isinstance(e, ScalarExpr):
        return combine_verdicts(
            (
                is_zero_expr(e.re, policy, assumptions),
                is_zero_expr(e.im, policy, assumptions),
            )
        )
    return is_zero_expr(e, policy, assumptions)


# ---------------------------------------------------------------------------
# evaluation and differentiation
# ---------------------------------------------------------------------------


def eval_at(e: ScalarExpr | sp.Expr, point: Mapping) -> complex:
    """IEEE-double evaluation of both parts at a full assignment."""
    s = e if isinstance(e, ScalarExpr) else ScalarExpr(_sympify_real(e))
    missing = {str(f) for f in s.free_symbols()} - {str(k) for k in point}
    if missing:
        raise UnknownSymbolError(sorted(missing)[0])
    named = {str(k): v for k, v in point.items()}
    re_v = _eval_real(s.re.subs({f: named[str(f)] for f in s.re.free_symbols}), {})
    im_v = _eval_real(s.im.subs({f: named[str(f)] for f in s.im.free_symbols}), {})
    return complex(re_v, im_v)


def diff(e: ScalarExpr, x: sp.Symbol, chart_coords: Sequence[sp.Symbol] | None = None) -> ScalarExpr:
    """Partial derivative; rejects differentiation in a non-chart symbol."""
    if chart_coords is not None and x not in chart_coords:
        raise UnknownSymbolError(str(x))
    return e.diff(x)


# ---------------------------------------------------------------------------
# expression grammar
# ---------------------------------------------------------------------------

_FUNCTIONS: dict[str, Callable[[ScalarExpr], ScalarExpr]] = {
    "sqrt": ScalarExpr.sqrt,
    "sin": ScalarExpr.sin,
    "cos": ScalarExpr.cos,
    "exp": ScalarExpr.exp,
}

_BUILTIN_CONSTANTS = {"pi": ScalarExpr(sp.pi)}


def parse_scalar(text: str, names: Mapping[str, sp.Symbol]) -> ScalarExpr:
    """Parse the shared expression grammar.

    identifiers, integer and p/q rational literals, + - * / ^, the functions
    sqrt sin cos exp, the imaginary unit literal i, and the constant pi.
    """
    prepared = text.replace("^", "**")

    def fix_col(col: int, line: int) -> int:
        src_line = text.splitlines()[line - 1] if text.splitlines() else text
        carets = src_line[: min(col, len(src_line))].count("^")
        return max(col - carets, 0)

    try:
        tree = ast.parse(prepared, mode="eval")
    except SyntaxError as exc:
        raise ExprSyntaxError(f"syntax error: {exc.msg}", exc.lineno or 1, fix_col(exc.offset or 0, exc.lineno or 1)) from None

    def err(node, msg) -> ExprSyntaxError:
        line = getattr(node, "lineno", 1)
        col = fix_col(getattr(node, "col_offset", 0), line)
        return ExprSyntaxError(msg, line, col)

    def walk(node) -> ScalarExpr:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, int):
                return ScalarExpr(sp.Integer(node.value))
            raise err(node, "only integer and p/q rational literals are allowed")
        if isinstance(node, ast.Name):
            if node.id == "i":
                return _I
            if node.id in _BUILTIN_CONSTANTS:
                return _BUILTIN_CONSTANTS[node.id]
            if node.id in names:
                return ScalarExpr(names[node.id])
            raise UnknownSymbolError(node.id)
        if isinstance(node, ast.UnaryOp):
            v = walk(node.operand)
            if isinstance(node.op, ast.USub):
                return -v
            if isinstance(node.op, ast.UAdd):
                return v
            raise err(node, "unsupported unary operator")
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                base = walk(node.left)
                expnt = walk(node.right)
                if expnt.im != 0 or not expnt.re.is_Rational:
                    raise err(node, "exponent must be an integer or p/q rational literal")
                return base ** sp.Rational(expnt.re)
            a, b = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
            raise err(node, "unsupported operator")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCTIONS:
                raise err(node, "unknown function (allowed: sqrt sin cos exp)")
            if len(node.args) != 1 or node.keywords:
                raise err(node, f"{node.func.id} takes exactly one argument")
            return _FUNCTIONS[node.func.id](walk(node.args[0]))
        raise err(node, f"unsupported syntax ({type(node).__name__})")

    return walk(tree)
