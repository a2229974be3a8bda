"""Brute-force monomial multiplier for generalized forms.

Independent of the component-display transcription in genforms: a form is
split into (word, ordinary-coefficient) monomials over the free words in
the degree -1 generators, and products are normalized purely by graded
commutativity (a generator crossing an ordinary q-form costs (-1)^q, two
distinct generators anticommute, repeated generators annihilate).  Kept
permanently as the sign oracle for gf_wedge.
"""

from __future__ import annotations

from .forms import OrdForm, wedge
from .genforms import GenForm, NType

__all__ = ["bruteforce_wedge"]

_M = "m"
_MB = "mb"

_WORD_TO_SLOT = {(): 0, (_M,): 1, (_MB,): 2, (_M, _MB): 3}


def _monomials(a: GenForm) -> list[tuple[tuple[str, ...], OrdForm]]:
    out = []
    for word, comp in zip(((), (_M,), (_MB,), (_M, _MB)), a.components()):
        if not comp.is_structurally_zero:
            out.append((word, comp))
    return out


def _normalize_word(word: tuple[str, ...]) -> tuple[int, tuple[str, ...]]:
    """Sort generators to (m, mb) order by adjacent transpositions."""
    letters = list(word)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(letters) - 1):
            if letters[i] == letters[i + 1]:
                return 0, ()
            if letters[i] == _MB and letters[i + 1] == _M:
                letters[i], letters[i + 1] = letters[i + 1], letters[i]
                sign = -sign
                changed = True
    return sign, tuple(letters)


def bruteforce_wedge(a: GenForm, b: GenForm) -> GenForm:
    chart = a.chart
    degree = a.degree + b.degree
    slots: list[OrdForm | None] = [None, None, None, None]
    for wa, ca in _monomials(a):
        for wb, cb in _monomials(b):
            # move the word wa (len(wa) odd generators) through cb
            sign = (-1) ** (len(wa) * cb.degree)
            wsign, word = _normalize_word(wa + wb)
            if wsign == 0:
                continue
            sign *= wsign
            coeff = wedge(ca, cb)
            if sign < 0:
                coeff = -coeff
            slot = _WORD_TO_SLOT[word]
            slots[slot] = coeff if slots[slot] is None else slots[slot] + coeff
    ntype = NType.N1 if (a.ntype is NType.N1 and b.ntype is NType.N1) else NType.N2
    out = GenForm(chart, degree, slots[0], slots[1], slots[2], slots[3], NType.N2)
    if ntype is NType.N1 and out.pi1 == out.pi2 and out.pitop.is_structurally_zero:
        out = GenForm(chart, degree, slots[0], slots[1], slots[2], slots[3], NType.N1)
    return out
