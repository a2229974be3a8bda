"""gfcalc: symbolic exterior calculus for generalized differential forms.

Ordinary p-forms, type N=1/N=2 generalized forms (with the degree -1
generators m, mbar), generalized Cartan structure equations, flat-connection
representations of metrics, the two-component spinor layer for Lorentzian
four-metrics, and the flat type N=2 encoding of Ricci flatness.
"""

from .symexpr import (
    Assumptions,
    SamplingPolicy,
    ScalarExpr,
    Verdict,
    ZeroVerdict,
    canon,
    eval_at,
    is_zero,
    make_symbol,
    parse_scalar,
)

__version__ = "0.1.0"
