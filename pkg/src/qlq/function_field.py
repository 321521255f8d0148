"""Scalar extension to function fields of quasilinear quadrics.

For an anisotropic form psi = <1> _|_ psi' (after scaling by the inverse of
the first entry), the function field of {psi = 0} is a purely transcendental
extension by dim(psi) - 1 variables followed by one inseparable square root
of the generic value psi'(T).  Isotropy over that field is computed without
ever adjoining the square root:

    2 * i0(phi over F(psi)) = i0(<<psi'(T)>> tensor phi over F(T)).

Only anis_over actually builds the square-root extension, because a concrete
form over F(psi) is needed for splitting-tower iteration.
"""

from __future__ import annotations

from . import forms, linalg2
from .field_tower import embed, extend_rational, extend_sqrt
from .forms import QuasilinearForm


class SplitForm(ValueError):
    pass


class QuadricExtension:
    """The tower F(V_psi') plus the square root of the generic value."""

    __slots__ = ("base", "psi", "rational", "result", "generic_value", "tvars")

    def __init__(self, base, psi, rational, result, generic_value, tvars):
        self.base = base
        self.psi = psi
        self.rational = rational          # purely transcendental part
        self.result = result              # with the square root adjoined
        self.generic_value = generic_value
        self.tvars = tvars


def _scaled_subform(psi, mode=None):
    """Scale so the first entry is 1; return the remaining entries."""
    first = psi.entries[0]
    if first.is_zero():
        raise SplitForm("form has a zero entry, hence is isotropic")
    inv = first.inv()
    return [inv * e for e in psi.entries[1:]]


def generic_value_over(psi, mode=None):
    """Rational extension K(T_1..T_{n-1}) and the generic value psi'(T)."""
    K = psi.tower
    n = psi.dim
    if n < 2:
        raise SplitForm("dim >= 2 required for a quadric function field")
    KT = extend_rational(K, n - 1)
    tvars = [KT.rational_var(K.m + j) for j in range(n - 1)]
    rest = _scaled_subform(psi)
    gv = KT.zero()
    for a, tv in zip(rest, tvars):
        gv = gv + embed(a, KT) * tv * tv
    return KT, gv, tvars


def quadric_function_field(K, psi, mode=None):
    """Construct F(psi) for psi anisotropic of dimension >= 2 over K."""
    if not forms.is_anisotropic(psi, mode):
        raise SplitForm("form must be anisotropic")
    KT, gv, tvars = generic_value_over(psi, mode)
    result = extend_sqrt(KT, gv)
    return QuadricExtension(K, psi, KT, result, gv, tvars)


def i0_over(phi, psi, mode=None):
    """Isotropy index of phi over F(psi), via the rational extension only."""
    KT, gv, _ = generic_value_over(psi, mode)
    lifted = [embed(e, KT) for e in phi.entries]
    doubled = QuasilinearForm(KT, tuple(lifted) + tuple(gv * e for e in lifted))
    i0 = forms.isotropy_index(doubled, mode)
    if i0 % 2:
        # the doubled form is <<gv>>-divisible, so its index must be even;
        # an odd value can only be a randomized under-report
        i0 = forms.isotropy_index(
            QuasilinearForm(KT, doubled.entries), linalg2.RankMode.exact())
        if i0 % 2:
            raise ArithmeticError("odd isotropy index for a doubled form")
    half = i0 // 2
    if 2 * half > phi.dim:
        raise ArithmeticError("isotropy exceeds half the dimension")
    return half


def anis_over(phi, psi, mode=None):
    """Anisotropic part of phi over F(psi), as a concrete form over F(psi)."""
    ext = quadric_function_field(psi.tower, psi, mode)
    lifted = QuasilinearForm(
        ext.result, tuple(embed(e, ext.result) for e in phi.entries))
    out = forms.anisotropic_part(lifted, mode)
    return out, ext


def d_over(phi, psi, mode=None):
    """Isotropy defect dim(phi) - 2*i0 over F(psi)."""
    return phi.dim - 2 * i0_over(phi, psi, mode)
