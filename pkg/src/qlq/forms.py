"""Diagonal quasilinear quadratic forms and their basic calculus.

A form <a_1,...,a_n> is just its list of diagonal entries over a tower; its
value set D is the L^2-span of the entries, the isotropy index is
n - dim D, and the anisotropic part is the greedy independent sublist of
entries (same value set, hence the same form up to isomorphism).
"""

from __future__ import annotations

from . import linalg2
from .field_tower import TowerMismatch


class ZeroScalar(ValueError):
    pass


class NotASubform(ValueError):
    pass


class QuasilinearForm:
    """Diagonal form over a FieldTower; entries may include zeros."""

    __slots__ = ("tower", "entries", "_i0")

    def __init__(self, tower, entries):
        entries = tuple(entries)
        if not entries:
            raise ValueError("forms need at least one diagonal entry")
        for e in entries:
            if e.owner is not tower and not e.owner.same_presentation(tower):
                raise TowerMismatch("entry from a different tower")
        self.tower = tower
        self.entries = entries
        self._i0 = {}

    @property
    def dim(self):
        return len(self.entries)

    def query(self):
        return linalg2.SquareSpanQuery(list(self.entries), self.tower)

    def text(self):
        return "<%s>" % ", ".join(e.text() for e in self.entries)

    def __repr__(self):
        return "QuasilinearForm(%s)" % self.text()


class WittProfile:
    __slots__ = ("i0", "anis_dim", "d")

    def __init__(self, dim, i0):
        self.i0 = i0
        self.anis_dim = dim - i0
        self.d = dim - 2 * i0


def isotropy_index(form, mode=None):
    """dim of the isotropic subspace: dim - dim_{L^2} span(entries); cached."""
    mode = linalg2._mode(mode)
    key = mode.kind
    if key not in form._i0:
        d = linalg2.span_dim_over_squares(form.query(), mode)
        form._i0[key] = form.dim - int(d)
    return form._i0[key]


def witt_profile(form, mode=None):
    return WittProfile(form.dim, isotropy_index(form, mode))


def is_anisotropic(form, mode=None):
    return isotropy_index(form, mode) == 0


def anisotropic_part(form, mode=None):
    """Greedy independent sublist of the entries; value set is unchanged."""
    nonzero = [e for e in form.entries if not e.is_zero()]
    if not nonzero:
        return QuasilinearForm(form.tower, (form.tower.zero(),))
    idx = linalg2.independent_subset(
        linalg2.SquareSpanQuery(nonzero, form.tower), mode)
    return QuasilinearForm(form.tower, tuple(nonzero[i] for i in idx))


def orth_sum(a, b):
    if a.tower is not b.tower and not a.tower.same_presentation(b.tower):
        raise TowerMismatch("orthogonal sum across towers")
    return QuasilinearForm(a.tower, a.entries + b.entries)


def tensor(a, b):
    if a.tower is not b.tower and not a.tower.same_presentation(b.tower):
        raise TowerMismatch("tensor product across towers")
    return QuasilinearForm(a.tower, tuple(x * y for x in a.entries for y in b.entries))


def scale(c, form):
    if c.is_zero():
        raise ZeroScalar("scaling by zero")
    return QuasilinearForm(form.tower, tuple(c * e for e in form.entries))


def binary(tower, a):
    """<1, a>."""
    return QuasilinearForm(tower, (tower.one(), a))


def pfister(tower, gens):
    """<<a_1,...,a_r>> as the tensor of the binary forms <1, a_i>."""
    form = QuasilinearForm(tower, (tower.one(),))
    for a in gens:
        form = tensor(form, binary(tower, a))
    return form


def represents(form, a, mode=None):
    """a in D(form)."""
    if a.is_zero():
        return True
    return linalg2.membership_in_square_span(a, form.query(), mode)


def subform_leq(sub, form, mode=None):
    """anis(sub) embeds in anis(form), i.e. D(sub) <= D(form)."""
    if sub.tower is not form.tower and not sub.tower.same_presentation(form.tower):
        raise TowerMismatch("subform test across towers")
    return all(represents(form, e, mode) for e in sub.entries)


def isomorphic(a, b, mode=None):
    """Equal dimension, equal isotropy index, equal value sets."""
    if a.dim != b.dim:
        return False
    if isotropy_index(a, mode) != isotropy_index(b, mode):
        return False
    return subform_leq(a, b, mode) and subform_leq(b, a, mode)


def complement(sub, form, mode=None):
    """A form comp with sub perp comp isomorphic to form (both anisotropic).

    Greedy: extend sub's entries by entries of form that stay independent.
    """
    if not is_anisotropic(form, mode):
        raise NotASubform("ambient form must be anisotropic")
    if not is_anisotropic(sub, mode):
        raise NotASubform("subform must be anisotropic")
    if not subform_leq(sub, form, mode):
        raise NotASubform("first form is not a subform of the second")
    elems = list(sub.entries) + list(form.entries)
    flags = linalg2._greedy_flags(elems, linalg2._mode(mode), tower=form.tower)
    picked = [
        form.entries[i - sub.dim]
        for i in range(sub.dim, len(elems)) if flags[i]
    ]
    if len(picked) != form.dim - sub.dim:
        raise NotASubform("independence bookkeeping failed")
    if not picked:
        raise NotASubform("nothing to complement: forms have equal value sets")
    return QuasilinearForm(form.tower, tuple(picked))


def specialize_form(form, substitution):
    """Entrywise substitution of some rational variables by rational values.

    substitution maps variable NAME -> RatFunc2 over the source tower (the
    value may only use the surviving variables).  Substituted variables must
    not occur in any square-root defining element.  The result lives over
    the smaller tower on the surviving variables; the isotropy index can
    only grow under specialization (tested property).
    """
    from .f2poly import EXP_BITS, EXP_MASK, Poly2, RatFunc2
    from .field_tower import FieldElement, FieldTower

    tower = form.tower
    names = tower.var_names
    idx = {}
    for name, value in substitution.items():
        if name not in names:
            raise KeyError("unknown rational variable %r" % name)
        idx[names.index(name)] = value
    for _, b in tower.sqrt_gens:
        for r in b.comps.values():
            used = r.num.variables() | r.den.variables()
            if used & set(idx):
                raise TowerMismatch(
                    "substituted variable occurs in a square-root generator")
    keep = [j for j in range(tower.m) if j not in idx]
    remap = {j: pos for pos, j in enumerate(keep)}
    new_m = len(keep)

    def remap_poly(p):
        terms = set()
        for t in p.terms:
            nt = 0
            for j in range(tower.m):
                e = (t >> (EXP_BITS * j)) & EXP_MASK
                if e:
                    if j not in remap:
                        raise TowerMismatch(
                            "substitution value uses an eliminated variable")
                    nt |= e << (EXP_BITS * remap[j])
            terms ^= {nt}
        return Poly2(terms, new_m)

    def remap_rf(r):
        return RatFunc2(remap_poly(r.num), remap_poly(r.den))

    gens = []
    sub_names = tuple(names[j] for j in keep)
    for n, b in tower.sqrt_gens:
        sub = FieldTower(sub_names, tuple(gens), tower.depth_guard, _validated=True)
        gens.append((n, FieldElement(sub, {f: remap_rf(r) for f, r in b.comps.items()})))
    target = FieldTower(sub_names, tuple(gens), tower.depth_guard, _validated=True)

    out = []
    for e in form.entries:
        comps = {}
        for f, r in e.comps.items():
            val = remap_rf(r.subs(idx))
            comps[f] = comps[f] + val if f in comps else val
        out.append(FieldElement(target, comps))
    return QuasilinearForm(target, tuple(out))
