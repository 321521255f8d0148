"""Builders for the optimality instances: tensor families with controlled
anisotropic parts, the generic-slot construction p = <X> _|_ phi,
q = sigma _|_ X*tau, and the realizability dispatcher.

Every constructed instance is re-verified from scratch: the advertised
defect, Izhboldin dimension and neighbour flag are recomputed with the
algebra modules, never trusted from the construction.
"""

from __future__ import annotations

from . import forms, function_field, invariants, linalg2
from .field_tower import embed, extend_rational, rational_tower
from .forms import QuasilinearForm, pfister


class PreconditionFailed(ValueError):
    pass


class UnknownName(KeyError):
    pass


class ConstructedInstance:
    __slots__ = ("tower", "p", "q", "expected", "recipe")

    def __init__(self, tower, p, q, expected, recipe):
        self.tower = tower
        self.p = p
        self.q = q
        self.expected = expected
        self.recipe = recipe

    def to_json(self):
        return {
            "tower": self.tower.to_json(),
            "p": self.p.text(),
            "q": self.q.text(),
            "expected": self.expected,
            "recipe": self.recipe,
        }


def _lift(form, tower):
    return QuasilinearForm(tower, tuple(embed(e, tower) for e in form.entries))


def build_generic_slot(tau, phi, sigma, mode=None, recipe=None):
    """p = <X> perp phi, q = sigma perp X*tau over E(X); the recomputed defect
    d(q over F(p)) equals dim sigma - dim tau."""
    E = tau.tower
    anis_prod = forms.anisotropic_part(forms.tensor(tau, phi), mode)
    if not forms.subform_leq(anis_prod, sigma, mode):
        raise PreconditionFailed("anis(tau (x) phi) is not a subform of sigma")
    for f in (tau, phi, sigma):
        if not forms.is_anisotropic(f, mode):
            raise PreconditionFailed("inputs must be anisotropic")
    F = extend_rational(E, 1)
    X = F.rational_var(E.m)
    p = QuasilinearForm(F, (X,) + _lift(phi, F).entries)
    q = QuasilinearForm(
        F, _lift(sigma, F).entries + tuple(X * e for e in _lift(tau, F).entries))
    expected = {
        "k": sigma.dim - tau.dim,
        "izh": phi.dim,
        "dim_q": q.dim,
        "dim_p": p.dim,
    }
    inst = ConstructedInstance(F, p, q, expected,
                               recipe or {"op": "generic_slot",
                                          "dims": [tau.dim, phi.dim, sigma.dim]})
    verify_expected(inst, mode)
    return inst


def verify_expected(inst, mode=None):
    """Recompute the advertised quantities of an instance from scratch."""
    p, q = inst.p, inst.q
    if not forms.is_anisotropic(p, mode) or not forms.is_anisotropic(q, mode):
        raise PreconditionFailed("constructed forms must be anisotropic")
    exp = inst.expected
    i0 = function_field.i0_over(q, p, mode)
    k = q.dim - 2 * i0
    if k != exp["k"]:
        raise PreconditionFailed("recomputed defect %d != expected %d"
                                 % (k, exp["k"]))
    izh = invariants.izhboldin_dim(p, mode)
    if izh != exp["izh"]:
        raise PreconditionFailed("recomputed izh %d != expected %d"
                                 % (izh, exp["izh"]))
    if q.dim != exp["dim_q"]:
        raise PreconditionFailed("dimension bookkeeping broke")
    if "qp_flag" in exp:
        flag = invariants.is_qp_neighbour(p, mode)
        if flag != exp["qp_flag"]:
            raise PreconditionFailed("neighbour flag %s != expected %s"
                                     % (flag, exp["qp_flag"]))
    return True


def build_tensor_family(r, u, v, mode=None):
    """(E, pi, tau, phi): pi an r-fold quasi-Pfister dividing tau and phi,
    dim tau = u*2^r, dim phi = v*2^r, dim anis(tau (x) phi) <= (u+v-1)*2^r."""
    if not (1 <= u <= v):
        raise PreconditionFailed("need 1 <= u <= v")
    t = max((u << r) - 1, 1).bit_length()  # unique t: 2^(t-1) < u*2^r <= 2^t
    if (u << r) == 1:
        t = 0
    if (v << r) <= (1 << t):
        return _tensor_family_base(r, u, v, t)
    x = ((v << r) - 1) >> t
    m_rem = (v << r) - (x << t)
    v_rem = m_rem >> r
    if m_rem >= (u << r):
        E, pi, tau, psi = _tensor_family_base(r, u, v_rem, t)
    else:
        E, pi, tau, psi = build_tensor_family(r, v_rem, u, mode)
        tau, psi = psi, tau
    # lower lndeg(tau) to t by walking the splitting tower of its norm form
    while True:
        nf = invariants.norm_form(tau, mode)
        if nf.lndeg <= t:
            break
        ext = function_field.quadric_function_field(E, nf.form, mode)
        E = ext.result
        pi, tau, psi = (_lift(f, E) for f in (pi, tau, psi))
    nf = invariants.norm_form(tau, mode)
    E2 = extend_rational(E, x)
    new_vars = [E2.rational_var(E.m + j) for j in range(x)]
    pi, tau, psi = (_lift(f, E2) for f in (pi, tau, psi))
    nfe = _lift(nf.form, E2)
    entries = []
    for w in new_vars:
        entries.extend(w * e for e in nfe.entries)
    phi = QuasilinearForm(E2, tuple(entries) + psi.entries)
    _check_tensor_family(r, u, v, pi, tau, phi, mode)
    return E2, pi, tau, phi


def _tensor_family_base(r, u, v, t):
    """Subforms of the t-fold quasi-Pfister form over GF(2)(X_1..X_t)."""
    E = rational_tower(["x%d" % (j + 1) for j in range(max(t, r))])
    gens = [E.rational_var(j) for j in range(E.m)]
    pi = pfister(E, gens[:r])
    rho = pfister(E, gens[r:t])
    tau = QuasilinearForm(E, tuple(
        p * q for q in rho.entries[:u] for p in pi.entries))
    phi = QuasilinearForm(E, tuple(
        p * q for q in rho.entries[:v] for p in pi.entries))
    return E, pi, tau, phi


def _check_tensor_family(r, u, v, pi, tau, phi, mode):
    if tau.dim != (u << r) or phi.dim != (v << r):
        raise PreconditionFailed("tensor family dimensions broke")
    if not forms.is_anisotropic(tau, mode) or not forms.is_anisotropic(phi, mode):
        raise PreconditionFailed("tensor family lost anisotropy")
    if not invariants.divides(pi, tau, mode) or not invariants.divides(pi, phi, mode):
        raise PreconditionFailed("tensor family lost divisibility")
    prod = forms.tensor(tau, phi)
    dim_anis = int(linalg2.span_dim_over_squares(prod.query(), mode))
    if dim_anis > (u + v - 1) << r:
        raise PreconditionFailed("tensor product bound failed: %d" % dim_anis)


def build_tensor_family2(i, a, s, d=None, branch=1, mode=None):
    """Families with anis(tau (x) phi) inside a*2^s (branch 1, phi an s-fold
    quasi-Pfister form) or a*2^(s+1) (branch 2, dim phi = d, lndeg s+1)."""
    if branch == 1:
        if not (1 <= i <= a << s):
            raise PreconditionFailed("branch 1 needs 1 <= i <= a*2^s")
        E = rational_tower(["x%d" % (j + 1) for j in range(s)])
        pi = pfister(E, [E.rational_var(j) for j in range(s)])
        E2 = extend_rational(E, a)
        yv = [E2.rational_var(E.m + j) for j in range(a)]
        pie = _lift(pi, E2)
        eta_entries = [w * e for w in yv for e in pie.entries]
        tau = QuasilinearForm(E2, tuple(eta_entries[:i]))
        return E2, tau, pie
    if branch != 2:
        raise PreconditionFailed("branch must be 1 or 2")
    if d is None or not ((1 << s) <= d < (1 << (s + 1))):
        raise PreconditionFailed("branch 2 needs d in [2^s, 2^(s+1))")
    if not (1 <= i <= a << (s + 1)):
        raise PreconditionFailed("branch 2 needs 1 <= i <= a*2^(s+1)")
    while a > 1 and i <= (a - 1) << (s + 1):
        a -= 1
    E = rational_tower(["x%d" % (j + 1) for j in range(s)])
    pi = pfister(E, [E.rational_var(j) for j in range(s)])
    E2 = extend_rational(E, a)
    yv = [E2.rational_var(E.m + j) for j in range(a)]
    pie = _lift(pi, E2)
    sigma = forms.tensor(forms.binary(E2, yv[-1]), pie)
    j = i - ((a - 1) << (s + 1))
    if j <= (1 << s):
        psi_entries = pie.entries[:j]
    else:
        psi_entries = sigma.entries[:j]
    tau_entries = [w * e for w in yv[:-1] for e in sigma.entries]
    tau = QuasilinearForm(E2, tuple(tau_entries) + tuple(psi_entries))
    # phi: <Y_a> perp pi' completed inside sigma up to dimension d
    phi_entries = [yv[-1]] + list(pie.entries[1:])
    extra = [yv[-1] * e for e in pie.entries[1:]]
    phi_entries.extend(extra[: d - len(phi_entries)])
    phi = QuasilinearForm(E2, tuple(phi_entries[:d]))
    nf = invariants.norm_form(phi, mode)
    if nf.lndeg != s + 1:
        raise PreconditionFailed("branch 2 norm degree %d != %d" % (nf.lndeg, s + 1))
    prod = forms.tensor(tau, phi)
    dim_anis = int(linalg2.span_dim_over_squares(prod.query(), mode))
    if dim_anis > a << (s + 1):
        raise PreconditionFailed("branch 2 tensor bound failed")
    if d == (1 << s) and s >= 2 and dim_anis > (1 << s) + i:
        raise PreconditionFailed("branch 2 sharpened bound failed")
    return E2, tau, phi


class RealizabilityRequest:
    __slots__ = ("s", "d", "k", "a", "eps", "branch", "qp_flag")

    def __init__(self, s, d, k, a, eps, branch, qp_flag=None):
        if (eps - k) % 2:
            raise PreconditionFailed("eps and k must have equal parity")
        self.s = s
        self.d = d
        self.k = k
        self.a = a
        self.eps = eps
        self.branch = branch
        self.qp_flag = qp_flag


def _assemble(E, tau, phi, k, mode, recipe, inside_norm=False):
    """sigma = anis(tau (x) phi) extended to dimension k + dim tau, then the
    generic-slot construction."""
    anis_prod = forms.anisotropic_part(forms.tensor(tau, phi), mode)
    target = k + tau.dim
    missing = target - anis_prod.dim
    if missing < 0:
        raise PreconditionFailed("anis(tau (x) phi) exceeds k + i")
    if missing == 0:
        sigma = anis_prod
        E2 = E
    elif inside_norm:
        nf = invariants.norm_form(phi, mode)
        sigma = _extend_inside(anis_prod, nf.form, missing, mode)
        E2 = E
    else:
        E2 = extend_rational(E, missing)
        pads = tuple(E2.rational_var(E.m + j) for j in range(missing))
        sigma = QuasilinearForm(E2, pads + _lift(anis_prod, E2).entries)
        tau = _lift(tau, E2)
        phi = _lift(phi, E2)
    return build_generic_slot(tau, phi, sigma, mode, recipe=recipe)


def _extend_inside(base, ambient, count, mode):
    """Extend base by `count` ambient entries keeping independence."""
    elems = list(base.entries)
    picked = []
    for e in ambient.entries:
        if len(picked) == count:
            break
        if linalg2.membership_in_square_span(
            e, linalg2.SquareSpanQuery(elems, base.tower), mode
        ):
            continue
        elems.append(e)
        picked.append(e)
    if len(picked) != count:
        raise PreconditionFailed("not enough room inside the ambient form")
    return QuasilinearForm(base.tower, tuple(base.entries) + tuple(picked))


def realize(req, mode=None):
    """Dispatch a realizability request to the family builders and verify."""
    s, d, k, a, eps = req.s, req.d, req.k, req.a, req.eps
    recipe = {"op": "realize", "branch": req.branch,
              "s": s, "d": d, "k": k, "a": a, "eps": eps}
    if req.branch == 1:
        if k < d:
            raise PreconditionFailed("branch 1 needs k >= d")
        i = a  # any positive integer: dim q = k + 2i
        u, v = min(i, d), max(i, d)
        E, pi, tau, phi = build_tensor_family(0, u, v, mode)
        if tau.dim != i:
            tau, phi = phi, tau
        inst = _assemble(E, tau, phi, k, mode, recipe)
        inst.expected["dim_q_requested"] = k + 2 * i
        return inst
    if req.branch == 2:
        if not (k < d and d == 1 << s and a >= 1 and -k <= eps <= k):
            raise PreconditionFailed("branch 2 parameter check failed")
        i = (a << s) + (eps - k) // 2
        E, tau, phi = build_tensor_family2(i, a, s, branch=1, mode=mode)
        inst = _assemble(E, tau, phi, k, mode, recipe)
        inst.expected["qp_flag"] = True
        verify_expected(inst, mode)
        _check_realized(inst, s, d, k, (a << (s + 1)) + eps)
        return inst
    if req.branch == 3:
        if not (d > max(k, 1 << s) and a >= 1 and -k <= eps <= k):
            raise PreconditionFailed("branch 3 parameter check failed")
        i = (a << (s + 1)) + (eps - k) // 2
        E, tau, phi = build_tensor_family2(i, a, s, d=d, branch=2, mode=mode)
        inst = _assemble(E, tau, phi, k, mode, recipe)
        inst.expected["qp_flag"] = False
        verify_expected(inst, mode)
        _check_realized(inst, s, d, k, (a << (s + 2)) + eps)
        return inst
    if req.branch in (4, 5):
        return _realize_windows(req, mode, recipe)
    raise PreconditionFailed("unknown branch %s" % (req.branch,))


def _check_realized(inst, s, d, k, dim_q):
    exp = inst.expected
    if exp["izh"] != d or exp["k"] != k or inst.q.dim != dim_q:
        raise PreconditionFailed("realized instance mismatch: %s" % exp)
    if not ((1 << s) < inst.p.dim <= (1 << (s + 1))):
        raise PreconditionFailed("dim p outside (2^s, 2^(s+1)]")


def _realize_windows(req, mode, recipe):
    """Window branches: eps realizable with a = 0, and the +-eps companions
    around multiples of 2^(s+2) for a >= 1 via the complement construction."""
    s, d, k, a, eps = req.s, req.d, req.k, req.a, req.eps
    mag = abs(eps)
    if req.branch == 4:
        if d != 1 << s:
            raise PreconditionFailed("branch 4 needs izh = 2^s")
        choices = [
            (r, x)
            for r in range(0, max(s - 1, 0))
            if k >= (1 << s) - (1 << r)
            for x in range(1, (1 << (s - 2 - r)) + 1)
            if (x - 1) * (1 << (r + 1)) + (1 << (s + 1)) - k <= mag
            <= x * (1 << (r + 1)) + k
        ]
    else:
        if not (d > (1 << s)):
            raise PreconditionFailed("branch 5 needs izh > 2^s")
        if eps < 0:
            raise PreconditionFailed("branch 5 realizes the +eps companion only")
        choices = []
        for r in range(0, s):
            yr = (d - 1) >> r
            if k < yr * (1 << r) or k >= d:
                continue
            for x in range(1, (1 << (s + 1 - r)) - yr):
                if (x + yr) * (1 << (r + 1)) - k <= mag <= x * (1 << (r + 1)) + k:
                    choices.append((r, x))
    if not choices:
        raise PreconditionFailed("no (r, x) window admits eps")
    r, x = choices[0]
    i = (mag - k) // 2
    v = (1 << (s - r)) if req.branch == 4 else ((d - 1) >> r) + 1
    E, pi, tau0, phi0 = build_tensor_family(r, x, v, mode)
    tau = QuasilinearForm(E, tau0.entries[:i])
    phi = phi0 if phi0.dim == d else QuasilinearForm(E, phi0.entries[:d])
    if a == 0:
        inst = _assemble(E, tau, phi, k, mode, recipe, inside_norm=False)
        verify_expected(inst, mode)
        return inst
    # a >= 1: keep q inside the norm form of p, then take complements in
    # anisotropic quasi-Pfister multiples of that norm form
    inst = _assemble(E, tau, phi, k, mode, recipe, inside_norm=True)
    nf_p = invariants.norm_form(inst.p, mode)
    blocks = a if eps < 0 else 2 * a
    F2 = extend_rational(inst.tower, max(blocks - 1, 0))
    wv = [F2.rational_var(inst.tower.m + j) for j in range(blocks - 1)]
    nfp = _lift(nf_p.form, F2)
    p2 = _lift(inst.p, F2)
    q2 = _lift(inst.q, F2)
    target = (a << (s + 2)) + eps
    amb = QuasilinearForm(
        F2, tuple(w * e for w in [F2.one()] + wv[: a - 1] for e in nfp.entries))
    q_final = forms.complement(q2, amb, mode)
    if eps > 0:
        amb2 = QuasilinearForm(
            F2, tuple(w * e for w in [F2.one()] + wv for e in nfp.entries))
        q_final = forms.complement(q_final, amb2, mode)
    if q_final.dim != target:
        raise PreconditionFailed(
            "complement dimension %d missed the target %d"
            % (q_final.dim, target))
    out = ConstructedInstance(
        F2, p2, q_final,
        {"k": k, "izh": d, "dim_q": target, "dim_p": p2.dim}, recipe)
    verify_expected(out, mode)
    return out


def canned(name, *params):
    """Standard example families over fresh towers."""
    if name == "generic":
        (n,) = params
        E = rational_tower(["t%d" % (j + 1) for j in range(n)])
        return QuasilinearForm(E, tuple(E.rational_var(j) for j in range(n)))
    if name == "quasi_pfister":
        (n,) = params
        E = rational_tower(["x%d" % (j + 1) for j in range(n)])
        return pfister(E, [E.rational_var(j) for j in range(n)])
    if name == "qp_neighbour":
        n, dim = params
        if not ((1 << (n - 1)) < dim <= (1 << n)):
            raise UnknownName("neighbour dimension must lie in (2^(n-1), 2^n]")
        pf = canned("quasi_pfister", n)
        return QuasilinearForm(pf.tower, pf.entries[:dim])
    if name == "splitting_demo":
        (n,) = params
        return canned("quasi_pfister", n)
    raise UnknownName("unknown canned example %r" % name)
