"""Integer-logic constraint checkers for the main theorems, plus the
end-to-end instance verifier.

The checkers never report a false violation: whenever the Delta invariant of
an instance carries Unknown entries, those are treated as possible members,
and inconclusive answers are distinguished from passes ('inconclusive'
corresponds to exit code 3 at the CLI).
"""

from __future__ import annotations

from fractions import Fraction

from . import forms, function_field, invariants, linalg2

PASS = "pass"
VIOLATION = "violation"
INCONCLUSIVE = "inconclusive"
NOT_APPLICABLE = "not_applicable"


class ParameterOutOfRange(ValueError):
    pass


class ResidueSet:
    """Residues modulo 2^(s+2) with signed representatives in [-2^(s+1), 2^(s+1)].

    The representative +2^(s+1) is preferred over -2^(s+1).
    """

    __slots__ = ("modulus", "allowed")

    def __init__(self, modulus, allowed=()):
        self.modulus = modulus
        self.allowed = set(allowed)

    def signed(self, e):
        half = self.modulus // 2
        v = ((e + half) % self.modulus) - half
        return half if v == -half else v

    def add(self, e):
        self.allowed.add(self.signed(e))

    def __contains__(self, e):
        return self.signed(e) in self.allowed

    def __le__(self, other):
        return self.allowed <= other.allowed

    def sorted(self):
        return sorted(self.allowed, key=lambda v: (abs(v), v))


def _y_r(izh, r):
    # largest integer y with izh > y * 2^r
    return (izh - 1) >> r


def allowed_residues(s, izh, k):
    """Allowed residues of dim q modulo 2^(s+2) for a non-neighbour p.

    Enumerates the epsilon intervals of the main dichotomy: the base window
    [-k, k], the window family at izh = 2^s, and the window family at
    izh > 2^s.  For k >= izh the constraint is vacuous.
    """
    if s < 0:
        raise ParameterOutOfRange("s must be non-negative")
    if not ((1 << s) <= izh < (1 << (s + 1))):
        raise ParameterOutOfRange("izh must lie in [2^s, 2^(s+1))")
    if k < 0:
        raise ParameterOutOfRange("k must be non-negative")
    M = 1 << (s + 2)
    out = ResidueSet(M)
    if k >= izh:
        half = M // 2
        for e in range(-half + 1, half + 1):
            if (e - k) % 2 == 0:
                out.add(e)
        return out
    for e in range(-k, k + 1, 2):
        out.add(e)
    if izh == 1 << s:
        for r in range(0, max(s - 1, 0)):
            if k < (1 << s) - (1 << r):
                continue
            for x in range(1, (1 << (s - 2 - r)) + 1):
                lo = (x - 1) * (1 << (r + 1)) + (1 << (s + 1)) - k
                hi = x * (1 << (r + 1)) + k
                for e in range(lo, hi + 1):
                    if e > 0 and (e - k) % 2 == 0:
                        out.add(e)
                        out.add(-e)
    else:
        for r in range(0, s):
            yr = _y_r(izh, r)
            if k < yr * (1 << r):
                continue
            for x in range(1, (1 << (s + 1 - r)) - yr):
                lo = (x + yr) * (1 << (r + 1)) - k
                hi = x * (1 << (r + 1)) + k
                for e in range(lo, hi + 1):
                    if e > 0 and (e - k) % 2 == 0:
                        out.add(e)
    return out


def base_window(s, k):
    out = ResidueSet(1 << (s + 2))
    for e in range(-k, k + 1, 2):
        out.add(e)
    return out


def additional_values(s, izh, k):
    """Residues allowed beyond the trivial window [-k, k]."""
    return sorted(
        allowed_residues(s, izh, k).allowed - base_window(s, k).allowed,
        key=lambda v: (abs(v), v),
    )


def _all_of_parity(s, k):
    M = 1 << (s + 2)
    half = M // 2
    return {((e + half) % M) - half if ((e + half) % M) - half != -half else half
            for e in range(-half + 1, half + 1) if (e - k) % 2 == 0}


def residue_table(s, izh):
    """Rows of the additional-values table for a fixed Izhboldin dimension.

    Returns (none_below, rows, any_from) where rows maps each printed k to
    its sorted additional residues; any_from is the first k from which every
    residue of matching parity appears.
    """
    any_from = izh
    for k in range(izh):
        add = set(additional_values(s, izh, k))
        full = _all_of_parity(s, k) - base_window(s, k).allowed
        if add == full and full:
            any_from = k
            break
    none_below = 0
    for k in range(any_from + 1):
        if additional_values(s, izh, k):
            none_below = k
            break
    else:
        none_below = any_from
    rows = {k: additional_values(s, izh, k) for k in range(none_below, any_from)}
    return none_below, rows, any_from


def format_residues(vals):
    """Merge +v/-v into a plus-minus presentation matching the tables."""
    vals = set(vals)
    parts = []
    for v in sorted({abs(v) for v in vals}):
        if v in vals and -v in vals and v != 0:
            parts.append("±%d" % v)
        elif v in vals:
            parts.append("%d" % v)
        else:
            parts.append("-%d" % v)
    return ", ".join(parts) if parts else "None"


def render_table_text(s, izh):
    none_below, rows, any_from = residue_table(s, izh)
    mod = 1 << (s + 2)
    lines = ["k | Additional possible values of dim q modulo %d" % mod]
    if none_below > 0:
        lines.append("<%d | None" % none_below)
    for k in sorted(rows):
        lines.append("%d | %s" % (k, format_residues(rows[k])))
    lines.append(">=%d | Any additional value = k (mod 2)" % any_from)
    return "\n".join(lines)


def table_json(s, izh):
    none_below, rows, any_from = residue_table(s, izh)
    return {
        "s": s,
        "izh": izh,
        "modulus": 1 << (s + 2),
        "none_below": none_below,
        "rows": {str(k): rows[k] for k in sorted(rows)},
        "any_from": any_from,
    }


# -- instance profiles ---------------------------------------------------------


class InstanceProfile:
    __slots__ = ("s", "dim_p", "dim_q", "izh", "lndeg_p", "delta", "c",
                 "k", "i0_qfp", "u", "i1", "qp_neighbour")

    def __init__(self, **kw):
        for f in self.__slots__:
            setattr(self, f, kw[f])
        if self.k < 0 or (self.k - self.dim_q) % 2:
            raise ParameterOutOfRange("inconsistent defect k")
        if not ((1 << self.s) <= self.izh <= self.dim_p - 1):
            raise ParameterOutOfRange("izh outside [2^s, dim p - 1]")

    def to_json(self):
        c = self.c
        if isinstance(c, Fraction):
            c = str(c)
        elif isinstance(c, tuple):
            c = {"min": c[0], "max": c[1]}
        return {
            "s": self.s, "dim_p": self.dim_p, "dim_q": self.dim_q,
            "izh": self.izh, "lndeg_p": self.lndeg_p,
            "delta": self.delta.to_json(), "c": c, "k": self.k,
            "i0_qfp": self.i0_qfp, "u": self.u, "i1": self.i1,
            "qp_neighbour": self.qp_neighbour,
        }


def compute_profile(p, q, budget=None, mode=None):
    """Compute every stable invariant the checkers consume."""
    dim_p, dim_q = p.dim, q.dim
    s = (dim_p - 1).bit_length() - 1
    i1 = function_field.i0_over(p, p, mode)
    izh = dim_p - i1
    i0_qfp = function_field.i0_over(q, p, mode)
    rep = invariants.c_invariant(p, budget, mode)
    u = 0
    while izh % (1 << (u + 1)) == 0:
        u += 1
    return InstanceProfile(
        s=s, dim_p=dim_p, dim_q=dim_q, izh=izh, lndeg_p=rep.lndeg,
        delta=rep, c=rep.c_value, k=dim_q - 2 * i0_qfp, i0_qfp=i0_qfp,
        u=u, i1=i1, qp_neighbour=(rep.lndeg == s + 1),
    )


# -- checkers -------------------------------------------------------------------


def check_separation(profile):
    """dim q <= 2^s forces anisotropy over F(p)."""
    if profile.dim_q <= (1 << profile.s):
        return PASS if profile.i0_qfp == 0 else VIOLATION
    return NOT_APPLICABLE


def _near_multiple(dim_q, L, k, positive_a=True):
    """dim_q within k of a (positive) multiple of 2^L."""
    step = 1 << L
    a0 = dim_q // step
    for a in (a0, a0 + 1):
        if a < (1 if positive_a else 0):
            continue
        if abs(dim_q - a * step) <= k:
            return True
    return False


def check_main_dichotomy(profile):
    """Main dichotomy: near-multiple of 2^lndeg(p), or a windowed exception.

    Unknown Delta entries count as possible members, so 'violation' is only
    reported when no reading of the unknowns can satisfy the theorem.
    """
    if profile.i0_qfp == 0:
        return {"status": NOT_APPLICABLE, "reason": "no isotropy over F(p)"}
    if profile.k >= profile.izh:
        return {"status": NOT_APPLICABLE, "reason": "k >= izh"}
    L = profile.lndeg_p
    if _near_multiple(profile.dim_q, L, profile.k):
        return {"status": PASS, "case": 1}
    if profile.qp_neighbour:
        return {"status": VIOLATION, "reason":
                "quasi-Pfister neighbour outside the near-multiple window"}
    izh = profile.izh
    n = (izh - 1).bit_length() - 1
    admissible = sorted(profile.delta.members | profile.delta.unknown)
    dim_q, k = profile.dim_q, profile.k
    for r in admissible:
        if r > n - 1:
            continue
        yr = _y_r(izh, r)
        if k < yr * (1 << r):
            continue
        for rp in admissible:
            if not (r <= rp <= n):
                continue
            yrp = _y_r(izh, rp)
            x_hi = min(1 << max(n - 1 - r, 0), ((yrp + 1) << (rp - r)) - yr)
            if L == n + 2:
                # x*2^r <= 2^n - y_r*2^(r-1), doubled to stay integral
                cap2 = (1 << (n + 1)) - yr * (1 << r)
                x_hi = min(x_hi, cap2 // (1 << (r + 1)))
            else:
                # x*2^r <= y_r*2^r - (2^(n-1) + 2^(n-2)), quadrupled
                cap4 = yr * (1 << (r + 2)) - (3 << n)
                if cap4 < 0:
                    continue
                x_hi = min(x_hi, cap4 // (1 << (r + 2)))
            for x in range(max(1, rp - r + 1), x_hi + 1):
                lo = (x + yr) * (1 << (r + 1)) - k
                hi = x * (1 << (r + 1)) + k
                for eps in range(max(1, lo), hi + 1):
                    if (eps - dim_q) % 2:
                        continue
                    if (dim_q - eps) % (1 << L) == 0 and dim_q - eps >= 0:
                        return {"status": PASS, "case": 2,
                                "witness": {"r": r, "r_prime": rp, "x": x,
                                            "eps": eps}}
                    if (dim_q + eps) % (1 << L) == 0:
                        return {"status": PASS, "case": 2,
                                "witness": {"r": r, "r_prime": rp, "x": x,
                                            "eps": -eps}}
    # the windows already include every unknown Delta entry, so a miss is final
    return {"status": VIOLATION, "reason": "no admissible window"}


def check_index_bounds(profile):
    """(1) i_1 <= 2^u; (2i) dim q > izh; (2ii) index bounded by the 2-adic gap."""
    out = {"i1_bound": PASS if profile.i1 <= (1 << profile.u) else VIOLATION}
    if profile.i0_qfp > 0:
        out["dimq_gt_izh"] = PASS if profile.dim_q > profile.izh else VIOLATION
        cap = max(profile.dim_q - profile.izh - (1 << profile.u), 1 << profile.u)
        out["i0_bound"] = PASS if profile.i0_qfp <= cap else VIOLATION
    else:
        out["dimq_gt_izh"] = NOT_APPLICABLE
        out["i0_bound"] = NOT_APPLICABLE
    return out


def _c_bounds(c):
    if isinstance(c, tuple):
        return Fraction(c[0]), Fraction(c[1])
    f = Fraction(c)
    return f, f


def check_small_defect(profile):
    """The small-defect corollaries, all concluding a near-multiple of
    2^lndeg(p)."""
    if profile.i0_qfp == 0:
        return {"status": NOT_APPLICABLE}
    k = profile.k
    near = _near_multiple(profile.dim_q, profile.lndeg_p, k)
    c_lo, c_hi = _c_bounds(profile.c)
    results = {}
    # threshold check: k < c(p)
    if k < c_lo:
        results["below_c"] = PASS if near else VIOLATION
    elif k < c_hi:
        results["below_c"] = PASS if near else INCONCLUSIVE
    else:
        results["below_c"] = NOT_APPLICABLE
    # piecewise bound in terms of s alone
    s = profile.s
    izh = profile.izh
    if izh > (1 << s) + (1 << (s - 1) if s >= 1 else Fraction(1, 2)):
        bound = Fraction(3, 1) * (1 << s) / 2
    elif izh > (1 << s):
        bound = Fraction(1 << s)
    else:
        bound = Fraction(3, 1) * (1 << s) / 4
    if Fraction(k) < bound:
        results["piecewise"] = PASS if near else VIOLATION
    else:
        results["piecewise"] = NOT_APPLICABLE
    # very large norm degree relative to the dimension
    if 2 * profile.lndeg_p >= profile.dim_p + 4 and k <= profile.dim_p - 3:
        results["generic"] = PASS if near else VIOLATION
    else:
        results["generic"] = NOT_APPLICABLE
    return results


def verify_instance(p, q, budget=None, mode=None):
    """Full pipeline: profile the pair, run every checker, report verdicts."""
    if not forms.is_anisotropic(p, mode) or not forms.is_anisotropic(q, mode):
        raise ValueError("both forms must be anisotropic")
    if p.dim < 2:
        raise ValueError("dim p >= 2 required")
    profile = compute_profile(p, q, budget, mode)
    checks = {
        "separation": check_separation(profile),
        "thm_main": check_main_dichotomy(profile),
        "index_bounds": check_index_bounds(profile),
        "small_defect": check_small_defect(profile),
    }
    statuses = (PASS, VIOLATION, INCONCLUSIVE, NOT_APPLICABLE)
    flat = []
    for v in checks.values():
        if isinstance(v, dict):
            flat.extend(x for x in v.values() if x in statuses)
        else:
            flat.append(v)
    if VIOLATION in flat:
        status, code = VIOLATION, 2
    elif INCONCLUSIVE in flat:
        status, code = INCONCLUSIVE, 3
    else:
        status, code = PASS, 0
    return {
        "profile": profile.to_json(),
        "checks": checks,
        "status": status,
        "exit_code": code,
    }
