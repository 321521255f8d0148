"""Rank, membership and intersection of L^2-subspaces of a tower field.

Everything reduces to linear algebra over the rational function field
GF(2)(z_1..z_m): the square subfield R^2 of the rational part identifies
with GF(2)(z) via z_j = y_j^2, and an L^2-span has R^2-coordinate space
spanned by the rows {B_g * a_i} where B_g runs over the 2^t products of the
square-root defining elements.  The L^2-dimension is then rank / 2^t.

Two backends:
  * MonteCarlo: evaluate coordinate entries at random GF(2^k) points and do
    dense elimination there (compiled kernel when available).  Evaluation can
    only lower rank, so full-rank conclusions are deterministic certificates
    and rank-deficient ones carry a Schwartz-Zippel failure bound.
  * Exact: fraction-free Bareiss elimination after clearing row denominators,
    plus an incremental echelon over GF(2)(z) for greedy/membership work.
"""

from __future__ import annotations

import itertools
import random

from .f2poly import DenominatorZero, Poly2, RatFunc2
from .field_tower import DepthGuardExceeded, FieldElement, TowerMismatch, reassemble
from .gf2k import GF2k, GF2kPoint

LABEL_GUARD = 1 << 20
_RESAMPLE_LIMIT = 8
_call_counter = itertools.count()


def reset_call_counter():
    """Restart the per-call seed derivation (report reproducibility)."""
    global _call_counter
    _call_counter = itertools.count()


class ExactModeRequired(ValueError):
    pass


class RankMode:
    """Exact or MonteCarlo(trials, k, seed) rank backend selection."""

    __slots__ = ("kind", "trials", "k", "seed")

    def __init__(self, kind, trials=2, k=32, seed=0):
        if kind not in ("exact", "montecarlo"):
            raise ValueError("kind must be 'exact' or 'montecarlo'")
        if kind == "montecarlo" and trials < 1:
            raise ValueError("trials must be >= 1")
        self.kind = kind
        self.trials = trials
        self.k = k
        self.seed = seed

    @classmethod
    def exact(cls):
        return cls("exact")

    @classmethod
    def montecarlo(cls, trials=2, k=32, seed=0):
        return cls("montecarlo", trials=trials, k=k, seed=seed)

    @property
    def is_exact(self):
        return self.kind == "exact"

    def __repr__(self):
        if self.is_exact:
            return "RankMode.exact()"
        return "RankMode.montecarlo(trials=%d, k=%d, seed=%d)" % (
            self.trials, self.k, self.seed)


_default_mode = RankMode.montecarlo()


def set_default_mode(mode):
    global _default_mode
    _default_mode = mode


def get_default_mode():
    return _default_mode


def _mode(mode):
    return _default_mode if mode is None else mode


class Rank(int):
    """Integer rank with certification metadata attached."""

    def __new__(cls, value, certified=True, failure_bound=0.0):
        self = super().__new__(cls, value)
        self.certified = certified
        self.failure_bound = failure_bound
        return self


class SquareSpanQuery:
    """A list of tower elements whose L^2-span is being interrogated."""

    __slots__ = ("elements", "tower")

    def __init__(self, elements, tower=None):
        elements = list(elements)
        if tower is None:
            if not elements:
                raise ValueError("empty query needs an explicit tower")
            tower = elements[0].owner
        for e in elements:
            if e.owner is not tower and not e.owner.same_presentation(tower):
                raise TowerMismatch("query elements span several towers")
        self.elements = elements
        self.tower = tower


# -- row assembly -------------------------------------------------------------


def _gen_products(tower):
    cached = getattr(tower, "_gen_products_cache", None)
    if cached is None:
        cached = tower.gen_products()
        tower._gen_products_cache = cached
    return cached


def element_rows(elem):
    """Coordinate rows of B_g * elem for all 2^t generator products."""
    return [(bg * elem).coordinates() for bg in _gen_products(elem.owner)]


def single_row(elem):
    return [elem.coordinates()]


def _collect_labels(rows_list):
    labels = set()
    for rows in rows_list:
        for row in rows:
            labels.update(row)
    if len(labels) > LABEL_GUARD:
        raise DepthGuardExceeded("coordinate basis occupancy exceeds guard")
    return sorted(labels)


# -- exact backend ------------------------------------------------------------


def bareiss_rank(rows, labels=None):
    """Fraction-free Bareiss rank of sparse rows over GF(2)(z).

    rows: list of dicts label -> RatFunc2.  Row denominators are cleared
    first; divisions inside the elimination are exact polynomial quotients.
    """
    if labels is None:
        labels = _collect_labels([rows])
    dense = []
    for row in rows:
        if not row:
            continue
        # clear denominators: multiply the row through by the distinct dens
        dens = []
        for v in row.values():
            if not v.den.is_one() and all(d != v.den for d in dens):
                dens.append(v.den)
        out = []
        for lab in labels:
            v = row.get(lab)
            if v is None or v.is_zero():
                out.append(None)
                continue
            p = v.num
            skipped = False
            for d in dens:
                if not skipped and d == v.den:
                    skipped = True
                    continue
                p = p * d
            out.append(p)
        # strip monomial content (rank-invariant)
        content = None
        for p in out:
            if p is not None:
                c = p.content()
                content = c if content is None else _monomial_gcd(content, c, p.arity)
                if content == 0:
                    break
        if content:
            out = [p.divide_monomial(content) if p is not None else None for p in out]
        dense.append(out)
    return _bareiss(dense)


def _monomial_gcd(a, b, arity):
    from .f2poly import EXP_BITS, EXP_MASK

    c = 0
    for j in range(arity):
        sh = EXP_BITS * j
        c |= min((a >> sh) & EXP_MASK, (b >> sh) & EXP_MASK) << sh
    return c


def _divexact_checked(num, prev):
    q = num.divexact(prev)
    if q is None:
        raise ArithmeticError("Bareiss exact division failed")
    return q


def _bareiss(dense):
    """Bareiss elimination with free pivot choice (sparsest entry first).

    Row and column permutations do not change rank, and picking the entry
    with the fewest terms as the pivot keeps the exact-division minors small
    on sparse instances.
    """
    if not dense:
        return 0
    ncols = len(dense[0])
    rank = 0
    prev = None  # previous pivot polynomial (None means 1)
    rows = dense
    while rank < len(rows) and rank < ncols:
        piv_i = piv_j = None
        best = None
        for i in range(rank, len(rows)):
            ri = rows[i]
            for j in range(rank, ncols):
                p = ri[j]
                if p is not None and p:
                    size = len(p.terms)
                    if best is None or size < best:
                        best, piv_i, piv_j = size, i, j
                        if size == 1:
                            break
            if best == 1:
                break
        if piv_i is None:
            break
        rows[rank], rows[piv_i] = rows[piv_i], rows[rank]
        if piv_j != rank:
            for r in rows:
                r[rank], r[piv_j] = r[piv_j], r[rank]
        col = rank
        pivot = rows[rank][col]
        prow = rows[rank]
        for i in range(rank + 1, len(rows)):
            ri = rows[i]
            head = ri[col]
            for j in range(col + 1, ncols):
                a = ri[j]
                b = prow[j]
                term1 = a * pivot if a is not None else None
                term2 = head * b if (head is not None and b is not None) else None
                if term1 is None and term2 is None:
                    ri[j] = None
                    continue
                if term1 is None:
                    num = term2
                elif term2 is None:
                    num = term1
                else:
                    num = term1 + term2
                if not num:
                    ri[j] = None
                    continue
                ri[j] = num if prev is None else _divexact_checked(num, prev)
            ri[col] = None
        prev = pivot
        rank += 1
    return rank


class ExactEchelon:
    """Incremental reduced echelon over GF(2)(z) with optional history tracking.

    Rows are dicts label -> RatFunc2; pivot rows are normalized so the pivot
    entry equals 1 and eliminated from one another.
    """

    def __init__(self, track=False):
        self.pivots = {}  # label -> row dict
        self.history = {} if track else None  # label -> dict tag -> RatFunc2
        self.track = track

    def _reduce(self, row, hist):
        row = {k: v for k, v in row.items() if not v.is_zero()}
        for lab in sorted(set(row) & set(self.pivots)):
            coef = row.get(lab)
            if coef is None or coef.is_zero():
                continue
            prow = self.pivots[lab]
            for l2, v2 in prow.items():
                acc = row.get(l2)
                term = coef * v2
                acc = term if acc is None else acc + term
                if acc.is_zero():
                    row.pop(l2, None)
                else:
                    row[l2] = acc
            if hist is not None:
                phist = self.history[lab]
                for tag, v2 in phist.items():
                    acc = hist.get(tag)
                    term = coef * v2
                    acc = term if acc is None else acc + term
                    if acc.is_zero():
                        hist.pop(tag, None)
                    else:
                        hist[tag] = acc
            row.pop(lab, None)
        return row, hist

    def reduces_to_zero(self, row):
        red, _ = self._reduce(row, None)
        return not red

    def insert(self, row, tag=None):
        """Reduce and insert; returns True when the row enlarged the span."""
        hist = {tag: RatFunc2.one(1)} if self.track else None
        if self.track and tag is None:
            raise ValueError("tracking echelon needs a tag per row")
        row, hist = self._reduce(row, hist)
        if not row:
            if self.track:
                self._last_zero_history = hist
            return False
        lab = min(row)
        inv = row[lab].inv()
        row = {k: v * inv for k, v in row.items()}
        if self.track:
            hist = {t: v * inv for t, v in hist.items()}
        # keep the basis fully reduced
        for plab, prow in list(self.pivots.items()):
            coef = prow.get(lab)
            if coef is None or coef.is_zero():
                continue
            for l2, v2 in row.items():
                acc = prow.get(l2)
                term = coef * v2
                acc = term if acc is None else acc + term
                if acc.is_zero():
                    prow.pop(l2, None)
                else:
                    prow[l2] = acc
            if self.track:
                phist = self.history[plab]
                for t2, v2 in hist.items():
                    acc = phist.get(t2)
                    term = coef * v2
                    acc = term if acc is None else acc + term
                    if acc.is_zero():
                        phist.pop(t2, None)
                    else:
                        phist[t2] = acc
            prow.pop(lab, None)
        self.pivots[lab] = row
        if self.track:
            self.history[lab] = hist
        return True

    @property
    def rank(self):
        return len(self.pivots)

    def zero_combination(self):
        """History of the last row that reduced to zero (tracking mode)."""
        return getattr(self, "_last_zero_history", None)


# -- MonteCarlo backend -------------------------------------------------------


def _derive_rng(mode):
    return random.Random((mode.seed << 32) ^ next(_call_counter))


def _degree_bound(rows_list):
    d = 0
    for rows in rows_list:
        for row in rows:
            for v in row.values():
                d = max(d, v.num.total_degree() + v.den.total_degree())
    return max(d, 1)


def _variables_of(rows_list):
    out = set()
    for rows in rows_list:
        for row in rows:
            for v in row.values():
                out |= v.num.variables() | v.den.variables()
    return out


def _evaluate_rows(rows, labels, field, pt):
    dense = []
    for row in rows:
        dense.append([
            row[lab].eval_gf2k(field, pt.assignment) if lab in row else 0
            for lab in labels
        ])
    return dense


class _Trial:
    __slots__ = ("field", "point")

    def __init__(self, field, point):
        self.field = field
        self.point = point


def _sample_trials(rows_list, mode):
    """Evaluation points avoiding all denominators, or None on failure."""
    field = GF2k(mode.k)
    variables = _variables_of(rows_list)
    trials = []
    rng = _derive_rng(mode)
    for _ in range(mode.trials):
        ok = None
        for _ in range(_RESAMPLE_LIMIT):
            pt = GF2kPoint(field, {j: field.random_nonzero(rng) for j in variables})
            try:
                for rows in rows_list:
                    for row in rows:
                        for v in row.values():
                            if v.den.eval_gf2k(field, pt.assignment) == 0:
                                raise DenominatorZero()
            except DenominatorZero:
                continue
            ok = pt
            break
        if ok is None:
            return None
        trials.append(_Trial(field, ok))
    return trials


# -- public operations --------------------------------------------------------


def rank_backend(matrix, mode=None):
    """Rank of a rectangular RatFunc2 matrix: Bareiss or randomized evaluation."""
    mode = _mode(mode)
    rows = []
    for r in matrix:
        rows.append({(0, j): v for j, v in enumerate(r) if not v.is_zero()})
    return _rank_of_rows(rows, mode)


def _rank_of_rows(rows, mode):
    labels = _collect_labels([rows])
    if not labels or not rows:
        return Rank(0, certified=True)
    if mode.is_exact:
        return Rank(bareiss_rank(rows, labels), certified=True)
    trials = _sample_trials([rows], mode)
    if trials is None:
        return Rank(bareiss_rank(rows, labels), certified=True)
    best = 0
    for tr in trials:
        dense = _evaluate_rows(rows, labels, tr.field, tr.point)
        best = max(best, tr.field.matrix_rank(dense, len(labels)))
    full = min(len(rows), len(labels))
    certified = best == full
    bound = 0.0
    if not certified:
        d = _degree_bound([rows])
        per = min(1.0, (full * d) / float(1 << mode.k))
        bound = per ** mode.trials
    return Rank(best, certified=certified, failure_bound=bound)


def span_dim_over_squares(query, mode=None):
    """dim over L^2 of the span of the query elements."""
    mode = _mode(mode)
    t = query.tower.t
    rows = []
    for e in query.elements:
        rows.extend(element_rows(e))
    r = _rank_of_rows(rows, mode)
    if int(r) % (1 << t):
        # an evaluation under-report cannot land on a 2^t multiple; redo exactly
        r = _rank_of_rows(rows, RankMode.exact())
        if int(r) % (1 << t):
            raise ArithmeticError("rank not divisible by 2^t; tower invalid")
    return Rank(int(r) >> t, certified=r.certified, failure_bound=r.failure_bound)


def independent_subset(query, mode=None):
    """Greedy left-to-right maximal L^2-independent sublist (index list)."""
    mode = _mode(mode)
    flags = _greedy_flags(query.elements, mode, tower=query.tower)
    return [i for i, f in enumerate(flags) if f]


def _greedy_flags(elements, mode, tower=None):
    if not elements:
        return []
    rows_per = [element_rows(e) if not e.is_zero() else [] for e in elements]
    if mode.is_exact:
        ech = ExactEchelon()
        flags = []
        for rows in rows_per:
            added = False
            for row in rows:
                if ech.insert(dict(row)):
                    added = True
            flags.append(added)
        return flags
    labels = _collect_labels(rows_per)
    trials = _sample_trials(rows_per, mode)
    if trials is None:
        return _greedy_flags(elements, RankMode.exact(), tower=tower)
    # per-trial accepted dense rows; an element counts as independent as soon
    # as one trial sees its rows enlarge the span (one-sided certificate)
    accepted = [[] for _ in trials]
    ranks = [0 for _ in trials]
    flags = []
    for rows in rows_per:
        if not rows:
            flags.append(False)
            continue
        added = False
        dense_per_trial = []
        for ti, tr in enumerate(trials):
            dense = _evaluate_rows(rows, labels, tr.field, tr.point)
            dense_per_trial.append(dense)
            cand = accepted[ti] + dense
            r = tr.field.matrix_rank(cand, len(labels))
            if r > ranks[ti]:
                added = True
        if added:
            for ti, tr in enumerate(trials):
                accepted[ti].extend(dense_per_trial[ti])
                ranks[ti] = tr.field.matrix_rank(accepted[ti], len(labels))
        flags.append(added)
    return flags


def membership_in_square_span(target, query, mode=None):
    """target in L^2-span of the query elements ('false' is always certified)."""
    mode = _mode(mode)
    if target.is_zero():
        return True
    base = []
    for e in query.elements:
        base.extend(element_rows(e))
    return _membership_rows(single_row(target), base, mode)


def r2_membership(target, elements, mode=None):
    """target in the plain R^2-span of the given elements (no B_g expansion)."""
    mode = _mode(mode)
    if target.is_zero():
        return True
    base = [e.coordinates() for e in elements]
    return _membership_rows(single_row(target), base, mode)


def _membership_rows(target_rows, base_rows, mode):
    if mode.is_exact:
        ech = ExactEchelon()
        for row in base_rows:
            ech.insert(dict(row))
        return all(ech.reduces_to_zero(dict(row)) for row in target_rows)
    labels = _collect_labels([base_rows, target_rows])
    trials = _sample_trials([base_rows, target_rows], mode)
    if trials is None:
        return _membership_rows(target_rows, base_rows, RankMode.exact())
    for tr in trials:
        dense_base = _evaluate_rows(base_rows, labels, tr.field, tr.point)
        dense_tgt = _evaluate_rows(target_rows, labels, tr.field, tr.point)
        r0 = tr.field.matrix_rank(dense_base, len(labels))
        r1 = tr.field.matrix_rank(dense_base + dense_tgt, len(labels))
        if r1 > r0:
            return False
    return True


def square_span_intersection(queries, mode=None):
    """L^2-basis of the intersection of the spans; exact mode only."""
    mode = _mode(mode)
    if not mode.is_exact:
        raise ExactModeRequired("intersections require the exact backend")
    if not queries:
        raise ValueError("need at least one query")
    tower = queries[0].tower
    for q in queries:
        if q.tower is not tower and not q.tower.same_presentation(tower):
            raise TowerMismatch("intersection across different towers")
    basis = _span_vectors(queries[0])
    for q in queries[1:]:
        basis = _intersect_vector_sets(basis, _span_vectors(q), tower)
        if not basis:
            break
    elems = [reassemble(tower, vec) for vec in basis]
    flags = _greedy_flags(elems, RankMode.exact(), tower=tower)
    return [e for e, f in zip(elems, flags) if f]


def _span_vectors(query):
    ech = ExactEchelon()
    for e in query.elements:
        for row in element_rows(e):
            ech.insert(dict(row))
    return [dict(row) for row in ech.pivots.values()]


def _intersect_vector_sets(rows_a, rows_b, tower):
    """Basis of rowspace(A) intersect rowspace(B) over GF(2)(z)."""
    ech = ExactEchelon(track=True)
    for i, row in enumerate(rows_a):
        ech.insert(dict(row), tag=("a", i))
    out = []
    for j, row in enumerate(rows_b):
        if not ech.insert(dict(row), tag=("b", j)):
            combo = ech.zero_combination()
            # combo expresses 0 = sum coeff * tagged rows; the a-part equals
            # the b-part, i.e. an intersection vector
            vec = {}
            for (side, idx), coef in combo.items():
                if side != "a":
                    continue
                for lab, v in rows_a[idx].items():
                    acc = vec.get(lab)
                    term = coef * v
                    acc = term if acc is None else acc + term
                    if acc.is_zero():
                        vec.pop(lab, None)
                    else:
                        vec[lab] = acc
            if vec:
                out.append(vec)
    return out


def square_representation(elem):
    """Write elem as (sum_g c_g s^g)^2 if elem is a square; returns the root."""
    tower = elem.owner
    ech = ExactEchelon(track=True)
    prods = _gen_products(tower)
    for g, bg in enumerate(prods):
        ech.insert(dict(bg.coordinates()), tag=g)
    if not ech.insert(dict(elem.coordinates()), tag="target"):
        combo = ech.zero_combination()
        comps = {}
        coef_target = combo.get("target")
        if coef_target is None:
            return None
        scale = coef_target.inv()
        for tag, coef in combo.items():
            if tag == "target":
                continue
            # coefficient of B_g is c_g(z); its square root swaps z_j for y_j
            comps[tag] = coef * scale
        return FieldElement(tower, {g: c for g, c in comps.items()})
    return None


def solve_square_span(target, elements, mode=None):
    """Exact coefficients u_{i,g} in R^2 with target = sum u * B_g * a_i.

    Returns a list (one per element) of tower elements c_i in K^2 such that
    target = sum c_i * a_i, or None when target is outside the span.
    """
    tower = target.owner
    prods = _gen_products(tower)
    ech = ExactEchelon(track=True)
    for i, a in enumerate(elements):
        for g, bg in enumerate(prods):
            ech.insert(dict((bg * a).coordinates()), tag=(i, g))
    if ech.insert(dict(target.coordinates()), tag="target"):
        return None
    combo = ech.zero_combination()
    coef_target = combo.get("target")
    if coef_target is None:
        return None
    scale = coef_target.inv()
    parts = [tower.zero() for _ in elements]
    for tag, coef in combo.items():
        if tag == "target":
            continue
        i, g = tag
        c = coef * scale
        # c(z) is the coordinate; as a field element it is c(y)^2 * B_g
        root = FieldElement(tower, {0: c})
        parts[i] = parts[i] + root.square() * prods[g]
    return parts


def bench_rank(sizes=(4, 6, 8, 10, 12), nvars=3, seed=1, trials=2, k=32):
    """Timing harness comparing backends; returns CSV-ready result rows."""
    import time

    rng = random.Random(seed)
    out = []
    for n in sizes:
        mat = []
        for _ in range(n):
            row = []
            for _ in range(n):
                terms = set()
                for _ in range(rng.randrange(1, 3)):
                    exps = [rng.randrange(3) for _ in range(nvars)]
                    terms ^= {sum(e << (16 * j) for j, e in enumerate(exps))}
                row.append(RatFunc2.from_poly(Poly2(terms, nvars)))
            mat.append(row)
        for label, mode in (
            ("exact", RankMode.exact()),
            ("montecarlo", RankMode.montecarlo(trials=trials, k=k, seed=seed)),
        ):
            t0 = time.perf_counter()
            r = rank_backend(mat, mode)
            dt = time.perf_counter() - t0
            out.append({"size": n, "mode": label, "wall_time": dt, "rank": int(r)})
    return out
