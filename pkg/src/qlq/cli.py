"""Command-line surface: form expressions, subcommand dispatch, JSON reports.

Report schema "qlq/1".  Exit codes: 0 success, 1 error, 2 theorem violation,
3 inconclusive (Unknown-blocked conclusions).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import constructions, forms, function_field, invariants, linalg2, theorems
from .f2poly import Poly2, RatFunc2
from .field_tower import FieldTower, rational_tower, reset_fresh_names
from .forms import QuasilinearForm

SCHEMA = "qlq/1"


class FormSyntaxError(ValueError):
    def __init__(self, message, pos):
        super().__init__("%s at column %d" % (message, pos + 1))
        self.pos = pos


# -- tokenizer -----------------------------------------------------------------

_KEYWORDS = {"perp", "otimes", "scale", "pfister",
             "generic", "quasi_pfister", "qp_neighbour", "splitting_demo"}


def _tokenize(text):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "<>(),*/^+":
            toks.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", int(text[i:j]), i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in _KEYWORDS else "name"
            toks.append((kind, word, i))
            i = j
            continue
        raise FormSyntaxError("unexpected character %r" % ch, i)
    toks.append(("end", None, n))
    return toks


# -- AST ------------------------------------------------------------------------


class FormExpr:
    """Parsed form expression; variables register in first-occurrence order."""

    def __init__(self, node, var_names):
        self.node = node
        self.var_names = var_names

    def text(self):
        return _print_node(self.node)

    def build(self, tower=None):
        if tower is None:
            tower = rational_tower(self.var_names or ("x",))
        return tower, _build_node(self.node, tower)

    def __eq__(self, other):
        return isinstance(other, FormExpr) and self.node == other.node


def _print_elem(e):
    kind = e[0]
    if kind == "poly":
        terms = e[1]
        if not terms:
            return "0"
        parts = []
        for t in terms:
            if not t:
                parts.append("1")
            else:
                parts.append("*".join(
                    v if x == 1 else "%s^%d" % (v, x) for v, x in t))
        return " + ".join(parts)
    num, den = e[1], e[2]
    return "(%s)/(%s)" % (_print_elem(("poly", num)), _print_elem(("poly", den)))


def _print_node(node):
    kind = node[0]
    if kind == "diag":
        return "<%s>" % ", ".join(_print_elem(e) for e in node[1])
    if kind == "pfister":
        return "pfister(%s)" % ", ".join(_print_elem(e) for e in node[1])
    if kind == "scale":
        return "scale(%s, %s)" % (_print_elem(node[1]), _print_node(node[2]))
    if kind in ("perp", "otimes"):
        return "%s %s %s" % (_print_node(node[1]), kind, _print_node(node[2]))
    if kind == "canned":
        return "%s(%s)" % (node[1], ", ".join(str(a) for a in node[2]))
    raise ValueError("bad node %r" % (kind,))


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.vars = []

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise FormSyntaxError("expected %r, found %r" % (kind, tok[1]), tok[2])
        self.i += 1
        return tok

    def register(self, name):
        if name not in self.vars:
            self.vars.append(name)

    # form := prod ('perp' prod)* ; prod := atom ('otimes' atom)*
    def parse_form(self):
        node = self.parse_prod()
        while self.peek()[0] == "perp":
            self.take()
            node = ("perp", node, self.parse_prod())
        return node

    def parse_prod(self):
        node = self.parse_atom()
        while self.peek()[0] == "otimes":
            self.take()
            node = ("otimes", node, self.parse_atom())
        return node

    def parse_atom(self):
        kind, val, pos = self.peek()
        if kind == "<":
            self.take()
            elems = [self.parse_elem()]
            while self.peek()[0] == ",":
                self.take()
                elems.append(self.parse_elem())
            self.take(">")
            return ("diag", elems)
        if kind == "pfister":
            self.take()
            self.take("(")
            elems = [self.parse_elem()]
            while self.peek()[0] == ",":
                self.take()
                elems.append(self.parse_elem())
            self.take(")")
            return ("pfister", elems)
        if kind == "scale":
            self.take()
            self.take("(")
            e = self.parse_elem()
            self.take(",")
            f = self.parse_form()
            self.take(")")
            return ("scale", e, f)
        if kind == "(":
            self.take()
            node = self.parse_form()
            self.take(")")
            return node
        if kind in ("generic", "quasi_pfister", "qp_neighbour", "splitting_demo"):
            self.take()
            self.take("(")
            args = [self.take("int")[1]]
            while self.peek()[0] == ",":
                self.take()
                args.append(self.take("int")[1])
            self.take(")")
            return ("canned", kind, tuple(args))
        raise FormSyntaxError("expected a form", pos)

    # elem := poly ('/' poly)?  with optional parentheses around each side
    def parse_elem(self):
        num = self.parse_poly()
        if self.peek()[0] == "/":
            self.take()
            den = self.parse_poly()
            return ("frac", num, den)
        return ("poly", num)

    def parse_poly(self):
        if self.peek()[0] == "(":
            self.take()
            terms = self.parse_terms()
            self.take(")")
            return terms
        return self.parse_terms()

    def parse_terms(self):
        terms = [self.parse_mono()]
        while self.peek()[0] == "+":
            self.take()
            terms.append(self.parse_mono())
        return terms

    def parse_mono(self):
        factors = []
        while True:
            kind, val, pos = self.peek()
            if kind == "int":
                self.take()
                if val not in (0, 1):
                    raise FormSyntaxError("coefficients live in GF(2)", pos)
                if val == 0:
                    if factors:
                        raise FormSyntaxError("0 cannot be a factor", pos)
                    # zero monomial: an empty term list
                    if self.peek()[0] == "*":
                        raise FormSyntaxError("0 cannot be a factor", pos)
                    return None
            elif kind == "name":
                self.take()
                self.register(val)
                exp = 1
                if self.peek()[0] == "^":
                    self.take()
                    exp = self.take("int")[1]
                factors.append((val, exp))
            else:
                if not factors:
                    # bare "1" handled above; anything else is an error
                    if kind in (">", ")", ",", "+", "/", "end", "perp", "otimes"):
                        break
                    raise FormSyntaxError("expected a monomial", pos)
                break
            if self.peek()[0] == "*":
                self.take()
                continue
            break
        return tuple(factors)


def parse_form(text):
    """Parse a form expression; returns a FormExpr."""
    p = _Parser(text)
    node = p.parse_form()
    p.take("end")
    return FormExpr(node, tuple(p.vars))


def parse_element(text, tower):
    """Parse a single element (used for tower JSON round-trips)."""
    p = _Parser(text)
    e = p.parse_elem()
    p.take("end")
    return _build_elem(e, tower)


def _build_elem(e, tower):
    if e[0] == "frac":
        num = _poly_from_terms(e[1], tower)
        den = _poly_from_terms(e[2], tower)
        return num * den.inv()
    return _poly_from_terms(e[1], tower)


def _poly_from_terms(terms, tower):
    acc = tower.zero()
    for t in terms:
        if t is None:
            continue
        term = tower.one()
        for name, exp in t:
            v = tower.var(name)
            for _ in range(exp):
                term = term * v
        acc = acc + term
    return acc


def _build_node(node, tower):
    kind = node[0]
    if kind == "diag":
        return QuasilinearForm(
            tower, tuple(_build_elem(e, tower) for e in node[1]))
    if kind == "pfister":
        return forms.pfister(tower, [_build_elem(e, tower) for e in node[1]])
    if kind == "scale":
        return forms.scale(_build_elem(node[1], tower),
                           _build_node(node[2], tower))
    if kind == "perp":
        return forms.orth_sum(_build_node(node[1], tower),
                              _build_node(node[2], tower))
    if kind == "otimes":
        return forms.tensor(_build_node(node[1], tower),
                            _build_node(node[2], tower))
    if kind == "canned":
        return constructions.canned(node[1], *node[2])
    raise ValueError("bad node %r" % (kind,))


def build_form(text):
    """Parse and build over a fresh tower on the registered variables."""
    expr = parse_form(text)
    if expr.node[0] == "canned":
        form = constructions.canned(expr.node[1], *expr.node[2])
        return form.tower, form
    return expr.build()


def build_forms(texts):
    """Build several forms over a single shared tower."""
    exprs = [parse_form(t) for t in texts]
    names = []
    canned_towers = []
    for e in exprs:
        for v in e.var_names:
            if v not in names:
                names.append(v)
        if e.node[0] == "canned":
            canned_towers.append(e)
    if canned_towers:
        if len(exprs) != 1:
            raise FormSyntaxError("canned forms cannot be combined", 0)
        form = constructions.canned(exprs[0].node[1], *exprs[0].node[2])
        return form.tower, [form]
    tower = rational_tower(names or ("x",))
    return tower, [_build_node(e.node, tower) for e in exprs]


def tower_from_json(data):
    tower = rational_tower(tuple(data["vars"]))
    from .field_tower import extend_sqrt

    for gen in data.get("sqrts", []):
        b = parse_element(gen["square"], tower)
        tower = extend_sqrt(tower, b, name=gen["name"])
    return tower


# -- session config and dispatch -------------------------------------------------


class SessionConfig:
    def __init__(self, seed=0, k=32, trials=2, exact=False, depth=2,
                 candidates=512, output="json"):
        self.seed = seed
        self.k = k
        self.trials = trials
        self.exact = exact
        self.budget = invariants.Budget(depth, candidates)
        self.output = output

    def mode(self):
        if self.exact:
            return linalg2.RankMode.exact()
        return linalg2.RankMode.montecarlo(trials=self.trials, k=self.k,
                                           seed=self.seed)


def _common_flags(sp):
    sp.add_argument("--seed", type=int,
                    default=int(os.environ.get("QLQ_SEED", "0")))
    sp.add_argument("--gf-bits", dest="gf_bits", type=int, default=32,
                    help="GF(2^k) evaluation field size")
    sp.add_argument("--trials", type=int, default=2)
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--budget", type=int, default=512,
                    help="candidate budget for P_r searches")
    sp.add_argument("--depth", type=int, default=2,
                    help="generator-product depth for P_r searches")
    sp.add_argument("--output", choices=("json", "text"), default="json")


def _config(args):
    return SessionConfig(seed=args.seed, k=args.gf_bits, trials=args.trials,
                         exact=args.exact, depth=args.depth,
                         candidates=args.budget, output=args.output)


def _emit(payload, cfg):
    payload = dict(payload)
    payload["schema"] = SCHEMA
    print(json.dumps(payload, sort_keys=True, default=str))


def cmd_compute(args):
    cfg = _config(args)
    mode = cfg.mode()
    tower, form = build_form(args.form)
    total_dim = form.dim
    i0 = forms.isotropy_index(form, mode)
    if i0:
        form = forms.anisotropic_part(form, mode)
    if form.dim < 2 or form.entries[0].is_zero():
        nf = invariants.norm_form(form, mode) if not form.entries[0].is_zero() \
            else None
        report = {
            "form": args.form, "dim": total_dim, "i0": i0,
            "lndeg": nf.lndeg if nf else 0,
            "ndeg": nf.ndeg if nf else 1,
            "izh": None, "i1": None, "indices": [],
            "delta": {"members": [], "non_members": [], "unknown": []},
            "c": None, "is_qp": form.dim == 1 and nf is not None and nf.lndeg == 0,
            "is_qp_neighbour": False,
        }
        _emit(report, cfg)
        return 0
    st = invariants.splitting_tower(form, mode)
    rep = invariants.c_invariant(form, cfg.budget, mode)
    report = {
        "form": args.form,
        "dim": total_dim,
        "i0": i0,
        "lndeg": rep.lndeg,
        "ndeg": 1 << rep.lndeg,
        "izh": st.izh,
        "i1": st.i1,
        "indices": st.indices,
        "delta": rep.to_json(),
        "c": rep.c_value,
        "is_qp": invariants.is_quasi_pfister(form, mode),
        "is_qp_neighbour": invariants.is_qp_neighbour(form, mode),
    }
    _emit(report, cfg)
    return 0


def cmd_tower(args):
    cfg = _config(args)
    mode = cfg.mode()
    tower, form = build_form(args.form)
    st = invariants.splitting_tower(form, mode, max_steps=args.steps)
    payload = {
        "form": args.form,
        "dims": [f.dim for f in st.forms],
        "indices": st.indices,
        "izh": st.izh,
        "i1": st.i1,
        "complete": st.complete,
        "fields": [f.to_json() for f in st.fields],
    }
    _emit(payload, cfg)
    return 0


def cmd_isotropy(args):
    cfg = _config(args)
    mode = cfg.mode()
    tower, built = build_forms([args.phi, args.psi])
    phi, psi = built
    i0 = function_field.i0_over(phi, psi, mode)
    payload = {
        "phi": args.phi,
        "psi": args.psi,
        "i0": i0,
        "d": phi.dim - 2 * i0,
        "anis_dim": phi.dim - i0,
    }
    _emit(payload, cfg)
    return 0


def cmd_verify(args):
    cfg = _config(args)
    mode = cfg.mode()
    tower, built = build_forms([args.p, args.q])
    p, q = built
    report = theorems.verify_instance(p, q, cfg.budget, mode)
    _emit(report, cfg)
    return report["exit_code"]


def cmd_tables(args):
    cfg = _config(args)
    payload = {"tables": []}
    for izh in args.izh:
        payload["tables"].append(theorems.table_json(args.s, izh))
    if cfg.output == "text":
        for izh in args.izh:
            print(theorems.render_table_text(args.s, izh))
            print()
        return 0
    _emit(payload, cfg)
    return 0


def cmd_construct(args):
    cfg = _config(args)
    mode = cfg.mode()
    req = constructions.RealizabilityRequest(
        args.s, args.d, args.kdef, args.a, args.eps, args.branch)
    inst = constructions.realize(req, mode)
    payload = inst.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, sort_keys=True, indent=1, default=str)
    _emit(payload, cfg)
    return 0


def cmd_bench(args):
    sizes = tuple(int(s) for s in args.sizes.split(","))
    rows = linalg2.bench_rank(sizes=sizes, nvars=args.nvars, seed=args.seed,
                              trials=args.trials, k=args.k)
    from .gf2k import COMPILED

    kernel = "compiled" if COMPILED else "pure"
    print("size,mode,kernel,wall_time,rank")
    for row in rows:
        print("%d,%s,%s,%.6f,%d" % (
            row["size"], row["mode"], kernel, row["wall_time"], row["rank"]))
    if COMPILED and not os.environ.get("QLQ_PURE"):
        # rerun in a pure-Python child for the comparison rows
        import subprocess

        env = dict(os.environ, QLQ_PURE="1")
        cmd = [sys.executable, "-m", "qlq.cli", "bench",
               "--sizes", args.sizes, "--nvars", str(args.nvars),
               "--seed", str(args.seed), "--trials", str(args.trials),
               "--k", str(args.k)]
        out = subprocess.run(cmd, env=env, capture_output=True, text=True)
        for line in out.stdout.splitlines()[1:]:
            print(line)
    return 0


def cmd_corpus_run(args):
    cfg = _config(args)
    mode = cfg.mode()
    worst = 0
    results = []
    for name in sorted(os.listdir(args.dir)):
        if not name.endswith(".json"):
            continue
        with open(os.path.join(args.dir, name)) as fh:
            data = json.load(fh)
        tower = tower_from_json(data["tower"])
        p = QuasilinearForm(
            tower, tuple(parse_element(t, tower)
                         for t in _split_diag(data["p"])))
        q = QuasilinearForm(
            tower, tuple(parse_element(t, tower)
                         for t in _split_diag(data["q"])))
        rep = theorems.verify_instance(p, q, cfg.budget, mode)
        results.append({"file": name, "status": rep["status"]})
        worst = max(worst, rep["exit_code"])
    _emit({"results": results}, cfg)
    return worst


def _split_diag(text):
    text = text.strip()
    if not (text.startswith("<") and text.endswith(">")):
        raise FormSyntaxError("expected a diagonal form", 0)
    depth = 0
    parts, cur = [], []
    for ch in text[1:-1]:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="qlq",
        description="Quasilinear quadratic forms over GF(2) function fields")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("compute", help="full invariant report for a form")
    sp.add_argument("--form", required=True)
    _common_flags(sp)
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("tower", help="splitting tower of a form")
    sp.add_argument("--form", required=True)
    sp.add_argument("--steps", type=int, default=None)
    _common_flags(sp)
    sp.set_defaults(func=cmd_tower)

    sp = sub.add_parser("isotropy", help="isotropy of phi over F(psi)")
    sp.add_argument("--phi", required=True)
    sp.add_argument("--psi", required=True)
    _common_flags(sp)
    sp.set_defaults(func=cmd_isotropy)

    sp = sub.add_parser("verify", help="check the main theorems on a pair")
    sp.add_argument("--p", required=True)
    sp.add_argument("--q", required=True)
    _common_flags(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("tables", help="additional-residue tables")
    sp.add_argument("--s", type=int, default=4)
    sp.add_argument("--izh", type=lambda v: [int(x) for x in v.split(",")],
                    default=[16, 23, 28])
    sp.add_argument("--mod", type=int, default=None,
                    help="must equal 2^(s+2) when given")
    _common_flags(sp)
    sp.set_defaults(func=cmd_tables)

    sp = sub.add_parser("construct", help="realize an instance")
    sp.add_argument("--branch", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--k", dest="kdef", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--eps", type=int, required=True)
    sp.add_argument("--out", default=None)
    _common_flags(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("bench", help="rank backend benchmark (CSV)")
    sp.add_argument("--sizes", default="4,6,8,10,12")
    sp.add_argument("--nvars", type=int, default=3)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--trials", type=int, default=2)
    sp.add_argument("--k", type=int, default=32)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("corpus-run", help="verify a directory of instances")
    sp.add_argument("--dir", required=True)
    _common_flags(sp)
    sp.set_defaults(func=cmd_corpus_run)

    args = ap.parse_args(argv)
    if args.command == "tables" and args.mod is not None:
        if args.mod != 1 << (args.s + 2):
            print("error: --mod must equal 2^(s+2)", file=sys.stderr)
            return 1
    reset_fresh_names()
    linalg2.reset_call_counter()
    try:
        return args.func(args)
    except (FormSyntaxError, ValueError, KeyError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
