"""Lattice terms, the identity DSL, and exhaustive identity checking.

Terms are immutable trees of n-ary joins and meets over named variables.
An identity relates two terms by equality or one-sided inclusion and is
checked against a finite lattice by sweeping every assignment of elements
to variables.  The sweep runs on numpy arrays, chunked over a prefix of
the declared variable order, so the first reported counter-assignment is
always the lexicographically least one regardless of worker count.
"""

from __future__ import annotations

import itertools
import json
import multiprocessing
from dataclasses import dataclass

import numpy as np

from .depend import is_minimal_in, is_minimal_pair_cover, minimal_pairs
from .lattice import FinLattice


class TermError(ValueError):
    pass


class ParseError(TermError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class Term:
    kind: str                             # "var", "join", "meet"
    children: tuple["Term", ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.kind == "var":
            if not self.name or self.children:
                raise TermError("variable nodes carry a name and no children")
        elif self.kind in ("join", "meet"):
            if len(self.children) < 2:
                raise TermError("operator needs at least two arguments")
        else:
            raise TermError(f"unknown node kind {self.kind!r}")


def var(name: str) -> Term:
    return Term("var", name=name)


def join(*terms: Term) -> Term:
    return Term("join", tuple(terms))


def meet(*terms: Term) -> Term:
    return Term("meet", tuple(terms))


def term_variables(t: Term) -> frozenset[str]:
    if t.kind == "var":
        return frozenset((t.name,))
    return frozenset().union(*(term_variables(c) for c in t.children))


def term_to_sexpr(t: Term) -> str:
    if t.kind == "var":
        return t.name
    head = "v" if t.kind == "join" else "^"
    return "(" + " ".join([head] + [term_to_sexpr(c) for c in t.children]) + ")"


def _tokenize(text: str):
    toks = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
        elif ch in "()":
            toks.append((ch, i))
            i += 1
        else:
            j = i
            while j < len(text) and text[j] not in " \t\r\n()":
                j += 1
            toks.append((text[i:j], i))
            i = j
    return toks


def parse_term(text: str) -> Term:
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty input", 0)
    term, k = _parse_at(toks, 0, len(text))
    if k != len(toks):
        raise ParseError("trailing input", toks[k][1])
    return term


def _parse_at(toks, k: int, end: int):
    if k >= len(toks):
        raise ParseError("unexpected end of input", end)
    tok, pos = toks[k]
    if tok == ")":
        raise ParseError("unexpected ')'", pos)
    if tok != "(":
        if tok in ("v", "^"):
            raise ParseError("operator used as a variable", pos)
        return Term("var", name=tok), k + 1
    if k + 1 >= len(toks):
        raise ParseError("unexpected end of input", end)
    head, head_pos = toks[k + 1]
    if head not in ("v", "^"):
        raise ParseError("expected operator 'v' or '^'", head_pos)
    k += 2
    children = []
    while True:
        if k >= len(toks):
            raise ParseError("missing ')'", end)
        if toks[k][0] == ")":
            break
        child, k = _parse_at(toks, k, end)
        children.append(child)
    if len(children) < 2:
        raise ParseError("operator needs at least two arguments", head_pos)
    kind = "join" if head == "v" else "meet"
    return Term(kind, tuple(children)), k + 1


# -- identities ------------------------------------------------------------------


@dataclass(frozen=True)
class Identity:
    """Two terms related by "eq" or "leq" over a declared variable order.

    The variable order fixes witness tuples and the evaluation chunking,
    so it is part of the identity's contract.
    """

    name: str
    variables: tuple[str, ...]
    relation: str
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.relation not in ("eq", "leq"):
            raise TermError(f"unknown relation {self.relation!r}")
        if len(set(self.variables)) != len(self.variables):
            raise TermError("duplicate variable declaration")
        used = term_variables(self.lhs) | term_variables(self.rhs)
        stray = used - set(self.variables)
        if stray:
            raise TermError(f"undeclared variables: {sorted(stray)}")


def identity_to_json(ident: Identity) -> dict:
    return {
        "name": ident.name,
        "vars": list(ident.variables),
        "relation": ident.relation,
        "lhs": term_to_sexpr(ident.lhs),
        "rhs": term_to_sexpr(ident.rhs),
    }


def identity_from_json(obj: dict) -> Identity:
    name = obj.get("name", "")
    if obj.get("lhs") in (None, "") or obj.get("rhs") in (None, ""):
        raise TermError(
            f"identity file {name!r} is an unfilled placeholder; "
            "transcribe its terms before use"
        )
    return Identity(
        name=name,
        variables=tuple(obj["vars"]),
        relation=obj["relation"],
        lhs=parse_term(obj["lhs"]),
        rhs=parse_term(obj["rhs"]),
    )


def load_identity(path) -> Identity:
    with open(path, encoding="utf-8") as fh:
        return identity_from_json(json.load(fh))


# -- built-in identities -----------------------------------------------------------


def _identity_e() -> Identity:
    x, a = var("x"), var("a")
    b = [var("b0"), var("b1"), var("b2")]
    lhs = meet(x, *(join(a, b[i]) for i in range(3)))
    parts = [
        meet(x, b[i], *(join(a, b[j]) for j in range(3) if j != i))
        for i in range(3)
    ]
    for s in itertools.permutations(range(3)):
        bs0 = meet(b[s[0]], join(x, b[s[1]]))
        bs1 = meet(b[s[1]], join(x, b[s[2]]), join(b[s[0]], b[s[2]]))
        parts.append(meet(x, join(a, bs0), join(a, bs1), join(a, b[s[2]])))
    return Identity("E", ("x", "a", "b0", "b1", "b2"), "eq", lhs, join(*parts))


def _identity_p() -> Identity:
    a, b, c, d = var("a"), var("b"), var("c"), var("d")
    b0, b1 = var("b0"), var("b1")
    bp = meet(b, join(b0, b1))
    lhs = meet(a, join(bp, c), join(c, d))
    parts = [
        meet(a, bp, join(c, d)),
        meet(a, d, join(bp, c)),
        meet(a, join(meet(bp, join(a, d)), c), join(c, d)),
    ]
    for bi in (b0, b1):
        parts.append(meet(
            a,
            join(bi, c),
            join(meet(bp, join(a, bi), join(bi, d)), c),
            join(c, d),
        ))
    return Identity("P", ("a", "b", "c", "d", "b0", "b1"), "eq", lhs, join(*parts))


def _identity_hs() -> Identity:
    a, b, c = var("a"), var("b"), var("c")
    bs = [var("b0"), var("b1")]
    bp = meet(b, join(*bs))
    lhs = meet(a, join(bp, c))
    parts = [meet(a, bp)]
    for i in range(2):
        parts.append(meet(a, join(meet(b, bs[i]), c)))
    for i in range(2):
        parts.append(meet(
            a,
            join(meet(bp, join(a, bs[i])), c),
            join(bs[i], c),
            join(b, bs[1 - i]),
        ))
    for i in range(2):
        parts.append(meet(
            a,
            join(meet(bp, join(a, bs[i])), c),
            join(bs[0], c),
            join(bs[1], c),
        ))
    return Identity("HS", ("a", "b", "c", "b0", "b1"), "eq", lhs, join(*parts))


def _identity_star() -> Identity:
    x0, x1, x2, x3 = var("x0"), var("x1"), var("x2"), var("x3")
    xa, xb = var("xa"), var("xb")
    u1, u2 = x1, x2
    for _ in range(2):
        u1, u2 = (
            meet(u1, join(x0, u2), join(x0, xb)),
            meet(u2, join(x3, u1), join(x3, xa)),
        )
    s = meet(x1, join(x0, meet(join(x1, xb), join(x2, xa))))
    t = join(
        meet(x1, xb),
        meet(x1, join(x0, xa)),
        meet(x1, join(x2, xa)),
        meet(x1, join(x0, meet(x2, join(x1, xa)))),
        meet(x1, join(x0, meet(x2, join(x1, xb)))),
        meet(x1, join(x0, meet(x2, join(x3, xb)))),
    )
    names = ("x0", "x1", "x2", "x3", "xa", "xb")
    return Identity("STAR", names, "leq", u1, join(s, t))


def _identity_d2dual() -> Identity:
    x = var("x")
    ys = [var("y0"), var("y1"), var("y2")]
    lhs = meet(x, join(*ys))
    rhs = join(*(meet(x, join(ys[i], ys[j]))
                 for i in range(3) for j in range(i + 1, 3)))
    return Identity("D2DUAL", ("x", "y0", "y1", "y2"), "eq", lhs, rhs)


_BUILTINS = {
    "E": _identity_e,
    "P": _identity_p,
    "HS": _identity_hs,
    "STAR": _identity_star,
    "D2DUAL": _identity_d2dual,
}


def builtin_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILTINS))


def builtin(name: str) -> Identity:
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise TermError(
            f"unknown identity {name!r}; built in: {', '.join(builtin_names())}"
        ) from None
    return factory()


# -- exhaustive checking -----------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    holds: bool
    witness: dict[str, int] | None
    assignments: int


CHUNK_CELLS = 1 << 21
ASSIGNMENT_GUARD = 10 ** 9


def eval_term(L: FinLattice, t: Term, env: dict[str, int]) -> int:
    if t.kind == "var":
        return env[t.name]
    table = L.join_table if t.kind == "join" else L.meet_table
    acc = eval_term(L, t.children[0], env)
    for c in t.children[1:]:
        acc = table[acc][eval_term(L, c, env)]
    return acc


def naive_check(L: FinLattice, ident: Identity, one_sided: bool = False) -> CheckResult:
    """Reference sweep in pure python; first failure in lexicographic order."""
    names = ident.variables
    want_eq = ident.relation == "eq" and not one_sided
    for values in itertools.product(range(L.n), repeat=len(names)):
        env = dict(zip(names, values))
        lv = eval_term(L, ident.lhs, env)
        rv = eval_term(L, ident.rhs, env)
        ok = lv == rv if want_eq else L.leq(lv, rv)
        if not ok:
            return CheckResult(ident.name, False, env, L.n ** len(names))
    return CheckResult(ident.name, True, None, L.n ** len(names))


def _compile(ident: Identity):
    """CSE the two term trees into one topologically sorted node list."""
    order = {name: i for i, name in enumerate(ident.variables)}
    index: dict[Term, int] = {}
    nodes: list[tuple] = []
    support: list[frozenset[int]] = []

    def visit(t: Term) -> int:
        got = index.get(t)
        if got is not None:
            return got
        if t.kind == "var":
            node = ("var", order[t.name])
            sup = frozenset((order[t.name],))
        else:
            kids = tuple(visit(c) for c in t.children)
            node = (t.kind, kids)
            sup = frozenset().union(*(support[k] for k in kids))
        index[t] = len(nodes)
        nodes.append(node)
        support.append(sup)
        return index[t]

    li = visit(ident.lhs)
    ri = visit(ident.rhs)
    return nodes, support, li, ri


@dataclass
class _Sweep:
    """Everything a chunk scan needs; one instance per check call."""

    nodes: list
    support: list
    li: int
    ri: int
    n: int
    n_prefix: int
    n_vars: int
    join_flat: np.ndarray
    meet_flat: np.ndarray
    want_eq: bool

    def scan(self, prefix: tuple[int, ...]):
        """First violating inner index in C order, or None."""
        n, c = self.n, self.n_prefix
        inner = self.n_vars - c
        full = (n,) * inner
        vals: list = []
        for (kind, payload), sup in zip(self.nodes, self.support):
            if kind == "var":
                vi = payload
                if vi < c:
                    arr = np.int32(prefix[vi])
                else:
                    shape = [1] * inner
                    shape[vi - c] = n
                    arr = np.arange(n, dtype=np.int32).reshape(shape)
            else:
                table = self.join_flat if kind == "join" else self.meet_flat
                arr = vals[payload[0]]
                for k in payload[1:]:
                    arr = table.take(arr * n + vals[k])
            vals.append(arr)
        lv, rv = vals[self.li], vals[self.ri]
        if self.want_eq:
            mask = lv != rv
        else:
            mask = self.meet_flat.take(lv * n + rv) != lv
        if inner == 0:
            return 0 if mask else None
        mask = np.broadcast_to(mask, full)
        if not mask.any():
            return None
        return int(np.argmax(mask))


_WORKER_SWEEP: _Sweep | None = None


def _worker_init(sweep: _Sweep) -> None:
    global _WORKER_SWEEP
    _WORKER_SWEEP = sweep


def _worker_scan(prefix: tuple[int, ...]):
    return _WORKER_SWEEP.scan(prefix)


def check(L: FinLattice, ident: Identity, workers: int = 1,
          one_sided: bool = False, force: bool = False) -> CheckResult:
    """Exhaustively check an identity on a finite lattice.

    one_sided restricts an "eq" check to the left-below-right inclusion;
    sound only when the converse inclusion holds in every lattice, as it
    does for the built-ins.  The reported witness is the lexicographically
    least counter-assignment in the declared variable order, independent
    of worker count.
    """
    n, v = L.n, len(ident.variables)
    total = n ** v
    if total > ASSIGNMENT_GUARD and not force:
        raise TermError(
            f"assignment space {n}^{v} exceeds {ASSIGNMENT_GUARD}; "
            "pass force=True to sweep anyway"
        )
    c = 0
    while n ** (v - c) > CHUNK_CELLS:
        c += 1
    nodes, support, li, ri = _compile(ident)
    _, join_flat, meet_flat = L.np_tables
    sweep = _Sweep(
        nodes, support, li, ri, n, c, v, join_flat, meet_flat,
        want_eq=ident.relation == "eq" and not one_sided,
    )
    inner_shape = (n,) * (v - c)

    def result(prefix, flat):
        tail = np.unravel_index(flat, inner_shape) if inner_shape else ()
        values = tuple(prefix) + tuple(int(t) for t in tail)
        return CheckResult(ident.name, False, dict(zip(ident.variables, values)), total)

    prefixes = itertools.product(range(n), repeat=c)
    if workers <= 1 or c == 0:
        for prefix in prefixes:
            flat = sweep.scan(prefix)
            if flat is not None:
                return result(prefix, flat)
        return CheckResult(ident.name, True, None, total)

    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(workers, initializer=_worker_init, initargs=(sweep,)) as pool:
        # imap preserves chunk order, so the first hit is the least one
        for prefix, flat in zip(itertools.product(range(n), repeat=c),
                                pool.imap(_worker_scan, prefixes, chunksize=1)):
            if flat is not None:
                pool.terminate()
                return result(prefix, flat)
    return CheckResult(ident.name, True, None, total)


# -- semantic interpretations over the join-irreducibles ---------------------------


SIGMA_VARIABLES = {
    "E": ("x", "a", "b0", "b1", "b2"),
    "P": ("a", "b", "c", "d", "b0", "b1"),
    "HS": ("a", "b", "c", "b0", "b1"),
}


def check_sigma(L: FinLattice, which: str) -> CheckResult:
    """Check the join-irreducible interpretation of E, P, or HS.

    Quantifiers run over J(L) in ascending element order, minimal covers
    come from the join-dependency machinery, and the first failing tuple
    in that order is returned.
    """
    if which not in SIGMA_VARIABLES:
        raise TermError(f"no semantic interpretation for {which!r}")
    names = SIGMA_VARIABLES[which]
    jis = L.join_irreducibles
    total = len(jis) ** len(names)
    scan = {"E": _sigma_e, "P": _sigma_p, "HS": _sigma_hs}[which]
    witness = scan(L, jis)
    if witness is None:
        return CheckResult(f"{which}_sigma", True, None, total)
    return CheckResult(f"{which}_sigma", False, dict(zip(names, witness)), total)


def _sigma_e(L: FinLattice, jis):
    jt = L.join_table
    for x in jis:
        for a in jis:
            bs = [b for b in jis if is_minimal_pair_cover(L, x, a, b)]
            if not bs:
                continue
            for b0 in bs:
                for b1 in bs:
                    for b2 in bs:
                        if not _sigma_e_conclusion(L, jt, x, (b0, b1, b2)):
                            return (x, a, b0, b1, b2)
    return None


def _sigma_e_conclusion(L, jt, x, triple):
    for p0, p1, p2 in itertools.permutations(triple):
        if (L.leq(p0, jt[x][p1]) and L.leq(jt[x][p1], jt[x][p2])
                and L.leq(p1, jt[p0][p2])):
            return True
    return False


def _sigma_p(L: FinLattice, jis):
    jt = L.join_table
    pairs = {a: set(minimal_pairs(L, a)) for a in jis}
    for a in jis:
        mp = pairs[a]
        for b in jis:
            for c in jis:
                if (b, c) not in mp:
                    continue
                for d in jis:
                    if (c, d) not in mp:
                        continue
                    for b0 in jis:
                        for b1 in jis:
                            if not L.leq(b, jt[b0][b1]):
                                continue
                            if L.leq(b, jt[a][d]):
                                continue
                            if any(
                                L.leq(a, jt[bi][c]) and L.leq(b, jt[a][bi])
                                and L.leq(b, jt[bi][d])
                                for bi in (b0, b1)
                            ):
                                continue
                            return (a, b, c, d, b0, b1)
    return None


def _sigma_hs(L: FinLattice, jis):
    jt = L.join_table
    for a in jis:
        for b in jis:
            if a == b:
                continue
            for c in jis:
                if not is_minimal_in(L, a, b, c):
                    continue
                for b0 in jis:
                    if L.leq(b, b0):
                        continue
                    for b1 in jis:
                        if L.leq(b, b1) or not L.leq(b, jt[b0][b1]):
                            continue
                        if not _sigma_hs_conclusion(L, jt, a, b, c, b0, b1):
                            return (a, b, c, b0, b1)
    return None


def _sigma_hs_conclusion(L, jt, a, b, c, b0, b1):
    side = L.leq(a, jt[b0][c]) and L.leq(a, jt[b1][c])
    for bi, bo in ((b0, b1), (b1, b0)):
        if not L.leq(b, jt[a][bi]):
            continue
        if side or (L.leq(a, jt[bi][c]) and L.leq(a, jt[b][bo])):
            return True
    return False
