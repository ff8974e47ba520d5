"""Membership in SUB(LO) and SUB(n), with embedding certificates.

A finite lattice belongs to SUB(LO) when it embeds into a product of
lattices Co(T) of order-convex subsets of chains T.  The decision
procedure looks, for every join-irreducible a, for a total order on
J_a(L) = {a} union rd(a) such that the trace map

    x  |->  {b in J_a(L) : b <= x}

lands in the convex subsets of that chain and preserves joins.  One
witness per anchor assembles into an embedding certificate; a failed
anchor refutes membership.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .depend import dependency_closure
from .lattice import FinLattice, LatticeError
from .poset import Poset
from .terms import CheckResult, check_sigma


@dataclass(frozen=True)
class ChainOrderWitness:
    """A total order on J_a(L) whose induced trace map is a homomorphism."""

    anchor: int
    chain: tuple[int, ...]


@dataclass(frozen=True)
class EmbeddingCertificate:
    """One chain-order witness per join-irreducible, plus the product map.

    maps[w][x] is the sorted tuple of chain positions of witness w hit
    by element x.  The combined map x |-> (maps[0][x], maps[1][x], ...)
    is the claimed embedding into the product of Co(chain) factors.
    """

    witnesses: tuple[ChainOrderWitness, ...]
    maps: tuple[tuple[tuple[int, ...], ...], ...]

    def component(self, x: int) -> tuple[tuple[int, ...], ...]:
        return tuple(m[x] for m in self.maps)

    @property
    def chain_sizes(self) -> tuple[int, ...]:
        return tuple(len(w.chain) for w in self.witnesses)


@dataclass(frozen=True)
class MembershipResult:
    accepted: bool
    certificate: Optional[EmbeddingCertificate]
    anchor: Optional[int]
    diagnostics: tuple[CheckResult, ...]


def induced_map(L: FinLattice, chain: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Trace of every element of L on the chain, as sorted position tuples."""
    return tuple(
        tuple(i for i, b in enumerate(chain) if L.leq(b, x)) for x in range(L.n)
    )


def _intervals_of(phi: tuple[tuple[int, ...], ...]):
    """Convert position tuples to (lo, hi) intervals, or None on a gap."""
    out = []
    for pos in phi:
        if not pos:
            out.append(None)
        elif pos[-1] - pos[0] + 1 == len(pos):
            out.append((pos[0], pos[-1]))
        else:
            return None
    return out


def _intervals_are_hom(L: FinLattice, iv) -> bool:
    # join of convex sets in a chain is the hull, meet is intersection
    for x in range(L.n):
        for y in range(x + 1, L.n):
            a, b = iv[x], iv[y]
            if a is None:
                hull = b
            elif b is None:
                hull = a
            else:
                hull = (min(a[0], b[0]), max(a[1], b[1]))
            if iv[L.join(x, y)] != hull:
                return False
            if a is None or b is None:
                cap = None
            else:
                lo, hi = max(a[0], b[0]), min(a[1], b[1])
                cap = (lo, hi) if lo <= hi else None
            if iv[L.meet(x, y)] != cap:
                return False
    return True


def _chain_is_valid(L: FinLattice, chain: tuple[int, ...]) -> bool:
    iv = _intervals_of(induced_map(L, chain))
    return iv is not None and _intervals_are_hom(L, iv)


def _block_sort(items: list[int], before) -> list[int] | None:
    """Sort by the relation before(x, y), or give up if it is not total."""
    out: list[int] = []
    for x in items:
        k = 0
        while k < len(out) and before(out[k], x):
            k += 1
        out.insert(k, x)
    for i, j in combinations(range(len(out)), 2):
        if not before(out[i], out[j]):
            return None
    return out


def _bipartition_chain(L: FinLattice, a: int, deps: tuple[int, ...]) -> tuple[int, ...] | None:
    """Heuristic order: split rd(a) across the graph {x, y : a <= x v y}.

    Cross pairs of the split jointly cover a, each side is ordered by
    comparing joins with a, and a sits between the sides.  The result
    is only a candidate and must still pass the full validity check.
    """
    color: dict[int, int] = {}
    for start in deps:
        if start in color:
            continue
        color[start] = 0
        queue = [start]
        while queue:
            x = queue.pop()
            for y in deps:
                if y == x or not L.leq(a, L.join(x, y)):
                    continue
                if y not in color:
                    color[y] = color[x] ^ 1
                    queue.append(y)
                elif color[y] == color[x]:
                    return None
    side_a = [x for x in deps if color[x] == 0]
    side_b = [x for x in deps if color[x] == 1]
    left = _block_sort(side_a, lambda x, y: L.leq(y, L.join(a, x)))
    right = _block_sort(side_b, lambda x, y: L.leq(x, L.join(a, y)))
    if left is None or right is None:
        return None
    return tuple(left) + (a,) + tuple(right)


def _permutation_chain(L: FinLattice, ja: tuple[int, ...]) -> tuple[int, ...] | None:
    """Backtracking over total orders of ja, smallest element id first.

    Two prunes keep the search shallow.  A trace that closed may not
    reopen (convexity).  For b strictly below u v w, once any member of
    the joined trace is placed its leftmost position is frozen, and b
    placed before it, or after all of it, can never land in the hull.
    """
    k = len(ja)
    triples = []
    for u, w in combinations(ja, 2):
        uw = L.join(u, w)
        members = tuple(c for c in ja if L.leq(c, u) or L.leq(c, w))
        for b in ja:
            if b != u and b != w and L.leq(b, uw) and not L.leq(b, u) and not L.leq(b, w):
                triples.append((b, members))

    prefix: list[int] = []
    placed: dict[int, int] = {}
    states = [0] * L.n  # 0 no hit yet, 1 open run, 2 run closed

    def hull_ok() -> bool:
        for b, members in triples:
            known = [placed[c] for c in members if c in placed]
            closed = len(known) == len(members)
            pb = placed.get(b)
            if pb is None:
                if closed:
                    return False  # b can only land after the whole hull
            else:
                if not known or min(known) > pb:
                    return False
                if closed and max(known) < pb:
                    return False
        return True

    def extend() -> tuple[int, ...] | None:
        if len(prefix) == k:
            chain = tuple(prefix)
            return chain if _chain_is_valid(L, chain) else None
        for e in ja:
            if e in placed:
                continue
            saved = states.copy()
            ok = True
            for x in range(L.n):
                if L.leq(e, x):
                    if states[x] == 2:
                        ok = False
                        break
                    states[x] = 1
                elif states[x] == 1:
                    states[x] = 2
            if ok:
                placed[e] = len(prefix)
                prefix.append(e)
                if hull_ok():
                    got = extend()
                    if got is not None:
                        return got
                prefix.pop()
                del placed[e]
            states[:] = saved
        return None

    return extend()


def chain_order(L: FinLattice, a: int) -> ChainOrderWitness | None:
    """Search a total order on J_a(L) whose trace map is a homomorphism.

    Tries the bipartition heuristic first and falls back to exhaustive
    backtracking, so a None answer means no order exists.  The witness
    is deterministic: the fallback explores orders lexicographically by
    element id.
    """
    if a not in L.join_irreducibles:
        raise ValueError(f"element {a} is not join-irreducible")
    ja = dependency_closure(L, a)
    if len(ja) == 1:
        witness = ChainOrderWitness(a, (a,))
        return witness if _chain_is_valid(L, witness.chain) else None
    deps = tuple(x for x in ja if x != a)
    guess = _bipartition_chain(L, a, deps)
    if guess is not None and _chain_is_valid(L, guess):
        return ChainOrderWitness(a, guess)
    chain = _permutation_chain(L, ja)
    return ChainOrderWitness(a, chain) if chain is not None else None


_WORKER_LATTICE: FinLattice | None = None


def _membership_worker_init(L: FinLattice) -> None:
    global _WORKER_LATTICE
    _WORKER_LATTICE = L


def _membership_worker(a: int):
    return chain_order(_WORKER_LATTICE, a)


def decide_sub_lo(L: FinLattice, workers: int = 1) -> MembershipResult:
    """Decide membership of L in SUB(LO).

    Accepted means every join-irreducible admits a chain-order witness;
    the assembled certificate is re-verified before being returned.  A
    rejection reports the first failing anchor in element order plus
    whichever of the Sigma conditions E, P, HS fail on L.
    """
    jis = L.join_irreducibles
    found: list[ChainOrderWitness] = []
    failing: int | None = None
    if workers > 1 and len(jis) > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers, initializer=_membership_worker_init, initargs=(L,)) as pool:
            for a, w in zip(jis, pool.imap(_membership_worker, jis, chunksize=1)):
                if w is None:
                    failing = a
                    pool.terminate()
                    break
                found.append(w)
    else:
        for a in jis:
            w = chain_order(L, a)
            if w is None:
                failing = a
                break
            found.append(w)
    if failing is not None:
        diags = tuple(
            r for r in (check_sigma(L, name) for name in ("E", "P", "HS")) if not r.holds
        )
        return MembershipResult(False, None, failing, diags)
    cert = EmbeddingCertificate(
        tuple(found), tuple(induced_map(L, w.chain) for w in found)
    )
    if not verify_certificate(L, cert):
        raise LatticeError("assembled certificate failed self-verification")
    return MembershipResult(True, cert, None, ())


def decide_sub_n(L: FinLattice, n: int, workers: int = 1) -> bool:
    """Membership in SUB(n): every witness chain must fit in an n-chain."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        # SUB(0) is the trivial variety
        return L.n == 1
    if not decide_sub_lo(L, workers=workers).accepted:
        return False
    widest = max((len(dependency_closure(L, a)) for a in L.join_irreducibles), default=0)
    return widest <= n


def verify_certificate(L: FinLattice, cert: EmbeddingCertificate) -> bool:
    """Independent check: anchors, traces, homomorphism, injectivity, size.

    Every stored map is recomputed from its chain, so tampering with
    either half of a witness is caught.  The size bound is the sum of
    chain lengths against the square of the join-irreducible count.
    """
    jis = L.join_irreducibles
    if len(cert.witnesses) != len(cert.maps):
        return False
    if tuple(sorted(w.anchor for w in cert.witnesses)) != jis:
        return False
    if sum(len(w.chain) for w in cert.witnesses) > len(jis) ** 2:
        return False
    for w, stored in zip(cert.witnesses, cert.maps):
        if tuple(sorted(w.chain)) != dependency_closure(L, w.anchor):
            return False
        phi = induced_map(L, w.chain)
        if stored != phi:
            return False
        iv = _intervals_of(phi)
        if iv is None or not _intervals_are_hom(L, iv):
            return False
    for x in range(L.n):
        for y in range(x + 1, L.n):
            if cert.component(x) == cert.component(y):
                return False
    return True


def certificate_to_json(L: FinLattice, cert: EmbeddingCertificate) -> list[dict]:
    out = []
    for w, phi in zip(cert.witnesses, cert.maps):
        out.append(
            {
                "anchor": L.label_of(w.anchor),
                "chain": [L.label_of(b) for b in w.chain],
                "map": {L.label_of(x): list(phi[x]) for x in range(L.n)},
            }
        )
    return out


def certificate_from_json(L: FinLattice, data: list[dict]) -> EmbeddingCertificate:
    index = {L.label_of(i): i for i in range(L.n)}
    witnesses = []
    maps = []
    for item in data:
        anchor = index[item["anchor"]]
        chain = tuple(index[lbl] for lbl in item["chain"])
        phi = [()] * L.n
        for lbl, pos in item["map"].items():
            phi[index[lbl]] = tuple(pos)
        witnesses.append(ChainOrderWitness(anchor, chain))
        maps.append(tuple(phi))
    return EmbeddingCertificate(tuple(witnesses), tuple(maps))


def brute_force_oracle(L: FinLattice) -> bool:
    """Decide SUB(LO) membership without the anchored chain construction.

    Searches a jointly order-separating family of homomorphisms into
    Co(k) for k = |J(L)|: for every pair x !<= y some member must keep
    the images unordered.  Homomorphisms are found by backtracking over
    arbitrary convex values, one separating witness per pair, so the
    answer does not depend on any particular order of J_a(L).
    """
    if L.n > 8:
        raise ValueError("oracle size guard exceeded (|L| > 8)")
    pairs = [
        (x, y)
        for x in range(L.n)
        for y in range(L.n)
        if x != y and not L.leq(x, y)
    ]
    if not pairs:
        return True
    k = len(L.join_irreducibles)
    co, _ = Poset.chain(k).co_lattice()
    separated = [False] * len(pairs)
    for idx, (x, y) in enumerate(pairs):
        if separated[idx]:
            continue
        hom = _separating_hom(L, co, x, y)
        if hom is None:
            return False
        for jdx, (u, v) in enumerate(pairs):
            if not co.leq(hom[u], hom[v]):
                separated[jdx] = True
    return True


def _separating_hom(L: FinLattice, co: FinLattice, x: int, y: int) -> list[int] | None:
    """A homomorphism L -> co whose image of x is not below the image of y."""
    order = [x, y] + [e for e in range(L.n) if e != x and e != y]
    slot = {e: i for i, e in enumerate(order)}
    imgs: list[int] = []

    def consistent(e: int, v: int) -> bool:
        t = len(imgs)
        if t == 1 and co.leq(imgs[0], v):
            return False  # v would order the pair to separate
        for i in range(t):
            u = order[i]
            j, m = L.join(u, e), L.meet(u, e)
            jv = co.join(imgs[i], v)
            mv = co.meet(imgs[i], v)
            if slot[j] < t and jv != imgs[slot[j]]:
                return False
            if j == e and jv != v:
                return False
            if slot[m] < t and mv != imgs[slot[m]]:
                return False
            if m == e and mv != v:
                return False
        for i in range(t):
            for i2 in range(i + 1, t):
                if L.join(order[i], order[i2]) == e and co.join(imgs[i], imgs[i2]) != v:
                    return False
                if L.meet(order[i], order[i2]) == e and co.meet(imgs[i], imgs[i2]) != v:
                    return False
        return True

    def extend() -> bool:
        if len(imgs) == len(order):
            return True
        e = order[len(imgs)]
        for v in range(co.n):
            if consistent(e, v):
                imgs.append(v)
                if extend():
                    return True
                imgs.pop()
        return False

    if extend():
        return [imgs[slot[e]] for e in range(L.n)]
    return None
