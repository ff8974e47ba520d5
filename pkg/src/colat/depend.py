"""Join-dependency structure: minimal covers, dependency sets, weak tracks."""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import FinLattice, LatticeError, LatticeMap


def min_covers(L: FinLattice, p: int) -> list[tuple[int, ...]]:
    """All minimal nontrivial join-covers of p, as sorted tuples of
    join-irreducibles.

    A cover E is minimal when every nontrivial join-cover refining E
    (each member below some member of E) contains E.  Candidates are
    antichains of join-irreducibles not above p; supersets of covers are
    never minimal, so the search stops as soon as the join reaches p.
    """
    if p not in L.join_irreducibles:
        raise ValueError(f"element {p} is not join-irreducible")
    jis = [j for j in L.join_irreducibles if not L.leq(p, j)]
    covers: list[tuple[int, ...]] = []

    def extend(start: int, chosen: list[int], join_val: int) -> None:
        for k in range(start, len(jis)):
            e = jis[k]
            if any(L.leq(e, c) or L.leq(c, e) for c in chosen):
                continue
            v = L.join_table[join_val][e]
            chosen.append(e)
            if L.leq(p, v):
                covers.append(tuple(sorted(chosen)))
            else:
                extend(k + 1, chosen, v)
            chosen.pop()

    extend(0, [], L.bottom)
    out = []
    for e in covers:
        minimal = True
        for g in covers:
            if g != e and all(any(L.leq(x, y) for y in e) for x in g):
                minimal = False
                break
        if minimal:
            out.append(e)
    out.sort()
    return out


def dependents(L: FinLattice, a: int) -> tuple[int, ...]:
    """Join-irreducibles occurring in some minimal nontrivial join-cover of a.

    Never a singleton: a minimal cover has at least two members, since a
    one-element nontrivial cover would put a below that element.
    """
    seen: set[int] = set()
    for e in min_covers(L, a):
        seen.update(e)
    return tuple(sorted(seen))


def dependency_closure(L: FinLattice, a: int) -> tuple[int, ...]:
    """The anchor together with its dependents, ascending."""
    return tuple(sorted({a, *dependents(L, a)}))


def is_minimal_in(L: FinLattice, p: int, x: int, y: int) -> bool:
    """p <= x v y holds and no x' < x satisfies p <= x' v y."""
    if not L.leq(p, L.join_table[x][y]):
        return False
    below = L.down[x] & ~(1 << x)
    m = below
    while m:
        x2 = (m & -m).bit_length() - 1
        m &= m - 1
        if L.leq(p, L.join_table[x2][y]):
            return False
    return True


def is_minimal_pair_cover(L: FinLattice, p: int, x: int, y: int) -> bool:
    """p <= x v y is a nontrivial cover, minimal in both coordinates."""
    if L.leq(p, x) or L.leq(p, y):
        return False
    return is_minimal_in(L, p, x, y) and is_minimal_in(L, p, y, x)


def minimal_pairs(L: FinLattice, p: int) -> list[tuple[int, int]]:
    """Ordered pairs (x, y) of join-irreducibles forming minimal nontrivial
    covers of p, ascending."""
    jis = L.join_irreducibles
    out = []
    for x in jis:
        for y in jis:
            if x != y and is_minimal_pair_cover(L, p, x, y):
                out.append((x, y))
    return out


# -- dependency invariants ----------------------------------------------------


@dataclass(frozen=True)
class InvariantReport:
    name: str
    ok: bool
    witness: tuple | None


def check_dependency_invariants(L: FinLattice) -> list[InvariantReport]:
    """Check transitivity, antichain shape, cover minimality, the two-step
    cover law, and the ordered-interval law over the join-irreducibles."""
    jis = L.join_irreducibles
    rd = {a: dependents(L, a) for a in jis}
    rd_sets = {a: set(v) for a, v in rd.items()}
    reports = []

    witness = None
    for a in jis:
        for b in rd[a]:
            for c in rd[b]:
                if c != a and c not in rd_sets[a]:
                    witness = (a, b, c)
                    break
            if witness:
                break
        if witness:
            break
    reports.append(InvariantReport("dependency-transitive", witness is None, witness))

    witness = None
    for a in jis:
        ds = rd[a]
        for i in range(len(ds)):
            for j in range(len(ds)):
                if i != j and L.leq(ds[i], ds[j]):
                    witness = (a, ds[i], ds[j])
                    break
            if witness:
                break
        if witness:
            break
    reports.append(InvariantReport("dependents-antichain", witness is None, witness))

    witness = None
    for p in jis:
        ds = rd[p]
        for x in ds:
            for y in ds:
                if x < y and L.leq(p, L.join_table[x][y]):
                    if not (is_minimal_in(L, p, x, y) and is_minimal_in(L, p, y, x)):
                        witness = (p, x, y)
                        break
            if witness:
                break
        if witness:
            break
    reports.append(InvariantReport("covers-minimal-above", witness is None, witness))

    # x = y makes the conclusion a trivial cover, so the pair is kept distinct
    witness = None
    for a in jis:
        ds = rd[a]
        for u in ds:
            for x in ds:
                if x == u or not L.leq(a, L.join_table[u][x]):
                    continue
                for y in ds:
                    if y == u or y == x:
                        continue
                    if not L.leq(a, L.join_table[u][y]):
                        continue
                    if not L.leq(x, L.join_table[a][y]):
                        continue
                    if not is_minimal_pair_cover(L, x, u, y):
                        witness = (a, u, x, y)
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break
    reports.append(InvariantReport("two-step-cover", witness is None, witness))
    return reports


def interval_value_check(L: FinLattice) -> InvariantReport:
    """Three minimal pair covers of a common element over a common side, with
    joins forming a chain, must form a strict chain whose middle member lies
    under the join of the outer two.  Meaningful on join-semidistributive
    lattices satisfying identity E."""
    jis = L.join_irreducibles
    witness = None
    for a in jis:
        for x in jis:
            bs = [b for b in jis if b != a and is_minimal_pair_cover(L, x, a, b)]
            for b0 in bs:
                for b1 in bs:
                    for b2 in bs:
                        if len({b0, b1, b2}) != 3:
                            continue
                        j0 = L.join_table[a][b0]
                        j1 = L.join_table[a][b1]
                        j2 = L.join_table[a][b2]
                        if L.leq(j0, j1) and L.leq(j1, j2):
                            if j0 == j1 or j1 == j2 or \
                                    not L.leq(b1, L.join_table[b0][b2]):
                                witness = (a, x, b0, b1, b2)
                        if witness:
                            break
                    if witness:
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break
    return InvariantReport("ordered-interval-values", witness is None, witness)


# -- weak tracks ---------------------------------------------------------------


@dataclass(frozen=True)
class WeakTrack:
    """Entries x_0..x_n with a side element; see conditions in is_weak_track."""

    entries: tuple[int, ...]
    side: int

    @property
    def length(self) -> int:
        return len(self.entries) - 1


@dataclass(frozen=True)
class WeakBiTrack:
    """Two weak tracks sharing their head, tied by the joint cover condition."""

    first: WeakTrack
    second: WeakTrack

    @property
    def index(self) -> tuple[int, int]:
        return (self.first.length, self.second.length)

    def trace(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.first.entries, self.second.entries)


def is_weak_track(L: FinLattice, t: WeakTrack) -> bool:
    xs, x = t.entries, t.side
    if len(xs) < 2:
        return False
    jt, mt = L.join_table, L.meet_table
    if xs[0] == jt[mt[xs[0]][xs[1]]][mt[xs[0]][x]]:
        return False
    n = len(xs) - 1
    for k in range(n):
        if not L.leq(xs[k], jt[xs[k + 1]][x]):
            return False
    for k in range(1, n):
        if L.leq(xs[k - 1], jt[mt[xs[k]][xs[k + 1]]][x]):
            return False
    return True


def is_weak_bitrack(L: FinLattice, t: WeakBiTrack) -> bool:
    if not (is_weak_track(L, t.first) and is_weak_track(L, t.second)):
        return False
    xs, ys = t.first.entries, t.second.entries
    if xs[0] != ys[0]:
        return False
    jt, mt = L.join_table, L.meet_table
    if not L.leq(xs[0], jt[xs[1]][ys[1]]):
        return False
    return xs[0] != jt[mt[xs[0]][xs[1]]][mt[xs[0]][ys[1]]]


def _extend_track(L: FinLattice, xs: list[int], x: int, upto: int, sink) -> None:
    if len(xs) - 1 == upto:
        sink(tuple(xs))
        return
    jt, mt = L.join_table, L.meet_table
    k = len(xs)
    for nxt in range(L.n):
        if not L.leq(xs[k - 1], jt[nxt][x]):
            continue
        if k >= 2 and L.leq(xs[k - 2], jt[mt[xs[k - 1]][nxt]][x]):
            continue
        xs.append(nxt)
        _extend_track(L, xs, x, upto, sink)
        xs.pop()


def weak_tracks(L: FinLattice, n: int):
    """All weak tracks of length n, in ascending lexicographic element order."""
    if n < 1:
        raise ValueError("track length must be at least 1")
    jt, mt = L.join_table, L.meet_table
    for x0 in range(L.n):
        for side in range(L.n):
            for x1 in range(L.n):
                if x0 != jt[mt[x0][x1]][mt[x0][side]] and L.leq(x0, jt[x1][side]):
                    found = []
                    _extend_track(L, [x0, x1], side, n, found.append)
                    for entries in found:
                        yield WeakTrack(entries, side)


def weak_bitracks(L: FinLattice, m: int, n: int):
    """All weak bi-tracks of index (m, n), deterministic order."""
    if m < 1 or n < 1:
        raise ValueError("bi-track index components must be at least 1")
    jt, mt = L.join_table, L.meet_table
    for x0 in range(L.n):
        firsts = []
        for side in range(L.n):
            for x1 in range(L.n):
                if x0 != jt[mt[x0][x1]][mt[x0][side]] and L.leq(x0, jt[x1][side]):
                    _extend_track(L, [x0, x1], side, m,
                                  lambda e, s=side: firsts.append(WeakTrack(e, s)))
        if not firsts:
            continue
        seconds = []
        for side in range(L.n):
            for y1 in range(L.n):
                if x0 != jt[mt[x0][y1]][mt[x0][side]] and L.leq(x0, jt[y1][side]):
                    _extend_track(L, [x0, y1], side, n,
                                  lambda e, s=side: seconds.append(WeakTrack(e, s)))
        for f in firsts:
            for s in seconds:
                cand = WeakBiTrack(f, s)
                xs, ys = f.entries, s.entries
                if not L.leq(x0, jt[xs[1]][ys[1]]):
                    continue
                if x0 == jt[mt[x0][xs[1]]][mt[x0][ys[1]]]:
                    continue
                yield cand


def track_embedding(L: FinLattice, t: WeakBiTrack) -> LatticeMap:
    """Embedding of the convex-subset lattice of an (m+n)-chain induced by a
    weak bi-track: chain positions map to track entries, fanned out from the
    shared head, and general convex sets go to joins of their members.

    Raises LatticeError when the induced map is not an injective homomorphism.
    """
    from .poset import Poset

    m, n = t.index
    xs, ys = t.first.entries, t.second.entries
    img = {}
    for i in range(m):
        img[i] = xs[m - i]
    for i in range(m, m + n):
        img[i] = ys[i - m + 1]
    K, sets = Poset.chain(m + n).co_lattice()
    u = L.meet_table[img[0]][img[1]]
    values = []
    for s in sets:
        if s == 0:
            values.append(u)
        else:
            values.append(L.join_of(img[i] for i in range(m + n) if (s >> i) & 1))
    cand = LatticeMap(K, L, tuple(values))
    if not cand.injective or not cand.preserves_ops():
        raise LatticeError("track does not induce an embedding")
    return cand
