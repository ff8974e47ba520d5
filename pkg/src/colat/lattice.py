"""Finite lattices: order tables, structure predicates, congruences, map searches."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property


class LatticeError(ValueError):
    """Raised when input data does not describe a lattice."""


def _transitive_close(up: list[int], n: int) -> list[int]:
    # up[i] is the bitmask of {j : i <= j}; closes the relation in place.
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = up[i]
            m = acc
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                acc |= up[j]
            if acc != up[i]:
                up[i] = acc
                changed = True
    return up


class FinLattice:
    """A finite lattice on elements 0..n-1.

    The order is stored as up-set bitmasks: bit j of up[i] set iff i <= j.
    Join and meet tables are computed eagerly; construction fails if some
    pair lacks a least upper bound or greatest lower bound.
    """

    def __init__(self, up: tuple[int, ...], labels: tuple[str, ...] | None = None,
                 validate: bool = True):
        n = len(up)
        self.n = n
        self.up = tuple(up)
        if labels is None:
            labels = tuple(str(i) for i in range(n))
        if len(labels) != n:
            raise LatticeError("label count does not match element count")
        self.labels = tuple(labels)
        down = [0] * n
        for i in range(n):
            if not (up[i] >> i) & 1:
                raise LatticeError("order is not reflexive")
            m = up[i]
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                down[j] |= 1 << i
        self.down = tuple(down)
        if validate:
            for i in range(n):
                if self.up[i] & self.down[i] != 1 << i:
                    raise LatticeError("order is not antisymmetric")
            for i in range(n):
                m = self.up[i]
                while m:
                    j = (m & -m).bit_length() - 1
                    m &= m - 1
                    if self.up[j] & ~self.up[i]:
                        raise LatticeError("order is not transitive")
        self._build_tables()

    def _build_tables(self) -> None:
        n, up, down = self.n, self.up, self.down
        join = [[0] * n for _ in range(n)]
        meet = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                ub = up[i] & up[j]
                if not ub:
                    raise LatticeError(f"elements {i},{j} have no upper bound")
                v = _least_of(ub, up)
                if v < 0:
                    raise LatticeError(f"elements {i},{j} have no join")
                join[i][j] = join[j][i] = v
                lb = down[i] & down[j]
                if not lb:
                    raise LatticeError(f"elements {i},{j} have no lower bound")
                v = _greatest_of(lb, down)
                if v < 0:
                    raise LatticeError(f"elements {i},{j} have no meet")
                meet[i][j] = meet[j][i] = v
        self.join_table = join
        self.meet_table = meet
        self.bottom = _least_of((1 << n) - 1, up)
        self.top = _greatest_of((1 << n) - 1, down)
        if self.bottom < 0 or self.top < 0:
            raise LatticeError("lattice lacks bottom or top")

    # -- basic queries ----------------------------------------------------

    def leq(self, i: int, j: int) -> bool:
        return bool((self.up[i] >> j) & 1)

    def join(self, i: int, j: int) -> int:
        return self.join_table[i][j]

    def meet(self, i: int, j: int) -> int:
        return self.meet_table[i][j]

    def join_of(self, elems) -> int:
        v = self.bottom
        for e in elems:
            v = self.join_table[v][e]
        return v

    def meet_of(self, elems) -> int:
        v = self.top
        for e in elems:
            v = self.meet_table[v][e]
        return v

    @cached_property
    def lower_covers(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for i in range(self.n):
            below = self.down[i] & ~(1 << i)
            covers = []
            m = below
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                if not (below & self.up[j] & ~(1 << j)):
                    covers.append(j)
            out.append(tuple(covers))
        return tuple(out)

    @cached_property
    def upper_covers(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in range(self.n)]
        for i in range(self.n):
            for j in self.lower_covers[i]:
                out[j].append(i)
        return tuple(tuple(sorted(c)) for c in out)

    @cached_property
    def join_irreducibles(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n)
                     if i != self.bottom and len(self.lower_covers[i]) == 1)

    def label_of(self, i: int) -> str:
        return self.labels[i]

    def __repr__(self) -> str:
        return f"FinLattice(n={self.n})"

    # -- numpy mirrors -----------------------------------------------------

    @cached_property
    def np_tables(self):
        import numpy as np

        n = self.n
        leq = np.zeros((n, n), dtype=bool)
        for i in range(n):
            m = self.up[i]
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                leq[i, j] = True
        join = np.array(self.join_table, dtype=np.int32)
        meet = np.array(self.meet_table, dtype=np.int32)
        return leq, join.ravel(), meet.ravel()


def _least_of(mask: int, up: tuple[int, ...] | list[int]) -> int:
    m = mask
    while m:
        j = (m & -m).bit_length() - 1
        m &= m - 1
        if mask & ~up[j] == 0:
            return j
    return -1


def _greatest_of(mask: int, down: tuple[int, ...] | list[int]) -> int:
    m = mask
    while m:
        j = (m & -m).bit_length() - 1
        m &= m - 1
        if mask & ~down[j] == 0:
            return j
    return -1


# -- structure predicates --------------------------------------------------


@dataclass(frozen=True)
class StructuralFlags:
    distributive: bool
    join_semidistributive: bool
    dual_2_distributive: bool


def structural_predicates(L: FinLattice) -> StructuralFlags:
    """Evaluate the three structural laws by exhaustive assignment."""
    n = L.n
    jt, mt = L.join_table, L.meet_table
    distributive = True
    for x in range(n):
        mx = mt[x]
        for y in range(n):
            xy = mx[y]
            jy = jt[y]
            for z in range(n):
                if mx[jy[z]] != jt[xy][mx[z]]:
                    distributive = False
                    break
            if not distributive:
                break
        if not distributive:
            break
    jsd = True
    for a in range(n):
        ja = jt[a]
        for b in range(n):
            ab = ja[b]
            for c in range(n):
                if ja[c] == ab and ja[mt[b][c]] != ab:
                    jsd = False
                    break
            if not jsd:
                break
        if not jsd:
            break
    return StructuralFlags(distributive, jsd, _dual_2_distributive(L))


def _dual_2_distributive(L: FinLattice) -> bool:
    import numpy as np

    n = L.n
    _, join, meet = L.np_tables
    y0 = np.arange(n, dtype=np.int32).reshape(n, 1, 1)
    y1 = np.arange(n, dtype=np.int32).reshape(1, n, 1)
    y2 = np.arange(n, dtype=np.int32).reshape(1, 1, n)
    j01 = join.take(y0 * n + y1)
    j02 = join.take(y0 * n + y2)
    j12 = join.take(y1 * n + y2)
    j012 = join.take(j01 * n + y2)
    for x in range(n):
        lhs = meet.take(x * n + j012)
        rhs = join.take(join.take(meet.take(x * n + j01) * n
                                  + meet.take(x * n + j02)) * n
                        + meet.take(x * n + j12))
        if not np.array_equal(lhs, rhs):
            return False
    return True


# -- congruences -------------------------------------------------------------


@dataclass(frozen=True)
class Congruence:
    """A lattice congruence given by its block partition.

    block_of[i] is the least element of the block containing i, so two
    congruences are equal iff their block_of tuples are equal.
    """

    block_of: tuple[int, ...]

    @classmethod
    def from_union_find(cls, parent: list[int]) -> "Congruence":
        n = len(parent)

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        rep: dict[int, int] = {}
        block = [0] * n
        for i in range(n):
            r = find(i)
            if r not in rep:
                rep[r] = i
            block[i] = rep[r]
        return cls(tuple(block))

    def blocks(self) -> list[tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for i, b in enumerate(self.block_of):
            out.setdefault(b, []).append(i)
        return [tuple(v) for _, v in sorted(out.items())]

    def same(self, i: int, j: int) -> bool:
        return self.block_of[i] == self.block_of[j]

    @property
    def is_zero(self) -> bool:
        return all(b == i for i, b in enumerate(self.block_of))

    @property
    def is_all(self) -> bool:
        return all(b == self.block_of[0] for b in self.block_of)

    def refines(self, other: "Congruence") -> bool:
        # every block of self lies inside a block of other
        seen: dict[int, int] = {}
        for i, b in enumerate(self.block_of):
            ob = other.block_of[i]
            if b in seen:
                if seen[b] != ob:
                    return False
            else:
                seen[b] = ob
        return True


def principal_congruence(L: FinLattice, a: int, b: int) -> Congruence:
    """Least congruence identifying a and b.

    Starts from the pair (a^b, avb) and closes under joining and meeting
    with every element until the partition is stable.
    """
    n = L.n
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> bool:
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        if rx > ry:
            rx, ry = ry, rx
        parent[ry] = rx
        return True

    jt, mt = L.join_table, L.meet_table
    union(mt[a][b], jt[a][b])
    changed = True
    while changed:
        changed = False
        # group elements by current block and close under the operations
        reps: dict[int, int] = {}
        for i in range(n):
            r = find(i)
            if r in reps:
                x = reps[r]
                for c in range(n):
                    if union(jt[x][c], jt[i][c]):
                        changed = True
                    if union(mt[x][c], mt[i][c]):
                        changed = True
            else:
                reps[r] = i
    return Congruence.from_union_find(parent)


def monolith(L: FinLattice) -> Congruence | None:
    """Least nonzero congruence, or None when it does not exist.

    Every nonzero congruence collapses some covering pair, so it suffices
    to compare the principal congruences of covering pairs.
    """
    principals: list[Congruence] = []
    seen: set[tuple[int, ...]] = set()
    for i in range(L.n):
        for j in L.lower_covers[i]:
            th = principal_congruence(L, j, i)
            if th.block_of not in seen:
                seen.add(th.block_of)
                principals.append(th)
    if not principals:
        return None
    for cand in principals:
        if all(cand.refines(other) for other in principals):
            return cand
    return None


def congruence_lattice(L: FinLattice) -> list[Congruence]:
    """All congruences of L, by join-closing the principal ones. Small L only."""
    n = L.n
    zero = Congruence(tuple(range(n)))
    principals = []
    seen = {zero.block_of}
    for i in range(n):
        for j in L.lower_covers[i]:
            th = principal_congruence(L, j, i)
            if th.block_of not in seen:
                seen.add(th.block_of)
                principals.append(th)
    out = [zero] + list(principals)
    frontier = list(principals)
    while frontier:
        nxt = []
        for th in frontier:
            for pr in principals:
                j = _congruence_join(L, th, pr)
                if j.block_of not in seen:
                    seen.add(j.block_of)
                    out.append(j)
                    nxt.append(j)
        frontier = nxt
    return out


def _congruence_join(L: FinLattice, a: Congruence, b: Congruence) -> Congruence:
    parent = list(range(L.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx == ry:
            return
        if rx > ry:
            rx, ry = ry, rx
        parent[ry] = rx

    for th in (a, b):
        for block in th.blocks():
            for x in block[1:]:
                union(block[0], x)
    # the partition join of two congruences of a lattice is a congruence
    return Congruence.from_union_find(parent)


# -- lattice maps ------------------------------------------------------------


@dataclass(frozen=True)
class LatticeMap:
    """A map between finite lattices, stored as the image of every element."""

    source: FinLattice
    target: FinLattice
    values: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.values[i]

    def preserves_ops(self) -> bool:
        s, t, v = self.source, self.target, self.values
        for i in range(s.n):
            for j in range(i + 1, s.n):
                if v[s.join_table[i][j]] != t.join_table[v[i]][v[j]]:
                    return False
                if v[s.meet_table[i][j]] != t.meet_table[v[i]][v[j]]:
                    return False
        return True

    @property
    def injective(self) -> bool:
        return len(set(self.values)) == len(self.values)

    @property
    def surjective(self) -> bool:
        return len(set(self.values)) == self.target.n

    def to_json(self) -> dict:
        return {
            "source_size": self.source.n,
            "target_size": self.target.n,
            "values": list(self.values),
        }


def direct_product(L1: FinLattice, L2: FinLattice) -> FinLattice:
    n1, n2 = L1.n, L2.n
    n = n1 * n2
    up = []
    labels = []
    for i in range(n1):
        for j in range(n2):
            mask = 0
            u1, u2 = L1.up[i], L2.up[j]
            m1 = u1
            while m1:
                a = (m1 & -m1).bit_length() - 1
                m1 &= m1 - 1
                m2 = u2
                while m2:
                    b = (m2 & -m2).bit_length() - 1
                    m2 &= m2 - 1
                    mask |= 1 << (a * n2 + b)
            up.append(mask)
            labels.append(f"({L1.labels[i]},{L2.labels[j]})")
    return FinLattice(tuple(up), tuple(labels), validate=False)


# -- map searches ------------------------------------------------------------


def _derived_hom(K: FinLattice, target: FinLattice, bot_img: int,
                 ji_imgs: dict[int, int]) -> tuple[int, ...]:
    out = []
    for x in range(K.n):
        v = bot_img
        m = K.down[x]
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            if j in ji_imgs:
                v = target.join_table[v][ji_imgs[j]]
        out.append(v)
    return tuple(out)


def embedding_search(K: FinLattice, L: FinLattice) -> LatticeMap | None:
    """First lattice embedding of K into L in lexicographic image order, or None.

    Backtracks over images of the bottom and the join-irreducibles of K;
    the rest of the map is forced by joins and verified afterwards.
    """
    if K.n > L.n:
        return None
    jis = list(K.join_irreducibles)
    holder: list[LatticeMap | None] = [None]

    def extend(idx: int, bot_img: int, imgs: dict[int, int]) -> bool:
        if idx == len(jis):
            values = _derived_hom(K, L, bot_img, imgs)
            cand = LatticeMap(K, L, values)
            if cand.injective and cand.preserves_ops():
                holder[0] = cand
                return True
            return False
        j = jis[idx]
        for v in range(L.n):
            if not L.leq(bot_img, v) or v == bot_img:
                continue
            ok = True
            for j2, v2 in imgs.items():
                if K.leq(j2, j) != L.leq(v2, v) or K.leq(j, j2) != L.leq(v, v2):
                    ok = False
                    break
            if ok and extend(idx + 1, bot_img, {**imgs, j: v}):
                return True
        return False

    for b in range(L.n):
        if extend(0, b, {}):
            return holder[0]
    return None


def surjection_search(K: FinLattice, L: FinLattice):
    """Iterate all surjective lattice homomorphisms from K onto L.

    Deterministic order: lexicographic in (bottom image, join-irreducible
    images with join-irreducibles ascending).
    """
    if K.n < L.n:
        return
    jis = list(K.join_irreducibles)

    def extend(idx: int, bot_img: int, imgs: dict[int, int]):
        if idx == len(jis):
            values = _derived_hom(K, L, bot_img, imgs)
            cand = LatticeMap(K, L, values)
            if cand.surjective and cand.preserves_ops():
                yield cand
            return
        j = jis[idx]
        for v in range(L.n):
            if not L.leq(bot_img, v):
                continue
            ok = True
            for j2, v2 in imgs.items():
                if K.leq(j2, j) and not L.leq(v2, v):
                    ok = False
                    break
                if K.leq(j, j2) and not L.leq(v, v2):
                    ok = False
                    break
            if ok:
                imgs[j] = v
                yield from extend(idx + 1, bot_img, imgs)
                del imgs[j]

    for b in range(L.n):
        yield from extend(0, b, {})


def find_isomorphism(K: FinLattice, L: FinLattice) -> LatticeMap | None:
    """Order isomorphism search with invariant pruning."""
    if K.n != L.n:
        return None

    def profile(M: FinLattice, i: int) -> tuple:
        return (bin(M.down[i]).count("1"), bin(M.up[i]).count("1"),
                len(M.lower_covers[i]), len(M.upper_covers[i]))

    pk = [profile(K, i) for i in range(K.n)]
    pl = [profile(L, i) for i in range(L.n)]
    if sorted(pk) != sorted(pl):
        return None
    candidates = [[j for j in range(L.n) if pl[j] == pk[i]] for i in range(K.n)]
    used = [False] * L.n
    assign = [-1] * K.n

    def extend(i: int) -> bool:
        if i == K.n:
            return True
        for v in candidates[i]:
            if used[v]:
                continue
            ok = True
            for i2 in range(i):
                if K.leq(i2, i) != L.leq(assign[i2], v) or \
                        K.leq(i, i2) != L.leq(v, assign[i2]):
                    ok = False
                    break
            if ok:
                assign[i] = v
                used[v] = True
                if extend(i + 1):
                    return True
                used[v] = False
                assign[i] = -1
        return False

    if extend(0):
        return LatticeMap(K, L, tuple(assign))
    return None


# -- enumeration of all small lattices ---------------------------------------


def _canonical_key(down: tuple[int, ...]) -> tuple:
    n = len(down)
    up = [0] * n
    for i in range(n):
        m = down[i]
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            up[j] |= 1 << i
    inv = [(bin(down[i]).count("1"), bin(up[i]).count("1")) for i in range(n)]
    groups: dict[tuple, list[int]] = {}
    for i in range(n):
        groups.setdefault(inv[i], []).append(i)
    ordered_groups = [groups[k] for k in sorted(groups)]
    best = None
    for parts in itertools.product(*(itertools.permutations(g) for g in ordered_groups)):
        perm = [0] * n  # perm[old] = new
        pos = 0
        for part in parts:
            for old in part:
                perm[old] = pos
                pos += 1
        key = []
        inv_perm = [0] * n
        for old, new in enumerate(perm):
            inv_perm[new] = old
        for new in range(n):
            old = inv_perm[new]
            mask = 0
            m = down[old]
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                mask |= 1 << perm[j]
            key.append(mask)
        key = tuple(key)
        if best is None or key < best:
            best = key
    return best


def _lattice_extensions(down: list[int], up: list[int], n_target: int, out: list):
    n = len(down)
    if n == n_target:
        maximal = [i for i in range(n) if up[i] == 1 << i]
        if len(maximal) == 1:
            out.append(tuple(down))
        return
    # new element n is maximal; its strict down-set must be a down-closed
    # set containing the bottom element 0
    for mask in range(1, 1 << n, 2):
        ok = True
        m = mask
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            if down[j] & ~mask:
                ok = False
                break
        if not ok:
            continue
        # meets frozen now: every pair (i, new) needs a greatest lower bound,
        # and joins must not acquire a second minimal upper bound
        new_down = mask | (1 << n)
        good = True
        for i in range(n):
            clb = down[i] & new_down
            if _greatest_of(clb, down) < 0:
                good = False
                break
        if good:
            members = [i for i in range(n) if (mask >> i) & 1]
            for ai in range(len(members)):
                for bi in range(ai + 1, len(members)):
                    i, j = members[ai], members[bi]
                    cub = up[i] & up[j]
                    if cub:
                        least = _least_of(cub, up)
                        # previous pruning keeps a least upper bound whenever
                        # one exists; it must stay below the new element
                        if least < 0 or not (mask >> least) & 1:
                            good = False
                            break
                if not good:
                    break
        if not good:
            continue
        down2 = down + [new_down]
        up2 = [u | (1 << n) if (mask >> i) & 1 else u for i, u in enumerate(up)]
        up2.append(1 << n)
        _lattice_extensions(down2, up2, n_target, out)


def lattices_of_size(n: int) -> list[FinLattice]:
    """All lattices with exactly n elements, one per isomorphism class."""
    if n < 1:
        return []
    if n == 1:
        return [FinLattice((1,), validate=False)]
    raw: list[tuple[int, ...]] = []
    _lattice_extensions([1], [1], n, raw)
    seen: set[tuple] = set()
    out = []
    for down in raw:
        key = _canonical_key(down)
        if key in seen:
            continue
        seen.add(key)
        up = [0] * n
        for i in range(n):
            m = down[i]
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                up[j] |= 1 << i
        out.append(FinLattice(tuple(up), validate=False))
    return out


def iter_lattices(max_size: int):
    for n in range(1, max_size + 1):
        yield from lattices_of_size(n)


# -- serialization ------------------------------------------------------------


def lattice_to_json(L: FinLattice) -> dict:
    pairs = []
    for i in range(L.n):
        m = L.up[i] & ~(1 << i)
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            pairs.append([i, j])
    pairs.sort()
    return {"size": L.n, "leq_pairs": pairs, "labels": list(L.labels)}


def lattice_from_json(data: dict) -> FinLattice:
    try:
        n = int(data["size"])
        pairs = data["leq_pairs"]
    except (KeyError, TypeError) as exc:
        raise LatticeError(f"bad lattice JSON: {exc}") from exc
    if n < 1:
        raise LatticeError("lattice must have at least one element")
    up = [1 << i for i in range(n)]
    for pair in pairs:
        i, j = int(pair[0]), int(pair[1])
        if not (0 <= i < n and 0 <= j < n):
            raise LatticeError(f"leq pair {pair} out of range")
        up[i] |= 1 << j
    _transitive_close(up, n)
    labels = data.get("labels")
    if labels is not None:
        labels = tuple(str(x) for x in labels)
    return FinLattice(tuple(up), labels)


def lattice_dumps(L: FinLattice) -> str:
    return json.dumps(lattice_to_json(L), sort_keys=True)
