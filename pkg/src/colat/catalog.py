"""Named lattices Co(n) and L_{m,n}, SI classification, variety position.

L_{m,n} is the sublattice of Co(m+n+1) of those convex sets X with
m in X implying m-1 in X.  Its join-irreducibles are the singletons
other than {m} together with c_m = {m-1, m}, and its canonical weak
bi-track runs from c_m down to {0} on one side and up to {m+n} on the
other.  Together with the Co(n) these are the only finite subdirectly
irreducible members of SUB(LO), which is what classify_si leans on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .depend import WeakBiTrack, WeakTrack, dependency_closure, is_weak_bitrack
from .lattice import (
    FinLattice,
    LatticeError,
    LatticeMap,
    embedding_search,
    find_isomorphism,
    monolith,
)
from .membership import decide_sub_lo
from .poset import Poset


def co_chain(n: int) -> FinLattice:
    """The lattice of order-convex subsets of the n-element chain."""
    if n < 1:
        raise ValueError("chain must have at least one element")
    return Poset.chain(n).co_lattice()[0]


def _lmn_parts(m: int, n: int) -> tuple[FinLattice, list[int]]:
    if m < 1 or n < 1:
        raise ValueError("both side lengths must be at least 1")
    full, masks = Poset.chain(m + n + 1).co_lattice()
    keep = [i for i, s in enumerate(masks) if not (s >> m) & 1 or (s >> (m - 1)) & 1]
    pos = {e: i for i, e in enumerate(keep)}
    up = []
    for e in keep:
        bits = 0
        for f in keep:
            if full.leq(e, f):
                bits |= 1 << pos[f]
        up.append(bits)
    labels = tuple(full.label_of(e) for e in keep)
    return FinLattice(tuple(up), labels), [masks[e] for e in keep]


def l_mn(m: int, n: int) -> FinLattice:
    """Convex subsets X of the (m+n+1)-chain with m in X forcing m-1 in X."""
    return _lmn_parts(m, n)[0]


def canonical_bitrack(m: int, n: int) -> WeakBiTrack:
    """The defining weak bi-track of l_mn(m, n).

    First track: c_m, {m-1}, ..., {0} with side {m+n}.  Second track:
    c_m, {m+1}, ..., {m+n} with side {0}.  Element ids refer to
    l_mn(m, n); the result is validated before being returned.
    """
    L, masks = _lmn_parts(m, n)
    at = {s: i for i, s in enumerate(masks)}
    cm = at[(1 << (m - 1)) | (1 << m)]
    first = WeakTrack(
        entries=(cm,) + tuple(at[1 << i] for i in range(m - 1, -1, -1)),
        side=at[1 << (m + n)],
    )
    second = WeakTrack(
        entries=(cm,) + tuple(at[1 << i] for i in range(m + 1, m + n + 1)),
        side=at[1 << 0],
    )
    track = WeakBiTrack(first, second)
    if not is_weak_bitrack(L, track):
        raise LatticeError(f"canonical bi-track of l_mn({m}, {n}) failed validation")
    return track


@dataclass(frozen=True)
class SIClass:
    """Classification of a finite lattice against the SI catalog.

    tag is one of "co_chain", "lmn", "not_si", "not_member"; params
    carries (n,) or (m, n) for the first two, and iso the witnessing
    isomorphism from the catalog lattice.
    """

    tag: str
    params: tuple[int, ...]
    iso: Optional[LatticeMap]


def classify_si(L: FinLattice) -> SIClass:
    """Match a lattice against the finite subdirectly irreducible members.

    Raises LatticeError if an accepted SI lattice matches no catalog
    entry; no such lattice exists, so that signals a bug here.
    """
    if not decide_sub_lo(L).accepted:
        return SIClass("not_member", (), None)
    if monolith(L) is None:
        return SIClass("not_si", (), None)
    k = len(L.join_irreducibles)
    candidates: list[tuple[str, tuple[int, ...], FinLattice]] = []
    if k >= 1:
        candidates.append(("co_chain", (k,), co_chain(k)))
    for mm in range(1, k - 1):
        candidates.append(("lmn", (mm, k - 1 - mm), l_mn(mm, k - 1 - mm)))
    for tag, params, K in candidates:
        if K.n != L.n:
            continue
        iso = find_isomorphism(K, L)
        if iso is not None:
            return SIClass(tag, params, iso)
    raise LatticeError("subdirectly irreducible member matches no catalog lattice")


@dataclass(frozen=True)
class VarietyPosition:
    """least_n plus an embedding-level diagnostic, not a variety computation.

    embedded_si lists the catalog lattices below the least_n horizon
    that embed into L as sublattices: ("co_chain", k) for k < least_n
    and ("lmn", k, l) for k + l < least_n.
    """

    least_n: int
    embedded_si: tuple[tuple, ...]


def variety_position(L: FinLattice) -> VarietyPosition:
    if not decide_sub_lo(L).accepted:
        raise LatticeError("variety position is defined for accepted lattices only")
    if L.n == 1:
        return VarietyPosition(0, ())
    widest = max(len(dependency_closure(L, a)) for a in L.join_irreducibles)
    # SUB(1) = SUB(2), so 2 is the least index ever reported
    least = max(2, widest)
    embedded: list[tuple] = []
    for k in range(1, least):
        if embedding_search(co_chain(k), L) is not None:
            embedded.append(("co_chain", k))
    for total in range(2, least):
        for k in range(1, total):
            if embedding_search(l_mn(k, total - k), L) is not None:
                embedded.append(("lmn", k, total - k))
    return VarietyPosition(least, tuple(embedded))
