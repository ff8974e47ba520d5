import json

import pytest

from colat.depend import dependency_closure
from colat.lattice import (
    direct_product,
    iter_lattices,
    lattice_from_json,
    structural_predicates,
)
from colat.membership import (
    ChainOrderWitness,
    EmbeddingCertificate,
    brute_force_oracle,
    certificate_from_json,
    certificate_to_json,
    chain_order,
    decide_sub_lo,
    decide_sub_n,
    induced_map,
    verify_certificate,
)
from colat.poset import Poset
from colat.terms import builtin, check


def co_chain(n):
    return Poset.chain(n).co_lattice()[0]


def by_label(L, lbl):
    return next(i for i in range(L.n) if L.label_of(i) == lbl)


@pytest.fixture
def pentagon():
    return lattice_from_json(
        {
            "size": 5,
            "leq_pairs": [[0, 1], [0, 2], [0, 3], [0, 4], [1, 2], [1, 4], [2, 4], [3, 4]],
            "labels": ["0", "a", "c", "b", "1"],
        }
    )


@pytest.fixture
def diamond():
    return lattice_from_json(
        {
            "size": 5,
            "leq_pairs": [[0, 1], [0, 2], [0, 3], [0, 4], [1, 4], [2, 4], [3, 4]],
            "labels": ["0", "a", "b", "c", "1"],
        }
    )


# -- chain_order ------------------------------------------------------------


def test_chain_order_co3_middle_singleton():
    L = co_chain(3)
    a = by_label(L, "{1}")
    w = chain_order(L, a)
    labels = tuple(L.label_of(b) for b in w.chain)
    assert labels in (("{0}", "{1}", "{2}"), ("{2}", "{1}", "{0}"))


def test_chain_order_endpoint_is_trivial():
    L = co_chain(3)
    a = by_label(L, "{0}")
    w = chain_order(L, a)
    assert w.chain == (a,)


def test_chain_order_distributive_always_singleton():
    L = direct_product(co_chain(1), direct_product(co_chain(1), co_chain(1)))
    assert structural_predicates(L).distributive
    for a in L.join_irreducibles:
        assert chain_order(L, a).chain == (a,)


def test_chain_order_diamond_fails_every_atom(diamond):
    for a in diamond.join_irreducibles:
        assert chain_order(diamond, a) is None


def test_chain_order_rejects_reducible():
    L = co_chain(3)
    with pytest.raises(ValueError):
        chain_order(L, L.top)
    with pytest.raises(ValueError):
        chain_order(L, L.bottom)


def test_chain_order_deterministic():
    L = co_chain(5)
    for a in L.join_irreducibles:
        assert chain_order(L, a) == chain_order(L, a)


def test_induced_map_positions():
    L = co_chain(3)
    chain = tuple(by_label(L, s) for s in ("{0}", "{1}", "{2}"))
    phi = induced_map(L, chain)
    assert phi[by_label(L, "{}")] == ()
    assert phi[by_label(L, "{0,1}")] == (0, 1)
    assert phi[by_label(L, "{1,2}")] == (1, 2)
    assert phi[by_label(L, "{0,1,2}")] == (0, 1, 2)


# -- decide_sub_lo ----------------------------------------------------------


def test_diamond_rejected_with_sigma_diagnostics(diamond):
    r = decide_sub_lo(diamond)
    assert not r.accepted
    assert r.certificate is None
    assert r.anchor == diamond.join_irreducibles[0]
    names = {d.name for d in r.diagnostics}
    assert "HS_sigma" in names
    assert all(not d.holds for d in r.diagnostics)


def test_pentagon_accepted(pentagon):
    r = decide_sub_lo(pentagon)
    assert r.accepted and r.anchor is None and r.diagnostics == ()
    assert verify_certificate(pentagon, r.certificate)
    c = by_label(pentagon, "c")
    wit = next(w for w in r.certificate.witnesses if w.anchor == c)
    assert len(wit.chain) == 3


def test_pentagon_single_anchor_injective(pentagon):
    # subdirectly irreducible: some anchor must see all of J(L) injectively
    r = decide_sub_lo(pentagon)
    k = len(pentagon.join_irreducibles)
    full = [
        m
        for w, m in zip(r.certificate.witnesses, r.certificate.maps)
        if len(w.chain) == k
    ]
    assert any(len(set(m)) == pentagon.n for m in full)


def test_co4_certificate_size():
    L = co_chain(4)
    r = decide_sub_lo(L)
    assert r.accepted
    total = sum(r.certificate.chain_sizes)
    assert total == 10
    assert total <= len(L.join_irreducibles) ** 2
    assert verify_certificate(L, r.certificate)


def test_one_element_lattice_accepted():
    one = lattice_from_json({"size": 1, "leq_pairs": []})
    r = decide_sub_lo(one)
    assert r.accepted
    assert r.certificate.witnesses == ()
    assert verify_certificate(one, r.certificate)


def test_workers_agree():
    L = co_chain(4)
    assert decide_sub_lo(L, workers=2) == decide_sub_lo(L)


def test_workers_agree_on_rejection(diamond):
    r1 = decide_sub_lo(diamond)
    r2 = decide_sub_lo(diamond, workers=2)
    assert (r1.accepted, r1.anchor, r1.diagnostics) == (r2.accepted, r2.anchor, r2.diagnostics)


def test_accepted_lattices_satisfy_identities():
    for L in iter_lattices(5):
        if decide_sub_lo(L).accepted:
            for name in ("E", "P", "HS"):
                assert check(L, builtin(name)).holds, (L.up, name)


# -- decide_sub_n -----------------------------------------------------------


def test_sub_n_examples(pentagon):
    C3 = co_chain(3)
    assert decide_sub_n(C3, 3)
    assert not decide_sub_n(C3, 2)
    square = direct_product(co_chain(1), co_chain(1))
    assert decide_sub_n(square, 2)
    assert decide_sub_n(pentagon, 3)
    assert not decide_sub_n(pentagon, 2)


def test_sub_zero_is_trivial_variety():
    one = lattice_from_json({"size": 1, "leq_pairs": []})
    assert decide_sub_n(one, 0)
    assert not decide_sub_n(co_chain(1), 0)


def test_sub_n_rejects_negative():
    with pytest.raises(ValueError):
        decide_sub_n(co_chain(2), -1)


def test_distributive_in_sub_two():
    for L in iter_lattices(6):
        if structural_predicates(L).distributive:
            assert decide_sub_n(L, 2)


# -- certificates -----------------------------------------------------------


def test_certificate_json_round_trip():
    L = co_chain(4)
    cert = decide_sub_lo(L).certificate
    data = json.loads(json.dumps(certificate_to_json(L, cert)))
    back = certificate_from_json(L, data)
    assert back == cert
    assert verify_certificate(L, back)


def test_certificate_swapped_chain_fails():
    L = co_chain(4)
    data = certificate_to_json(L, decide_sub_lo(L).certificate)
    item = next(d for d in data if len(d["chain"]) >= 2)
    item["chain"][0], item["chain"][1] = item["chain"][1], item["chain"][0]
    assert not verify_certificate(L, certificate_from_json(L, data))


def test_certificate_tampered_map_fails():
    L = co_chain(4)
    cert = decide_sub_lo(L).certificate
    data = certificate_to_json(L, cert)
    item = next(d for d in data if len(d["chain"]) >= 2)
    top_label = L.label_of(L.top)
    item["map"][top_label] = item["map"][top_label][:-1]
    assert not verify_certificate(L, certificate_from_json(L, data))


def test_certificate_missing_witness_fails():
    L = co_chain(4)
    cert = decide_sub_lo(L).certificate
    pruned = EmbeddingCertificate(cert.witnesses[1:], cert.maps[1:])
    assert not verify_certificate(L, pruned)


def test_certificate_wrong_chain_members_fails(pentagon):
    cert = decide_sub_lo(pentagon).certificate
    a = pentagon.join_irreducibles[0]
    bad = tuple(
        ChainOrderWitness(w.anchor, (a,) * len(w.chain)) for w in cert.witnesses
    )
    assert not verify_certificate(
        pentagon, EmbeddingCertificate(bad, cert.maps)
    )


# -- brute-force oracle -----------------------------------------------------


def test_oracle_examples(pentagon, diamond):
    assert not brute_force_oracle(diamond)
    assert brute_force_oracle(pentagon)


def test_oracle_size_guard():
    big = direct_product(co_chain(2), co_chain(2))  # 16 elements
    with pytest.raises(ValueError):
        brute_force_oracle(big)


def test_oracle_matches_decision_to_size_six():
    for L in iter_lattices(6):
        assert decide_sub_lo(L).accepted == brute_force_oracle(L), L.up


# -- structural bounds ------------------------------------------------------


def test_max_anchor_size_of_co_chain():
    # the 2-chain is the one exception to max |J_a| = n below 7
    for n in (1, 3, 4, 5, 6):
        L = co_chain(n)
        assert max(len(dependency_closure(L, a)) for a in L.join_irreducibles) == n
    L2 = co_chain(2)
    assert max(len(dependency_closure(L2, a)) for a in L2.join_irreducibles) == 1


def test_co_chains_in_their_own_class():
    for n in (3, 4, 5):
        L = co_chain(n)
        assert decide_sub_n(L, n)
        assert not decide_sub_n(L, n - 1)
