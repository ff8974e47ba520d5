"""Parser, built-in identities, and the exhaustive checker.

The naive pure-python sweep is the reference; the vectorized checker must
match it bit for bit, including which counter-assignment gets reported.
"""

import itertools

import pytest

from colat.lattice import lattice_from_json, lattices_of_size, structural_predicates
from colat.poset import Poset
from colat.terms import (
    CheckResult,
    Identity,
    ParseError,
    Term,
    TermError,
    builtin,
    builtin_names,
    check,
    check_sigma,
    eval_term,
    identity_from_json,
    identity_to_json,
    join,
    meet,
    naive_check,
    parse_term,
    term_to_sexpr,
    term_variables,
    var,
)


def chain_lattice(n):
    up = tuple(((1 << n) - 1) & ~((1 << i) - 1) for i in range(n))
    from colat.lattice import FinLattice
    return FinLattice(up)


def co_chain(n):
    return Poset.chain(n).co_lattice()[0]


def pentagon():
    return lattice_from_json({
        "size": 5,
        "leq_pairs": [[0, 1], [0, 2], [0, 3], [0, 4], [1, 2], [1, 4], [2, 4], [3, 4]],
        "labels": ["0", "a", "c", "b", "1"],
    })


def diamond():
    return lattice_from_json({
        "size": 5,
        "leq_pairs": [[0, 1], [0, 2], [0, 3], [0, 4], [1, 4], [2, 4], [3, 4]],
        "labels": ["0", "a", "b", "c", "1"],
    })


# -- parsing ---------------------------------------------------------------------


def test_parse_basic():
    t = parse_term("(^ x (v a b))")
    assert t == meet(var("x"), join(var("a"), var("b")))
    assert term_variables(t) == {"x", "a", "b"}


def test_parse_nary():
    assert parse_term("(v a b c d)") == join(*(var(s) for s in "abcd"))


@pytest.mark.parametrize("bad,fragment", [
    ("(v x)", "at least two"),
    ("(x a b)", "expected operator"),
    ("()", "expected operator"),
    ("(v a b", "missing ')'"),
    (")", "unexpected ')'"),
    ("", "empty input"),
    ("a b", "trailing input"),
    ("(^ v x)", "operator used as a variable"),
    ("(v a (^ b))", "at least two"),
])
def test_parse_errors(bad, fragment):
    with pytest.raises(ParseError) as err:
        parse_term(bad)
    assert fragment in str(err.value)


def test_parse_error_positions():
    with pytest.raises(ParseError) as err:
        parse_term("(v (^ a b) (v c))")
    assert err.value.pos == 12


def test_roundtrip_builtins():
    for name in builtin_names():
        ident = builtin(name)
        assert parse_term(term_to_sexpr(ident.lhs)) == ident.lhs
        assert parse_term(term_to_sexpr(ident.rhs)) == ident.rhs
        assert identity_from_json(identity_to_json(ident)) == ident


# -- identity construction ----------------------------------------------------------


def test_identity_validation():
    with pytest.raises(TermError):
        Identity("bad", ("x",), "eq", var("x"), var("y"))
    with pytest.raises(TermError):
        Identity("bad", ("x", "x"), "eq", var("x"), var("x"))
    with pytest.raises(TermError):
        Identity("bad", ("x",), "below", var("x"), var("x"))
    with pytest.raises(TermError):
        Term("join", (var("x"),))


def test_placeholder_rejected():
    obj = {"name": "U", "vars": [], "relation": "eq", "lhs": None, "rhs": None}
    with pytest.raises(TermError) as err:
        identity_from_json(obj)
    assert "placeholder" in str(err.value)


def test_builtin_shapes():
    assert builtin("E").variables == ("x", "a", "b0", "b1", "b2")
    assert builtin("P").variables == ("a", "b", "c", "d", "b0", "b1")
    assert builtin("HS").variables == ("a", "b", "c", "b0", "b1")
    assert builtin("STAR").variables == ("x0", "x1", "x2", "x3", "xa", "xb")
    assert builtin("STAR").relation == "leq"
    assert builtin("D2DUAL").variables == ("x", "y0", "y1", "y2")
    with pytest.raises(TermError):
        builtin("S")


def test_star_recursion_unrolls():
    x0, x1, x2, x3 = var("x0"), var("x1"), var("x2"), var("x3")
    xa, xb = var("xa"), var("xb")
    x11 = meet(x1, join(x0, x2), join(x0, xb))
    x21 = meet(x2, join(x3, x1), join(x3, xa))
    x12 = meet(x11, join(x0, x21), join(x0, xb))
    assert builtin("STAR").lhs == x12


def test_e_counts_nine_disjuncts():
    rhs = builtin("E").rhs
    assert rhs.kind == "join" and len(rhs.children) == 9


# -- evaluation ----------------------------------------------------------------------


def test_eval_on_chain_is_min_max():
    L = chain_lattice(4)
    t = parse_term("(^ x (v a b))")
    for x, a, b in itertools.product(range(4), repeat=3):
        assert eval_term(L, t, {"x": x, "a": a, "b": b}) == min(x, max(a, b))


def test_eval_is_monotone():
    L = pentagon()
    t = builtin("D2DUAL").rhs
    names = sorted(term_variables(t))
    for values in itertools.product(range(L.n), repeat=len(names)):
        env = dict(zip(names, values))
        base = eval_term(L, t, env)
        for name in names:
            for bigger in range(L.n):
                if L.leq(env[name], bigger):
                    raised = dict(env, **{name: bigger})
                    assert L.leq(base, eval_term(L, t, raised))


# -- checking -----------------------------------------------------------------------


def test_trivial_identity_witness():
    ident = Identity("same", ("x", "y"), "eq", var("x"), var("y"))
    L = chain_lattice(2)
    for result in (naive_check(L, ident), check(L, ident)):
        assert not result.holds
        assert result.witness == {"x": 0, "y": 1}
        assert result.assignments == 4


def test_one_element_lattice_satisfies_everything():
    L = chain_lattice(1)
    for name in builtin_names():
        assert check(L, builtin(name)).holds


def test_co4_satisfies_e():
    assert check(co_chain(4), builtin("E")).holds


def test_co3_satisfies_all_builtins():
    L = co_chain(3)
    for name in builtin_names():
        assert check(L, builtin(name)).holds


def test_diamond_fails_hs_with_witness():
    L = diamond()
    got = check(L, builtin("HS"))
    assert not got.holds
    ref = naive_check(L, builtin("HS"))
    assert got.witness == ref.witness


def test_pentagon_satisfies_star():
    assert check(pentagon(), builtin("STAR")).holds


def test_vectorized_matches_naive():
    corpus = [L for size in range(1, 5) for L in lattices_of_size(size)]
    corpus += [pentagon(), diamond(), co_chain(3)]
    idents = [builtin(n) for n in ("E", "HS", "D2DUAL")]
    for L in corpus:
        for ident in idents:
            ref = naive_check(L, ident)
            got = check(L, ident)
            assert (got.holds, got.witness) == (ref.holds, ref.witness)


def test_vectorized_matches_naive_many_vars():
    for L in (chain_lattice(3), pentagon(), diamond()):
        for name in ("P", "STAR"):
            ref = naive_check(L, builtin(name))
            got = check(L, builtin(name))
            assert (got.holds, got.witness) == (ref.holds, ref.witness)


def test_workers_do_not_change_result():
    for L in (diamond(), co_chain(3)):
        for name in ("HS", "E"):
            one = check(L, builtin(name), workers=1)
            many = check(L, builtin(name), workers=4)
            assert (one.holds, one.witness) == (many.holds, many.witness)


def test_one_sided_matches_naive_on_small_corpus():
    # the converse inclusion holds universally for the built-in equalities
    corpus = [L for size in range(1, 6) for L in lattices_of_size(size)]
    for L in corpus:
        for name in ("E", "P", "HS", "D2DUAL"):
            ref = naive_check(L, builtin(name))
            got = check(L, builtin(name), one_sided=True)
            assert (got.holds, got.witness) == (ref.holds, ref.witness)


def test_assignment_guard():
    L = co_chain(4)
    wide = Identity("wide", tuple(f"x{i}" for i in range(9)), "eq",
                    join(*(var(f"x{i}") for i in range(9))),
                    join(*(var(f"x{i}") for i in range(8)), var("x0")))
    with pytest.raises(TermError):
        check(L, wide)


def test_d2dual_matches_structural_predicate():
    corpus = [L for size in range(1, 6) for L in lattices_of_size(size)]
    for L in corpus:
        flag = structural_predicates(L).dual_2_distributive
        assert check(L, builtin("D2DUAL")).holds == flag


# -- semantic interpretations ----------------------------------------------------


def test_sigma_holds_on_co5():
    L = co_chain(5)
    for which in ("E", "P", "HS"):
        assert check_sigma(L, which).holds


def test_sigma_vacuous_on_distributive():
    L = chain_lattice(4)
    for which in ("E", "P", "HS"):
        assert check_sigma(L, which).holds


def test_diamond_fails_hs_sigma():
    got = check_sigma(diamond(), "HS")
    assert not got.holds
    assert got.witness == {"a": 1, "b": 2, "c": 3, "b0": 1, "b1": 3}


def test_identity_implies_sigma_small():
    corpus = [L for size in range(1, 6) for L in lattices_of_size(size)]
    corpus += [pentagon(), diamond(), co_chain(3), co_chain(4)]
    for L in corpus:
        for which in ("E", "P", "HS"):
            if check(L, builtin(which)).holds:
                assert check_sigma(L, which).holds


def test_sigma_rejects_unknown():
    with pytest.raises(TermError):
        check_sigma(diamond(), "STAR")
