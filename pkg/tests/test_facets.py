import random

import pytest

from facetlang.errors import (
    PcConsistencyError,
    UnboundVariableError,
    WrongTypeError,
)
from facetlang.facets import (
    EMPTY_PC,
    NIL,
    STAR,
    Address,
    Closure,
    Env,
    Facet,
    LabelId,
    LabelVal,
    Pair,
    Primitive,
    Store,
    construct_facet,
    contains_facet,
    contains_star,
    is_canonical,
    mkfacet,
    neg,
    obs_project,
    pc_extend,
    pos,
    render,
    render_pc,
    store_read,
    store_write,
)
from facetlang.reader import Const

from helpers import all_assignments, labels, project


### pc handling


def test_pc_extend():
    l1, l2 = labels("l1", "l2")
    assert pc_extend(EMPTY_PC, pos(l1)) == frozenset({pos(l1)})
    assert pc_extend(frozenset({pos(l1)}), neg(l2)) == frozenset({pos(l1), neg(l2)})


def test_pc_extend_refuses_contradiction():
    (l,) = labels("l")
    with pytest.raises(PcConsistencyError):
        pc_extend(frozenset({pos(l)}), neg(l))


def test_render_pc_sorted_by_creation_order():
    a, b = labels("a", "b")
    assert render_pc(EMPTY_PC) == "{}"
    assert render_pc(frozenset({neg(b), pos(a)})) == "{+a,-b}"


### mkfacet


def test_mkfacet_plain_children():
    (l1,) = labels("l1")
    assert mkfacet(l1, 1, 0) == Facet(l1, 1, 0)


def test_mkfacet_rotates_older_label_to_the_top():
    l1, l2 = labels("l1", "l2")
    a, b, c = 10, 20, 30
    got = mkfacet(l2, Facet(l1, a, b), c)
    assert got == Facet(l1, mkfacet(l2, a, c), mkfacet(l2, b, c))
    assert got == Facet(l1, Facet(l2, 10, 30), Facet(l2, 20, 30))


def test_mkfacet_same_label_selects_left_of_left_and_right_of_right():
    (l1,) = labels("l1")
    a, b, c, d = 1, 2, 3, 4
    assert mkfacet(l1, Facet(l1, a, b), Facet(l1, c, d)) == Facet(l1, a, d)


def test_mkfacet_never_collapses_equal_branches():
    (l,) = labels("l")
    assert mkfacet(l, 5, 5) == Facet(l, 5, 5)


def test_mkfacet_rotation_on_both_sides():
    l1, l2 = labels("l1", "l2")
    got = mkfacet(l2, Facet(l1, 1, 2), Facet(l1, 3, 4))
    assert got == Facet(l1, Facet(l2, 1, 3), Facet(l2, 2, 4))
    assert is_canonical(got)


### construct-facet


def test_construct_facet_empty_pc():
    assert construct_facet(EMPTY_PC, 7, STAR) == 7


def test_construct_facet_single_positive_branch():
    (l1,) = labels("l1")
    assert construct_facet(frozenset({pos(l1)}), 5, STAR) == Facet(l1, 5, STAR)


def test_construct_facet_mixed_branches_consumed_in_creation_order():
    l1, l2 = labels("l1", "l2")
    got = construct_facet(frozenset({neg(l1), pos(l2)}), 1, 0)
    assert got == Facet(l1, 0, Facet(l2, 1, 0))


### store meta-functions


def test_store_write_plain_and_guarded():
    (l,) = labels("l")
    store = Store()
    alpha = store.alloc(0)
    store_write(store, alpha, EMPTY_PC, 7)
    assert store.get(alpha) == 7
    store_write(store, Address(alpha.index), frozenset({pos(l)}), 9)
    assert store.get(alpha) == Facet(l, 9, 7)


def test_store_write_through_facet_target():
    (l,) = labels("l")
    store = Store()
    alpha = store.alloc(0)
    beta = store.alloc(1)
    store_write(store, Facet(l, alpha, beta), EMPTY_PC, 9)
    assert store.get(alpha) == Facet(l, 9, 0)
    assert store.get(beta) == Facet(l, 1, 9)


def test_store_write_star_target_is_ignored():
    store = Store()
    alpha = store.alloc(3)
    store_write(store, STAR, EMPTY_PC, 99)
    assert store.get(alpha) == 3


def test_store_write_rejects_non_box_leaf():
    (l,) = labels("l")
    store = Store()
    with pytest.raises(WrongTypeError):
        store_write(store, Facet(l, store.alloc(0), 5), EMPTY_PC, 1)


def test_store_read_plain_and_filtered():
    (l,) = labels("l")
    store = Store()
    alpha = store.alloc(5)
    assert store_read(store, alpha, EMPTY_PC) == 5
    beta = store.alloc(Facet(l, 1, 0))
    assert store_read(store, beta, frozenset({pos(l)})) == 1
    assert store_read(store, beta, frozenset({neg(l)})) == 0
    assert store_read(store, beta, EMPTY_PC) == Facet(l, 1, 0)


def test_store_read_star_absorbs():
    assert store_read(Store(), STAR, EMPTY_PC) is STAR


def test_store_read_facet_target_pairs_each_side_with_its_branch():
    (l,) = labels("l")
    store = Store()
    alpha = store.alloc(Facet(l, 9, 0))
    beta = store.alloc(Facet(l, 1, 9))
    got = store_read(store, Facet(l, alpha, beta), EMPTY_PC)
    assert got == Facet(l, 9, 9)


def test_store_read_rejects_non_box():
    with pytest.raises(WrongTypeError):
        store_read(Store(), 42, EMPTY_PC)


### obs-project


def test_obs_project_selects_and_strips_its_label():
    (la,) = labels("la")
    board = Pair(1, 2)
    assert obs_project(la, Facet(la, board, STAR), True) is board
    assert obs_project(la, Facet(la, board, STAR), False) is STAR
    assert obs_project(la, 42, True) == 42


def test_obs_project_leaves_other_labels_in_place():
    fam, fr = labels("fam", "fr")
    v = Facet(fam, "p1", Facet(fr, "p2", "p3"))
    assert obs_project(fam, v, False) == Facet(fr, "p2", "p3")
    assert obs_project(fam, v, True) == "p1"


def test_obs_project_removes_every_occurrence():
    l1, l2 = labels("l1", "l2")
    v = Facet(l1, Facet(l2, Facet(l1, 1, 2), 3), Facet(l2, 4, Facet(l1, 5, 6)))
    # not canonical on purpose: the walk must still strip all l1 nodes
    got = obs_project(l1, v, True)

    def mentions(tree, lab):
        if not isinstance(tree, Facet):
            return False
        return tree.label == lab or mentions(tree.left, lab) or mentions(tree.right, lab)

    assert not mentions(got, l1)
    assert obs_project(l1, got, True) == got


### rendering


@pytest.mark.parametrize(
    "value,text",
    [
        (True, "true"),
        (False, "false"),
        (0, "0"),
        (-12, "-12"),
        ("hi", '"hi"'),
        (NIL, "'()"),
        (Pair(1, NIL), "(1)"),
        (Pair(1, Pair(2, NIL)), "(1 2)"),
        (Pair(1, 2), "(1 . 2)"),
        (Pair(Pair(1, 2), Pair(Pair(3, 4), NIL)), "((1 . 2) (3 . 4))"),
        (STAR, "#star"),
        (Address(3), "#box:3"),
        (Primitive("car"), "#proc:car"),
    ],
)
def test_render_basics(value, text):
    assert render(value) == text


def test_render_facets_and_closures():
    l1, l2 = labels("l1", "l2")
    assert render(Facet(l1, 1, Facet(l2, 2, STAR))) == "#facet<l1 ? 1 : #facet<l2 ? 2 : #star>>"
    assert render(Closure(["x"], Const(1), Env())) == "#proc:lambda"
    assert render(Closure(["x"], Const(1), Env(), name="f")) == "#proc:f"
    assert render(LabelVal(l1)) == "#label:l1"


def test_render_rejects_foreign_values():
    with pytest.raises(WrongTypeError):
        render(3.14)


### environments and stores


def test_env_lookup_shadowing_and_define():
    base = Env({"x": 1})
    child = base.child(["x", "y"], [2, 3])
    assert child.lookup("x") == 2
    assert child.lookup("y") == 3
    assert base.lookup("x") == 1
    base.define("z", 9)
    assert child.lookup("z") == 9
    with pytest.raises(UnboundVariableError):
        child.lookup("missing")


def test_store_allocation_is_monotonic():
    store = Store()
    a = store.alloc(1)
    b = store.alloc(2)
    assert (a.index, b.index) == (0, 1)
    store.set(a, 5)
    assert store.get(a) == 5
    assert store.items() == [(0, 5), (1, 2)]
    assert len(store) == 2


def test_contains_helpers_walk_pairs():
    (l,) = labels("l")
    assert contains_facet(Pair(1, Pair(Facet(l, 1, 2), NIL)))
    assert not contains_facet(Pair(1, 2))
    assert contains_star(Pair(1, STAR))
    assert contains_star(Facet(l, 1, STAR))
    assert not contains_star(Pair(1, 2))


### property suites (seeded; the large acceptance runs live elsewhere)


def rand_tree(rng, label_list, depth):
    if depth == 0 or rng.random() < 0.35:
        return rng.choice([0, 1, 2, 3, True, False, STAR])
    lab = rng.choice(label_list)
    return mkfacet(lab, rand_tree(rng, label_list, depth - 1), rand_tree(rng, label_list, depth - 1))


def rand_pc(rng, label_list):
    pc = EMPTY_PC
    for lab in label_list:
        r = rng.random()
        if r < 0.4:
            pc = pc_extend(pc, pos(lab))
        elif r < 0.8:
            pc = pc_extend(pc, neg(lab))
    return pc


def test_mkfacet_projection_soundness_and_canonical_form():
    rng = random.Random(101)
    labs = labels("a", "b", "c")
    for _ in range(500):
        lab = rng.choice(labs)
        left = rand_tree(rng, labs, 3)
        right = rand_tree(rng, labs, 3)
        got = mkfacet(lab, left, right)
        assert is_canonical(got)
        for view in all_assignments(labs):
            want = project(left if view[lab] else right, view)
            assert project(got, view) == want


def test_construct_facet_projection_soundness():
    rng = random.Random(202)
    labs = labels("a", "b", "c")
    for _ in range(500):
        pc = rand_pc(rng, labs)
        vpos = rand_tree(rng, labs, 3)
        vdef = rand_tree(rng, labs, 3)
        got = construct_facet(pc, vpos, vdef)
        assert is_canonical(got)
        for view in all_assignments(labs):
            satisfied = all(view[b.label] == b.positive for b in pc)
            assert project(got, view) == project(vpos if satisfied else vdef, view)


def test_store_round_trip_recovers_the_written_view():
    rng = random.Random(303)
    labs = labels("a", "b")
    for _ in range(300):
        store = Store()
        alpha = store.alloc(rng.randint(-5, 5))
        pc = rand_pc(rng, labs)
        v = rand_tree(rng, labs, 3)
        store_write(store, alpha, pc, v)
        back = store_read(store, alpha, pc)
        for view in all_assignments(labs):
            if all(view[b.label] == b.positive for b in pc):
                assert project(back, view) == project(v, view)


def test_obs_project_strips_label_on_random_trees():
    rng = random.Random(404)
    labs = labels("a", "b", "c")
    for _ in range(300):
        v = rand_tree(rng, labs, 4)
        lab = rng.choice(labs)
        decision = rng.random() < 0.5
        got = obs_project(lab, v, decision)
        forced = {**{l: rng.random() < 0.5 for l in labs}, lab: decision}
        for view in all_assignments([l for l in labs if l != lab]):
            # the stripped label's assignment must no longer matter
            assert project(got, {**view, lab: not decision}) == project(got, {**view, lab: decision})
        assert project(got, forced) == project(v, forced)
