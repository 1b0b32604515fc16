import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import atoms_of, box, build_window, catom, ext, occ, ratom, ts
from rlwindow.interpretation import (Inconsistent, canonical_model,
                                     eval_concept, standard_interpretation)
from rlwindow.ontology import parse_tbox, unfold_negative_inclusions
from rlwindow.oracle import definitional_window_repair
from rlwindow.repair import (ConflictSet, add_abox_with_repair, apply_repair,
                             find_conflicts, resolve_conflicts)
from rlwindow.stream import MomentaryABox
from rlwindow.synth import random_stream, random_tbox
from rlwindow.window import WindowModel


def ntbox_of(text, depth=3):
    return unfold_negative_inclusions(parse_tbox(text), depth)


A1 = occ(catom("A", "a"), 1)
B1 = occ(catom("B", "a"), 1)
B2 = occ(catom("B", "a"), 2)
C2 = occ(catom("C", "a"), 2)
C3 = occ(catom("C", "a"), 3)
D3 = occ(catom("D", "a"), 3)


# -- conflict enumeration ------------------------------------------------------

def test_two_bodies_give_two_conflicts():
    ntbox = ntbox_of("A & B & C < bot\nB & D < bot")
    conflicts = find_conflicts({A1, B2}, box(3, catom("C", "a"), catom("D", "a")), ntbox)
    assert [c.occurrences for c in conflicts] == [
        frozenset({A1, B2, C3}),
        frozenset({B2, D3}),
    ]
    assert all(c.binding == "a" for c in conflicts)


def test_conflict_min_sets_are_the_oldest_slice():
    ntbox = ntbox_of("A & B & C < bot\nB & D < bot")
    first, second = find_conflicts(
        {A1, B2}, box(3, catom("C", "a"), catom("D", "a")), ntbox)
    assert first.min_set == frozenset({A1}) and first.min_timestamp == ts(1)
    assert second.min_set == frozenset({B2}) and second.min_timestamp == ts(2)


def test_each_timestamped_copy_is_its_own_conflict():
    ntbox = ntbox_of("A & C < bot")
    conflicts = find_conflicts({A1, C2}, box(3, catom("C", "a")), ntbox)
    assert {c.occurrences for c in conflicts} == {
        frozenset({A1, C2}),
        frozenset({A1, C3}),
    }


def test_consistent_union_has_no_conflicts():
    ntbox = ntbox_of("A & B < bot")
    assert find_conflicts({A1}, box(2, catom("C", "a")), ntbox) == []


def test_conflicts_are_minimal():
    # A alone already violates; the two-atom superset must not show up.
    ntbox = ntbox_of("A < bot\nA & B < bot")
    conflicts = find_conflicts({A1, B2}, box(3), ntbox)
    assert [c.occurrences for c in conflicts] == [frozenset({A1})]


def test_role_bodies_pick_up_role_occurrences():
    ntbox = ntbox_of("A & some r . B < bot")
    r_occ = occ(ratom("r", "a", "b"), 2)
    b_occ = occ(catom("B", "b"), 2)
    conflicts = find_conflicts({A1, r_occ, b_occ}, box(3), ntbox)
    assert [c.occurrences for c in conflicts] == [frozenset({A1, r_occ, b_occ})]


# -- resolution ----------------------------------------------------------------

def test_resolution_prefers_newer_facts():
    ntbox = ntbox_of("A & B & C < bot\nB & D < bot")
    conflicts = find_conflicts({A1, B2}, box(3, catom("C", "a"), catom("D", "a")), ntbox)
    assert resolve_conflicts(conflicts) == frozenset({B2})


def test_resolve_nothing():
    assert resolve_conflicts([]) == frozenset()


def test_equally_old_pair_is_removed_together():
    ntbox = ntbox_of("A & B & C < bot")
    conflicts = find_conflicts({A1, B1}, box(2, catom("C", "a")), ntbox)
    assert len(conflicts) == 1
    assert conflicts[0].min_set == frozenset({A1, B1})
    assert resolve_conflicts(conflicts) == frozenset({A1, B1})


def test_resolving_one_conflict_discharges_overlapping_older_ones():
    shared = occ(catom("X", "a"), 2)
    newer = ConflictSet(frozenset({shared, occ(catom("Y", "a"), 3)}), None, "a")
    older = ConflictSet(frozenset({shared, occ(catom("Z", "a"), 1)}), None, "a")
    # the newer conflict sheds X@2; the older one then no longer applies,
    # so Z@1 survives.
    assert resolve_conflicts([older, newer]) == frozenset({shared})


def test_smaller_oldest_slice_undercuts_larger_one():
    p, q, r = (occ(catom(n, "a"), 1) for n in "PQR")
    tail = occ(catom("T", "a"), 2)
    small = ConflictSet(frozenset({p, tail}), None, "a")
    large = ConflictSet(frozenset({p, q, r, tail}), None, "a")
    removed = resolve_conflicts([small, large])
    assert p in removed
    assert q not in removed and r not in removed


# -- applying removals ---------------------------------------------------------

def test_removing_the_sole_premise_deletes_the_consequence():
    tbox = parse_tbox("A & B < D")
    wm = WindowModel(ext(1, 2))
    wm.add_abox(box(1, catom("A", "a"), catom("B", "a")), tbox)
    assert wm.entails(catom("D", "a"))
    apply_repair(wm, {A1}, tbox)
    assert not wm.entails(catom("D", "a"))
    assert not wm.entails(catom("A", "a"))
    assert wm.entails(catom("B", "a"))


def test_removal_rehomes_consequences_to_newer_support():
    tbox = parse_tbox("A & B < D")
    stream = [box(1, catom("A", "a")), box(2, catom("B", "a")), box(3, catom("A", "a"))]
    wm = build_window(ext(1, 3), stream, tbox)
    assert wm.homes(catom("D", "a")) == {ts(1), ts(2)}
    apply_repair(wm, {A1}, tbox)
    assert wm.homes(catom("D", "a")) == {ts(2)}
    scratch = build_window(ext(1, 3), stream[1:], tbox)
    assert wm.occurrences() == scratch.occurrences()


def test_removing_nothing_changes_nothing():
    tbox = parse_tbox("A & B < D")
    wm = build_window(ext(1, 2), [box(1, catom("A", "a"), catom("B", "a"))], tbox)
    before = wm.occurrences()
    overdeleted, rederived = apply_repair(wm, set(), tbox)
    assert (overdeleted, rederived) == (0, 0)
    assert wm.occurrences() == before


def test_removing_a_non_asserted_occurrence_is_rejected():
    tbox = parse_tbox("A & B < D")
    wm = build_window(ext(1, 2), [box(1, catom("A", "a"), catom("B", "a"))], tbox)
    with pytest.raises(ValueError):
        apply_repair(wm, {occ(catom("D", "a"), 1)}, tbox)  # derived, not asserted
    with pytest.raises(ValueError):
        apply_repair(wm, {occ(catom("A", "a"), 2)}, tbox)  # wrong timestamp


# -- add_abox_with_repair --------------------------------------------------------

def test_repairing_add_keeps_the_newer_facts():
    tbox = parse_tbox("A & B & C < bot\nB & D < bot")
    ntbox = unfold_negative_inclusions(tbox, 3)
    wm = WindowModel(ext(1, 3))
    wm.add_abox(box(1, catom("A", "a")), tbox)
    wm.add_abox(box(2, catom("B", "a")), tbox)
    wm, report = add_abox_with_repair(
        wm, box(3, catom("C", "a"), catom("D", "a")), tbox, ntbox)
    assert report.removed == frozenset({B2})
    assert len(report.conflicts) == 2
    assert wm.asserted_occurrences() == {A1, C3, D3}


def test_consistent_add_behaves_like_plain_add(worked_tbox, worked_stream):
    ntbox = unfold_negative_inclusions(worked_tbox, 3)
    plain = build_window(ext(1, 4), worked_stream, worked_tbox)
    repaired = WindowModel(ext(1, 4))
    for b in worked_stream:
        repaired, report = add_abox_with_repair(repaired, b, worked_tbox, ntbox)
        assert report.removed == frozenset()
    assert repaired.occurrences() == plain.occurrences()


def test_pedal_conflict_drops_the_older_pedal(pedals_tbox, pedals_stream):
    ntbox = unfold_negative_inclusions(pedals_tbox, 3)
    wm = build_window(ext(0, 2), pedals_stream, pedals_tbox)
    hook = lambda model, b: add_abox_with_repair(model, b, pedals_tbox, ntbox)[1]
    report = wm.slide(pedals_stream, ext(1, 3), pedals_tbox, repair=hook)
    gas1 = occ(catom("GasPedalPressed", "x"), 1)
    assert report.removals == (gas1,)
    assert report.conflicts == 1
    assert wm.asserted_occurrences() == {occ(catom("BreaksPressed", "x"), 3)}
    # the retraction of the old reading must not mask the one new assertion
    assert report.added_occurrences == 1
    assert report.expired_occurrences == 1


def test_removed_occurrences_do_not_return_on_later_slides(pedals_tbox, pedals_stream):
    ntbox = unfold_negative_inclusions(pedals_tbox, 3)
    wm = build_window(ext(0, 2), pedals_stream, pedals_tbox)
    hook = lambda model, b: add_abox_with_repair(model, b, pedals_tbox, ntbox)[1]
    wm.slide(pedals_stream, ext(1, 3), pedals_tbox, repair=hook)
    gas1 = occ(catom("GasPedalPressed", "x"), 1)
    assert gas1 not in wm.asserted_occurrences()
    wm.slide(pedals_stream, ext(2, 4), pedals_tbox, repair=hook)
    assert gas1 not in wm.asserted_occurrences()
    assert wm.entails(catom("ClutchPressed", "x"))


def test_timestamps_impose_trust_levels(disjoint_tbox):
    ntbox = unfold_negative_inclusions(disjoint_tbox, 3)
    wm = WindowModel(ext(1, 2))
    wm.add_abox(box(1, catom("A", "a"), catom("B", "a")), disjoint_tbox)
    wm, report = add_abox_with_repair(wm, box(2, catom("C", "a")), disjoint_tbox, ntbox)
    assert report.removed == frozenset({A1, B1})
    assert atoms_of(wm.window_interpretation()) == {catom("C", "a")}


# -- invariants over random instances ------------------------------------------

def _repaired_build(seed):
    tbox = random_tbox(seed, n_concepts=5, n_roles=2, n_axioms=5, n_negative=2)
    # Generated definitions are acyclic, so a generous depth always reaches
    # the exact normal form; the definitional oracle is only comparable then.
    ntbox = unfold_negative_inclusions(tbox, 16)
    assert ntbox.is_exact
    stream = random_stream(seed + 1, n_ticks=4, atoms_per_tick=2,
                           n_individuals=2, n_concepts=5, n_roles=2)
    wm = WindowModel(ext(0, 3))
    reports = []
    for b in stream:
        wm, report = add_abox_with_repair(wm, b, tbox, ntbox)
        reports.append(report)
    return tbox, ntbox, stream, wm, reports


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_repair_matches_the_definitional_oracle(seed):
    tbox, _, stream, wm, _ = _repaired_build(seed)
    expect = definitional_window_repair(stream, ext(0, 3), tbox)
    assert wm.asserted_occurrences() == set(expect)


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_repaired_windows_stay_consistent(seed):
    tbox, ntbox, _, wm, _ = _repaired_build(seed)
    assert ntbox.is_exact
    si = standard_interpretation({o.atom for o in wm.asserted_occurrences()})
    for body in ntbox.flattened_negatives:
        assert not eval_concept(body, si)
    chased = canonical_model({o.atom for o in wm.asserted_occurrences()}, tbox)
    assert not isinstance(chased, Inconsistent)


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_removals_come_from_conflict_min_sets(seed):
    _, _, _, _, reports = _repaired_build(seed)
    for report in reports:
        allowed = frozenset().union(*(c.min_set for c in report.conflicts)) \
            if report.conflicts else frozenset()
        assert report.removed <= allowed


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=100_000),
       st.integers(min_value=1, max_value=3))
def test_suffix_of_a_repair_is_the_repair_of_the_suffix(seed, cut):
    tbox, _, stream, wm, _ = _repaired_build(seed)
    wm.drop_before(ts(cut))
    expect = definitional_window_repair(stream, ext(cut, 3), tbox)
    assert wm.asserted_occurrences() == set(expect)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=100_000))
def test_apply_repair_equals_scratch_rebuild(seed):
    tbox = random_tbox(seed, n_negative=0, acyclic=False)
    stream = random_stream(seed + 1, n_ticks=5, atoms_per_tick=3)
    wm = build_window(ext(0, 4), stream, tbox)
    rng = random.Random(seed)
    removed = {o for o in wm.asserted_occurrences() if rng.random() < 0.3}
    apply_repair(wm, removed, tbox)
    survivors = wm.asserted_occurrences()
    by_ts = {}
    for o in sorted(survivors, key=lambda o: o.sort_key):
        by_ts.setdefault(o.timestamp, set()).add(o.atom)
    scratch = WindowModel(ext(0, 4))
    for t in sorted(by_ts):
        scratch.add_abox(MomentaryABox(t, frozenset(by_ts[t])), tbox)
    assert wm.occurrences() == scratch.occurrences()
