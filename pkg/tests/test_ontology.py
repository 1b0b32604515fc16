import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlwindow.errors import BudgetExceeded, ParseError, RLViolation
from rlwindow.ontology import (ConceptInclusion, ConceptName, Conj, Exact,
                               Exists, NegativeInclusion, RoleInclusion,
                               RoleInverse, RoleName, TBox, Truncated,
                               canonicalize, format_axiom, format_tbox,
                               parse_tbox, nonrecursive_report,
                               unfold_negative_inclusions)
from rlwindow.synth import random_tbox


def C(name):
    return ConceptName(name)


def conj(*parts):
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Conj(p, out)
    return out


# -- parsing -----------------------------------------------------------------

def test_parse_worked_tbox():
    tbox = parse_tbox("A & C < D\nB & D < E")
    assert tbox == TBox([ConceptInclusion(conj(C("A"), C("C")), "D"),
                         ConceptInclusion(conj(C("B"), C("D")), "E")])


def test_parse_empty():
    assert parse_tbox("") == TBox([])


def test_parse_exists_and_inverse_role_axioms():
    tbox = parse_tbox("some R . (A & B) < bot\ninv(P) < Q")
    assert tbox == TBox([
        NegativeInclusion(Exists(RoleName("R"), conj(C("A"), C("B")))),
        RoleInclusion(RoleInverse("P"), RoleName("Q")),
    ])


def test_parse_plain_subrole_spelled_with_inverses():
    # P included in Q, both plain, is written with both sides inverted.
    tbox = parse_tbox("inv(P) < inv(Q)")
    assert tbox.role_inclusions == (RoleInclusion(RoleName("P"), RoleName("Q")),)


def test_parse_role_inclusion_with_inverse_superrole_normalizes():
    # R included in inv(S) means inv(R) included in S.
    tbox = parse_tbox("R < inv(S)")
    assert tbox.role_inclusions == (RoleInclusion(RoleInverse("R"), RoleName("S")),)


def test_bare_name_inclusion_is_a_concept_inclusion():
    tbox = parse_tbox("P < Q")
    assert tbox.axioms == (ConceptInclusion(C("P"), "Q"),)


def test_parse_comments_and_blank_lines():
    tbox = parse_tbox("# rules\n\nA < B  # subsumption\n")
    assert tbox.axioms == (ConceptInclusion(C("A"), "B"),)


def test_complex_head_rejected():
    with pytest.raises(RLViolation):
        parse_tbox("A < B & C")
    with pytest.raises(RLViolation):
        parse_tbox("A < some R . B")


def test_reserved_words_rejected_as_names():
    for bad in ["bot < A", "A & some < B", "inv < A", "A < some inv . B"]:
        with pytest.raises(ParseError):
            parse_tbox(bad)


def test_malformed_lines_report_position():
    with pytest.raises(ParseError) as e:
        parse_tbox("A < B\nA &\n")
    assert e.value.line == 2
    with pytest.raises(ParseError):
        parse_tbox("A ! B")
    with pytest.raises(ParseError):
        parse_tbox("(A & B < C")
    with pytest.raises(ParseError):
        parse_tbox("A < B C")


def test_duplicate_axioms_collapse():
    tbox = parse_tbox("A & B < D\nB & A < D")
    assert len(tbox.axioms) == 1


def test_signature():
    concepts, roles = parse_tbox("A & some R . B < D\ninv(P) < Q").signature()
    assert concepts == {"A", "B", "D"}
    assert roles == {"R", "P", "Q"}


# -- canonical form ----------------------------------------------------------

def test_canonicalize_sorts_flattens_dedupes():
    got = canonicalize(Conj(Conj(C("B"), C("A")), Conj(C("B"), C("A"))))
    assert got == conj(C("A"), C("B"))


def test_canonicalize_recurses_into_fillers():
    got = canonicalize(Exists(RoleName("R"), Conj(C("B"), C("A"))))
    assert got == Exists(RoleName("R"), conj(C("A"), C("B")))


def test_canonicalize_idempotent():
    e = canonicalize(Conj(Exists(RoleInverse("r"), C("X")), Conj(C("A"), C("A"))))
    assert canonicalize(e) == e


def _names():
    return st.sampled_from(["A", "B", "C", "D"])


def _concepts(depth=2):
    base = _names().map(ConceptName)
    if depth == 0:
        return base
    sub = _concepts(depth - 1)
    role = st.sampled_from(["r", "s"]).flatmap(
        lambda n: st.sampled_from([RoleName(n), RoleInverse(n)]))
    return st.one_of(base,
                     st.tuples(sub, sub).map(lambda p: Conj(*p)),
                     st.tuples(role, sub).map(lambda p: Exists(*p)))


@given(_concepts(), _concepts())
def test_canonicalize_commutative(a, b):
    assert canonicalize(Conj(a, b)) == canonicalize(Conj(b, a))


# -- round-trip --------------------------------------------------------------

@settings(max_examples=60)
@given(st.integers(min_value=0, max_value=10_000))
def test_format_parse_round_trip(seed):
    tbox = random_tbox(seed, n_negative=2, acyclic=False)
    assert parse_tbox(format_tbox(tbox)) == tbox


def test_format_examples():
    tbox = parse_tbox("some R . (A & B) < bot")
    assert format_axiom(tbox.axioms[0]) == "some R . (A & B) < bot"
    tbox = parse_tbox("inv(P) < inv(Q)")
    assert format_axiom(tbox.axioms[0]) == "inv(P) < inv(Q)"
    tbox = parse_tbox("inv(P) < Q")
    assert format_axiom(tbox.axioms[0]) == "inv(P) < Q"


# -- negative-inclusion rewriting --------------------------------------------

def test_unfold_through_one_definition():
    tbox = parse_tbox("A & C < D\nD & F < bot")
    ntbox = unfold_negative_inclusions(tbox, 2)
    assert ntbox.is_exact
    assert set(ntbox.flattened_negatives) == {
        canonicalize(conj(C("D"), C("F"))),
        canonicalize(conj(C("A"), C("C"), C("F"))),
    }


def test_unfold_nothing_to_do():
    ntbox = unfold_negative_inclusions(parse_tbox("A & B < bot"), 0)
    assert ntbox.is_exact
    assert ntbox.flattened_negatives == (canonicalize(conj(C("A"), C("B"))),)


def test_unfold_recursive_truncates():
    tbox = parse_tbox("some R . B < B\nA & B < bot")
    ntbox = unfold_negative_inclusions(tbox, 3)
    r = RoleName("R")
    expected = {
        conj(C("A"), C("B")),
        conj(C("A"), Exists(r, C("B"))),
        conj(C("A"), Exists(r, Exists(r, C("B")))),
        conj(C("A"), Exists(r, Exists(r, Exists(r, C("B"))))),
    }
    assert set(ntbox.flattened_negatives) == {canonicalize(e) for e in expected}
    assert ntbox.entries[0].status == Truncated(3)
    assert not ntbox.is_exact


def test_unfold_role_definitions():
    # Superrole in the negative body unfolds through its subroles, keeping
    # the original reading.
    tbox = parse_tbox("inv(P) < inv(Q)\nA & some Q . B < bot")
    ntbox = unfold_negative_inclusions(tbox, 2)
    assert ntbox.is_exact
    assert set(ntbox.flattened_negatives) == {
        canonicalize(conj(C("A"), Exists(RoleName("Q"), C("B")))),
        canonicalize(conj(C("A"), Exists(RoleName("P"), C("B")))),
    }


def test_unfold_inverse_use_of_defined_role():
    # Q used inverted: the subrole substitutes in inverted as well.
    tbox = parse_tbox("inv(P) < inv(Q)\nsome inv(Q) . A < bot")
    ntbox = unfold_negative_inclusions(tbox, 2)
    assert set(ntbox.flattened_negatives) == {
        Exists(RoleInverse("Q"), C("A")),
        Exists(RoleInverse("P"), C("A")),
    }


def test_unfold_multiple_definitions_multiply():
    tbox = parse_tbox("A < E\nB < E\nE & F < bot")
    ntbox = unfold_negative_inclusions(tbox, 1)
    assert ntbox.is_exact
    assert set(ntbox.flattened_negatives) == {
        canonicalize(conj(C("E"), C("F"))),
        canonicalize(conj(C("A"), C("F"))),
        canonicalize(conj(C("B"), C("F"))),
    }


def test_nonrecursive_report_statuses():
    assert nonrecursive_report(parse_tbox("A & C < bot"), 3) == [
        (NegativeInclusion(canonicalize(conj(C("A"), C("C")))), Exact()),
    ]
    report = nonrecursive_report(parse_tbox("some R . B < B\nA & B < bot"), 5)
    assert report[0][1] == Truncated(5)
    report = nonrecursive_report(
        parse_tbox("A & C < D\nB & D < E\nE & F < bot"), 4)
    assert report[0][1] == Exact()


def test_unfold_budget():
    # Eight independent two-way choices multiply out well past a tiny cap.
    lines = [f"X{i} < Y{i}\nZ{i} < Y{i}" for i in range(8)]
    body = " & ".join(f"Y{i}" for i in range(8))
    tbox = parse_tbox("\n".join(lines) + f"\n{body} < bot")
    with pytest.raises(BudgetExceeded):
        unfold_negative_inclusions(tbox, 10, body_cap=50)


def test_unfold_monotone_in_depth():
    tbox = parse_tbox("some R . B < B\nA & B < bot")
    prev = set()
    for depth in range(5):
        cur = set(unfold_negative_inclusions(tbox, depth).flattened_negatives)
        assert prev <= cur
        prev = cur


def test_unfold_deterministic():
    tbox = parse_tbox("A < E\nB < E\nsome r . E < F\nE & F < bot")
    a = unfold_negative_inclusions(tbox, 3)
    b = unfold_negative_inclusions(tbox, 3)
    assert a.flattened_negatives == b.flattened_negatives
    assert a.statuses() == b.statuses()
