"""Recency-based inconsistency repair at occurrence granularity.

A conflict set is a minimally inconsistent set of asserted occurrences: it
matches one of the flattened negative bodies under the plain asserted facts,
and no proper subset does. Resolution prefers newer information. Conflicts
whose oldest members are most recent are handled first; each sheds its oldest
occurrences, and anything those removals already resolve is dropped before
older conflicts get a say. Removals are permanent for the life of the stream.

Removing an asserted occurrence retracts its consequences by overdeletion and
rederivation: every derived occurrence reachable through a derivation that
used a removed or marked occurrence is marked, the marks are deleted, and the
fixpoint is re-run so facts with surviving support return, possibly homed at
a newer timestamp.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ontology import ConceptInclusion, ConceptName, Conj, RoleInverse
from .stream import ConceptAtom, MomentaryABox, Occurrence, RoleAtom
from .window import _DeltaIndex, _Probe, _delta_concept, _delta_role


@dataclass(frozen=True)
class ConflictSet:
    occurrences: frozenset[Occurrence]
    violated_body: object
    binding: str

    @property
    def min_timestamp(self):
        return min(o.timestamp for o in self.occurrences)

    @property
    def min_set(self):
        oldest = self.min_timestamp
        return frozenset(o for o in self.occurrences if o.timestamp == oldest)


@dataclass
class RepairReport:
    removed: frozenset[Occurrence]
    conflicts: tuple[ConflictSet, ...]
    overdeleted: int = 0
    rederived: int = 0


# ---------------------------------------------------------------------------
# conflict enumeration


class _Pool:
    """Occurrence-set index for support enumeration, asserted facts only."""

    def __init__(self, occurrences):
        self.concepts = {}
        self.roles = {}
        self.fwd = {}
        self.rev = {}
        for occ in occurrences:
            a = occ.atom
            if isinstance(a, ConceptAtom):
                self.concepts.setdefault(a.concept, {}).setdefault(
                    a.individual, set()).add(occ.timestamp)
            else:
                self.roles.setdefault(a.role, {}).setdefault(
                    (a.subject, a.obj), set()).add(occ.timestamp)
                self.fwd.setdefault(a.role, {}).setdefault(a.subject, set()).add(a.obj)
                self.rev.setdefault(a.role, {}).setdefault(a.obj, set()).add(a.subject)

    def individuals(self):
        out = set()
        for by_ind in self.concepts.values():
            out |= set(by_ind)
        for by_pair in self.roles.values():
            for s, o in by_pair:
                out.add(s)
                out.add(o)
        return sorted(out)

    def neighbors(self, rexpr, x):
        """(y, atom) pairs such that (x, y) is in the rexpr extension."""
        name = rexpr.name
        if isinstance(rexpr, RoleInverse):
            return [(s, RoleAtom(name, s, x)) for s in sorted(self.rev.get(name, {}).get(x, ()))]
        return [(o, RoleAtom(name, x, o)) for o in sorted(self.fwd.get(name, {}).get(x, ()))]


def _supports(expr, x, pool):
    """Every choice of occurrences placing x in expr under the plain facts.

    Yields occurrence sets; non-minimal combinations are filtered later.
    """
    if isinstance(expr, ConceptName):
        for t in sorted(pool.concepts.get(expr.name, {}).get(x, ())):
            yield frozenset({Occurrence(ConceptAtom(expr.name, x), t)})
        return
    if isinstance(expr, Conj):
        for left in _supports(expr.left, x, pool):
            for right in _supports(expr.right, x, pool):
                yield left | right
        return
    for y, atom in pool.neighbors(expr.role, x):
        for t in sorted(pool.roles[atom.role][(atom.subject, atom.obj)]):
            role_occ = Occurrence(atom, t)
            for filler in _supports(expr.filler, y, pool):
                yield filler | {role_occ}


def find_conflicts(current, incoming, ntbox):
    """Minimal occurrence-set instantiations of any flattened negative body
    over the surviving asserted occurrences plus the incoming ABox.

    Distinct timestamped copies of the same atoms give distinct conflicts.
    Candidates subsumed by a smaller candidate (from any body) are dropped so
    each result is minimally inconsistent.
    """
    occs = set(current) | incoming.occurrences()
    pool = _Pool(occs)
    candidates = []  # (occurrence set, body, binding)
    for body in ntbox.flattened_negatives:
        for x in pool.individuals():
            for supp in _supports(body, x, pool):
                candidates.append((supp, body, x))
    minimal = []
    for supp, body, x in candidates:
        if any(other < supp for other, _, _ in candidates):
            continue
        if any(supp == kept.occurrences for kept in minimal):
            continue
        minimal.append(ConflictSet(occurrences=supp, violated_body=body, binding=x))
    minimal.sort(key=lambda c: sorted(o.sort_key for o in c.occurrences))
    return minimal


# ---------------------------------------------------------------------------
# resolution


def resolve_conflicts(conflicts):
    """Pick the occurrences to retract, newest conflicts first.

    Conflicts are ranked by the timestamp of their oldest members; the most
    recent rank is processed each round. A conflict whose oldest member is
    unique sheds exactly that occurrence. Remaining conflicts of the rank
    shed their whole oldest slice when no smaller oldest slice in the rank
    undercuts it. Every conflict already touched by the removals so far is
    discharged before older ranks are considered.
    """
    removed = set()
    chosen_slices = []
    live = list(conflicts)
    while live:
        newest = max(c.min_timestamp for c in live)
        rank = [c for c in live if c.min_timestamp == newest]
        for c in rank:
            if len(c.min_set) == 1:
                removed |= c.min_set
        live = [c for c in live if not (c.occurrences & removed)]
        rank_slices = [c.min_set for c in rank]
        still_live = {id(c) for c in live}
        for c in rank:
            if id(c) not in still_live:
                continue
            if any(other < c.min_set for other in rank_slices):
                continue
            if c.min_set not in chosen_slices:
                chosen_slices.append(c.min_set)
        live = [c for c in live
                if not any(s <= c.occurrences for s in chosen_slices)]
    for s in chosen_slices:
        removed |= s
    return frozenset(removed)


# ---------------------------------------------------------------------------
# applying removals to a materialized window


def apply_repair(wm, removed, tbox):
    """Retract asserted occurrences and restore the materialization.

    Classic delete-and-rederive: marks spread through any derivation using a
    removed or marked occurrence, marked occurrences are deleted unless still
    asserted, and the fixpoint re-runs from the survivors so over-deleted
    facts come back, re-homed to their newest remaining support.
    Returns (overdeleted, rederived) occurrence counts.
    """
    removed = set(removed)
    for occ in removed:
        tss = wm._asserted.get(occ.atom)
        if tss is None or occ.timestamp not in tss:
            raise ValueError(f"{occ} is not an asserted occurrence of this window")
        tss.discard(occ.timestamp)
        if not tss:
            del wm._asserted[occ.atom]

    marked = set(removed)
    frontier = sorted(removed, key=lambda o: o.sort_key)
    while frontier:
        dindex = _DeltaIndex(frontier)
        probe = _Probe(wm)
        fresh = []
        for ax in tbox.positive_axioms:
            if isinstance(ax, ConceptInclusion):
                res = _delta_concept(ax.body, probe, dindex)
                heads = [(ConceptAtom(ax.head, x), h)
                         for x in sorted(res) for h in sorted(res[x])]
            else:
                res = _delta_role(ax.sub, dindex)
                heads = [(RoleAtom(ax.sup.name, x, y), h)
                         for (x, y) in sorted(res) for h in sorted(res[(x, y)])]
            for atom, h in heads:
                occ = Occurrence(atom, h)
                if occ in marked:
                    continue
                if h not in wm.homes(atom):
                    continue
                if h in wm._asserted.get(atom, ()):
                    continue
                marked.add(occ)
                fresh.append(occ)
        frontier = fresh

    for occ in sorted(marked, key=lambda o: o.sort_key):
        wm._delete_occurrence(occ.atom, occ.timestamp)
    wm.derivation_log = [d for d in wm.derivation_log
                         if d.head not in marked and not (set(d.body) & marked)]

    # Rederivation: one full pass finds marked occurrences with surviving
    # support, then the ordinary semi-naive rounds propagate from those.
    survivors = sorted(wm.occurrences(), key=lambda o: o.sort_key)
    restored = wm._fixpoint(tbox, survivors, check_negatives=False)
    return len(marked), len(restored)


def add_abox_with_repair(wm, abox, tbox, ntbox):
    """Resolve the conflicts the incoming ABox raises, then add what survives.

    Occurrences removed from already-loaded entries are retracted with their
    consequences; occurrences removed from the incoming ABox simply never
    enter. Returns (wm, RepairReport).
    """
    conflicts = find_conflicts(wm.asserted_occurrences(), abox, ntbox)
    removed = resolve_conflicts(conflicts)
    existing = frozenset(o for o in removed if o.timestamp < abox.timestamp)
    overdeleted = rederived = 0
    if existing:
        overdeleted, rederived = apply_repair(wm, existing, tbox)
    dropped_now = {o.atom for o in removed if o.timestamp == abox.timestamp}
    surviving = MomentaryABox(abox.timestamp, frozenset(abox.atoms - dropped_now))
    wm.add_abox(surviving, tbox)
    return wm, RepairReport(
        removed=frozenset(removed),
        conflicts=tuple(conflicts),
        overdeleted=overdeleted,
        rederived=rederived,
    )
