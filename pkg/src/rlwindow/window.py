"""Incremental materialization over a sliding window of momentary ABoxes.

State is kept at occurrence granularity: every atom in the window carries the
set of timestamps it is homed at. Asserted atoms live at their assertion
ticks. A derived atom is added at the minimum timestamp over the occurrences
instantiating some rule body for it, and every distinct instantiation
contributes its own minimum, so the atom may be homed at several ticks.
Because each home timestamp certifies a derivation using only occurrences at
that tick or later, expiring the oldest ticks is pure deletion and requires
no re-reasoning.

Adding a momentary ABox runs a semi-naive fixpoint: each round only considers
rule-body instantiations that use at least one occurrence added in the
previous round, probing the rest of the body against the full index.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import StaleTimestamp, UnexpectedInconsistency
from .interpretation import Interpretation
from .ontology import ConceptInclusion, ConceptName, Conj, RoleInverse, RoleName
from .stream import (Atom, ConceptAtom, Occurrence, RoleAtom, Timestamp,
                     WindowExtent)

LOG_CAP = 100_000


@dataclass(frozen=True)
class AttributedAtom:
    atom: Atom
    home_timestamps: frozenset[Timestamp]
    asserted_at: frozenset[Timestamp]

    @property
    def origin(self):
        return "asserted" if self.asserted_at else "derived"


@dataclass(frozen=True)
class Derivation:
    rule: object
    body: tuple[Occurrence, ...]
    head: Occurrence


@dataclass
class SlideReport:
    extent: WindowExtent
    added_occurrences: int = 0
    expired_occurrences: int = 0
    removals: tuple[Occurrence, ...] = ()
    conflicts: int = 0


# ---------------------------------------------------------------------------
# timestamp-annotated evaluation
#
# An annotation maps an achievable home timestamp to one sample witness, the
# tuple of occurrences instantiating the body. Joining two annotations takes
# min(h1, h2) over all pairs, which is exactly the set of minima reachable by
# choosing one occurrence per ground atom.


def _atom_ann(atom, timestamps):
    return {t: (Occurrence(atom, t),) for t in sorted(timestamps)}


def _minjoin(a, b):
    out = {}
    for h1 in sorted(a):
        for h2 in sorted(b):
            h = h1 if h1 <= h2 else h2
            if h not in out:
                out[h] = a[h1] + b[h2]
    return out


def _merge_ann(dst, src):
    for h in sorted(src):
        if h not in dst:
            dst[h] = src[h]


class _DeltaIndex:
    """Occurrences added in the previous round, indexed for joining."""

    def __init__(self, occurrences):
        self.concepts = {}
        self.roles = {}
        for occ in occurrences:
            a = occ.atom
            if isinstance(a, ConceptAtom):
                self.concepts.setdefault(a.concept, {}).setdefault(
                    a.individual, set()).add(occ.timestamp)
            else:
                self.roles.setdefault(a.role, {}).setdefault(
                    (a.subject, a.obj), set()).add(occ.timestamp)

    def role_matches(self, rexpr):
        """(x, y, atom, timestamps) with the pair oriented per rexpr."""
        out = []
        for (s, o), tss in self.roles.get(rexpr.name, {}).items():
            atom = RoleAtom(rexpr.name, s, o)
            if isinstance(rexpr, RoleInverse):
                out.append((o, s, atom, tss))
            else:
                out.append((s, o, atom, tss))
        return sorted(out, key=lambda r: (r[0], r[1]))


class _Probe:
    """Full-index evaluation with per-round memoization."""

    def __init__(self, model):
        self.m = model
        self.memo = {}

    def concept_at(self, expr, x):
        key = (expr, x)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if isinstance(expr, ConceptName):
            homes = self.m._concepts.get(expr.name, {}).get(x)
            out = _atom_ann(ConceptAtom(expr.name, x), homes) if homes else {}
        elif isinstance(expr, Conj):
            left = self.concept_at(expr.left, x)
            out = {}
            if left:
                right = self.concept_at(expr.right, x)
                if right:
                    out = _minjoin(left, right)
        else:
            out = {}
            for y, atom, homes in self.role_neighbors(expr.role, x):
                filler = self.concept_at(expr.filler, y)
                if filler:
                    _merge_ann(out, _minjoin(_atom_ann(atom, homes), filler))
        self.memo[key] = out
        return out

    def role_neighbors(self, rexpr, x):
        """(y, atom, homes) for every pair putting x in the rexpr image."""
        name = rexpr.name
        out = []
        if isinstance(rexpr, RoleName):
            for o in sorted(self.m._fwd.get(name, {}).get(x, ())):
                out.append((o, RoleAtom(name, x, o), self.m._roles[name][(x, o)]))
        else:
            for s in sorted(self.m._rev.get(name, {}).get(x, ())):
                out.append((s, RoleAtom(name, s, x), self.m._roles[name][(s, x)]))
        return out

    def role_sources(self, rexpr, y):
        """(x, atom, homes) for every pair linking x to the filler member y."""
        name = rexpr.name
        out = []
        if isinstance(rexpr, RoleName):
            for s in sorted(self.m._rev.get(name, {}).get(y, ())):
                out.append((s, RoleAtom(name, s, y), self.m._roles[name][(s, y)]))
        else:
            for o in sorted(self.m._fwd.get(name, {}).get(y, ())):
                out.append((o, RoleAtom(name, y, o), self.m._roles[name][(y, o)]))
        return out


def _delta_concept(expr, probe, delta):
    """Annotated members of expr whose instantiation uses a delta occurrence.

    May also report instantiations already derivable without the delta; the
    caller deduplicates against the index, so that is harmless.
    """
    if isinstance(expr, ConceptName):
        out = {}
        for x in sorted(delta.concepts.get(expr.name, {})):
            tss = delta.concepts[expr.name][x]
            out[x] = _atom_ann(ConceptAtom(expr.name, x), tss)
        return out
    if isinstance(expr, Conj):
        out = {}
        for x, ann in _delta_concept(expr.left, probe, delta).items():
            other = probe.concept_at(expr.right, x)
            if other:
                _merge_ann(out.setdefault(x, {}), _minjoin(ann, other))
        for x, ann in _delta_concept(expr.right, probe, delta).items():
            other = probe.concept_at(expr.left, x)
            if other:
                _merge_ann(out.setdefault(x, {}), _minjoin(other, ann))
        return out
    out = {}
    for x, y, atom, tss in delta.role_matches(expr.role):
        filler = probe.concept_at(expr.filler, y)
        if filler:
            _merge_ann(out.setdefault(x, {}), _minjoin(_atom_ann(atom, tss), filler))
    for y, ann in _delta_concept(expr.filler, probe, delta).items():
        for x, atom, homes in probe.role_sources(expr.role, y):
            _merge_ann(out.setdefault(x, {}), _minjoin(_atom_ann(atom, homes), ann))
    return out


def _delta_role(rexpr, delta):
    out = {}
    for x, y, atom, tss in delta.role_matches(rexpr):
        out[(x, y)] = _atom_ann(atom, tss)
    return out


# ---------------------------------------------------------------------------
# the window model


class WindowModel:
    """Mutable materialized state of one window. Single-writer; concurrent
    readers should work on a copy()."""

    def __init__(self, extent):
        self.extent = extent
        self.entry_timestamps: list[Timestamp] = []
        self._concepts: dict[str, dict[str, set[Timestamp]]] = {}
        self._roles: dict[str, dict[tuple[str, str], set[Timestamp]]] = {}
        self._fwd: dict[str, dict[str, set[str]]] = {}
        self._rev: dict[str, dict[str, set[str]]] = {}
        self._asserted: dict[Atom, set[Timestamp]] = {}
        self.derivation_log: list[Derivation] = []
        self.log_overflow = False

    # -- occurrence bookkeeping ------------------------------------------

    def homes(self, atom):
        if isinstance(atom, ConceptAtom):
            return self._concepts.get(atom.concept, {}).get(atom.individual, set())
        return self._roles.get(atom.role, {}).get((atom.subject, atom.obj), set())

    def _insert(self, atom, ts, asserted):
        if isinstance(atom, ConceptAtom):
            homes = self._concepts.setdefault(atom.concept, {}).setdefault(
                atom.individual, set())
        else:
            key = (atom.subject, atom.obj)
            homes = self._roles.setdefault(atom.role, {}).setdefault(key, set())
            self._fwd.setdefault(atom.role, {}).setdefault(atom.subject, set()).add(atom.obj)
            self._rev.setdefault(atom.role, {}).setdefault(atom.obj, set()).add(atom.subject)
        fresh = ts not in homes
        homes.add(ts)
        if asserted:
            self._asserted.setdefault(atom, set()).add(ts)
        return fresh

    def _delete_occurrence(self, atom, ts):
        if isinstance(atom, ConceptAtom):
            by_ind = self._concepts.get(atom.concept, {})
            homes = by_ind.get(atom.individual, set())
            homes.discard(ts)
            if not homes:
                by_ind.pop(atom.individual, None)
                if not by_ind:
                    self._concepts.pop(atom.concept, None)
        else:
            key = (atom.subject, atom.obj)
            by_pair = self._roles.get(atom.role, {})
            homes = by_pair.get(key, set())
            homes.discard(ts)
            if not homes:
                by_pair.pop(key, None)
                self._fwd[atom.role][atom.subject].discard(atom.obj)
                if not self._fwd[atom.role][atom.subject]:
                    del self._fwd[atom.role][atom.subject]
                self._rev[atom.role][atom.obj].discard(atom.subject)
                if not self._rev[atom.role][atom.obj]:
                    del self._rev[atom.role][atom.obj]
                if not by_pair:
                    self._roles.pop(atom.role, None)
                    self._fwd.pop(atom.role, None)
                    self._rev.pop(atom.role, None)

    def _log(self, rule, body, head):
        if len(self.derivation_log) >= LOG_CAP:
            self.log_overflow = True
            return
        self.derivation_log.append(Derivation(rule, body, head))

    # -- views -------------------------------------------------------------

    def occurrences(self):
        out = set()
        for name, by_ind in self._concepts.items():
            for x, homes in by_ind.items():
                out |= {Occurrence(ConceptAtom(name, x), t) for t in homes}
        for name, by_pair in self._roles.items():
            for (s, o), homes in by_pair.items():
                out |= {Occurrence(RoleAtom(name, s, o), t) for t in homes}
        return out

    def asserted_occurrences(self):
        out = set()
        for atom, tss in self._asserted.items():
            out |= {Occurrence(atom, t) for t in tss}
        return out

    def attributed(self, atom):
        homes = self.homes(atom)
        if not homes:
            return None
        return AttributedAtom(
            atom=atom,
            home_timestamps=frozenset(homes),
            asserted_at=frozenset(self._asserted.get(atom, ())),
        )

    def attributed_atoms(self):
        seen = {o.atom for o in self.occurrences()}
        return [self.attributed(a) for a in sorted(seen, key=lambda a: a.sort_key)]

    def window_interpretation(self):
        concepts = {n: set(by_ind) for n, by_ind in self._concepts.items()}
        roles = {n: set(by_pair) for n, by_pair in self._roles.items()}
        return Interpretation(concepts, roles)

    def entry_interpretation(self, ts):
        concepts, roles = {}, {}
        for n, by_ind in self._concepts.items():
            ext = {x for x, homes in by_ind.items() if ts in homes}
            if ext:
                concepts[n] = ext
        for n, by_pair in self._roles.items():
            ext = {p for p, homes in by_pair.items() if ts in homes}
            if ext:
                roles[n] = ext
        return Interpretation(concepts, roles)

    def entries(self):
        return [(t, self.entry_interpretation(t)) for t in self.entry_timestamps]

    def entails(self, atom):
        return bool(self.homes(atom))

    def copy(self):
        dup = WindowModel(self.extent)
        dup.entry_timestamps = list(self.entry_timestamps)
        dup._concepts = {n: {x: set(h) for x, h in m.items()}
                         for n, m in self._concepts.items()}
        dup._roles = {n: {p: set(h) for p, h in m.items()}
                      for n, m in self._roles.items()}
        dup._fwd = {n: {s: set(o) for s, o in m.items()} for n, m in self._fwd.items()}
        dup._rev = {n: {o: set(s) for o, s in m.items()} for n, m in self._rev.items()}
        dup._asserted = {a: set(t) for a, t in self._asserted.items()}
        dup.derivation_log = list(self.derivation_log)
        dup.log_overflow = self.log_overflow
        return dup

    # -- reasoning ----------------------------------------------------------

    def _check_negatives(self, tbox, delta, probe):
        for ax in tbox.negative_inclusions:
            hit = _delta_concept(ax.body, probe, delta)
            if hit:
                raise UnexpectedInconsistency(ax, min(hit))

    def _fixpoint(self, tbox, delta_occurrences, check_negatives=True):
        """Close the index under the positive axioms, semi-naive from the
        given seed occurrences. Returns every occurrence inserted."""
        inserted = []
        delta = list(delta_occurrences)
        while delta:
            dindex = _DeltaIndex(delta)
            probe = _Probe(self)
            if check_negatives:
                self._check_negatives(tbox, dindex, probe)
            additions = []
            for ax in tbox.positive_axioms:
                if isinstance(ax, ConceptInclusion):
                    res = _delta_concept(ax.body, probe, dindex)
                    for x in sorted(res):
                        known = self._concepts.get(ax.head, {}).get(x, ())
                        for h in sorted(res[x]):
                            if h not in known:
                                additions.append(
                                    (ax, ConceptAtom(ax.head, x), h, res[x][h]))
                else:
                    res = _delta_role(ax.sub, dindex)
                    for (x, y) in sorted(res):
                        known = self._roles.get(ax.sup.name, {}).get((x, y), ())
                        for h in sorted(res[(x, y)]):
                            if h not in known:
                                additions.append(
                                    (ax, RoleAtom(ax.sup.name, x, y), h, res[(x, y)][h]))
            delta = []
            for rule, atom, h, witness in additions:
                if self._insert(atom, h, asserted=False):
                    occ = Occurrence(atom, h)
                    self._log(rule, witness, occ)
                    delta.append(occ)
            inserted.extend(delta)
        return inserted

    def add_abox(self, abox, tbox):
        """Append one momentary ABox, newest in the window, and restore the
        materialization. Derived facts gain homes at the minimum timestamp of
        each new instantiation; nothing already present is touched."""
        ts = abox.timestamp
        if self.entry_timestamps and ts <= self.entry_timestamps[-1]:
            raise StaleTimestamp(
                f"ABox at {ts} is not newer than loaded entry {self.entry_timestamps[-1]}")
        if not self.extent.contains(ts):
            raise StaleTimestamp(f"ABox at {ts} outside window {self.extent}")
        self.entry_timestamps.append(ts)
        seed = []
        for atom in sorted(abox.atoms, key=lambda a: a.sort_key):
            if self._insert(atom, ts, asserted=True):
                seed.append(Occurrence(atom, ts))
        self._fixpoint(tbox, seed)
        return self

    def drop_before(self, cutoff):
        """Expire every occurrence homed before the cutoff. Pure deletion:
        every surviving home certifies a derivation among survivors."""
        self.entry_timestamps = [t for t in self.entry_timestamps if t >= cutoff]
        for name in list(self._concepts):
            by_ind = self._concepts[name]
            for x in list(by_ind):
                by_ind[x] = {t for t in by_ind[x] if t >= cutoff}
                if not by_ind[x]:
                    del by_ind[x]
            if not by_ind:
                del self._concepts[name]
        for name in list(self._roles):
            by_pair = self._roles[name]
            for pair in list(by_pair):
                by_pair[pair] = {t for t in by_pair[pair] if t >= cutoff}
                if not by_pair[pair]:
                    s, o = pair
                    self._fwd[name][s].discard(o)
                    if not self._fwd[name][s]:
                        del self._fwd[name][s]
                    self._rev[name][o].discard(s)
                    if not self._rev[name][o]:
                        del self._rev[name][o]
                    del by_pair[pair]
            if not by_pair:
                del self._roles[name]
                self._fwd.pop(name, None)
                self._rev.pop(name, None)
        for atom in list(self._asserted):
            self._asserted[atom] = {t for t in self._asserted[atom] if t >= cutoff}
            if not self._asserted[atom]:
                del self._asserted[atom]
        self.derivation_log = [d for d in self.derivation_log
                               if d.head.timestamp >= cutoff]
        if self.extent.start < cutoff <= self.extent.end:
            self.extent = WindowExtent(cutoff, self.extent.end)
        return self

    def slide(self, stream, new_extent, tbox, repair=None):
        """Advance to a newer extent: expire, then ingest the fresh ticks in
        order. The optional repair hook takes (model, abox) and is expected to
        resolve conflicts and add the abox, returning a report with removals."""
        if new_extent.start < self.extent.start or new_extent.end < self.extent.end:
            raise ValueError("windows only slide forward")
        report = SlideReport(extent=new_extent)
        before = sum(len(h) for m in self._concepts.values() for h in m.values())
        before += sum(len(h) for m in self._roles.values() for h in m.values())
        old_end = self.extent.end
        self.drop_before(new_extent.start)
        self.extent = new_extent
        after = sum(len(h) for m in self._concepts.values() for h in m.values())
        after += sum(len(h) for m in self._roles.values() for h in m.values())
        report.expired_occurrences = before - after

        removals = []
        repair_shrink = 0
        for box in stream:
            if box.timestamp <= old_end or box.timestamp > new_extent.end:
                continue
            if box.timestamp < new_extent.start:
                continue
            if repair is not None:
                rep = repair(self, box)
                removals.extend(sorted(rep.removed, key=lambda o: o.sort_key))
                report.conflicts += len(rep.conflicts)
                # retractions of older entries shrink the store mid-ingestion;
                # count additions gross of that, not net
                repair_shrink += getattr(rep, "overdeleted", 0) - getattr(rep, "rederived", 0)
            else:
                self.add_abox(box, tbox)
        final = sum(len(h) for m in self._concepts.values() for h in m.values())
        final += sum(len(h) for m in self._roles.values() for h in m.values())
        report.added_occurrences = final - after + repair_shrink
        report.removals = tuple(removals)
        return report


# Functional aliases matching the operation names used elsewhere.


def init_window_model(extent):
    return WindowModel(extent)


def add_abox(wm, abox, tbox):
    return wm.add_abox(abox, tbox)


def drop_before(wm, cutoff):
    return wm.drop_before(cutoff)


def slide(wm, stream, new_extent, tbox, repair=None):
    return wm, wm.slide(stream, new_extent, tbox, repair=repair)


def window_interpretation(wm):
    return wm.window_interpretation()


def entails(wm, atom):
    return wm.entails(atom)
