"""Concept and role expressions, TBox parsing, and negative-inclusion rewriting.

The supported fragment has three axiom shapes: a concept body included in a
concept name, a concept body included in bottom, and a role (or inverse role)
included in a role (or inverse role). Bodies are built from concept names,
conjunction, and existential restrictions over possibly inverted roles.

Expressions are kept in a canonical form, conjunctions flattened, sorted and
deduplicated, double inverses stripped, so structural equality is semantic
equality up to commutativity and idempotence of conjunction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import BudgetExceeded, ParseError, RLViolation

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RESERVED = {"bot", "some", "inv"}


# ---------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class RoleName:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class RoleInverse:
    name: str

    def __str__(self):
        return f"inv({self.name})"


RoleExpr = RoleName | RoleInverse


def invert_role(role):
    if isinstance(role, RoleName):
        return RoleInverse(role.name)
    return RoleName(role.name)


@dataclass(frozen=True)
class ConceptName:
    name: str


@dataclass(frozen=True)
class Conj:
    left: "ConceptExpr"
    right: "ConceptExpr"


@dataclass(frozen=True)
class Exists:
    role: RoleExpr
    filler: "ConceptExpr"


ConceptExpr = ConceptName | Conj | Exists


def struct_key(expr):
    """Total structural order used for canonical sorting."""
    if isinstance(expr, ConceptName):
        return (0, expr.name)
    if isinstance(expr, Exists):
        rk = (0, expr.role.name) if isinstance(expr.role, RoleName) else (1, expr.role.name)
        return (1, rk, struct_key(expr.filler))
    return (2, tuple(struct_key(c) for c in conjuncts(expr)))


def conjuncts(expr):
    """Flatten nested conjunctions into a tuple of non-Conj parts."""
    if isinstance(expr, Conj):
        return conjuncts(expr.left) + conjuncts(expr.right)
    return (expr,)


def canonicalize(expr):
    """Sort and deduplicate conjuncts recursively; right-nest the result."""
    parts = []
    for c in conjuncts(expr):
        if isinstance(c, Exists):
            c = Exists(c.role, canonicalize(c.filler))
        if c not in parts:
            parts.append(c)
    parts.sort(key=struct_key)
    out = parts[-1]
    for c in reversed(parts[:-1]):
        out = Conj(c, out)
    return out


def concept_names_in(expr):
    if isinstance(expr, ConceptName):
        return {expr.name}
    if isinstance(expr, Exists):
        return concept_names_in(expr.filler)
    return concept_names_in(expr.left) | concept_names_in(expr.right)


def role_names_in(expr):
    if isinstance(expr, ConceptName):
        return set()
    if isinstance(expr, Exists):
        return {expr.role.name} | role_names_in(expr.filler)
    return role_names_in(expr.left) | role_names_in(expr.right)


# ---------------------------------------------------------------------------
# axioms and TBoxes


@dataclass(frozen=True)
class ConceptInclusion:
    body: ConceptExpr
    head: str


@dataclass(frozen=True)
class NegativeInclusion:
    body: ConceptExpr


@dataclass(frozen=True)
class RoleInclusion:
    sub: RoleExpr
    sup: RoleExpr


Axiom = ConceptInclusion | NegativeInclusion | RoleInclusion


def canonical_axiom(ax):
    """Canonicalize bodies; normalize role inclusions so the superrole is a
    plain name (inverting both sides leaves the axiom's meaning unchanged)."""
    if isinstance(ax, ConceptInclusion):
        return ConceptInclusion(canonicalize(ax.body), ax.head)
    if isinstance(ax, NegativeInclusion):
        return NegativeInclusion(canonicalize(ax.body))
    sub, sup = ax.sub, ax.sup
    if isinstance(sup, RoleInverse):
        sub, sup = invert_role(sub), invert_role(sup)
    return RoleInclusion(sub, sup)


class TBox:
    """An ordered, duplicate-free collection of canonicalized axioms.

    Order is kept for deterministic rule iteration; equality is by axiom set.
    """

    def __init__(self, axioms):
        seen = []
        for ax in axioms:
            ax = canonical_axiom(ax)
            if ax not in seen:
                seen.append(ax)
        self.axioms = tuple(seen)

    def __eq__(self, other):
        return isinstance(other, TBox) and frozenset(self.axioms) == frozenset(other.axioms)

    def __hash__(self):
        return hash(frozenset(self.axioms))

    def __repr__(self):
        return f"TBox({len(self.axioms)} axioms)"

    @property
    def concept_inclusions(self):
        return tuple(a for a in self.axioms if isinstance(a, ConceptInclusion))

    @property
    def negative_inclusions(self):
        return tuple(a for a in self.axioms if isinstance(a, NegativeInclusion))

    @property
    def role_inclusions(self):
        return tuple(a for a in self.axioms if isinstance(a, RoleInclusion))

    @property
    def positive_axioms(self):
        return tuple(a for a in self.axioms
                     if isinstance(a, (ConceptInclusion, RoleInclusion)))

    def signature(self):
        concepts, roles = set(), set()
        for ax in self.axioms:
            if isinstance(ax, RoleInclusion):
                roles |= {ax.sub.name, ax.sup.name}
            else:
                concepts |= concept_names_in(ax.body)
                roles |= role_names_in(ax.body)
                if isinstance(ax, ConceptInclusion):
                    concepts.add(ax.head)
        return concepts, roles


# ---------------------------------------------------------------------------
# parsing

# axiom  := concept "<" head | role "<" role
# concept:= term ("&" term)*
# term   := NAME | "some" role "." term | "(" concept ")"
# role   := NAME | "inv(" NAME ")"
# head   := NAME | "bot"
#
# A bare NAME < NAME line is read as a concept inclusion. Role inclusions
# are recognized by an inv(...) marker on either side; a plain subrole axiom
# is written with both sides inverted (same meaning, see canonical_axiom).


class _Tokens:
    def __init__(self, line_text, lineno):
        self.lineno = lineno
        self.toks = []  # (kind, value, col)
        i = 0
        while i < len(line_text):
            ch = line_text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "&<.()":
                self.toks.append((ch, ch, i + 1))
                i += 1
                continue
            m = _NAME_RE.match(line_text, i)
            if not m:
                raise ParseError(f"unexpected character {ch!r}", line=lineno, col=i + 1)
            self.toks.append(("NAME", m.group(0), i + 1))
            i = m.end()
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None, None)

    def next(self, expect=None):
        kind, value, col = self.peek()
        if kind is None:
            raise ParseError("unexpected end of line", line=self.lineno)
        if expect is not None and kind != expect:
            raise ParseError(f"expected {expect!r}, got {value!r}", line=self.lineno, col=col)
        self.pos += 1
        return kind, value, col

    @property
    def done(self):
        return self.pos >= len(self.toks)


def _parse_role(tk):
    kind, value, col = tk.next("NAME")
    if value == "inv":
        tk.next("(")
        _, inner, icol = tk.next("NAME")
        if inner in _RESERVED:
            raise ParseError(f"{inner!r} is reserved", line=tk.lineno, col=icol)
        tk.next(")")
        return RoleInverse(inner)
    if value in _RESERVED:
        raise ParseError(f"{value!r} is reserved", line=tk.lineno, col=col)
    return RoleName(value)


def _parse_term(tk):
    kind, value, col = tk.peek()
    if kind == "(":
        tk.next("(")
        inner = _parse_concept(tk)
        tk.next(")")
        return inner
    kind, value, col = tk.next("NAME")
    if value == "some":
        role = _parse_role(tk)
        tk.next(".")
        return Exists(role, _parse_term(tk))
    if value == "inv":
        tk.pos -= 1
        raise ParseError("inv(...) is a role, not a concept", line=tk.lineno, col=col)
    if value in _RESERVED:
        raise ParseError(f"{value!r} is reserved", line=tk.lineno, col=col)
    return ConceptName(value)


def _parse_concept(tk):
    expr = _parse_term(tk)
    while tk.peek()[0] == "&":
        tk.next("&")
        expr = Conj(expr, _parse_term(tk))
    return expr


def _parse_axiom_line(line_text, lineno):
    tk = _Tokens(line_text, lineno)

    # Role inclusion when either side starts with inv(
    lhs_is_inv = tk.peek()[1] == "inv"
    if lhs_is_inv:
        sub = _parse_role(tk)
        tk.next("<")
        sup = _parse_role(tk)
        if not tk.done:
            raise ParseError("trailing input after role inclusion", line=lineno,
                             col=tk.peek()[2])
        return RoleInclusion(sub, sup)

    body = _parse_concept(tk)
    tk.next("<")
    kind, value, col = tk.peek()
    if kind == "NAME" and value == "inv":
        # NAME < inv(Q): the left side must be a bare name acting as a role
        if not isinstance(body, ConceptName):
            raise ParseError("role inclusion needs a role on the left", line=lineno, col=col)
        sup = _parse_role(tk)
        if not tk.done:
            raise ParseError("trailing input after role inclusion", line=lineno,
                             col=tk.peek()[2])
        return RoleInclusion(RoleName(body.name), sup)
    if kind == "NAME" and value == "bot":
        tk.next()
        if not tk.done:
            raise ParseError("trailing input after bot", line=lineno, col=tk.peek()[2])
        return NegativeInclusion(body)
    head = _parse_concept(tk)
    if not tk.done:
        raise ParseError("trailing input after axiom", line=lineno, col=tk.peek()[2])
    if not isinstance(head, ConceptName):
        raise RLViolation("inclusion head must be a single concept name", line=lineno)
    return ConceptInclusion(body, head.name)


def parse_tbox(text):
    axioms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        axioms.append(_parse_axiom_line(line, lineno))
    return TBox(axioms)


# ---------------------------------------------------------------------------
# printing


def format_role(role):
    return str(role)


def format_concept(expr):
    if isinstance(expr, ConceptName):
        return expr.name
    if isinstance(expr, Exists):
        filler = format_concept(expr.filler)
        if isinstance(expr.filler, Conj):
            filler = f"({filler})"
        return f"some {expr.role} . {filler}"
    return " & ".join(format_concept(c) for c in conjuncts(expr))


def format_axiom(ax):
    if isinstance(ax, ConceptInclusion):
        return f"{format_concept(ax.body)} < {ax.head}"
    if isinstance(ax, NegativeInclusion):
        return f"{format_concept(ax.body)} < bot"
    # Canonical role inclusions have a plain-name superrole. A plain-name
    # subrole is printed with both sides inverted so the line re-parses as a
    # role inclusion rather than a concept inclusion.
    if isinstance(ax.sub, RoleInverse):
        return f"inv({ax.sub.name}) < {ax.sup.name}"
    return f"inv({ax.sub.name}) < inv({ax.sup.name})"


def format_tbox(tbox):
    return "\n".join(format_axiom(a) for a in tbox.axioms) + "\n"


# ---------------------------------------------------------------------------
# negative-inclusion rewriting


@dataclass(frozen=True)
class Exact:
    def __str__(self):
        return "exact"


@dataclass(frozen=True)
class Truncated:
    depth: int

    def __str__(self):
        return f"truncated at depth {self.depth}"


@dataclass(frozen=True)
class UnfoldedNegative:
    source: NegativeInclusion
    bodies: tuple[ConceptExpr, ...]
    status: Exact | Truncated


@dataclass(frozen=True)
class NormalizedTBox:
    base: TBox
    entries: tuple[UnfoldedNegative, ...]

    @property
    def flattened_negatives(self):
        out = []
        for e in self.entries:
            for b in e.bodies:
                if b not in out:
                    out.append(b)
        return tuple(sorted(out, key=struct_key))

    @property
    def is_exact(self):
        return all(isinstance(e.status, Exact) for e in self.entries)

    def statuses(self):
        return [(e.source, e.status) for e in self.entries]


def _single_substitutions(expr, cdefs, rdefs):
    """Rewrite one occurrence of one defined name per result.

    One occurrence at a time keeps mixed forms reachable: in a body using a
    defined name twice, one use may be satisfied by a direct assertion and
    the other by a derivation, and both readings must survive flattening.
    """
    out = []
    if isinstance(expr, ConceptName):
        out.extend(cdefs.get(expr.name, ()))
    elif isinstance(expr, Conj):
        for left in _single_substitutions(expr.left, cdefs, rdefs):
            out.append(Conj(left, expr.right))
        for right in _single_substitutions(expr.right, cdefs, rdefs):
            out.append(Conj(expr.left, right))
    else:
        for sub in rdefs.get(expr.role.name, ()):
            role = sub if isinstance(expr.role, RoleName) else invert_role(sub)
            out.append(Exists(role, expr.filler))
        for filler in _single_substitutions(expr.filler, cdefs, rdefs):
            out.append(Exists(expr.role, filler))
    return out


def unfold_negative_inclusions(tbox, max_depth, body_cap=10_000):
    """Rewrite each negative inclusion into a set of bodies that can be
    matched against asserted atoms alone.

    Every defined concept name (the head of some concept inclusion) and every
    defined role name (the superrole of some role inclusion) is repeatedly
    replaced by its defining bodies, keeping the unreplaced form as well since
    the name may also be asserted directly. When a substitution pass adds
    nothing new the set is closed and the status is Exact; if max_depth passes
    still produce new bodies the result is Truncated and deeper derivations
    can escape detection. More than body_cap bodies for one inclusion raises
    BudgetExceeded.
    """
    cdefs = {}
    for ax in tbox.concept_inclusions:
        cdefs.setdefault(ax.head, []).append(ax.body)
    rdefs = {}
    for ax in tbox.role_inclusions:
        rdefs.setdefault(ax.sup.name, []).append(ax.sub)

    entries = []
    for neg in tbox.negative_inclusions:
        bodies = [canonicalize(neg.body)]
        known = set(bodies)
        frontier = list(bodies)
        status = None
        rounds = 0
        while True:
            fresh = []
            for b in sorted(frontier, key=struct_key):
                for cand in _single_substitutions(b, cdefs, rdefs):
                    cand = canonicalize(cand)
                    if cand not in known:
                        known.add(cand)
                        fresh.append(cand)
            if not fresh:
                status = Exact()
                break
            if rounds == max_depth:
                # This pass was only a peek past the budget; discard it.
                status = Truncated(max_depth)
                break
            rounds += 1
            bodies.extend(fresh)
            frontier = fresh
            if len(bodies) > body_cap:
                raise BudgetExceeded(
                    f"negative inclusion rewrite exceeded {body_cap} bodies")
        entries.append(UnfoldedNegative(
            source=neg,
            bodies=tuple(sorted(bodies, key=struct_key)),
            status=status,
        ))
    return NormalizedTBox(base=tbox, entries=tuple(entries))


def nonrecursive_report(tbox, max_depth):
    """Status per negative inclusion: Exact when its rewrite closes within
    max_depth passes, Truncated otherwise."""
    return unfold_negative_inclusions(tbox, max_depth).statuses()
