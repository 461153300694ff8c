"""Algebraic schema terms, reference sets, and the binding environment.

Terms are immutable. Structural operators (property, required-field,
item, tail, containment) are vacuously satisfied by values of any other
type; type assertions and bounds carry the actual type commitments.
Smart constructors keep boolean combinations flat and collapse double
negation, which the environment's negative-twin invariant relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .errors import UnresolvableRef
from .patterns import PatternExpr
from .values import TYPE_NAMES

ALL_TYPES = frozenset(TYPE_NAMES)

FALSE_URI = "#~never"


@dataclass(frozen=True, slots=True)
class RefName:
    uri: str
    negated: bool = False

    def negate(self) -> "RefName":
        return RefName(self.uri, not self.negated)

    def __str__(self) -> str:
        return ("!" if self.negated else "") + self.uri


def negate_ref(name: RefName) -> RefName:
    return name.negate()


class CRef:
    """A set of signed reference names, read as the conjunction of their bodies."""

    __slots__ = ("members", "_hash")

    def __init__(self, members: Iterable[RefName] = ()):
        object.__setattr__(self, "members", frozenset(members))
        object.__setattr__(self, "_hash", hash(self.members))

    def __eq__(self, other) -> bool:
        return isinstance(other, CRef) and self.members == other.members

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self.members:
            return "CRef()"
        return "CRef({%s})" % ", ".join(str(m) for m in self.sorted_members())

    def sorted_members(self) -> tuple[RefName, ...]:
        return tuple(sorted(self.members, key=lambda r: (r.uri, r.negated)))

    def key(self):
        return tuple((r.uri, r.negated) for r in self.sorted_members())

    def union(self, other: "CRef") -> "CRef":
        if not other.members:
            return self
        if not self.members:
            return other
        return CRef(self.members | other.members)

    @property
    def has_clash(self) -> bool:
        return any(m.negate() in self.members for m in self.members)

    @property
    def is_empty(self) -> bool:
        return not self.members


CREF_TRUE = CRef()


def cref(*names: RefName) -> CRef:
    return CRef(names)


# ---------------------------------------------------------------------------
# Schema terms


class Schema:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class SBool(Schema):
    value: bool


TRUE = SBool(True)
FALSE = SBool(False)


@dataclass(frozen=True, slots=True)
class SType(Schema):
    name: str


@dataclass(frozen=True, slots=True)
class STypeSet(Schema):
    names: frozenset[str]


@dataclass(frozen=True, slots=True)
class SConst(Schema):
    # payload is a boolean or an exact number; other constants are encoded
    # with type and pattern operators before terms are built
    value: object


@dataclass(frozen=True, slots=True)
class SNotConst(Schema):
    value: object


@dataclass(frozen=True, slots=True)
class SRef(Schema):
    ref: CRef


@dataclass(frozen=True, slots=True)
class SAllOf(Schema):
    items: tuple[Schema, ...]


@dataclass(frozen=True, slots=True)
class SAnyOf(Schema):
    items: tuple[Schema, ...]


@dataclass(frozen=True, slots=True)
class SOneOf(Schema):
    items: tuple[Schema, ...]


@dataclass(frozen=True, slots=True)
class SNot(Schema):
    item: Schema


@dataclass(frozen=True, slots=True)
class SPatternProps(Schema):
    """Every field whose name matches the pattern has a value in the schema."""

    pattern: PatternExpr
    schema: Schema


@dataclass(frozen=True, slots=True)
class SPatternReq(Schema):
    """Some field whose name matches the pattern has a value in the schema."""

    pattern: PatternExpr
    schema: Schema


@dataclass(frozen=True, slots=True)
class SMinProps(Schema):
    bound: int


@dataclass(frozen=True, slots=True)
class SMaxProps(Schema):
    bound: int


@dataclass(frozen=True, slots=True)
class SItemAt(Schema):
    """If a value exists at this index, it satisfies the schema."""

    index: int
    schema: Schema


@dataclass(frozen=True, slots=True)
class SItemsFrom(Schema):
    """Every value at this index or later satisfies the schema."""

    index: int
    schema: Schema


@dataclass(frozen=True, slots=True)
class SContainsFrom(Schema):
    """Some value at this index or later satisfies the schema."""

    index: int
    schema: Schema


@dataclass(frozen=True, slots=True)
class SMinItems(Schema):
    bound: int


@dataclass(frozen=True, slots=True)
class SMaxItems(Schema):
    bound: int


@dataclass(frozen=True, slots=True)
class SUniqueItems(Schema):
    pass


@dataclass(frozen=True, slots=True)
class SRepeatedItems(Schema):
    """Satisfied by arrays with at least one duplicated element."""


@dataclass(frozen=True, slots=True)
class SMinimum(Schema):
    bound: Fraction
    exclusive: bool = False


@dataclass(frozen=True, slots=True)
class SMaximum(Schema):
    bound: Fraction
    exclusive: bool = False


@dataclass(frozen=True, slots=True)
class SMultipleOf(Schema):
    factor: Fraction


@dataclass(frozen=True, slots=True)
class SNotMultipleOf(Schema):
    factor: Fraction


@dataclass(frozen=True, slots=True)
class SPattern(Schema):
    pattern: PatternExpr


# ---------------------------------------------------------------------------
# Smart constructors


def s_all_of(items: Iterable[Schema]) -> Schema:
    flat: list[Schema] = []
    for it in items:
        if it is TRUE or it == TRUE:
            continue
        if it is FALSE or it == FALSE:
            return FALSE
        if isinstance(it, SAllOf):
            flat.extend(it.items)
        else:
            flat.append(it)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return SAllOf(tuple(flat))


def s_any_of(items: Iterable[Schema]) -> Schema:
    flat: list[Schema] = []
    for it in items:
        if it == FALSE:
            continue
        if it == TRUE:
            return TRUE
        if isinstance(it, SAnyOf):
            flat.extend(it.items)
        else:
            flat.append(it)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return SAnyOf(tuple(flat))


def s_not(item: Schema) -> Schema:
    if isinstance(item, SNot):
        return item.item
    if item == TRUE:
        return FALSE
    if item == FALSE:
        return TRUE
    return SNot(item)


def s_type_set(names: Iterable[str]) -> Schema:
    ns = frozenset(names)
    if not ns:
        return FALSE
    if len(ns) == 1:
        return SType(next(iter(ns)))
    return STypeSet(ns)


# ---------------------------------------------------------------------------
# Traversal helpers


def child_schemas(s: Schema) -> tuple[Schema, ...]:
    if isinstance(s, (SAllOf, SAnyOf, SOneOf)):
        return s.items
    if isinstance(s, SNot):
        return (s.item,)
    if isinstance(s, (SPatternProps, SPatternReq, SItemAt, SItemsFrom, SContainsFrom)):
        return (s.schema,)
    return ()


def rebuild(s: Schema, kids: tuple[Schema, ...]) -> Schema:
    if isinstance(s, SAllOf):
        return s_all_of(kids)
    if isinstance(s, SAnyOf):
        return s_any_of(kids)
    if isinstance(s, SOneOf):
        return SOneOf(kids)
    if isinstance(s, SNot):
        return s_not(kids[0])
    if isinstance(s, SPatternProps):
        return SPatternProps(s.pattern, kids[0])
    if isinstance(s, SPatternReq):
        return SPatternReq(s.pattern, kids[0])
    if isinstance(s, SItemAt):
        return SItemAt(s.index, kids[0])
    if isinstance(s, SItemsFrom):
        return SItemsFrom(s.index, kids[0])
    if isinstance(s, SContainsFrom):
        return SContainsFrom(s.index, kids[0])
    raise AssertionError(f"{s!r} has no children")


def map_schema(s: Schema, f) -> Schema:
    """Bottom-up rewrite: children first, then f on the rebuilt node."""
    kids = child_schemas(s)
    if kids:
        new_kids = tuple(map_schema(k, f) for k in kids)
        if new_kids != kids:
            s = rebuild(s, new_kids)
    return f(s)


STRUCTURAL = (SPatternProps, SPatternReq, SItemAt, SItemsFrom, SContainsFrom)


def iter_refs(s: Schema, guarded: bool = False) -> Iterator[tuple[RefName, bool]]:
    """All reference names in s, with a flag telling whether the occurrence
    sits under at least one structural operator."""
    if isinstance(s, SRef):
        for name in s.ref.members:
            yield (name, guarded)
        return
    under = guarded or isinstance(s, STRUCTURAL)
    for kid in child_schemas(s):
        yield from iter_refs(kid, under)


# ---------------------------------------------------------------------------
# Environment and documents


class Env:
    """Bindings from reference names to bodies, plus the normalization memo."""

    IN_PROGRESS = object()

    def __init__(self, bindings: Optional[dict[RefName, Schema]] = None):
        self.bindings: dict[RefName, Schema] = dict(bindings or {})
        self.memo: dict[CRef, object] = {}
        self._false_ref: Optional[CRef] = None

    def copy(self) -> "Env":
        return Env(self.bindings)

    def bind(self, name: RefName, body: Schema) -> None:
        self.bindings[name] = body

    def body(self, name: RefName) -> Schema:
        try:
            return self.bindings[name]
        except KeyError:
            raise UnresolvableRef(f"unbound reference {name}") from None

    def cref_body(self, ref: CRef) -> Schema:
        if ref.is_empty:
            return TRUE
        return s_all_of(SRefSingle(m) for m in ref.sorted_members())

    def false_ref(self) -> CRef:
        """Canonical contradictory reference set {x, not x}."""
        if self._false_ref is None:
            positives = sorted(n.uri for n in self.bindings if not n.negated)
            if positives:
                uri = positives[0]
            else:
                uri = FALSE_URI
                self.bind(RefName(uri), FALSE)
                self.bind(RefName(uri, True), TRUE)
            base = RefName(uri)
            if base.negate() not in self.bindings and base in self.bindings:
                self.bind(base.negate(), s_not(self.bindings[base]))
            self._false_ref = CRef((base, base.negate()))
        return self._false_ref


def SRefSingle(name: RefName) -> SRef:
    return SRef(CRef((name,)))


@dataclass
class Document:
    root: Schema
    env: Env


def not_complete(env: Env) -> None:
    """Ensure every bound name has its negative twin bound to the negated body."""
    for name in list(env.bindings):
        twin = name.negate()
        if twin not in env.bindings:
            env.bind(twin, s_not(env.bindings[name]))


def well_formed(doc: Document) -> list[str]:
    """Diagnostics for unbound reachable references and unguarded reference cycles."""
    diags: list[str] = []
    known = set(doc.env.bindings)

    def positive(name: RefName) -> RefName:
        return RefName(name.uri)

    seen: set[RefName] = set()
    queue: list[RefName] = []
    for name, _ in iter_refs(doc.root):
        base = positive(name)
        if name not in known and base not in known:
            diags.append(f"unbound reference {name}")
        elif base not in seen:
            seen.add(base)
            queue.append(base)

    # unguarded-edge graph over positive uris; an edge is unguarded when any
    # occurrence of the target sits under boolean operators only
    edges: dict[str, set[str]] = {}
    while queue:
        base = queue.pop()
        for body_name in (base, base.negate()):
            body = doc.env.bindings.get(body_name)
            if body is None:
                continue
            for ref, guarded in iter_refs(body):
                tgt = positive(ref)
                if ref not in known and tgt not in known:
                    diags.append(f"unbound reference {ref} in body of {body_name}")
                    continue
                if not guarded:
                    edges.setdefault(base.uri, set()).add(tgt.uri)
                if tgt not in seen:
                    seen.add(tgt)
                    queue.append(tgt)

    cycle = _find_cycle(edges)
    if cycle:
        diags.append("unguarded reference cycle: " + " -> ".join(cycle))
    return diags


def _find_cycle(edges: dict[str, set[str]]) -> Optional[list[str]]:
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    stack_path: list[str] = []

    def visit(u: str) -> Optional[list[str]]:
        color[u] = GRAY
        stack_path.append(u)
        for v in sorted(edges.get(u, ())):
            c = color.get(v, WHITE)
            if c == GRAY:
                i = stack_path.index(v)
                return stack_path[i:] + [v]
            if c == WHITE:
                found = visit(v)
                if found:
                    return found
        stack_path.pop()
        color[u] = BLACK
        return None

    for u in sorted(edges):
        if color.get(u, WHITE) == WHITE:
            found = visit(u)
            if found:
                return found
    return None
