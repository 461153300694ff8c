"""Disjunctive canonical forms and the rewrites that feed them.

A canonical disjunct commits to exactly one JSON type (or to a plain
type set when nothing beyond the type is constrained). Object disjuncts
keep a partition of the property-name space into fragments; array
disjuncts keep per-index slots, one tail constraint, containment
obligations at or past the tail start, and length bounds; number
disjuncts keep one interval, one combined factor, and excluded factors.

The negation rewrite pushes a single negation one level down. oneOf is
expanded into anyOf over exclusive conjunctions before normalization,
and stratification replaces every structural argument with a singleton
reference so that normalization only ever meets references there.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from . import patterns as P
from .model import (
    ALL_TYPES,
    CRef,
    CREF_TRUE,
    Document,
    Env,
    FALSE,
    RefName,
    SAllOf,
    SAnyOf,
    SBool,
    SConst,
    SContainsFrom,
    SItemAt,
    SItemsFrom,
    SMaxItems,
    SMaxProps,
    SMaximum,
    SMinItems,
    SMinProps,
    SMinimum,
    SMultipleOf,
    SNot,
    SNotConst,
    SNotMultipleOf,
    SOneOf,
    SPattern,
    SPatternProps,
    SPatternReq,
    SRef,
    SRefSingle,
    SRepeatedItems,
    SType,
    STypeSet,
    SUniqueItems,
    Schema,
    TRUE,
    child_schemas,
    map_schema,
    rebuild,
    s_all_of,
    s_any_of,
    s_not,
    s_type_set,
)


# ---------------------------------------------------------------------------
# Conjunction forms


class Conj:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class CTypeSet(Conj):
    types: frozenset[str]


C_TRUE = CTypeSet(ALL_TYPES)


@dataclass(frozen=True, slots=True)
class CNull(Conj):
    pass


@dataclass(frozen=True, slots=True)
class CBoolean(Conj):
    value: Optional[bool] = None


@dataclass(frozen=True, slots=True)
class CNumber(Conj):
    lo: Optional[Fraction] = None
    lo_strict: bool = False
    hi: Optional[Fraction] = None
    hi_strict: bool = False
    factor: Optional[Fraction] = None
    excluded: tuple[Fraction, ...] = ()


@dataclass(frozen=True, slots=True)
class CString(Conj):
    pattern: Optional[P.PatternExpr] = None


@dataclass(frozen=True, slots=True)
class Fragment:
    """One block of the property-name partition: all fields whose name
    matches the pattern take values under ref; each entry of reqs demands
    one such field whose value also meets that entry."""

    pattern: P.PatternExpr
    ref: CRef
    reqs: tuple[CRef, ...] = ()

    def with_reqs(self, reqs: Iterable[CRef]) -> "Fragment":
        return Fragment(self.pattern, self.ref, sort_reqs(reqs))


def sort_reqs(reqs: Iterable[CRef]) -> tuple[CRef, ...]:
    return tuple(sorted(set(reqs), key=lambda r: r.key()))


TRIVIAL_FRAGMENT = Fragment(P.TOP, CREF_TRUE, ())


class CObject(Conj):
    __slots__ = ("fragments", "min_props", "max_props", "_hash", "_key_index", "_loose")

    def __init__(
        self,
        fragments: tuple[Fragment, ...] = (TRIVIAL_FRAGMENT,),
        min_props: int = 0,
        max_props: Optional[int] = None,
    ):
        self.fragments = tuple(fragments)
        self.min_props = min_props
        self.max_props = max_props
        self._hash = hash((frozenset(self.fragments), min_props, max_props))
        key_index: dict[str, int] = {}
        loose: list[int] = []
        for i, frag in enumerate(self.fragments):
            lit = P.key_literal(frag.pattern)
            if lit is not None:
                key_index[lit] = i
            else:
                loose.append(i)
        self._key_index = key_index
        self._loose = tuple(loose)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CObject)
            and self.min_props == other.min_props
            and self.max_props == other.max_props
            and frozenset(self.fragments) == frozenset(other.fragments)
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"CObject({self.fragments!r}, min={self.min_props}, max={self.max_props})"

    def candidates(self, pattern: P.PatternExpr) -> tuple[int, ...]:
        """Indices of fragments that may overlap the pattern. Fragments for
        other literal keys are skipped outright."""
        lit = P.key_literal(pattern)
        if lit is not None:
            hit = self._key_index.get(lit)
            return ((hit,) if hit is not None else ()) + self._loose
        return tuple(range(len(self.fragments)))

    def replace(self, changes: dict[int, list[Fragment]]) -> "CObject":
        out: list[Fragment] = []
        for i, frag in enumerate(self.fragments):
            if i in changes:
                out.extend(changes[i])
            else:
                out.append(frag)
        return CObject(tuple(out), self.min_props, self.max_props)


@dataclass(frozen=True, slots=True)
class CArray(Conj):
    items: tuple[CRef, ...] = ()
    tail: CRef = CREF_TRUE
    contains: tuple[tuple[int, CRef], ...] = ()
    min_items: int = 0
    max_items: Optional[int] = None
    unique: Optional[bool] = None


@dataclass(frozen=True)
class Dnf:
    conjs: tuple[Conj, ...]

    @property
    def is_false(self) -> bool:
        return not self.conjs


D_FALSE = Dnf(())
D_TRUE = Dnf((C_TRUE,))


def any_dd(a: Dnf, b: Dnf) -> Dnf:
    if a.is_false:
        return b
    if b.is_false:
        return a
    out = list(a.conjs)
    seen = set(a.conjs)
    for c in b.conjs:
        if c not in seen:
            seen.add(c)
            out.append(c)
    return Dnf(tuple(out))


# ---------------------------------------------------------------------------
# Rendering canonical forms back to schema terms


def conj_to_schema(c: Conj) -> Schema:
    if isinstance(c, CTypeSet):
        return s_type_set(c.types)
    if isinstance(c, CNull):
        return SType("null")
    if isinstance(c, CBoolean):
        parts: list[Schema] = [SType("boolean")]
        if c.value is not None:
            parts.append(SConst(c.value))
        return s_all_of(parts)
    if isinstance(c, CNumber):
        parts = [SType("number")]
        if c.lo is not None:
            parts.append(SMinimum(c.lo, c.lo_strict))
        if c.hi is not None:
            parts.append(SMaximum(c.hi, c.hi_strict))
        if c.factor is not None:
            parts.append(SMultipleOf(c.factor))
        for q in c.excluded:
            parts.append(SNotMultipleOf(q))
        return s_all_of(parts)
    if isinstance(c, CString):
        parts = [SType("string")]
        if c.pattern is not None:
            parts.append(SPattern(c.pattern))
        return s_all_of(parts)
    if isinstance(c, CObject):
        parts = [SType("object")]
        for frag in c.fragments:
            if not frag.ref.is_empty:
                parts.append(SPatternProps(frag.pattern, SRef(frag.ref)))
            for req in frag.reqs:
                parts.append(SPatternReq(frag.pattern, SRef(req)))
        if c.min_props > 0:
            parts.append(SMinProps(c.min_props))
        if c.max_props is not None:
            parts.append(SMaxProps(c.max_props))
        return s_all_of(parts)
    if isinstance(c, CArray):
        parts = [SType("array")]
        for i, slot in enumerate(c.items):
            if not slot.is_empty:
                parts.append(SItemAt(i, SRef(slot)))
        if not c.tail.is_empty:
            parts.append(SItemsFrom(len(c.items), SRef(c.tail)))
        for idx, ref in c.contains:
            parts.append(SContainsFrom(idx, SRef(ref)))
        if c.min_items > 0:
            parts.append(SMinItems(c.min_items))
        if c.max_items is not None:
            parts.append(SMaxItems(c.max_items))
        if c.unique is True:
            parts.append(SUniqueItems())
        if c.unique is False:
            parts.append(SRepeatedItems())
        return s_all_of(parts)
    raise AssertionError(f"unknown conjunction {c!r}")


def dnf_to_schema(d: Dnf) -> Schema:
    return s_any_of(conj_to_schema(c) for c in d.conjs)


def conj_type(c: Conj) -> Optional[str]:
    if isinstance(c, CNull):
        return "null"
    if isinstance(c, CBoolean):
        return "boolean"
    if isinstance(c, CNumber):
        return "number"
    if isinstance(c, CString):
        return "string"
    if isinstance(c, CArray):
        return "array"
    if isinstance(c, CObject):
        return "object"
    return None


def fresh_conj(type_name: str) -> Conj:
    if type_name == "null":
        return CNull()
    if type_name == "boolean":
        return CBoolean()
    if type_name == "number":
        return CNumber()
    if type_name == "string":
        return CString()
    if type_name == "array":
        return CArray()
    if type_name == "object":
        return CObject()
    raise AssertionError(f"unknown type name {type_name!r}")


# ---------------------------------------------------------------------------
# Negation, pushed one level


def not_push(s: Schema, env: Env) -> Schema:
    if isinstance(s, SBool):
        return FALSE if s.value else TRUE
    if isinstance(s, SNot):
        return s.item
    if isinstance(s, SAllOf):
        return s_any_of(s_not(i) for i in s.items)
    if isinstance(s, SAnyOf):
        return s_all_of(s_not(i) for i in s.items)
    if isinstance(s, SOneOf):
        return s_not(expand_oneof(s))
    if isinstance(s, SRef):
        if s.ref.is_empty:
            return FALSE
        return s_any_of(SRefSingle(m.negate()) for m in s.ref.sorted_members())
    if isinstance(s, SConst):
        return SNotConst(s.value)
    if isinstance(s, SNotConst):
        return SConst(s.value)
    if isinstance(s, SType):
        return s_type_set(ALL_TYPES - {s.name})
    if isinstance(s, STypeSet):
        return s_type_set(ALL_TYPES - s.names)
    if isinstance(s, SPatternProps):
        return s_all_of((SType("object"), SPatternReq(s.pattern, _negate_arg(s.schema, env))))
    if isinstance(s, SPatternReq):
        return s_all_of((SType("object"), SPatternProps(s.pattern, _negate_arg(s.schema, env))))
    if isinstance(s, SMinProps):
        if s.bound == 0:
            return FALSE
        return s_all_of((SType("object"), SMaxProps(s.bound - 1)))
    if isinstance(s, SMaxProps):
        return s_all_of((SType("object"), SMinProps(s.bound + 1)))
    if isinstance(s, SItemAt):
        return s_all_of(
            (SType("array"), SItemAt(s.index, _negate_arg(s.schema, env)), SMinItems(s.index + 1))
        )
    if isinstance(s, SItemsFrom):
        return s_all_of((SType("array"), SContainsFrom(s.index, _negate_arg(s.schema, env))))
    if isinstance(s, SContainsFrom):
        return s_all_of((SType("array"), SItemsFrom(s.index, _negate_arg(s.schema, env))))
    if isinstance(s, SMinItems):
        if s.bound == 0:
            return FALSE
        return s_all_of((SType("array"), SMaxItems(s.bound - 1)))
    if isinstance(s, SMaxItems):
        return s_all_of((SType("array"), SMinItems(s.bound + 1)))
    if isinstance(s, SUniqueItems):
        return s_all_of((SType("array"), SRepeatedItems()))
    if isinstance(s, SRepeatedItems):
        return s_all_of((SType("array"), SUniqueItems()))
    if isinstance(s, SMinimum):
        return s_all_of((SType("number"), SMaximum(s.bound, not s.exclusive)))
    if isinstance(s, SMaximum):
        return s_all_of((SType("number"), SMinimum(s.bound, not s.exclusive)))
    if isinstance(s, SMultipleOf):
        return s_all_of((SType("number"), SNotMultipleOf(s.factor)))
    if isinstance(s, SNotMultipleOf):
        return s_all_of((SType("number"), SMultipleOf(s.factor)))
    if isinstance(s, SPattern):
        return s_all_of((SType("string"), SPattern(P.p_not(s.pattern))))
    raise AssertionError(f"no negation rule for {s!r}")


def _negate_arg(s: Schema, env: Env) -> Schema:
    """Negate a structural argument, staying in singleton-reference form."""
    if isinstance(s, SRef):
        if s.ref.is_empty:
            return SRef(env.false_ref())
        if len(s.ref.members) == 1:
            return SRefSingle(next(iter(s.ref.members)).negate())
        return s_any_of(SRefSingle(m.negate()) for m in s.ref.sorted_members())
    return s_not(s)


# ---------------------------------------------------------------------------
# oneOf expansion


def expand_oneof(s: Schema) -> Schema:
    def rewrite(node: Schema) -> Schema:
        if not isinstance(node, SOneOf):
            return node
        items = node.items
        branches = []
        for i, pick in enumerate(items):
            rest = [s_not(other) for j, other in enumerate(items) if j != i]
            branches.append(s_all_of([pick, *rest]))
        return s_any_of(branches)

    return map_schema(s, rewrite)


def expand_oneof_doc(doc: Document) -> Document:
    env = doc.env
    for name in list(env.bindings):
        env.bindings[name] = expand_oneof(env.bindings[name])
    return Document(expand_oneof(doc.root), env)


# ---------------------------------------------------------------------------
# Stratification: structural arguments become singleton references


class _Stratifier:
    def __init__(self, env: Env):
        self.env = env
        self.by_body: dict[Schema, RefName] = {}
        self.counter = 0

    def name_for(self, body: Schema) -> RefName:
        hit = self.by_body.get(body)
        if hit is not None:
            return hit
        while True:
            name = RefName(f"#~s{self.counter}")
            self.counter += 1
            if name not in self.env.bindings:
                break
        self.env.bind(name, body)
        self.env.bind(name.negate(), s_not(body))
        self.by_body[body] = name
        return name

    def arg(self, s: Schema) -> Schema:
        if isinstance(s, SRef):
            return s
        body = self.walk(s)
        if isinstance(body, SRef):
            return body
        return SRefSingle(self.name_for(body))

    def walk(self, s: Schema) -> Schema:
        if isinstance(s, SPatternProps):
            return SPatternProps(s.pattern, self.arg(s.schema))
        if isinstance(s, SPatternReq):
            return SPatternReq(s.pattern, self.arg(s.schema))
        if isinstance(s, SItemAt):
            return SItemAt(s.index, self.arg(s.schema))
        if isinstance(s, SItemsFrom):
            return SItemsFrom(s.index, self.arg(s.schema))
        if isinstance(s, SContainsFrom):
            return SContainsFrom(s.index, self.arg(s.schema))
        kids = child_schemas(s)
        if kids:
            new_kids = tuple(self.walk(k) for k in kids)
            if new_kids != kids:
                return rebuild(s, new_kids)
        return s


def stratify(doc: Document) -> Document:
    st = _Stratifier(doc.env)
    for name in list(doc.env.bindings):
        doc.env.bindings[name] = st.walk(doc.env.bindings[name])
    root = st.walk(doc.root)
    return Document(root, doc.env)
