"""Draft-06 translation to schema terms and back.

The supported keyword subset is translated exactly; anything outside it
fails loudly with UnsupportedKeyword instead of being skipped. Only
document-local $ref targets are resolved. Annotation keywords carry no
constraints and are ignored; $ref siblings are ignored as Draft-06
prescribes. integer becomes number restricted to a whole-number factor.

Serialization emits plain Draft-06 again. Operators without a direct
keyword are encoded through small anyOf/not combinations; property-name
patterns that are not a literal key or an original regex are rendered by
extracting an anchored regex from their automaton.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from . import patterns as P
from .errors import MalformedSchema, UnresolvableRef, UnsupportedKeyword
from .model import (
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
    s_all_of,
    s_any_of,
    s_not,
    s_type_set,
)
from .values import TYPE_NAMES, is_number

SUPPORTED_KEYWORDS = {
    "type",
    "enum",
    "const",
    "properties",
    "patternProperties",
    "additionalProperties",
    "required",
    "minProperties",
    "maxProperties",
    "items",
    "additionalItems",
    "contains",
    "minItems",
    "maxItems",
    "uniqueItems",
    "minimum",
    "exclusiveMinimum",
    "maximum",
    "exclusiveMaximum",
    "multipleOf",
    "pattern",
    "minLength",
    "maxLength",
    "allOf",
    "anyOf",
    "oneOf",
    "not",
    "$ref",
    "definitions",
}

ANNOTATION_KEYWORDS = {"title", "description", "default", "examples", "$schema", "$comment"}

_INTEGER = s_all_of((SType("number"), SMultipleOf(Fraction(1))))


def parse_schema(node: Any, uri_prefix: str = "") -> Document:
    """Translate a parsed Draft-06 JSON value into a schema document."""
    parser = _Parser(node, uri_prefix)
    root = parser.schema(node)
    return Document(root, parser.env)


class _Parser:
    def __init__(self, root_node: Any, uri_prefix: str):
        self.root_node = root_node
        self.uri_prefix = uri_prefix
        self.env = Env()
        self.started: set[str] = set()

    # -- reference handling

    def ref_target(self, ref: str) -> RefName:
        if not isinstance(ref, str) or not ref.startswith("#"):
            raise UnresolvableRef(f"only document-local references are supported: {ref!r}")
        pointer = ref[1:]
        uri = self.uri_prefix + "#" + pointer
        name = RefName(uri)
        if uri not in self.started:
            self.started.add(uri)
            target = self.resolve_pointer(pointer, ref)
            self.env.bind(name, self.schema(target))
        return name

    def resolve_pointer(self, pointer: str, original: str) -> Any:
        node = self.root_node
        if pointer == "":
            return node
        if not pointer.startswith("/"):
            raise UnresolvableRef(f"unsupported reference form: {original!r}")
        for raw in pointer[1:].split("/"):
            token = raw.replace("~1", "/").replace("~0", "~")
            if isinstance(node, dict):
                if token not in node:
                    raise UnresolvableRef(f"reference target not found: {original!r}")
                node = node[token]
            elif isinstance(node, list):
                if not token.isdigit() or int(token) >= len(node):
                    raise UnresolvableRef(f"reference target not found: {original!r}")
                node = node[int(token)]
            else:
                raise UnresolvableRef(f"reference target not found: {original!r}")
        return node

    # -- translation

    def schema(self, node: Any) -> Schema:
        if node is True:
            return TRUE
        if node is False:
            return FALSE
        if not isinstance(node, dict):
            raise MalformedSchema(f"schema must be an object or boolean, got {node!r}")
        if "$ref" in node:
            # Draft-06: all other keywords beside $ref are ignored
            return SRefSingle(self.ref_target(node["$ref"]))

        for kw in node:
            if kw not in SUPPORTED_KEYWORDS and kw not in ANNOTATION_KEYWORDS:
                raise UnsupportedKeyword(kw)

        conj: list[Schema] = []
        self._types(node, conj)
        self._consts(node, conj)
        self._objects(node, conj)
        self._arrays(node, conj)
        self._numbers(node, conj)
        self._strings(node, conj)
        self._combinators(node, conj)
        return s_all_of(conj)

    def _types(self, node: dict, conj: list[Schema]) -> None:
        if "type" not in node:
            return
        spec = node["type"]
        names = [spec] if isinstance(spec, str) else spec
        if not isinstance(names, list) or not names:
            raise MalformedSchema(f"bad type value: {spec!r}")
        plain: set[str] = set()
        integer = False
        for name in names:
            if name == "integer":
                integer = True
            elif name in TYPE_NAMES:
                plain.add(name)
            else:
                raise MalformedSchema(f"unknown type name: {name!r}")
        if integer and "number" not in plain:
            parts: list[Schema] = [_INTEGER]
            if plain:
                parts.append(s_type_set(plain))
            conj.append(s_any_of(parts))
        else:
            conj.append(s_type_set(plain))

    def _consts(self, node: dict, conj: list[Schema]) -> None:
        if "const" in node:
            conj.append(self.const_atom(node["const"], "const"))
        if "enum" in node:
            members = node["enum"]
            if not isinstance(members, list) or not members:
                raise MalformedSchema(f"enum must be a non-empty array: {members!r}")
            conj.append(s_any_of(self.const_atom(m, "enum") for m in members))

    def const_atom(self, value: Any, keyword: str) -> Schema:
        if value is None:
            return SType("null")
        if isinstance(value, bool):
            return SConst(value)
        if is_number(value):
            return SConst(Fraction(value))
        if isinstance(value, str):
            return s_all_of((SType("string"), SPattern(P.key(value))))
        raise UnsupportedKeyword(keyword, f"{keyword} member of array or object type")

    def _objects(self, node: dict, conj: list[Schema]) -> None:
        prop_pats: list[P.PatternExpr] = []
        if "properties" in node:
            props = _expect_object(node["properties"], "properties")
            for name in sorted(props):
                pat = P.key(name)
                prop_pats.append(pat)
                conj.append(SPatternProps(pat, self.schema(props[name])))
        if "patternProperties" in node:
            pats = _expect_object(node["patternProperties"], "patternProperties")
            for src in sorted(pats):
                pat = P.regex(src)
                prop_pats.append(pat)
                conj.append(SPatternProps(pat, self.schema(pats[src])))
        if "additionalProperties" in node:
            residual = P.p_not(P.p_or(*prop_pats)) if prop_pats else P.TOP
            sub = self.schema(node["additionalProperties"])
            if sub != TRUE:
                conj.append(SPatternProps(residual, sub))
        if "required" in node:
            names = node["required"]
            if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
                raise MalformedSchema(f"required must be an array of strings: {names!r}")
            for name in names:
                conj.append(SPatternReq(P.key(name), TRUE))
        if "minProperties" in node:
            conj.append(SMinProps(_expect_count(node["minProperties"], "minProperties")))
        if "maxProperties" in node:
            conj.append(SMaxProps(_expect_count(node["maxProperties"], "maxProperties")))

    def _arrays(self, node: dict, conj: list[Schema]) -> None:
        if "items" in node:
            items = node["items"]
            if isinstance(items, list):
                for i, sub in enumerate(items):
                    conj.append(SItemAt(i, self.schema(sub)))
                if "additionalItems" in node:
                    sub = self.schema(node["additionalItems"])
                    if sub != TRUE:
                        conj.append(SItemsFrom(len(items), sub))
            else:
                sub = self.schema(items)
                if sub != TRUE:
                    conj.append(SItemsFrom(0, sub))
        if "contains" in node:
            conj.append(SContainsFrom(0, self.schema(node["contains"])))
        if "minItems" in node:
            conj.append(SMinItems(_expect_count(node["minItems"], "minItems")))
        if "maxItems" in node:
            conj.append(SMaxItems(_expect_count(node["maxItems"], "maxItems")))
        if "uniqueItems" in node:
            flag = node["uniqueItems"]
            if not isinstance(flag, bool):
                raise MalformedSchema(f"uniqueItems must be boolean: {flag!r}")
            if flag:
                conj.append(SUniqueItems())

    def _numbers(self, node: dict, conj: list[Schema]) -> None:
        for kw, exclusive, ctor in (
            ("minimum", False, SMinimum),
            ("exclusiveMinimum", True, SMinimum),
            ("maximum", False, SMaximum),
            ("exclusiveMaximum", True, SMaximum),
        ):
            if kw in node:
                value = node[kw]
                if isinstance(value, bool):
                    raise MalformedSchema(
                        f"{kw} must be a number in Draft-06 (boolean form is Draft-04)"
                    )
                if not is_number(value):
                    raise MalformedSchema(f"{kw} must be a number: {value!r}")
                conj.append(ctor(Fraction(value), exclusive))
        if "multipleOf" in node:
            value = node["multipleOf"]
            if isinstance(value, bool) or not is_number(value) or Fraction(value) <= 0:
                raise MalformedSchema(f"multipleOf must be a positive number: {value!r}")
            conj.append(SMultipleOf(Fraction(value)))

    def _strings(self, node: dict, conj: list[Schema]) -> None:
        if "pattern" in node:
            conj.append(SPattern(P.regex(node["pattern"])))
        if "minLength" in node:
            conj.append(SPattern(P.min_len(_expect_count(node["minLength"], "minLength"))))
        if "maxLength" in node:
            conj.append(SPattern(P.max_len(_expect_count(node["maxLength"], "maxLength"))))

    def _combinators(self, node: dict, conj: list[Schema]) -> None:
        for kw, build in (("allOf", s_all_of), ("anyOf", s_any_of), ("oneOf", None)):
            if kw in node:
                subs = node[kw]
                if not isinstance(subs, list) or not subs:
                    raise MalformedSchema(f"{kw} must be a non-empty array")
                parts = [self.schema(s) for s in subs]
                conj.append(SOneOf(tuple(parts)) if build is None else build(parts))
        if "not" in node:
            conj.append(s_not(self.schema(node["not"])))


def _expect_object(node: Any, keyword: str) -> dict:
    if not isinstance(node, dict):
        raise MalformedSchema(f"{keyword} must be an object: {node!r}")
    return node


def _expect_count(node: Any, keyword: str) -> int:
    if isinstance(node, bool) or not is_number(node):
        raise MalformedSchema(f"{keyword} must be a non-negative integer: {node!r}")
    q = Fraction(node)
    if q.denominator != 1 or q < 0:
        raise MalformedSchema(f"{keyword} must be a non-negative integer: {node!r}")
    return int(q)


# ---------------------------------------------------------------------------
# Size accounting (used to keep translation linear)


def json_node_count(node: Any) -> int:
    if isinstance(node, list):
        return 1 + sum(json_node_count(x) for x in node)
    if isinstance(node, dict):
        return 1 + sum(json_node_count(x) for x in node.values())
    return 1


def term_node_count(doc: Document) -> int:
    seen: set[int] = set()

    def count(s: Schema) -> int:
        if id(s) in seen:
            return 0
        seen.add(id(s))
        total = 1
        for kid in child_schemas(s):
            total += count(kid)
        return total

    total = count(doc.root)
    for name, body in doc.env.bindings.items():
        if not name.negated:
            total += count(body)
    return total


# ---------------------------------------------------------------------------
# Serialization


def serialize(doc: Document) -> Any:
    """Render a document back to a plain Draft-06 JSON value."""
    ser = _Serializer(doc.env)
    body = ser.schema(doc.root)
    if ser.slots:
        defs = {}
        for uri, slot in sorted(ser.slots.items(), key=lambda kv: kv[1]):
            defs[slot] = ser.body_for(uri)
        if body is True:
            body = {"definitions": defs}
        elif body is False:
            body = {"definitions": defs, "not": True}
        elif isinstance(body, dict):
            body = dict(body)
            body["definitions"] = defs
        return body
    return body


class _Serializer:
    def __init__(self, env: Env):
        self.env = env
        self.slots: dict[str, str] = {}
        self.emitted: dict[str, Any] = {}

    def slot_for(self, uri: str) -> str:
        if uri not in self.slots:
            self.slots[uri] = f"r{len(self.slots)}"
            self.emitted[uri] = None  # reserve; filled by body_for
            body = self.env.bindings.get(RefName(uri))
            if body is None:
                body = s_not(self.env.body(RefName(uri, True)))
            self.emitted[uri] = self.schema(body)
        return self.slots[uri]

    def body_for(self, uri: str) -> Any:
        return self.emitted[uri]

    def ref_schema(self, name: RefName) -> Any:
        slot = self.slot_for(name.uri)
        target = {"$ref": f"#/definitions/{slot}"}
        if name.negated:
            return {"not": target}
        return target

    def schema(self, s: Schema) -> Any:
        if isinstance(s, SBool):
            return s.value
        if isinstance(s, SRef):
            if s.ref.is_empty:
                return True
            parts = [self.ref_schema(m) for m in s.ref.sorted_members()]
            if len(parts) == 1:
                return parts[0]
            return {"allOf": parts}
        if isinstance(s, SAllOf):
            return {"allOf": [self.schema(i) for i in s.items]}
        if isinstance(s, SAnyOf):
            return {"anyOf": [self.schema(i) for i in s.items]}
        if isinstance(s, SOneOf):
            if not s.items:
                return False
            return {"oneOf": [self.schema(i) for i in s.items]}
        if isinstance(s, SNot):
            return {"not": self.schema(s.item)}
        if isinstance(s, SType):
            return {"type": s.name}
        if isinstance(s, STypeSet):
            return {"type": sorted(s.names)}
        if isinstance(s, SConst):
            return {"const": s.value}
        if isinstance(s, SNotConst):
            return {"not": {"const": s.value}}
        if isinstance(s, SPatternProps):
            return self.pattern_props(s)
        if isinstance(s, SPatternReq):
            return self.pattern_req(s)
        if isinstance(s, SMinProps):
            return {"minProperties": s.bound}
        if isinstance(s, SMaxProps):
            return {"maxProperties": s.bound}
        if isinstance(s, SItemAt):
            return {"items": [True] * s.index + [self.schema(s.schema)]}
        if isinstance(s, SItemsFrom):
            if s.index == 0:
                return {"items": self.schema(s.schema)}
            return {"items": [True] * s.index, "additionalItems": self.schema(s.schema)}
        if isinstance(s, SContainsFrom):
            if s.index == 0:
                return {"contains": self.schema(s.schema)}
            # some element at or past the index: not (array of at most index
            # leading elements with everything past it failing the schema)
            inner = {
                "items": [True] * s.index,
                "additionalItems": {"not": self.schema(s.schema)},
            }
            return {"anyOf": [{"not": {"type": "array"}}, {"not": inner}]}
        if isinstance(s, SMinItems):
            return {"minItems": s.bound}
        if isinstance(s, SMaxItems):
            return {"maxItems": s.bound}
        if isinstance(s, SUniqueItems):
            return {"uniqueItems": True}
        if isinstance(s, SRepeatedItems):
            # vacuous off type, so the not-wrapper needs the type escape
            return {"anyOf": [{"not": {"type": "array"}}, {"not": {"uniqueItems": True}}]}
        if isinstance(s, SMinimum):
            return {"exclusiveMinimum" if s.exclusive else "minimum": s.bound}
        if isinstance(s, SMaximum):
            return {"exclusiveMaximum" if s.exclusive else "maximum": s.bound}
        if isinstance(s, SMultipleOf):
            return {"multipleOf": s.factor}
        if isinstance(s, SNotMultipleOf):
            return {"anyOf": [{"not": {"type": "number"}}, {"not": {"multipleOf": s.factor}}]}
        if isinstance(s, SPattern):
            return self.string_pattern(s.pattern)
        raise AssertionError(f"cannot serialize {s!r}")

    def pattern_props(self, s: SPatternProps) -> Any:
        if P.p_is_empty(s.pattern):
            return True
        lit = P.key_literal(s.pattern)
        if lit is not None:
            return {"properties": {lit: self.schema(s.schema)}}
        src = s.pattern.source if isinstance(s.pattern, P.PRegex) else P.regex_source(s.pattern)
        return {"patternProperties": {src: self.schema(s.schema)}}

    def pattern_req(self, s: SPatternReq) -> Any:
        if P.p_is_empty(s.pattern):
            return {"not": {"type": "object"}}
        lit = P.key_literal(s.pattern)
        if lit is not None:
            body = {"required": [lit]}
            sub = self.schema(s.schema)
            if sub is not True:
                body["properties"] = {lit: sub}
            return body
        src = s.pattern.source if isinstance(s.pattern, P.PRegex) else P.regex_source(s.pattern)
        inner = {"patternProperties": {src: {"not": self.schema(s.schema)}}}
        return {"anyOf": [{"not": {"type": "object"}}, {"not": inner}]}

    def string_pattern(self, e: P.PatternExpr) -> Any:
        if isinstance(e, P.PRegex):
            return {"pattern": e.source}
        if isinstance(e, P.PKey):
            return {"pattern": P.anchored_key_source(e.literal)}
        if isinstance(e, P.PMinLen):
            return {"minLength": e.bound}
        if isinstance(e, P.PMaxLen):
            return {"maxLength": e.bound}
        if isinstance(e, P.PAll):
            return {"allOf": [self.string_pattern(i) for i in e.items]}
        if isinstance(e, P.PAny):
            return {"anyOf": [self.string_pattern(i) for i in e.items]}
        if isinstance(e, P.PNot):
            inner = self.string_pattern(e.item)
            return {"anyOf": [{"not": {"type": "string"}}, {"not": inner}]}
        raise AssertionError(f"cannot serialize pattern {e!r}")
