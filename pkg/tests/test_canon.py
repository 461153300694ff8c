"""Canonicalization helpers: negation pushing, oneOf expansion,
stratification, and the conjunction-to-term mapping.

The yardstick throughout is `satisfies` over a small but mixed value
universe: each rewrite must preserve (or exactly complement) the set of
accepted values.
"""

from fractions import Fraction

import pytest

from jsonsub import patterns as P
from jsonsub.canon import (
    C_TRUE,
    CArray,
    CNumber,
    CObject,
    CString,
    CTypeSet,
    conj_to_schema,
    expand_oneof,
    expand_oneof_doc,
    not_push,
    stratify,
)
from jsonsub.engine import UniverseParams, iter_universe, satisfies
from jsonsub.model import (
    Document,
    Env,
    FALSE,
    SAllOf,
    SAnyOf,
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
    SNotMultipleOf,
    SOneOf,
    SPattern,
    SPatternProps,
    SPatternReq,
    SRepeatedItems,
    SType,
    STypeSet,
    SUniqueItems,
    TRUE,
    not_complete,
    s_not,
)

UNIVERSE = list(
    iter_universe(
        UniverseParams(
            max_depth=2,
            max_width=2,
            keys=("a", "b"),
            strings=("", "a", "b", "ab"),
            numbers=(Fraction(0), Fraction(1), Fraction(1, 2), Fraction(-1)),
            max_count=500_000,
        )
    )
) + [
    # nesting beyond depth 2, hand picked to keep the sweep fast
    [[Fraction(1)]],
    [["a", Fraction(1)]],
    [{"a": Fraction(1)}],
    {"a": {"b": "a"}},
    {"a": [Fraction(1), Fraction(1)]},
    [[], {}],
    [[Fraction(1)], [Fraction(1)]],
]


NUM = SType("number")
STR = SType("string")

TERMS = [
    TRUE,
    FALSE,
    SType("object"),
    STypeSet(frozenset({"number", "null"})),
    SConst(Fraction(1)),
    SConst(True),
    SAllOf((NUM, SMinimum(Fraction(0), False))),
    SAnyOf((NUM, STR)),
    SOneOf((SMinimum(Fraction(0), False), SMaximum(Fraction(1), False))),
    SNot(NUM),
    SPatternProps(P.key("a"), NUM),
    SPatternProps(P.regex("^a"), STR),
    SPatternReq(P.key("a"), NUM),
    SPatternReq(P.regex("^[ab]$"), TRUE),
    SMinProps(1),
    SMinProps(0),
    SMaxProps(1),
    SItemAt(0, NUM),
    SItemAt(1, STR),
    SItemsFrom(0, NUM),
    SItemsFrom(1, NUM),
    SContainsFrom(0, STR),
    SContainsFrom(1, STR),
    SMinItems(1),
    SMinItems(0),
    SMaxItems(1),
    SUniqueItems(),
    SRepeatedItems(),
    SMinimum(Fraction(1, 2), True),
    SMaximum(Fraction(1, 2), False),
    SMultipleOf(Fraction(1, 2)),
    SNotMultipleOf(Fraction(1, 2)),
    SPattern(P.regex("^a")),
    SPattern(P.p_not(P.key("a"))),
]


@pytest.mark.parametrize("term", TERMS, ids=[type(t).__name__ + str(i) for i, t in enumerate(TERMS)])
def test_not_push_complements_exactly(term):
    env = Env()
    pushed = not_push(term, env)
    not_complete(env)  # negated twins for any refs the push introduced
    for v in UNIVERSE:
        assert satisfies(v, pushed, env) == (not satisfies(v, term, env)), v


def test_not_push_involution_on_double_negation():
    env = Env()
    t = SAllOf((SType("array"), SMinItems(1)))
    once = not_push(t, env)
    twice = not_push(SNot(once) if not isinstance(once, SNot) else once.item, env)
    not_complete(env)
    for v in UNIVERSE:
        assert satisfies(v, t, env) == satisfies(v, s_not(not_push(t, env)), env)


ONEOF_TERMS = [
    SOneOf((NUM, STR)),
    SOneOf((SMinimum(Fraction(0), False), SMaximum(Fraction(0), False))),
    SAllOf((SOneOf((NUM, SMinItems(1))), TRUE)),
    SNot(SOneOf((NUM, STR))),
]


@pytest.mark.parametrize("term", ONEOF_TERMS, ids=[str(i) for i in range(len(ONEOF_TERMS))])
def test_expand_oneof_preserves_semantics(term):
    env = Env()
    expanded = expand_oneof(term)
    assert not any(isinstance(s, SOneOf) for s in _walk(expanded))
    for v in UNIVERSE:
        assert satisfies(v, term, env) == satisfies(v, expanded, env), v


def _walk(s):
    from jsonsub.model import child_schemas

    yield s
    for c in child_schemas(s):
        yield from _walk(c)


def test_stratify_preserves_semantics_and_names_args():
    env = Env()
    root = SAllOf(
        (
            SPatternProps(P.key("a"), SAnyOf((NUM, STR))),
            SItemAt(0, SAllOf((NUM, SMinimum(Fraction(0), False)))),
            SContainsFrom(0, SNot(NUM)),
        )
    )
    doc = Document(root, env)
    before = [satisfies(v, root, env) for v in UNIVERSE]
    out = stratify(doc)
    from jsonsub.model import SRef, STRUCTURAL

    for s in _walk(out.root):
        if isinstance(s, STRUCTURAL):
            assert isinstance(s.schema, SRef), s
    after = [satisfies(v, out.root, out.env) for v in UNIVERSE]
    assert before == after


def test_stratify_shares_identical_bodies():
    env = Env()
    root = SAllOf(
        (
            SPatternProps(P.key("a"), NUM),
            SPatternProps(P.key("b"), NUM),
        )
    )
    out = stratify(Document(root, env))
    refs = [s.schema.ref for s in _walk(out.root) if isinstance(s, SPatternProps)]
    assert refs[0] == refs[1]


def test_expand_oneof_doc_rewrites_bindings():
    from jsonsub.model import RefName, SRefSingle

    env = Env()
    x = RefName("#/x", False)
    env.bind(x, SOneOf((NUM, STR)))
    doc = expand_oneof_doc(Document(SRefSingle(x), env))
    assert not any(isinstance(s, SOneOf) for s in _walk(doc.env.body(x)))
    for v in UNIVERSE:
        assert satisfies(v, doc.root, doc.env) == (
            isinstance(v, str) or (not isinstance(v, bool) and isinstance(v, (int, Fraction)))
        )


FRESH_CONJS = [
    C_TRUE,
    CTypeSet(frozenset({"string", "null"})),
    CNumber(lo=Fraction(0), hi=Fraction(1), hi_strict=True),
    CNumber(factor=Fraction(1, 2), excluded=(Fraction(2),)),
    CString(pattern=P.regex("^a")),
]


@pytest.mark.parametrize("conj", FRESH_CONJS, ids=[str(i) for i in range(len(FRESH_CONJS))])
def test_conj_to_schema_round_trips_semantics(conj):
    env = Env()
    term = conj_to_schema(conj)
    for v in UNIVERSE:
        assert satisfies(v, term, env) == _conj_holds(conj, v), (conj, v)


def _conj_holds(conj, v):
    from jsonsub.values import json_type, is_number

    if isinstance(conj, CTypeSet):
        allowed = conj.types
    elif isinstance(conj, CNumber):
        allowed = {"number"}
    else:
        allowed = {"string"}
    if json_type(v) not in allowed:
        return False
    if isinstance(conj, CNumber) and is_number(v):
        q = Fraction(v)
        if conj.lo is not None and (q < conj.lo or (q == conj.lo and conj.lo_strict)):
            return False
        if conj.hi is not None and (q > conj.hi or (q == conj.hi and conj.hi_strict)):
            return False
        if conj.factor is not None and (q / conj.factor).denominator != 1:
            return False
        if any((q / ex).denominator == 1 for ex in conj.excluded):
            return False
    if isinstance(conj, CString) and isinstance(v, str):
        if conj.pattern is not None and not P.p_matches(conj.pattern, v):
            return False
    return True
