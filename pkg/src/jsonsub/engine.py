"""Inclusion and equivalence checks for Draft-06 schema documents.

The has-a-counterexample question "is every instance of the left schema
also an instance of the right one" is answered in two phases.  First the
conjunction of the left schema with the negated right schema is driven
through the lazy DNF normalizer; an empty DNF is already a proof of
inclusion.  Whatever survives is handed to the witness generator, which
either produces a concrete counterexample or certifies, by fixpoint, that
none exists.  Every counterexample is re-checked against the original
terms with the plain semantic evaluator before it is reported.

The module also hosts that evaluator (`satisfies`) and a brute-force
oracle (`oracle_included`) that enumerates a bounded value universe in a
deterministic size-ascending order.  The oracle shares nothing with the
normalizer beyond the term types, which is what makes it useful as an
independent cross-check in tests.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Iterator, Optional

from . import patterns as P
from .canon import expand_oneof_doc, stratify
from .compat import parse_schema
from .errors import MalformedSchema, UniverseTooLarge
from .model import (
    Document,
    Env,
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
    SRepeatedItems,
    SType,
    STypeSet,
    SUniqueItems,
    Schema,
    child_schemas,
    not_complete,
    s_all_of,
    s_not,
    well_formed,
)
from .norm import DEFAULT_MAX_STEPS, DEFAULT_TIMEOUT, NormContext, Stats, dnf_of, prepare
from .values import canonical_key, is_number, json_equal, json_type
from .witness import UNSAT, generate

__all__ = [
    "InclusionResult",
    "EquivalenceResult",
    "OracleOutcome",
    "UniverseParams",
    "check_equivalence",
    "check_equivalence_terms",
    "check_inclusion",
    "check_inclusion_terms",
    "derive_universe",
    "iter_universe",
    "load_document",
    "oracle_included",
    "satisfies",
    "satisfies_value",
]


def load_document(node: Any, uri_prefix: str = "") -> Document:
    """Parse a raw schema value and insist on well-formedness."""
    doc = parse_schema(node, uri_prefix)
    problems = well_formed(doc)
    if problems:
        raise MalformedSchema("; ".join(problems))
    return doc


# ---------------------------------------------------------------------------
# semantic evaluator


def satisfies(value: Any, schema: Schema, env: Env) -> bool:
    """Decide whether a JSON value is an instance of a schema term.

    Pure: neither the environment nor the value is touched.  Operators
    that inspect a single type are vacuously true on values of any other
    type, mirroring the draft keywords they came from.  Recursion through
    references terminates because every reference cycle is guarded by a
    structural operator, which steps into a strictly smaller value.
    """
    return _SAT[type(schema)](value, schema, env)


def satisfies_value(value: Any, schema_node: Any) -> bool:
    doc = load_document(schema_node)
    return satisfies(value, doc.root, doc.env)


def _sat_bool(j, s, env):
    return s.value


def _sat_type(j, s, env):
    return json_type(j) == s.name


def _sat_type_set(j, s, env):
    return json_type(j) in s.names


def _sat_const(j, s, env):
    return json_equal(j, s.value)


def _sat_not_const(j, s, env):
    return not json_equal(j, s.value)


def _sat_ref(j, s, env):
    return all(satisfies(j, env.body(name), env) for name in s.ref.sorted_members())


def _sat_all_of(j, s, env):
    return all(satisfies(j, item, env) for item in s.items)


def _sat_any_of(j, s, env):
    return any(satisfies(j, item, env) for item in s.items)


def _sat_one_of(j, s, env):
    return sum(1 for item in s.items if satisfies(j, item, env)) == 1


def _sat_not(j, s, env):
    return not satisfies(j, s.item, env)


def _sat_pattern_props(j, s, env):
    if not isinstance(j, dict):
        return True
    return all(
        satisfies(v, s.schema, env)
        for k, v in j.items()
        if P.p_matches(s.pattern, k)
    )


def _sat_pattern_req(j, s, env):
    if not isinstance(j, dict):
        return True
    return any(
        P.p_matches(s.pattern, k) and satisfies(v, s.schema, env)
        for k, v in j.items()
    )


def _sat_min_props(j, s, env):
    return not isinstance(j, dict) or len(j) >= s.bound


def _sat_max_props(j, s, env):
    return not isinstance(j, dict) or len(j) <= s.bound


def _sat_item_at(j, s, env):
    if not isinstance(j, list) or s.index >= len(j):
        return True
    return satisfies(j[s.index], s.schema, env)


def _sat_items_from(j, s, env):
    if not isinstance(j, list):
        return True
    return all(satisfies(v, s.schema, env) for v in j[s.index:])


def _sat_contains_from(j, s, env):
    if not isinstance(j, list):
        return True
    return any(satisfies(v, s.schema, env) for v in j[s.index:])


def _sat_min_items(j, s, env):
    return not isinstance(j, list) or len(j) >= s.bound


def _sat_max_items(j, s, env):
    return not isinstance(j, list) or len(j) <= s.bound


def _sat_unique(j, s, env):
    if not isinstance(j, list):
        return True
    seen = set()
    for v in j:
        k = canonical_key(v)
        if k in seen:
            return False
        seen.add(k)
    return True


def _sat_repeated(j, s, env):
    if not isinstance(j, list):
        return True
    return not _sat_unique(j, s, env)


def _sat_minimum(j, s, env):
    if not is_number(j):
        return True
    return j > s.bound if s.exclusive else j >= s.bound


def _sat_maximum(j, s, env):
    if not is_number(j):
        return True
    return j < s.bound if s.exclusive else j <= s.bound


def _sat_multiple_of(j, s, env):
    if not is_number(j):
        return True
    return (Fraction(j) / s.factor).denominator == 1


def _sat_not_multiple_of(j, s, env):
    if not is_number(j):
        return True
    return (Fraction(j) / s.factor).denominator != 1


def _sat_pattern(j, s, env):
    if not isinstance(j, str):
        return True
    return P.p_matches(s.pattern, j)


_SAT = {
    SBool: _sat_bool,
    SType: _sat_type,
    STypeSet: _sat_type_set,
    SConst: _sat_const,
    SNotConst: _sat_not_const,
    SRef: _sat_ref,
    SAllOf: _sat_all_of,
    SAnyOf: _sat_any_of,
    SOneOf: _sat_one_of,
    SNot: _sat_not,
    SPatternProps: _sat_pattern_props,
    SPatternReq: _sat_pattern_req,
    SMinProps: _sat_min_props,
    SMaxProps: _sat_max_props,
    SItemAt: _sat_item_at,
    SItemsFrom: _sat_items_from,
    SContainsFrom: _sat_contains_from,
    SMinItems: _sat_min_items,
    SMaxItems: _sat_max_items,
    SUniqueItems: _sat_unique,
    SRepeatedItems: _sat_repeated,
    SMinimum: _sat_minimum,
    SMaximum: _sat_maximum,
    SMultipleOf: _sat_multiple_of,
    SNotMultipleOf: _sat_not_multiple_of,
    SPattern: _sat_pattern,
}


# ---------------------------------------------------------------------------
# inclusion / equivalence


@dataclass
class InclusionResult:
    included: bool
    witness: Any
    stats: Stats

    @property
    def verdict(self) -> str:
        return "included" if self.included else "not_included"


@dataclass
class EquivalenceResult:
    relation: str  # equivalent | left_not_in_right | right_not_in_left | incomparable
    forward: InclusionResult
    backward: InclusionResult


def check_inclusion_terms(
    s1: Schema,
    s2: Schema,
    env: Env,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
    timeout: float = DEFAULT_TIMEOUT,
) -> InclusionResult:
    """Decide s1 <: s2 against a shared environment.

    The caller's environment is never mutated; the refutation pipeline
    works on a copy.  A returned witness has already been validated: it
    satisfies s1 and violates s2 under `satisfies`.
    """
    work = env.copy()
    doc = Document(s_all_of((s1, s_not(s2))), work)
    problems = well_formed(doc)
    if problems:
        raise MalformedSchema("; ".join(problems))

    doc = expand_oneof_doc(doc)
    doc = stratify(doc)
    not_complete(doc.env)

    ctx = NormContext(doc.env, max_steps=max_steps, timeout=timeout)
    start = time.monotonic()
    try:
        root = dnf_of(doc.root, ctx)
        if root.is_false:
            return InclusionResult(True, None, ctx.stats)
        prepare(root, ctx)
        ctx.stats.generation_invoked = True
        got = generate(root, ctx)
    finally:
        ctx.stats.elapsed = time.monotonic() - start

    if got is UNSAT:
        return InclusionResult(True, None, ctx.stats)
    if not satisfies(got, s1, env) or satisfies(got, s2, env):
        raise AssertionError(
            "internal error: generated witness failed semantic cross-check"
        )
    return InclusionResult(False, got, ctx.stats)


def check_inclusion(
    left: Any,
    right: Any,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
    timeout: float = DEFAULT_TIMEOUT,
) -> InclusionResult:
    """Decide inclusion between two raw Draft-06 schema values."""
    ldoc = load_document(left, "left")
    rdoc = load_document(right, "right")
    env = Env()
    env.bindings.update(ldoc.env.bindings)
    env.bindings.update(rdoc.env.bindings)
    return check_inclusion_terms(
        ldoc.root, rdoc.root, env, max_steps=max_steps, timeout=timeout
    )


def _relation(fwd: InclusionResult, bwd: InclusionResult) -> str:
    if fwd.included and bwd.included:
        return "equivalent"
    if fwd.included:
        return "right_not_in_left"
    if bwd.included:
        return "left_not_in_right"
    return "incomparable"


def check_equivalence_terms(
    s1: Schema,
    s2: Schema,
    env: Env,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
    timeout: float = DEFAULT_TIMEOUT,
) -> EquivalenceResult:
    fwd = check_inclusion_terms(s1, s2, env, max_steps=max_steps, timeout=timeout)
    bwd = check_inclusion_terms(s2, s1, env, max_steps=max_steps, timeout=timeout)
    return EquivalenceResult(_relation(fwd, bwd), fwd, bwd)


def check_equivalence(
    left: Any,
    right: Any,
    *,
    max_steps: int = DEFAULT_MAX_STEPS,
    timeout: float = DEFAULT_TIMEOUT,
) -> EquivalenceResult:
    ldoc = load_document(left, "left")
    rdoc = load_document(right, "right")
    env = Env()
    env.bindings.update(ldoc.env.bindings)
    env.bindings.update(rdoc.env.bindings)
    return check_equivalence_terms(
        ldoc.root, rdoc.root, env, max_steps=max_steps, timeout=timeout
    )


# ---------------------------------------------------------------------------
# bounded brute-force oracle


@dataclass(frozen=True)
class UniverseParams:
    """Bounds for the enumerated value universe.

    `max_depth` counts nesting levels (a scalar is 1, a flat container 2).
    `max_count` caps the enumeration; exceeding it raises UniverseTooLarge
    since an inclusion verdict over a truncated universe would be
    meaningless.
    """

    max_depth: int = 2
    max_width: int = 2
    keys: tuple[str, ...] = ("a", "b")
    strings: tuple[str, ...] = ("", "a", "b")
    numbers: tuple[Fraction, ...] = (Fraction(0), Fraction(1))
    max_count: int = 200_000


@dataclass(frozen=True)
class OracleOutcome:
    counterexample_found: bool
    value: Any = None


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    # ordered tuples of positive ints summing to total
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for head in range(1, total - parts + 2):
        for rest in _compositions(total - head, parts - 1):
            yield (head, *rest)


def iter_universe(params: UniverseParams) -> Iterator[Any]:
    """Every value within the bounds, smallest first, deterministically.

    Order within one size class: null, false, true, numbers ascending,
    strings in parameter order, then arrays, then objects.  Sizes follow
    `values.value_size` (containers cost 1 plus their children).
    """
    numbers = sorted({Fraction(q) for q in params.numbers})
    strings = list(dict.fromkeys(params.strings))
    keys = sorted(set(params.keys))
    width = params.max_width

    emitted = 0

    def emit(v: Any) -> Any:
        nonlocal emitted
        emitted += 1
        if emitted > params.max_count:
            raise UniverseTooLarge(
                f"universe exceeds the {params.max_count}-value cap"
            )
        return v

    scalars: list[Any] = [None, False, True, *numbers, *strings]
    # empty containers carry no children, so they sit in the size-1 class
    level_one: list[tuple[Any, int]] = [(v, 1) for v in scalars]
    level_one.append(([], 1))
    level_one.append(({}, 1))
    for v, _ in level_one:
        yield emit(v)

    if params.max_depth < 2:
        return

    # geometric bound on the size of any value within depth/width limits
    max_size = sum(width**d for d in range(params.max_depth))
    buckets: dict[int, list[tuple[Any, int]]] = {1: level_one}

    for size in range(2, max_size + 1):
        bucket: list[tuple[Any, int]] = []
        for k in range(1, width + 1):
            for comp in _compositions(size - 1, k):
                pools = [buckets.get(c, []) for c in comp]
                for combo in itertools.product(*pools):
                    depth = 1 + max(d for _, d in combo)
                    if depth <= params.max_depth:
                        bucket.append(([v for v, _ in combo], depth))
        for k in range(1, min(width, len(keys)) + 1):
            for key_sel in itertools.combinations(keys, k):
                for comp in _compositions(size - 1, k):
                    pools = [buckets.get(c, []) for c in comp]
                    for combo in itertools.product(*pools):
                        depth = 1 + max(d for _, d in combo)
                        if depth <= params.max_depth:
                            obj = dict(zip(key_sel, (v for v, _ in combo)))
                            bucket.append((obj, depth))
        buckets[size] = bucket
        for v, _ in bucket:
            yield emit(v)


def oracle_included(
    s1: Schema, s2: Schema, env: Env, universe: UniverseParams
) -> OracleOutcome:
    """Search the bounded universe for an instance of s1 that violates s2."""
    for j in iter_universe(universe):
        if satisfies(j, s1, env) and not satisfies(j, s2, env):
            return OracleOutcome(True, j)
    return OracleOutcome(False)


# ---------------------------------------------------------------------------
# universe derivation


def _reachable_terms(roots: Iterable[Schema], env: Env) -> Iterator[Schema]:
    seen_names = set()
    stack = list(roots)
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, SRef):
            for name in s.ref.sorted_members():
                if name not in seen_names and name in env.bindings:
                    seen_names.add(name)
                    stack.append(env.body(name))
        stack.extend(child_schemas(s))


def _probe_strings(pats: list) -> list[str]:
    """Example strings that separate the patterns in play.

    One witness per pattern, one per pairwise intersection and per
    pairwise difference, the empty string, and one string matching no
    pattern at all.
    """
    probes: dict[str, None] = {"": None}

    def note(e) -> None:
        got = P.p_example(e)
        if got is not None:
            probes[got] = None

    for e in pats:
        note(e)
    for e1, e2 in itertools.combinations(pats, 2):
        note(P.p_and(e1, e2))
        note(P.p_diff(e1, e2))
        note(P.p_diff(e2, e1))
    if pats:
        note(P.p_not(P.p_or(*pats)))
    return list(probes)


def derive_universe(
    roots: Iterable[Schema],
    env: Env,
    *,
    max_depth: int = 2,
    max_width: int = 2,
    max_count: int = 200_000,
    extra_keys: Iterable[str] = (),
    extra_strings: Iterable[str] = (),
    extra_numbers: Iterable[Fraction] = (),
) -> UniverseParams:
    """Build universe bounds from the constants a set of terms mentions.

    String probes follow the separation recipe of `_probe_strings`, run
    separately for value-position and field-name-position patterns.
    Numeric probes bracket every bound and scale every factor so that
    interval endpoints and divisibility classes are all represented.
    """
    name_pats: list = []
    string_pats: list = []
    numbers: set[Fraction] = {Fraction(0), Fraction(1)}

    for s in _reachable_terms(roots, env):
        if isinstance(s, (SPatternProps, SPatternReq)):
            name_pats.append(s.pattern)
        elif isinstance(s, SPattern):
            string_pats.append(s.pattern)
        elif isinstance(s, (SMinimum, SMaximum)):
            numbers.update((s.bound, s.bound - 1, s.bound + 1))
        elif isinstance(s, (SMultipleOf, SNotMultipleOf)):
            numbers.update((s.factor, 2 * s.factor, 3 * s.factor, s.factor / 2))
        elif isinstance(s, (SConst, SNotConst)) and is_number(s.value):
            numbers.update((s.value, s.value + 1))

    strings = _probe_strings(string_pats)
    for extra in extra_strings:
        if extra not in strings:
            strings.append(extra)

    keys = _probe_strings(name_pats) if name_pats else []
    key_set = dict.fromkeys(k for k in keys if k)
    for extra in extra_keys:
        key_set.setdefault(extra)
    if not key_set:
        key_set = dict.fromkeys(("a", "b"))
    numbers.update(Fraction(q) for q in extra_numbers)

    return UniverseParams(
        max_depth=max_depth,
        max_width=max_width,
        keys=tuple(key_set),
        strings=tuple(strings),
        numbers=tuple(sorted(numbers)),
        max_count=max_count,
    )
