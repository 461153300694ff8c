"""Normalization of schema conjunctions into canonical disjunctions.

The entry point folds a schema term into a disjunction of canonical
conjunctions, working lazily: a conjunction of terms is refuted as soon
as any prefix of the fold collapses to the empty disjunction, and a
cheap fast-fail pass over the remaining conjuncts runs first so that
contradictions anywhere in an allOf are found without paying for full
normalization of the terms before them.

Reference sets are combined through a memo table on the environment.
A combination that is currently being normalized is returned as a plain
union; guardedness of recursion keeps that sound. A combination whose
body normalizes to the empty disjunction is collapsed to the canonical
contradictory set, which lets later unions refute instantly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Optional

from . import patterns as P
from .canon import (
    CArray,
    CBoolean,
    CNumber,
    CObject,
    CString,
    CTypeSet,
    Conj,
    D_FALSE,
    D_TRUE,
    Dnf,
    Fragment,
    any_dd,
    conj_type,
    dnf_to_schema,
    fresh_conj,
    not_push,
    sort_reqs,
)
from .errors import BudgetExceeded
from .model import (
    CRef,
    CREF_TRUE,
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
    SRefSingle,
    SRepeatedItems,
    SType,
    STypeSet,
    SUniqueItems,
    Schema,
    s_all_of,
)

DEFAULT_MAX_STEPS = 50_000_000
DEFAULT_TIMEOUT = 600.0
MAX_REQ_SPLIT = 16


@dataclass
class Stats:
    steps: int = 0
    fast_path_hits: int = 0
    fast_path_misses: int = 0
    crefs_created: int = 0
    memo_hits: int = 0
    max_disjuncts: int = 0
    cs_calls: int = 0
    gen_rounds: int = 0
    gen_budget_hits: int = 0
    generation_invoked: bool = False
    elapsed: float = 0.0

    def as_dict(self) -> dict:
        return {
            "steps": self.steps,
            "fast_path_hits": self.fast_path_hits,
            "fast_path_misses": self.fast_path_misses,
            "crefs_created": self.crefs_created,
            "memo_hits": self.memo_hits,
            "max_disjuncts": self.max_disjuncts,
            "cs_calls": self.cs_calls,
            "gen_rounds": self.gen_rounds,
            "gen_budget_hits": self.gen_budget_hits,
            "generation_invoked": self.generation_invoked,
            "elapsed": self.elapsed,
        }


class FastFail(Exception):
    """Internal: the cheap pass could not refute the conjunction."""


class NormContext:
    def __init__(
        self,
        env: Env,
        max_steps: int = DEFAULT_MAX_STEPS,
        timeout: float = DEFAULT_TIMEOUT,
        stats: Optional[Stats] = None,
    ):
        self.env = env
        self.stats = stats or Stats()
        self.max_steps = max_steps
        self.deadline = time.monotonic() + timeout

    def tick(self, n: int = 1) -> None:
        st = self.stats
        st.steps += n
        if st.steps > self.max_steps:
            raise BudgetExceeded(f"step budget {self.max_steps} exceeded", st)
        if st.steps % 256 < n and time.monotonic() > self.deadline:
            raise BudgetExceeded("wall clock budget exceeded", st)

    def note_width(self, n: int) -> None:
        if n > self.stats.max_disjuncts:
            self.stats.max_disjuncts = n


def dnf_of(s: Schema, ctx: NormContext) -> Dnf:
    return all_ds(D_TRUE, s, ctx)


def all_ds(d: Dnf, s: Schema, ctx: NormContext, fast: bool = False) -> Dnf:
    ctx.tick()
    if d.is_false:
        return D_FALSE
    out = D_FALSE
    for c in d.conjs:
        out = any_dd(out, all_cs(c, s, ctx, fast))
    ctx.note_width(len(out.conjs))
    return out


def all_cs(c: Conj, s: Schema, ctx: NormContext, fast: bool = False) -> Dnf:
    ctx.tick()
    ctx.stats.cs_calls += 1
    if isinstance(s, SBool):
        return Dnf((c,)) if s.value else D_FALSE
    if isinstance(s, SRef):
        return _conj_with_ref(c, s.ref, ctx, fast)
    if isinstance(s, SNot):
        return all_cs(c, not_push(s.item, ctx.env), ctx, fast)
    if isinstance(s, SAnyOf):
        out = D_FALSE
        for item in s.items:
            out = any_dd(out, all_cs(c, item, ctx, fast))
            if fast and out.conjs:
                # fast callers only ask whether the result is false, and
                # one live disjunct already settles that
                return out
        ctx.note_width(len(out.conjs))
        return out
    if isinstance(s, SOneOf):
        from .canon import expand_oneof

        return all_cs(c, expand_oneof(s), ctx, fast)
    if isinstance(s, SAllOf):
        if fast:
            return fast_check(c, s.items, ctx)
        try:
            return fast_check(c, s.items, ctx)
        except FastFail:
            pass
        d = all_cs(c, s.items[0], ctx)
        for item in s.items[1:]:
            d = all_ds(d, item, ctx)
        return d
    return all_ck(c, s, ctx)


def fast_check(c: Conj, items: tuple[Schema, ...], ctx: NormContext) -> Dnf:
    """Try to refute c against any single conjunct cheaply. Returns the
    empty disjunction on success, raises FastFail when nothing refutes."""
    ctx.tick()
    for item in items:
        try:
            if all_cs(c, item, ctx, fast=True).is_false:
                ctx.stats.fast_path_hits += 1
                return D_FALSE
        except FastFail:
            continue
    ctx.stats.fast_path_misses += 1
    raise FastFail()


def _conj_with_ref(c: Conj, ref: CRef, ctx: NormContext, fast: bool) -> Dnf:
    if ref.is_empty:
        return Dnf((c,))
    if ref.has_clash:
        return D_FALSE
    env = ctx.env
    memo = env.memo.get(ref)
    if memo is None and len(ref.members) == 1:
        name = next(iter(ref.members))
        env.memo[ref] = Env.IN_PROGRESS
        try:
            d = dnf_of(env.body(name), ctx)
        except BaseException:
            env.memo.pop(ref, None)
            raise
        env.memo[ref] = d
        memo = d
    if isinstance(memo, Dnf):
        ctx.stats.memo_hits += 1
        if memo.is_false:
            return D_FALSE
        return all_cs(c, dnf_to_schema(memo), ctx, fast)
    if memo is Env.IN_PROGRESS and len(ref.members) == 1:
        # body under normalization higher in the stack; unfold it inline
        return all_cs(c, env.body(next(iter(ref.members))), ctx, fast)
    # multi-member set not combined yet (or being combined): fold members,
    # which reuses the per-member memoized disjunctions
    return all_cs(c, s_all_of(SRefSingle(m) for m in ref.sorted_members()), ctx, fast)


def all_xx(x: CRef, y: CRef, ctx: NormContext) -> CRef:
    """Combine two reference sets; collapses to the canonical contradictory
    set when the union clashes or its body normalizes to nothing."""
    ctx.tick()
    u = x.union(y)
    if u == x:
        return x
    if u == y:
        return y
    env = ctx.env
    if u.has_clash:
        return env.false_ref()
    memo = env.memo.get(u)
    if memo is Env.IN_PROGRESS:
        return u
    if isinstance(memo, Dnf):
        ctx.stats.memo_hits += 1
        return env.false_ref() if memo.is_false else u
    ctx.stats.crefs_created += 1
    env.memo[u] = Env.IN_PROGRESS
    try:
        d = dnf_of(env.cref_body(u), ctx)
    except BaseException:
        env.memo.pop(u, None)
        raise
    env.memo[u] = d
    return env.false_ref() if d.is_false else u


def is_false_ref(ref: CRef) -> bool:
    return ref.has_clash


# ---------------------------------------------------------------------------
# Insertion of a single operator into a canonical conjunction

_ANALYTICAL_TYPE = {
    SPatternProps: "object",
    SPatternReq: "object",
    SMinProps: "object",
    SMaxProps: "object",
    SItemAt: "array",
    SItemsFrom: "array",
    SContainsFrom: "array",
    SMinItems: "array",
    SMaxItems: "array",
    SUniqueItems: "array",
    SRepeatedItems: "array",
    SMinimum: "number",
    SMaximum: "number",
    SMultipleOf: "number",
    SNotMultipleOf: "number",
    SPattern: "string",
}


def all_ck(c: Conj, k: Schema, ctx: NormContext) -> Dnf:
    ctx.tick()
    if isinstance(k, SType):
        return _with_types(c, frozenset((k.name,)))
    if isinstance(k, STypeSet):
        return _with_types(c, k.names)
    if isinstance(k, SConst):
        return _with_const(c, k.value)
    if isinstance(k, SNotConst):
        return _with_not_const(c, k.value, ctx)

    k_type = _ANALYTICAL_TYPE.get(type(k))
    if k_type is None:
        raise AssertionError(f"not an operator: {k!r}")

    if isinstance(c, CTypeSet):
        if k_type not in c.types:
            return Dnf((c,))
        parts: list[Conj] = []
        rest = c.types - {k_type}
        if rest:
            parts.append(CTypeSet(rest))
        parts.extend(all_ck(fresh_conj(k_type), k, ctx).conjs)
        ctx.note_width(len(parts))
        return Dnf(tuple(parts))

    if conj_type(c) != k_type:
        return Dnf((c,))

    if isinstance(c, CObject):
        return _insert_object(c, k, ctx)
    if isinstance(c, CArray):
        return _insert_array(c, k, ctx)
    if isinstance(c, CNumber):
        return _insert_number(c, k)
    if isinstance(c, CString):
        return _insert_string(c, k)
    raise AssertionError(f"no insertion for {c!r} and {k!r}")


def _with_types(c: Conj, names: frozenset[str]) -> Dnf:
    if isinstance(c, CTypeSet):
        both = c.types & names
        if not both:
            return D_FALSE
        return Dnf((CTypeSet(both),))
    t = conj_type(c)
    return Dnf((c,)) if t in names else D_FALSE


def _with_const(c: Conj, value) -> Dnf:
    if isinstance(value, bool):
        if isinstance(c, CTypeSet):
            return Dnf((CBoolean(value),)) if "boolean" in c.types else D_FALSE
        if isinstance(c, CBoolean):
            if c.value is None or c.value == value:
                return Dnf((CBoolean(value),))
            return D_FALSE
        return D_FALSE
    q = Fraction(value)
    if isinstance(c, CTypeSet):
        if "number" not in c.types:
            return D_FALSE
        return Dnf((CNumber(lo=q, hi=q),))
    if isinstance(c, CNumber):
        d = _insert_number(c, SMinimum(q, False))
        if d.is_false:
            return D_FALSE
        return _insert_number(d.conjs[0], SMaximum(q, False))
    return D_FALSE


def _with_not_const(c: Conj, value, ctx: NormContext) -> Dnf:
    if isinstance(value, bool):
        if isinstance(c, CTypeSet):
            parts: list[Conj] = []
            rest = c.types - {"boolean"}
            if rest:
                parts.append(CTypeSet(rest))
            if "boolean" in c.types:
                parts.append(CBoolean(not value))
            return Dnf(tuple(parts))
        if isinstance(c, CBoolean):
            if c.value is None:
                return Dnf((CBoolean(not value),))
            return Dnf((c,)) if c.value != value else D_FALSE
        return Dnf((c,))
    q = Fraction(value)
    if isinstance(c, CTypeSet):
        parts = []
        rest = c.types - {"number"}
        if rest:
            parts.append(CTypeSet(rest))
        if "number" in c.types:
            parts.append(CNumber(hi=q, hi_strict=True))
            parts.append(CNumber(lo=q, lo_strict=True))
        return Dnf(tuple(parts))
    if isinstance(c, CNumber):
        below = _insert_number(c, SMaximum(q, True))
        above = _insert_number(c, SMinimum(q, True))
        out = any_dd(below, above)
        ctx.note_width(len(out.conjs))
        return out
    return Dnf((c,))


# -- objects


def merge_frag_prop(
    frag: Fragment, pattern: P.PatternExpr, x: CRef, ctx: NormContext
) -> list[list[Fragment]]:
    """Ways to rewrite one fragment under 'every field matching the pattern
    satisfies x'. An empty list means the object is unsatisfiable."""
    ctx.tick()
    if P.p_disjoint(frag.pattern, pattern):
        return [[frag]]
    if P.p_subset(frag.pattern, pattern):
        new_reqs = []
        for req in frag.reqs:
            w = all_xx(req, x, ctx)
            if is_false_ref(w):
                return []
            new_reqs.append(w)
        return [[Fragment(frag.pattern, all_xx(frag.ref, x, ctx), sort_reqs(new_reqs))]]
    # the pattern cuts the fragment in two; requirements must each pick a side
    # (keep the contained pattern itself so key literals stay indexable)
    if P.p_subset(pattern, frag.pattern):
        inside = pattern
    else:
        inside = P.p_and(frag.pattern, pattern)
    outside = P.p_diff(frag.pattern, pattern)
    ref_in = all_xx(frag.ref, x, ctx)
    if not frag.reqs:
        return [[Fragment(inside, ref_in, ()), Fragment(outside, frag.ref, ())]]
    m = len(frag.reqs)
    if m > MAX_REQ_SPLIT:
        raise BudgetExceeded(
            f"fragment split over {m} requirements exceeds the supported {MAX_REQ_SPLIT}",
            ctx.stats,
        )
    options: list[list[Fragment]] = []
    for mask in range(1 << m):
        ctx.tick()
        reqs_in: list[CRef] = []
        reqs_out: list[CRef] = []
        dead = False
        for i, req in enumerate(frag.reqs):
            if mask >> i & 1:
                w = all_xx(req, x, ctx)
                if is_false_ref(w):
                    dead = True
                    break
                reqs_in.append(w)
            else:
                reqs_out.append(req)
        if dead:
            continue
        options.append(
            [
                Fragment(inside, ref_in, sort_reqs(reqs_in)),
                Fragment(outside, frag.ref, sort_reqs(reqs_out)),
            ]
        )
    return options


def insert_preq(co: CObject, pattern: P.PatternExpr, y: CRef, ctx: NormContext) -> Dnf:
    """'Some field matching the pattern satisfies y': one disjunct per
    fragment that can host the required field."""
    ctx.tick()
    if P.p_is_empty(pattern):
        return D_FALSE
    out: list[Conj] = []
    for i in co.candidates(pattern):
        frag = co.fragments[i]
        if P.p_disjoint(frag.pattern, pattern):
            continue
        if P.p_subset(pattern, frag.pattern):
            host = pattern
        else:
            host = P.p_and(frag.pattern, pattern)
        if P.p_is_empty(host):
            continue
        w = all_xx(frag.ref, y, ctx)
        if is_false_ref(w):
            continue
        if P.p_subset(frag.pattern, pattern):
            new_frag = frag.with_reqs(frag.reqs + (w,))
            out.append(co.replace({i: [new_frag]}))
        else:
            # split the fragment so the requirement names a definite block
            outside = P.p_diff(frag.pattern, pattern)
            inside_frag = Fragment(host, frag.ref, sort_reqs((w,)))
            outside_frag = Fragment(outside, frag.ref, frag.reqs)
            out.append(co.replace({i: [inside_frag, outside_frag]}))
    ctx.note_width(len(out))
    return Dnf(tuple(out))


def _insert_object(co: CObject, k: Schema, ctx: NormContext) -> Dnf:
    if isinstance(k, SMinProps):
        n = max(co.min_props, k.bound)
        if co.max_props is not None and n > co.max_props:
            return D_FALSE
        return Dnf((CObject(co.fragments, n, co.max_props),))
    if isinstance(k, SMaxProps):
        m = k.bound if co.max_props is None else min(co.max_props, k.bound)
        if m < co.min_props:
            return D_FALSE
        # fragments are name-disjoint, so each fragment holding requirements
        # needs at least one field of its own
        if m < sum(1 for f in co.fragments if f.reqs):
            return D_FALSE
        return Dnf((CObject(co.fragments, co.min_props, m),))
    if isinstance(k, SPatternProps):
        x = _arg_ref(k.schema)
        if P.p_is_empty(k.pattern):
            return Dnf((co,))
        changes: list[tuple[int, list[list[Fragment]]]] = []
        for i in co.candidates(k.pattern):
            opts = merge_frag_prop(co.fragments[i], k.pattern, x, ctx)
            if not opts:
                return D_FALSE
            if len(opts) == 1 and opts[0] == [co.fragments[i]]:
                continue
            changes.append((i, opts))
        if not changes:
            return Dnf((co,))
        out = []
        for moves in cartesian(*(opts for _, opts in changes)):
            ctx.tick()
            out.append(co.replace({i: list(mv) for (i, _), mv in zip(changes, moves)}))
        d = _object_guard(out)
        ctx.note_width(len(d.conjs))
        return d
    if isinstance(k, SPatternReq):
        d = insert_preq(co, k.pattern, _arg_ref(k.schema), ctx)
        return _object_guard(list(d.conjs))
    raise AssertionError(f"no object insertion for {k!r}")


def _total_reqs(co: CObject) -> int:
    return sum(len(f.reqs) for f in co.fragments)


def _object_guard(conjs: list[Conj]) -> Dnf:
    """Drop rewritten objects whose requirement count exceeds capacity."""
    out = []
    for c in conjs:
        if isinstance(c, CObject) and c.max_props is not None:
            if _total_reqs(c) > c.max_props:
                # distinct-field groupings could still fit; only prune what
                # is impossible regardless of grouping (a requirement can
                # host at most one distinct field per fragment block)
                needed = sum(1 for f in c.fragments if f.reqs)
                if needed > c.max_props:
                    continue
        out.append(c)
    return Dnf(tuple(out))


def _arg_ref(s: Schema) -> CRef:
    if not isinstance(s, SRef):
        raise AssertionError(
            "structural argument is not a reference; stratify the document first"
        )
    return s.ref


# -- arrays


def _flat_map(d: Dnf, f) -> Dnf:
    out = D_FALSE
    for c in d.conjs:
        out = any_dd(out, f(c))
    return out


def _array_with(
    ca: CArray,
    items: Optional[tuple[CRef, ...]] = None,
    tail: Optional[CRef] = None,
    contains: Optional[tuple[tuple[int, CRef], ...]] = None,
    min_items: Optional[int] = None,
    max_items: Optional[tuple] = None,  # wrapped to allow None payload
    unique: Optional[tuple] = None,
) -> CArray:
    return CArray(
        items=ca.items if items is None else items,
        tail=ca.tail if tail is None else tail,
        contains=ca.contains if contains is None else _sorted_contains(contains),
        min_items=ca.min_items if min_items is None else min_items,
        max_items=ca.max_items if max_items is None else max_items[0],
        unique=ca.unique if unique is None else unique[0],
    )


def _sorted_contains(entries: Iterable[tuple[int, CRef]]) -> tuple[tuple[int, CRef], ...]:
    return tuple(sorted(set(entries), key=lambda e: (e[0], e[1].key())))


def _insert_array(ca: CArray, k: Schema, ctx: NormContext) -> Dnf:
    if isinstance(k, SMinItems):
        n = max(ca.min_items, k.bound)
        if ca.max_items is not None and n > ca.max_items:
            return D_FALSE
        return Dnf((_array_with(ca, min_items=n),))
    if isinstance(k, SMaxItems):
        m = k.bound if ca.max_items is None else min(ca.max_items, k.bound)
        return _cap_array(ca, m)
    if isinstance(k, SUniqueItems):
        if ca.unique is False:
            return D_FALSE
        return Dnf((_array_with(ca, unique=(True,)),))
    if isinstance(k, SRepeatedItems):
        if ca.unique is True:
            return D_FALSE
        if ca.max_items is not None and ca.max_items < 2:
            return D_FALSE
        return Dnf((_array_with(ca, unique=(False,)),))
    if isinstance(k, SItemAt):
        return _insert_item_at(ca, k.index, _arg_ref(k.schema), ctx)
    if isinstance(k, SItemsFrom):
        return _insert_items_from(ca, k.index, _arg_ref(k.schema), ctx)
    if isinstance(k, SContainsFrom):
        return _insert_contains(ca, k.index, _arg_ref(k.schema), ctx)
    raise AssertionError(f"no array insertion for {k!r}")


def _cap_array(ca: CArray, m: int) -> Dnf:
    """Apply an upper length bound, truncating vacuous structure."""
    if m < ca.min_items:
        return D_FALSE
    for idx, _ in ca.contains:
        if idx >= m:
            return D_FALSE
    items = ca.items[:m]
    tail = ca.tail if m > len(items) else CREF_TRUE
    return Dnf((CArray(items, tail, ca.contains, ca.min_items, m, ca.unique),))


def _insert_item_at(ca: CArray, index: int, x: CRef, ctx: NormContext) -> Dnf:
    if ca.max_items is not None and index >= ca.max_items:
        return Dnf((ca,))
    n_a = len(ca.items)
    if index < n_a:
        w = all_xx(ca.items[index], x, ctx)
        if is_false_ref(w):
            # a value at this index is impossible, so the array stops short
            return _cap_array(ca, index)
        items = ca.items[:index] + (w,) + ca.items[index + 1 :]
        return Dnf((_array_with(ca, items=items),))
    # extend the slot range; entries that land inside it are re-hosted
    w = all_xx(ca.tail, x, ctx)
    if is_false_ref(w):
        return _cap_array(ca, index)
    items = ca.items + (ca.tail,) * (index - n_a) + (w,)
    pending = [e for e in ca.contains if e[0] <= index]
    base = CArray(items, ca.tail, _sorted_contains(e for e in ca.contains if e[0] > index),
                  ca.min_items, ca.max_items, ca.unique)
    return _relift(Dnf((base,)), pending, ctx)


def _insert_items_from(ca: CArray, index: int, x: CRef, ctx: NormContext) -> Dnf:
    if ca.max_items is not None and index >= ca.max_items:
        return Dnf((ca,))
    n_a = len(ca.items)
    if index <= n_a:
        items = list(ca.items)
        for i in range(index, n_a):
            w = all_xx(items[i], x, ctx)
            if is_false_ref(w):
                return _flat_map(_cap_array(ca, i), lambda c: _insert_items_from(c, index, x, ctx))
            items[i] = w
        tail = all_xx(ca.tail, x, ctx)
        if is_false_ref(tail):
            capped = _cap_array(_array_with(ca, items=tuple(items)), n_a)
            return capped
        entries = []
        for idx, ref in ca.contains:
            w = all_xx(ref, x, ctx)
            if is_false_ref(w):
                return D_FALSE
            entries.append((idx, w))
        return Dnf(
            (
                CArray(tuple(items), tail, _sorted_contains(entries), ca.min_items,
                       ca.max_items, ca.unique),
            )
        )
    # index > n_a: materialize slots up to the index, then re-host entries
    items = ca.items + (ca.tail,) * (index - n_a)
    tail = all_xx(ca.tail, x, ctx)
    if is_false_ref(tail):
        return _cap_array(_array_with(ca, items=items), index)
    keep: list[tuple[int, CRef]] = []
    pending: list[tuple[int, CRef]] = []
    for idx, ref in ca.contains:
        if idx >= index:
            w = all_xx(ref, x, ctx)
            if is_false_ref(w):
                return D_FALSE
            keep.append((idx, w))
        else:
            pending.append((idx, ref))
    base = CArray(items, tail, _sorted_contains(keep), ca.min_items, ca.max_items, ca.unique)
    return _relift(Dnf((base,)), pending, ctx)


def _insert_contains(ca: CArray, index: int, z: CRef, ctx: NormContext) -> Dnf:
    ctx.tick()
    if ca.max_items is not None and index >= ca.max_items:
        return D_FALSE
    n_a = len(ca.items)
    if index >= n_a:
        w = all_xx(z, ca.tail, ctx)
        if is_false_ref(w):
            return D_FALSE
        # combine with the other obligations up front so the witness stage
        # can read grouped combinations from the memo
        for _, other in ca.contains:
            all_xx(w, other, ctx)
        entries = _sorted_contains(ca.contains + ((index, w),))
        return Dnf((_array_with(ca, contains=entries),))
    # the obligation may be met by one of the fixed slots or past them
    out = D_FALSE
    for j in range(index, n_a):
        w = all_xx(ca.items[j], z, ctx)
        if is_false_ref(w):
            continue
        items = ca.items[:j] + (w,) + ca.items[j + 1 :]
        hosted = _array_with(ca, items=items, min_items=max(ca.min_items, j + 1))
        if hosted.max_items is None or hosted.min_items <= hosted.max_items:
            out = any_dd(out, Dnf((hosted,)))
    out = any_dd(out, _insert_contains(ca, n_a, z, ctx))
    ctx.note_width(len(out.conjs))
    return out


def _relift(d: Dnf, pending: list[tuple[int, CRef]], ctx: NormContext) -> Dnf:
    for idx, ref in pending:
        d = _flat_map(d, lambda c, i=idx, r=ref: _insert_contains(c, i, r, ctx)
                      if isinstance(c, CArray) else Dnf((c,)))
    return d


# -- numbers


def _insert_number(cn: CNumber, k: Schema) -> Dnf:
    lo, lo_s, hi, hi_s = cn.lo, cn.lo_strict, cn.hi, cn.hi_strict
    factor, excluded = cn.factor, cn.excluded
    if isinstance(k, SMinimum):
        if lo is None or k.bound > lo or (k.bound == lo and k.exclusive and not lo_s):
            lo, lo_s = k.bound, k.exclusive
    elif isinstance(k, SMaximum):
        if hi is None or k.bound < hi or (k.bound == hi and k.exclusive and not hi_s):
            hi, hi_s = k.bound, k.exclusive
    elif isinstance(k, SMultipleOf):
        factor = k.factor if factor is None else _lcm_fraction(factor, k.factor)
    elif isinstance(k, SNotMultipleOf):
        excluded = tuple(sorted(set(excluded) | {k.factor}))
    else:
        raise AssertionError(f"no number insertion for {k!r}")
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and (lo_s or hi_s)):
            return D_FALSE
    if factor is not None:
        for q in excluded:
            if (factor / q).denominator == 1:
                return D_FALSE
        if lo is not None and hi is not None and lo == hi:
            if (lo / factor).denominator != 1:
                return D_FALSE
    if lo is not None and hi is not None and lo == hi:
        for q in excluded:
            if (lo / q).denominator == 1:
                return D_FALSE
    return Dnf((CNumber(lo, lo_s, hi, hi_s, factor, excluded),))


def _lcm_fraction(a: Fraction, b: Fraction) -> Fraction:
    # smallest positive q with q/a and q/b integral
    num = a.numerator * b.numerator // math.gcd(a.numerator, b.numerator)
    den = math.gcd(a.denominator, b.denominator)
    return Fraction(num, den)


# -- strings


def _insert_string(cs: CString, k: Schema) -> Dnf:
    if not isinstance(k, SPattern):
        raise AssertionError(f"no string insertion for {k!r}")
    pat = k.pattern if cs.pattern is None else P.p_and(cs.pattern, k.pattern)
    if P.p_is_empty(pat):
        return D_FALSE
    return Dnf((CString(pat),))


# ---------------------------------------------------------------------------
# Preparation: normalize every reference set reachable from a disjunction


def refs_of_conj(c: Conj) -> list[CRef]:
    out: list[CRef] = []
    if isinstance(c, CObject):
        for frag in c.fragments:
            out.append(frag.ref)
            out.extend(frag.reqs)
    elif isinstance(c, CArray):
        out.extend(c.items)
        out.append(c.tail)
        out.extend(ref for _, ref in c.contains)
    return out


def prepare(d: Dnf, ctx: NormContext) -> None:
    """Normalize the body of every reference set reachable from d, so the
    witness stage can read final disjunctions from the memo."""
    env = ctx.env
    seen: set[CRef] = set()
    queue: list[CRef] = []

    def push(ref: CRef) -> None:
        if ref not in seen:
            seen.add(ref)
            queue.append(ref)

    for c in d.conjs:
        for ref in refs_of_conj(c):
            push(ref)
    while queue:
        ref = queue.pop()
        if ref.is_empty or ref.has_clash:
            continue
        memo = env.memo.get(ref)
        if memo is None or memo is Env.IN_PROGRESS:
            ctx.tick()
            env.memo[ref] = Env.IN_PROGRESS
            try:
                body_d = dnf_of(env.cref_body(ref), ctx)
            except BaseException:
                env.memo.pop(ref, None)
                raise
            env.memo[ref] = body_d
            memo = body_d
        if isinstance(memo, Dnf):
            for c in memo.conjs:
                for sub in refs_of_conj(c):
                    push(sub)
