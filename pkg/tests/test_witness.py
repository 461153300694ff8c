"""Witness generation: numeric search anchors and end-to-end examples.

Numeric expectations are checked against the constraint itself (bounds,
divisibility, exclusions) rather than against a remembered constant, so
the assertions stay valid under any correct candidate ordering.
"""

import json
from fractions import Fraction

from jsonsub.canon import CNumber
from jsonsub.engine import check_inclusion, satisfies_value
from jsonsub.values import parse_json
from jsonsub.witness import gen_number


def exact(node):
    return parse_json(json.dumps(node))


def _respects(q, c: CNumber) -> bool:
    if q is None:
        return False
    if c.lo is not None and (q < c.lo or (q == c.lo and c.lo_strict)):
        return False
    if c.hi is not None and (q > c.hi or (q == c.hi and c.hi_strict)):
        return False
    if c.factor is not None and (q / c.factor).denominator != 1:
        return False
    return all((q / ex).denominator != 1 for ex in c.excluded)


# ---------------------------------------------------------------------------
# numeric search


def test_bounded_with_factor():
    c = CNumber(Fraction(2), False, Fraction(10), False, Fraction(3), ())
    got = gen_number(c)
    assert _respects(got, c)
    assert got in (Fraction(3), Fraction(6), Fraction(9))


def test_empty_strict_point():
    c = CNumber(Fraction(5), True, Fraction(5), True, None, ())
    assert gen_number(c) is None


def test_point_off_factor():
    c = CNumber(Fraction(1), False, Fraction(1), False, Fraction(2), ())
    assert gen_number(c) is None


def test_point_on_factor():
    c = CNumber(Fraction(3), False, Fraction(3), False, Fraction(3), ())
    assert gen_number(c) == Fraction(3)


def test_point_hits_exclusion():
    c = CNumber(Fraction(4), False, Fraction(4), False, None, (Fraction(2),))
    assert gen_number(c) is None


def test_factor_with_exclusion_in_window():
    c = CNumber(
        Fraction(1, 10), False, Fraction(2, 5), False, Fraction(1, 10), (Fraction(1, 5),)
    )
    got = gen_number(c)
    assert _respects(got, c)


def test_unbounded_non_integer():
    c = CNumber(None, False, None, False, None, (Fraction(1),))
    got = gen_number(c)
    assert _respects(got, c)


def test_narrow_interval():
    lo = Fraction(7)
    hi = lo + Fraction(1, 10**13)
    c = CNumber(lo, False, hi, False, None, ())
    got = gen_number(c)
    assert _respects(got, c)


def test_fine_grained_exclusion():
    # every decimal coarser than the exclusion is one of its multiples,
    # so the search must refine below it
    c = CNumber(None, False, None, False, None, (Fraction(1, 10**14),))
    got = gen_number(c)
    assert _respects(got, c)


def test_negative_only_window():
    c = CNumber(Fraction(-10), False, Fraction(-2), False, Fraction(3), ())
    got = gen_number(c)
    assert _respects(got, c)
    assert got < 0


# ---------------------------------------------------------------------------
# end-to-end witnesses through the inclusion pipeline


def assert_witness(res, left, right):
    assert not res.included
    assert satisfies_value(res.witness, exact(left))
    assert not satisfies_value(res.witness, exact(right))


def test_branch_witness():
    left = {"anyOf": [{"type": "string"}, {"type": "number"}]}
    right = {"type": "string"}
    res = check_inclusion(left, right)
    assert_witness(res, left, right)


def test_number_vs_integer_witness():
    left = {"type": "number"}
    right = {"type": "integer"}
    res = check_inclusion(left, right)
    assert_witness(res, left, right)
    assert res.witness.denominator > 1


def test_unsat_left_is_included():
    left = {"allOf": [{"type": "string"}, {"type": "number"}]}
    res = check_inclusion(left, False)
    assert res.included
    assert res.witness is None


def test_required_chain_refuted_by_fixpoint():
    left = {
        "type": "object",
        "properties": {"next": {"$ref": "#"}},
        "required": ["next"],
    }
    res = check_inclusion(left, False)
    assert res.included
    assert res.stats.generation_invoked is True


def test_distinct_elements_witness():
    left = {"type": "array", "uniqueItems": True, "minItems": 2}
    res = check_inclusion(left, False)
    assert_witness(res, left, False)
    a, b = res.witness[0], res.witness[1]
    assert a != b


def test_duplicate_elements_witness():
    left = {"type": "array", "minItems": 2, "maxItems": 2}
    right = {"uniqueItems": True}
    res = check_inclusion(left, right)
    assert_witness(res, left, right)


def test_object_field_witness():
    left = {
        "type": "object",
        "properties": {"a": {"type": "number", "minimum": 3}},
        "required": ["a"],
    }
    right = {"properties": {"a": {"maximum": 1}}}
    res = check_inclusion(left, right)
    assert_witness(res, left, right)
    assert res.witness["a"] >= 3


def test_tuple_slot_witness():
    left = {"type": "array", "items": [{"const": 1}, {"type": "string"}], "minItems": 2}
    right = {"items": [True, {"pattern": "^zz"}]}
    res = check_inclusion(left, right)
    assert_witness(res, left, right)


def test_contains_witness():
    left = {"type": "array", "contains": {"type": "number"}, "minItems": 1}
    right = {"items": {"type": "string"}}
    res = check_inclusion(left, right)
    assert_witness(res, left, right)
