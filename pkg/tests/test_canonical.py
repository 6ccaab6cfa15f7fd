import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from modelpick import canonical_json, format_real


def test_nine_significant_digits():
    assert format_real(1.0 - 2000 / 14200) == "0.85915493"
    assert format_real(0.25) == "0.25"
    assert format_real(123456789012.0) == "1.23456789e+11"


def test_negative_zero_normalized():
    assert format_real(-0.0) == "0"


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        format_real(math.inf)
    with pytest.raises(ValueError):
        format_real(math.nan)


def test_keys_sorted_arrays_ordered():
    text = canonical_json({"b": 1, "a": [3, 2, 1]})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"b": 1, "a": [3, 2, 1]}


def test_string_escapes_round_trip():
    value = {"s": 'quote " backslash \\ newline \n tab \t'}
    assert json.loads(canonical_json(value)) == value


@given(
    st.recursive(
        st.one_of(
            st.none(),
            st.booleans(),
            st.integers(min_value=-(2**53), max_value=2**53),
            st.floats(allow_nan=False, allow_infinity=False, width=64),
            st.text(max_size=30),
        ),
        lambda children: st.one_of(
            st.lists(children, max_size=4),
            st.dictionaries(st.text(max_size=8), children, max_size=4),
        ),
        max_leaves=20,
    )
)
def test_serialize_parse_serialize_fixpoint(value):
    once = canonical_json(value)
    again = canonical_json(json.loads(once))
    assert once == again
