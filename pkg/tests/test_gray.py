import itertools

import pytest
from hypothesis import given, strategies as st

from mcsort.gray import (
    MAX_WIDTH,
    decode,
    encode,
    enumerate_valid,
    from_rank,
    is_valid,
    max_min_oracle,
    parity,
    rank_of,
    stable_max_min,
    validate,
)
from mcsort.ternary import Word

import oracles


@pytest.mark.parametrize("x,width,word", [(3, 4, "0010"), (0, 1, "0"), (12, 4, "1010")])
def test_encode_examples(x, width, word):
    assert str(encode(x, width)) == word


@pytest.mark.parametrize("word,value", [("1100", 8), ("0", 0), ("1000", 15)])
def test_decode_examples(word, value):
    assert decode(word) == value


@pytest.mark.parametrize("width", range(1, 13))
def test_encode_matches_xor_formula(width):
    for x in range(1 << width):
        assert str(encode(x, width)) == oracles.gray(x, width)


@given(st.integers(1, 16).flatmap(lambda w: st.tuples(st.just(w), st.integers(0, (1 << w) - 1))))
def test_decode_inverts_encode(wx):
    width, x = wx
    assert decode(encode(x, width)) == x


@pytest.mark.parametrize("width", range(1, 13))
def test_neighbours_differ_in_one_bit(width):
    prev = encode(0, width)
    for x in range(1, 1 << width):
        cur = encode(x, width)
        assert sum(a != b for a, b in zip(prev, cur)) == 1
        prev = cur


def test_encode_decode_errors():
    with pytest.raises(ValueError):
        encode(16, 4)
    with pytest.raises(ValueError):
        encode(-1, 4)
    with pytest.raises(ValueError):
        decode("0M10")
    with pytest.raises(ValueError):
        encode(0, MAX_WIDTH + 1)
    with pytest.raises(ValueError):
        encode(0, 0)


def test_parity():
    assert parity("0110", 4) == 0
    assert parity("0110", 2) == 1
    assert parity("1M11", 0) == 0
    with pytest.raises(ValueError):
        parity("1M11", 2)


def test_enumerate_valid_examples():
    vals = enumerate_valid(4)
    assert len(vals) == 31
    assert str(vals[2]) == "0001"
    assert str(vals[7]) == "0M10"
    assert [str(v) for v in enumerate_valid(1)] == ["0", "M", "1"]


@pytest.mark.parametrize("width", range(1, 11))
def test_enumerate_valid_matches_oracle(width):
    vals = enumerate_valid(width)
    assert len(vals) == 2 ** (width + 1) - 1
    assert [str(v) for v in vals] == oracles.valid_strings(width)
    assert [v.rank for v in vals] == list(range(len(vals)))
    assert all(from_rank(v.rank, width) == v for v in vals)


@pytest.mark.parametrize("word,ok", [("0M10", True), ("MM", False), ("00M1", True), ("M1", True), ("M0", False)])
def test_is_valid_examples(word, ok):
    assert is_valid(word) is ok


@pytest.mark.parametrize("width", range(1, 7))
def test_structural_validity_matches_enumeration(width):
    valid = {w: r for r, w in enumerate(oracles.valid_strings(width))}
    for chars in itertools.product("01M", repeat=width):
        s = "".join(chars)
        assert rank_of(s) == valid.get(s)


def test_validate_rejects_invalid():
    with pytest.raises(ValueError):
        validate("MM")
    with pytest.raises(ValueError):
        from_rank(31, 4)


@pytest.mark.parametrize(
    "g,h,mx",
    [("1001", "1000", "1000"), ("0M10", "0010", "0M10"), ("0M10", "0110", "0110")],
)
def test_max_min_oracle_examples(g, h, mx):
    hi, lo = max_min_oracle(g, h)
    assert str(hi) == mx
    assert {str(hi), str(lo)} == {g, h}


@pytest.mark.parametrize("width", range(1, 6))
def test_max_min_oracle_matches_string_oracle(width):
    vals = oracles.valid_strings(width)
    for g, h in itertools.product(vals, repeat=2):
        hi, lo = max_min_oracle(g, h)
        assert (str(hi), str(lo)) == oracles.closed_max_min(g, h)
        # max/min with respect to the rank order
        assert (hi.rank, lo.rank) == (max(vals.index(g), vals.index(h)), min(vals.index(g), vals.index(h)))


def test_max_min_oracle_width_mismatch():
    with pytest.raises(ValueError):
        max_min_oracle("01", "011")


@pytest.mark.parametrize("width", range(1, 9))
def test_substrings_of_valid_strings_are_valid(width):
    for v in enumerate_valid(width):
        for i in range(1, width + 1):
            for j in range(i, width + 1):
                assert is_valid(v.word.sub(i, j))


def test_stable_max_min_concatenates():
    assert str(stable_max_min(Word.parse("0100"), Word.parse("0111"))) == "01000111"
