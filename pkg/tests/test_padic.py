import pytest
from hypothesis import given, strategies as st

from sqboltz.padic import AFTER, BEFORE, EQUAL, PAdicInt, padic_compare


def digit_lists(p):
    return st.lists(st.integers(0, p - 1), min_size=0, max_size=8)


class TestConstruction:
    def test_trailing_zeros_stripped(self):
        assert PAdicInt(2, [1, 0, 0]).digits == (1,)
        assert PAdicInt(3, []).digits == ()

    def test_int_round_trip(self):
        for v in (0, 1, 2, 7, 100, 3**5):
            assert PAdicInt.from_int(5, v).to_int() == v

    @pytest.mark.parametrize("p", [0, 1, 4, 6, 9, 15])
    def test_composite_or_small_base_rejected(self, p):
        with pytest.raises(ValueError):
            PAdicInt(p, [0])

    def test_digit_range_enforced(self):
        with pytest.raises(ValueError):
            PAdicInt(3, [3])
        with pytest.raises(ValueError):
            PAdicInt(3, [-1])

    def test_norm_and_valuation(self):
        assert PAdicInt.from_int(2, 4).norm == 0.25
        assert PAdicInt.from_int(2, 2).norm == 0.5
        assert PAdicInt.from_int(2, 3).valuation == 0
        assert PAdicInt(2, []).norm == 0.0
        assert PAdicInt(2, []).valuation is None


class TestCompare:
    def test_vertical_norm_ordering(self):
        # |4|_2 = 1/4 < |2|_2 = 1/2: deeper value comes first
        assert padic_compare(PAdicInt.from_int(2, 4), PAdicInt.from_int(2, 2)) == BEFORE
        assert padic_compare(PAdicInt.from_int(2, 2), PAdicInt.from_int(2, 4)) == AFTER

    def test_equal(self):
        assert padic_compare(PAdicInt(7, [3, 1]), PAdicInt(7, [3, 1, 0])) == EQUAL

    def test_horizontal_tie_break(self):
        # 1 = (1) and 3 = (1,1) share norm 1; digits break the tie
        assert padic_compare(PAdicInt.from_int(2, 1), PAdicInt.from_int(2, 3)) == BEFORE

    def test_zero_precedes_everything(self):
        zero = PAdicInt(3, [])
        assert padic_compare(zero, PAdicInt.from_int(3, 9)) == BEFORE
        assert padic_compare(PAdicInt.from_int(3, 1), zero) == AFTER

    def test_mismatched_base_rejected(self):
        with pytest.raises(ValueError):
            padic_compare(PAdicInt(2, [1]), PAdicInt(3, [1]))

    @given(digit_lists(3), digit_lists(3))
    def test_antisymmetric_and_total(self, da, db):
        x, y = PAdicInt(3, da), PAdicInt(3, db)
        fwd, bwd = padic_compare(x, y), padic_compare(y, x)
        if fwd == EQUAL:
            assert bwd == EQUAL and x.digits == y.digits
        else:
            assert {fwd, bwd} == {BEFORE, AFTER}

    @given(digit_lists(2), digit_lists(2), digit_lists(2))
    def test_transitive(self, da, db, dc):
        x, y, z = (PAdicInt(2, d) for d in (da, db, dc))
        if padic_compare(x, y) == BEFORE and padic_compare(y, z) == BEFORE:
            assert padic_compare(x, z) == BEFORE
