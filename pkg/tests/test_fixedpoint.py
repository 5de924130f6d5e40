from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pbitfab.fixedpoint import (
    S32, S42, U031, FixedFormat, FixedPoint,
    fx, fx_add_widened, fx_from_rational, fx_saturate, fx_scale,
)


class TestFormat:
    def test_ranges(self):
        assert S32.min_raw == -32 and S32.max_raw == 31
        assert float(FixedPoint(S32.min_raw, S32)) == -8.0
        assert float(FixedPoint(S32.max_raw, S32)) == 7.75
        assert S42.min_raw == -64 and S42.max_raw == 63
        assert U031.min_raw == 0 and U031.max_raw == 2**31 - 1

    def test_parse_roundtrip(self):
        for text in ("s[3][2]", "s[4][2]", "u[0][31]", "s[0][0]"):
            assert str(FixedFormat.parse(text)) == text

    def test_parse_rejects_garbage(self):
        for text in ("q[3][2]", "s[3]", "s[-1][2]", "3.2", ""):
            with pytest.raises(ValueError):
                FixedFormat.parse(text)

    def test_widen(self):
        assert S32.widen() == S42
        assert S32.widen(2) == FixedFormat(5, 2)

    def test_resolution(self):
        assert S32.resolution == Fraction(1, 4)
        assert U031.resolution == Fraction(1, 2**31)


class TestConstruction:
    def test_exact_values(self):
        assert fx("7.75", S32).raw == 31
        assert fx(-8, S32).raw == -32
        assert fx(Fraction(-5, 4), S32).raw == -5
        assert fx(0, S32).value == 0

    def test_rejects_off_grid(self):
        with pytest.raises(ValueError):
            fx("1.125", S32)  # needs 3 fractional bits
        with pytest.raises(ValueError):
            fx(Fraction(1, 3), S32)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            fx(8, S32)
        with pytest.raises(ValueError):
            fx("-8.25", S32)

    def test_from_rational_exact_and_truncating(self):
        assert fx_from_rational(3, 4, S32).value == Fraction(3, 4)
        with pytest.raises(ValueError):
            fx_from_rational(1, 8, S32)
        # floor toward -inf, both signs
        assert fx_from_rational(1, 8, S32, truncate=True).value == 0
        assert fx_from_rational(-1, 8, S32, truncate=True).value == Fraction(-1, 4)

    def test_from_rational_saturates(self):
        assert fx_from_rational(100, 1, S32, truncate=True).raw == S32.max_raw
        assert fx_from_rational(-100, 1, S32, truncate=True).raw == S32.min_raw

    def test_from_rational_rejects_bad_denominator(self):
        for denom in (0, -4, 3):
            with pytest.raises(ValueError):
                fx_from_rational(1, denom, S32)


class TestArithmetic:
    def test_add_widens_instead_of_wrapping(self):
        a = fx("7.75", S32)
        out = fx_add_widened(a, a)
        assert out.value == Fraction(31, 2)
        assert out.fmt == S42

    def test_add_requires_matching_frac_bits(self):
        with pytest.raises(ValueError):
            fx_add_widened(fx(1, S32), FixedPoint(1, FixedFormat(3, 3)))

    def test_scale_floors_toward_neg_inf(self):
        # -1/4 * 1/4 = -1/16, floors to -1/4 at 2 fractional bits
        out = fx_scale(fx("-0.25", S32), fx("0.25", S32))
        assert out.value == Fraction(-1, 4)
        out = fx_scale(fx("0.25", S32), fx("0.25", S32))
        assert out.value == 0

    def test_scale_identity(self):
        for raw in range(S32.min_raw, S32.max_raw + 1):
            assert fx_scale(FixedPoint(raw, S32), fx(1, S32)).raw == raw

    def test_saturate_bounds_checks(self):
        lo, hi = fx(-8, S32), fx("7.75", S32)
        with pytest.raises(ValueError):
            fx_saturate(fx(0, S32), hi, lo)
        with pytest.raises(ValueError):
            fx_saturate(FixedPoint(0, FixedFormat(3, 3)), lo, hi)


raws = st.integers(min_value=-512, max_value=511)


@given(raws)
def test_saturation_idempotent(raw):
    lo, hi = fx(-8, S32), fx("7.75", S32)
    a = FixedPoint(raw, FixedFormat(7, 2))
    once = fx_saturate(a, lo, hi)
    twice = fx_saturate(once, lo, hi)
    assert once.raw == twice.raw
    assert lo.raw <= once.raw <= hi.raw


@given(raws, raws)
def test_widened_add_is_exact(ra, rb):
    fmt = FixedFormat(7, 2)
    a, b = FixedPoint(ra, fmt), FixedPoint(rb, fmt)
    assert fx_add_widened(a, b).value == a.value + b.value


@given(raws, st.integers(min_value=-32, max_value=31))
def test_scale_matches_floor_of_true_product(ra, rk):
    a = FixedPoint(ra, FixedFormat(7, 2))
    k = FixedPoint(rk, S32)
    out = fx_scale(a, k)
    true = a.value * k.value
    floored = Fraction((true * 4).numerator // (true * 4).denominator, 4)
    assert out.value == floored
