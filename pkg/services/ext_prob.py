"""ExtProb: nonnegative reals as a float mantissa in [0.5, 1) plus an unbounded int exponent.

d_v = d_0^(2^v) leaves the double range after a few dozen squarings; keeping the
exponent as a Python int gives unlimited headroom while the mantissa keeps 53 bits.
"""
import math
from fractions import Fraction

import mpmath

_LOG10_2 = math.log10(2.0)
# above this binary exponent decimal() works in log space
DIRECT_DECIMAL_EXP2 = 4096


class ExtProb:
    __slots__ = ('mantissa', 'exp2')

    def __init__(self, sig=0.0, exp=0):
        sig = float(sig)
        if sig < 0 or math.isnan(sig) or math.isinf(sig):
            raise ValueError(f"ExtProb needs a finite nonnegative significand (got {sig})")
        # ensure that 0.5 <= m < 1, or m == 0 with exp2 == 0
        m, e = math.frexp(sig)
        object.__setattr__(self, 'mantissa', m)
        object.__setattr__(self, 'exp2', (e + int(exp)) if m else 0)

    def __setattr__(self, name, value):
        raise AttributeError('ExtProb is immutable')

    # construction

    @classmethod
    def zero(cls):
        return cls(0.0)

    @classmethod
    def one(cls):
        return cls(1.0)

    @classmethod
    def pow2(cls, k):
        """Exact 2**k for any integer k."""
        return cls(0.5, int(k) + 1)

    @classmethod
    def from_float(cls, x):
        return cls(x)

    @classmethod
    def from_fraction(cls, q):
        """Correctly rounded from an exact rational."""
        q = Fraction(q)
        if q < 0:
            raise ValueError(f"negative value {q}")
        if q == 0:
            return cls.zero()
        e = q.numerator.bit_length() - q.denominator.bit_length()
        scaled = q / (Fraction(2) ** e)
        return cls(float(scaled), e)

    @classmethod
    def from_mpf(cls, x):
        x = mpmath.mpf(x)
        if x < 0:
            raise ValueError(f"negative value {x}")
        if x == 0:
            return cls.zero()
        m, e = mpmath.frexp(x)
        return cls(float(m), int(e))

    @classmethod
    def from_dict(cls, data):
        return cls(data['mantissa'], data['exp2'])

    # conversion

    def is_zero(self):
        return self.mantissa == 0.0

    def is_probability(self):
        return self <= ExtProb.one()

    def to_float(self):
        """Native float; underflows to 0.0 and overflows to inf."""
        try:
            return math.ldexp(self.mantissa, self.exp2)
        except OverflowError:
            return math.inf

    def to_fraction(self):
        return Fraction(self.mantissa) * (Fraction(2) ** self.exp2)

    def to_mpf(self):
        return mpmath.ldexp(mpmath.mpf(self.mantissa), self.exp2)

    def log2(self):
        if self.is_zero():
            return -math.inf
        return math.log2(self.mantissa) + self.exp2

    def log10(self):
        return self.log2() * _LOG10_2

    def decimal(self, digits=7):
        if self.is_zero():
            return '0'
        if abs(self.exp2) < DIRECT_DECIMAL_EXP2:
            return mpmath.nstr(self.to_mpf(), digits, min_fixed=-4, max_fixed=6)
        # through log10 so that no power of ten with a huge exponent is built
        with mpmath.workprec(abs(self.exp2).bit_length() + 64):
            scale = self.exp2 * mpmath.log10(2) + mpmath.log10(self.mantissa)
            exp10 = int(mpmath.floor(scale))
            significand = mpmath.nstr(mpmath.power(10, scale - exp10), digits)
        if significand.startswith('10'):
            significand, exp10 = '1.0', exp10 + 1
        return f"{significand}e{exp10:+d}"

    def to_dict(self):
        return {'mantissa': self.mantissa, 'exp2': self.exp2, 'decimal': self.decimal()}

    # arithmetic

    def _align(self, other):
        """Returns (ss, os, se) such that self == ss * 2**se and other == os * 2**se."""
        other = _coerce(other)
        ss, se = self.mantissa, self.exp2
        os, oe = other.mantissa, other.exp2
        if ss == 0.0:
            se = oe
        elif os == 0.0:
            pass
        elif se > oe:
            os = math.ldexp(os, max(oe - se, -1100))
        elif se < oe:
            ss = math.ldexp(ss, max(se - oe, -1100))
            se = oe
        return ss, os, se

    def __add__(self, other):
        ss, os, e = self._align(other)
        return ExtProb(ss + os, e)

    __radd__ = __add__

    def __sub__(self, other):
        ss, os, e = self._align(other)
        if os > ss:
            raise ValueError('ExtProb subtraction would go negative')
        return ExtProb(ss - os, e)

    def monus(self, other):
        """Truncated subtraction: max(self - other, 0)."""
        ss, os, e = self._align(other)
        return ExtProb(max(ss - os, 0.0), e)

    def __mul__(self, other):
        other = _coerce(other)
        return ExtProb(self.mantissa * other.mantissa, self.exp2 + other.exp2)

    __rmul__ = __mul__

    def square(self):
        return ExtProb(self.mantissa * self.mantissa, 2 * self.exp2)

    def clamp01(self):
        return ExtProb.one() if self > ExtProb.one() else self

    # comparison: exact lexicographic on (exp2, mantissa); zero sorts first

    def _key(self):
        return (0, 0, 0.0) if self.is_zero() else (1, self.exp2, self.mantissa)

    def __eq__(self, other):
        key = _other_key(other)
        if key is NotImplemented:
            return NotImplemented
        return key is not None and self._key() == key

    def __lt__(self, other):
        key = _other_key(other)
        return key if key is NotImplemented else key is not None and self._key() < key

    def __le__(self, other):
        key = _other_key(other)
        return key if key is NotImplemented else key is not None and self._key() <= key

    def __gt__(self, other):
        key = _other_key(other)
        return key if key is NotImplemented else key is not None and self._key() > key

    def __ge__(self, other):
        key = _other_key(other)
        return key if key is NotImplemented else key is not None and self._key() >= key

    def __hash__(self):
        return hash(self._key())

    def relative_error(self, reference):
        """|self - ref| / ref, evaluated in high precision."""
        ref = mpmath.mpf(reference.to_mpf() if isinstance(reference, ExtProb) else reference)
        if ref == 0:
            return 0.0 if self.is_zero() else math.inf
        with mpmath.workprec(200):
            return float(abs(self.to_mpf() - ref) / ref)

    def __repr__(self):
        return f"ExtProb({self.mantissa!r}, {self.exp2})"


def _coerce(value):
    if isinstance(value, ExtProb):
        return value
    if isinstance(value, Fraction):
        return ExtProb.from_fraction(value)
    return ExtProb(value)


def _other_key(value):
    """Ordering key for a comparison operand; None for NaN, which compares false like float NaN."""
    if not isinstance(value, (ExtProb, int, float, Fraction)):
        return NotImplemented
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, float) and math.isinf(value):
        return (-1, 0, 0.0) if value < 0 else (2, 0, 0.0)
    if not isinstance(value, ExtProb) and value < 0:
        # every ExtProb is nonnegative
        return (-1, 0, 0.0)
    if isinstance(value, int):
        value = Fraction(value)
    return _coerce(value)._key()
