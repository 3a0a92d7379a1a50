"""
Continued Fraction Core
=======================
Exact regular continued fraction machinery: digit extraction, convergents,
futures/pasts and the approximation coefficient sequences Theta, C and D
"""

import json
import logging
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

GENERIC_BITS = 4096
BITS_PER_SAFE_DIGIT = 6  # well under the ~3.4 bits a digit consumes on average

RationalLike = Union[Fraction, int, str]


class CFError(ValueError):
    """Base class for continued fraction errors"""


class IndexOutOfRangeError(CFError):
    pass


class InsufficientDigitsError(CFError):
    pass


class UndefinedCoefficientError(CFError):
    """Raised where a coefficient would need a division by zero (v_0 = 0 or t_n = 0)"""


class RationalParseError(CFError):
    def __init__(self, text: str, position: int, reason: str = "unexpected character"):
        self.text = text
        self.position = position
        super().__init__(f"cannot parse {text!r} as a rational: {reason} at position {position}")


class Exactness(str, Enum):
    EXACT_FINITE = 'exact-finite'
    TRUNCATED = 'truncated-guaranteed'


@dataclass(frozen=True)
class DigitSequence:
    """
    a0 and the partial quotients (a1, a2, ...) of a regular continued fraction

    Exact-finite sequences are canonical (last digit >= 2). Truncated sequences
    carry n_safe: digits up to that index are certified.
    """
    a0: int
    digits: Tuple[int, ...]
    exactness: Exactness = Exactness.EXACT_FINITE
    n_safe: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'digits', tuple(int(d) for d in self.digits))
        object.__setattr__(self, 'exactness', Exactness(self.exactness))
        for i, digit in enumerate(self.digits, start=1):
            if digit < 1:
                raise CFError(f"digit a{i} = {digit} is not a positive integer")
        if self.exactness is Exactness.EXACT_FINITE:
            if self.digits and self.digits[-1] < 2:
                raise CFError("exact-finite expansions must end with a digit >= 2; use normalize()")
        elif self.n_safe is None or self.n_safe < 0:
            raise CFError("truncated sequences need a nonnegative n_safe")

    def __len__(self) -> int:
        return len(self.digits)

    @property
    def is_exact(self) -> bool:
        return self.exactness is Exactness.EXACT_FINITE

    @property
    def value(self) -> Fraction:
        """The rational the listed digits fold to"""
        return fold(self.a0, self.digits)

    def digit(self, n: int) -> int:
        """a_n for n >= 0"""
        if n == 0:
            return self.a0
        if not 1 <= n <= len(self.digits):
            raise IndexOutOfRangeError(f"a{n} requested but only {len(self.digits)} digits are available")
        return self.digits[n - 1]

    def to_bracket(self) -> str:
        if not self.digits:
            return str(self.a0)
        return f"{self.a0};" + ",".join(str(d) for d in self.digits)

    def to_dict(self) -> Dict:
        return {
            'a0': self.a0,
            'digits': list(self.digits),
            'exactness': self.exactness.value,
            'n_safe': self.n_safe,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class ConvergentPair:
    p: int
    q: int
    index: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class CoefficientTriple:
    """
    Approximation coefficients around index n

    theta = Theta_n, theta_prev = Theta_{n-1}, c = C_{n-1}, d = D_{n-1};
    d_prev = D_{n-2} and d_next = D_n when they are defined.
    """
    index: int
    theta: Fraction
    theta_prev: Fraction
    c: Fraction
    d: Fraction
    d_prev: Optional[Fraction] = None
    d_next: Optional[Fraction] = None

    def to_dict(self) -> Dict:
        return {
            'index': self.index,
            'theta': rational_to_str(self.theta),
            'theta_prev': rational_to_str(self.theta_prev),
            'c': rational_to_str(self.c),
            'd': rational_to_str(self.d),
            'd_prev': None if self.d_prev is None else rational_to_str(self.d_prev),
            'd_next': None if self.d_next is None else rational_to_str(self.d_next),
        }


# ==================== PARSING / SERIALIZATION ====================

_RATIONAL_RE = re.compile(r'[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE](?P<exp>[+-]?\d+))?(?:/\d+)?')
MAX_DECIMAL_EXPONENT = 10_000


def parse_rational(text: RationalLike) -> Fraction:
    """
    Parse "p/q", an integer or a decimal string into an exact Fraction

    Decimal strings are read digit by digit, never through a binary float.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    raw = str(text)
    stripped = raw.strip()
    offset = len(raw) - len(raw.lstrip())
    if not stripped:
        raise RationalParseError(raw, offset, "empty input")

    match = _RATIONAL_RE.match(stripped)
    if match is None or match.end() != len(stripped):
        position = offset + (match.end() if match else 0)
        raise RationalParseError(raw, position)
    if '/' in stripped and ('.' in stripped or 'e' in stripped.lower()):
        raise RationalParseError(raw, offset + stripped.index('/'), "p/q needs integer parts")
    exponent = match.group('exp')
    if exponent is not None:
        magnitude = exponent.lstrip('+-').lstrip('0')
        if len(magnitude) > 5 or int(magnitude or 0) > MAX_DECIMAL_EXPONENT:
            raise RationalParseError(raw, offset + match.start('exp') - 1, "exponent out of range")

    try:
        return Fraction(stripped)
    except ZeroDivisionError:
        raise RationalParseError(raw, offset + stripped.index('/') + 1, "zero denominator")


def rational_to_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def from_bracket(text: str) -> DigitSequence:
    """Parse the bracket form "a0;a1,a2,..." (either finite form is accepted)"""
    head, _, tail = text.strip().strip('[]').partition(';')
    try:
        a0 = int(head)
        digits = [int(d) for d in tail.split(',') if d.strip()] if tail else []
    except ValueError:
        raise CFError(f"malformed bracket expansion: {text!r}")
    return normalize(a0, digits)


def from_json(payload: Union[str, Dict]) -> DigitSequence:
    data = json.loads(payload) if isinstance(payload, str) else payload
    exactness = Exactness(data.get('exactness', Exactness.EXACT_FINITE.value))
    if exactness is Exactness.EXACT_FINITE:
        return normalize(int(data['a0']), data['digits'])
    return DigitSequence(int(data['a0']), tuple(data['digits']), exactness, data.get('n_safe'))


# ==================== EXPANSION ====================

def normalize(a0: int, digits: Sequence[int]) -> DigitSequence:
    """Canonical exact-finite form of [a0; digits], folding a trailing [..., k-1, 1] into [..., k]"""
    digits = [int(d) for d in digits]
    if digits and digits[-1] == 1:
        if len(digits) == 1:
            return DigitSequence(a0 + 1, ())
        digits = digits[:-2] + [digits[-2] + 1]
    return DigitSequence(a0, tuple(digits))


def fold(a0: int, digits: Sequence[int]) -> Fraction:
    """Evaluate [a0; a1, ..., ak] exactly"""
    num, den = 1, 0
    for digit in reversed(digits):
        num, den = digit * num + den, num
    # num/den is now [a1; a2, ...] (or 1/0 for an empty tail)
    return a0 + Fraction(den, num)


def expand(x: RationalLike, max_digits: int = 10_000) -> DigitSequence:
    """
    Regular continued fraction digits of a rational via the Euclidean algorithm

    Returns an exact-finite sequence if the expansion ends within max_digits,
    otherwise a truncated-guaranteed one with n_safe = max_digits.
    """
    if max_digits < 1:
        raise ValueError(f"max_digits must be >= 1, got {max_digits}")
    x = parse_rational(x)
    num, den = x.numerator, x.denominator
    a0 = num // den
    rem = num - a0 * den

    digits: List[int] = []
    while rem:
        if len(digits) == max_digits:
            return DigitSequence(a0, tuple(digits), Exactness.TRUNCATED, n_safe=len(digits))
        digit = den // rem
        den, rem = rem, den - digit * rem
        digits.append(digit)
    return DigitSequence(a0, tuple(digits))


def from_float(x: float, max_digits: int = 10_000) -> DigitSequence:
    """Expand a double through its exact dyadic value"""
    return expand(Fraction(x), max_digits)


def sample_generic_real(rng: np.random.Generator, bits: int = GENERIC_BITS) -> DigitSequence:
    """
    Uniform random k/2^bits in (0, 1) used as a stand-in for a generic real

    All digits of the rational are kept; only the first bits // 6 are certified
    as digits of the real it represents.
    """
    k = 0
    while k == 0:
        k = int.from_bytes(rng.bytes((bits + 7) // 8), 'big') >> (8 * ((bits + 7) // 8) - bits)
    full = expand(Fraction(k, 1 << bits), max_digits=4 * bits)
    n_safe = min(bits // BITS_PER_SAFE_DIGIT, len(full.digits))
    return DigitSequence(full.a0, full.digits, Exactness.TRUNCATED, n_safe=n_safe)


# ==================== CONVERGENTS / FUTURE / PAST ====================

def convergents(d: DigitSequence, n: int) -> List[ConvergentPair]:
    """(p_0, q_0) ... (p_n, q_n) from the standard recurrence"""
    if n < 0 or n > len(d.digits):
        raise IndexOutOfRangeError(f"convergent {n} requested, {len(d.digits)} digits available")
    p_prev, q_prev = 1, 0
    p, q = d.a0, 1
    pairs = [ConvergentPair(p, q, 0)]
    for index, digit in enumerate(d.digits[:n], start=1):
        p, p_prev = digit * p + p_prev, p
        q, q_prev = digit * q + q_prev, q
        pairs.append(ConvergentPair(p, q, index))
    return pairs


def _check_future(d: DigitSequence, n: int, ahead: int = 2):
    if n < 0 or n > len(d.digits):
        raise IndexOutOfRangeError(f"index {n} outside 0..{len(d.digits)}")
    if not d.is_exact and n + ahead > d.n_safe:
        raise InsufficientDigitsError(
            f"t_{n} needs certified digits through index {n + ahead}, n_safe = {d.n_safe}")


def future_t(d: DigitSequence, n: int) -> Fraction:
    """t_n = [0; a_{n+1}, a_{n+2}, ...]"""
    _check_future(d, n)
    return fold(0, d.digits[n:])


def past_v(d: DigitSequence, n: int) -> Fraction:
    """v_n = [0; a_n, ..., a_1] = q_{n-1}/q_n, with v_0 = 0"""
    if n < 0 or n > len(d.digits):
        raise IndexOutOfRangeError(f"index {n} outside 0..{len(d.digits)}")
    q_prev, q = 0, 1
    for digit in d.digits[:n]:
        q, q_prev = digit * q + q_prev, q
    return Fraction(q_prev, q)


def theta(d: DigitSequence, n: int) -> Fraction:
    """Theta_n = t_n / (1 + t_n v_n); Theta_0 = t_0"""
    t = future_t(d, n)
    v = past_v(d, n)
    return t / (1 + t * v)


def theta_direct(d: DigitSequence, n: int) -> Fraction:
    """Theta_n = q_n^2 |x - p_n/q_n| from the convergent itself"""
    _check_future(d, n)
    pair = convergents(d, n)[-1]
    return pair.q ** 2 * abs(d.value - pair.value)


def d_product(d: DigitSequence, n: int) -> Fraction:
    """D_{n-1} = [a_n; a_{n-1}, ..., a_1] * [a_{n+1}; a_{n+2}, ...]"""
    _check_future(d, n)
    if n < 1:
        raise UndefinedCoefficientError("D_{-1} is undefined")
    if n == len(d.digits):
        raise UndefinedCoefficientError(f"t_{n} = 0, D_{n - 1} is unbounded")
    backward = fold(d.digits[n - 1], list(reversed(d.digits[:n - 1])))
    forward = fold(d.digits[n], d.digits[n + 1:])
    return backward * forward


def coefficients(d: DigitSequence, n: int) -> CoefficientTriple:
    """
    Theta_n, Theta_{n-1}, C_{n-1}, D_{n-1} from t_n and v_n

    D_{n-2} and D_n are filled in from the same point where defined.
    """
    t = future_t(d, n)
    v = past_v(d, n)
    if v == 0:
        raise UndefinedCoefficientError("v_0 = 0: D_{-1} is undefined")
    if t == 0:
        raise UndefinedCoefficientError(f"t_{n} = 0: D_{n - 1} is unbounded")

    denominator = 1 + t * v
    d_value = 1 / (t * v)

    a = d.digits[n - 1]
    d_prev = None
    if n >= 2:
        d_prev = (a + t) * v / (1 - a * v)

    d_next = None
    if n + 1 <= len(d.digits) and (d.is_exact or n + 3 <= d.n_safe):
        b = d.digits[n]
        if 1 - b * t != 0:
            d_next = (b + v) * t / (1 - b * t)

    return CoefficientTriple(
        index=n,
        theta=t / denominator,
        theta_prev=v / denominator,
        c=1 + 1 / d_value,
        d=d_value,
        d_prev=d_prev,
        d_next=d_next,
    )


def coefficient_table(d: DigitSequence, max_index: Optional[int] = None) -> List[Dict]:
    """
    One row per index n: a_n, (p_n, q_n), Theta_n, C_n, D_n (None where undefined)
    """
    last = len(d.digits) if max_index is None else min(max_index, len(d.digits))
    if not d.is_exact:
        last = min(last, max(d.n_safe - 3, 0))
    pairs = convergents(d, last)
    rows = []
    for n in range(last + 1):
        row = {
            'n': n,
            'a': d.digit(n),
            'p': pairs[n].p,
            'q': pairs[n].q,
            'theta': theta(d, n),
            'c': None,
            'd': None,
        }
        if n + 1 <= len(d.digits):
            try:
                coeff = coefficients(d, n + 1)
                row['c'] = coeff.c
                row['d'] = coeff.d
            except UndefinedCoefficientError:
                pass
        rows.append(row)
    return rows
