"""
Sharp Bounds
============
Case classification of (a_n, a_{n+1}, r, R) and the sharp bounds on D_{n-1}
(and C_{n-1} = 1 + 1/D_{n-1}) given conditions on its two neighbours:
- lower_bound_D: D_{n-2} < r and D_n < R
- upper_bound_D: D_{n-2} > r and D_n > R
- upper_bound_C / lower_bound_C: the same statements for C via r = 1/(t-1)
- witness: exact rationals whose D_{n-1} comes within eps of a bound
"""

import functools
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Tuple

from cf_core import DigitSequence, coefficients, expand, normalize
from natural_extension import curve_config, f_curve, g_curve, m_tong

logger = logging.getLogger(__name__)

WITNESS_MAX_REFINEMENTS = 48
WITNESS_MIN_STEP = 1e-13


class EmptyRegionError(ValueError):
    """The hypothesis region inside Delta_{a,b} has measure zero"""


class ParameterDomainError(ValueError):
    """Parameters outside the domain of a theorem (r, R > 1; t, T in (1, 2))"""


class UnreachableEpsError(ValueError):
    """The witness construction could not get within eps of the bound"""


class CaseLabel(str, Enum):
    I = 'i'
    II = 'ii'
    III = 'iii'
    IV = 'iv'
    V = 'v'
    VI_A = 'vi_a'
    VI_B = 'vi_b'
    VI_C = 'vi_c'
    VI_D = 'vi_d'

    @property
    def is_vi(self) -> bool:
        return self.value.startswith('vi')

    @property
    def family(self) -> str:
        """Configurations sharing a theorem case: 'i_ii', 'iii_iv', 'v' or 'vi'"""
        if self in (CaseLabel.I, CaseLabel.II):
            return 'i_ii'
        if self in (CaseLabel.III, CaseLabel.IV):
            return 'iii_iv'
        return 'vi' if self.is_vi else 'v'


class BoundKind(str, Enum):
    LOWER_D = 'lower_D'
    UPPER_D = 'upper_D'
    LOWER_C = 'lower_C'
    UPPER_C = 'upper_C'

    @classmethod
    def _missing_(cls, value):
        # accept upper_d, UPPER_D, ...
        if isinstance(value, str):
            for member in cls:
                if member.value.lower() == value.lower():
                    return member
        return None


class Direction(str, Enum):
    BELOW = 'below'   # D_{n-2} < r and D_n < R
    ABOVE = 'above'   # D_{n-2} > r and D_n > R


@dataclass(frozen=True)
class BoundResult:
    value: float
    kind: BoundKind
    theorem_case: int
    case_label: CaseLabel
    tong_value: float
    a: int
    b: int
    r: float
    R: float
    extras: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        payload = {
            'a': self.a,
            'b': self.b,
            'r': self.r,
            'R': self.R,
            'kind': self.kind.value,
            'case': self.case_label.value,
            'theorem_case': self.theorem_case,
            'value': self.value,
            'tong_value': self.tong_value,
        }
        payload.update(self.extras)
        return payload

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _check_d_domain(a: int, b: int, r: float, R: float):
    if a < 1 or b < 1:
        raise ParameterDomainError(f"digits must be positive, got a={a}, b={b}")
    if not (r > 1 and R > 1):
        raise ParameterDomainError(f"r and R must exceed 1, got r={r}, R={R}")


def _c_to_d(t: float, T: float) -> Tuple[float, float]:
    if not (1 < t < 2 and 1 < T < 2):
        raise ParameterDomainError(f"t and T must lie in (1, 2), got t={t}, T={T}")
    return 1.0 / (t - 1), 1.0 / (T - 1)


# ==================== CLASSIFICATION ====================

def classify(a: int, b: int, r: float, R: float) -> CaseLabel:
    """Position of f_{a,r} and g_{b,R} relative to Delta_{a,b}"""
    _check_d_domain(a, b, r, R)
    config = curve_config(a, b, r, R)
    ra = r - a
    Rb = R - b

    # both curves pass below the rectangle
    if config.F < 1 / (a + 1) and config.G < 1 / (b + 1):
        return CaseLabel.V
    if ra >= config.G and Rb < config.F:
        return CaseLabel.I if ra > 1 / b else CaseLabel.II
    if ra < config.G and Rb >= config.F:
        return CaseLabel.III if Rb > 1 / a else CaseLabel.IV

    if ra >= 1 / b:
        return CaseLabel.VI_A if Rb >= 1 / a else CaseLabel.VI_B
    return CaseLabel.VI_C if Rb >= 1 / a else CaseLabel.VI_D


def _corners(a: int, b: int):
    t0, t1 = 1 / (b + 1), 1 / b
    v0, v1 = 1 / (a + 1), 1 / a
    return [(t0, v0), (t1, v0), (t0, v1), (t1, v1)]


def region_nonempty(a: int, b: int, r: float, R: float, direction: Direction) -> bool:
    """
    Whether {D_{n-2} < r, D_n < R} (below) or {D_{n-2} > r, D_n > R} (above)
    meets Delta_{a,b} in a set of positive measure
    """
    _check_d_domain(a, b, r, R)
    direction = Direction(direction)

    # both conditions are open and the curves decrease, so a corner decides
    for t, v in _corners(a, b):
        f = f_curve(a, r, t)
        g = g_curve(b, R, t)
        if direction is Direction.BELOW and v < f and v < g:
            return True
        if direction is Direction.ABOVE and v > f and v > g:
            return True
    return False


def extremal_point(a: int, b: int, r: float, R: float, direction: Direction) -> Tuple[float, float]:
    """The point (t_n, v_n) of Delta_{a,b} at which the sharp bound is attained"""
    direction = Direction(direction)
    label = classify(a, b, r, R)
    config = curve_config(a, b, r, R)
    intersection = (config.S, float(f_curve(a, r, config.S)))

    if direction is Direction.BELOW:
        if not region_nonempty(a, b, r, R, direction):
            raise EmptyRegionError(f"no point of Delta_{a},{b} has D_(n-2) < {r} and D_n < {R}")
        if label.family == 'i_ii':
            return 1 / (b + 1), R - b
        if label.family == 'iii_iv':
            return r - a, 1 / (a + 1)
        return intersection

    if label.family == 'i_ii':
        return 1 / (b + 1), config.F
    if label.family == 'iii_iv':
        return config.G, 1 / (a + 1)
    if label is CaseLabel.V:
        return 1 / (b + 1), 1 / (a + 1)
    return intersection


# ==================== D BOUNDS ====================

def lower_bound_D(a: int, b: int, r: float, R: float) -> BoundResult:
    """If D_{n-2} < r and D_n < R then D_{n-1} > value"""
    label = classify(a, b, r, R)
    if not region_nonempty(a, b, r, R, Direction.BELOW):
        raise EmptyRegionError(f"no point of Delta_{a},{b} has D_(n-2) < {r} and D_n < {R}")

    tong = m_tong(a, b, r, R)
    if label.family == 'i_ii':
        case, value = 1, (b + 1) / (R - b)
    elif label.family == 'iii_iv':
        case, value = 2, (a + 1) / (r - a)
    else:
        case, value = 3, tong

    logger.debug(f"lower_D a={a} b={b} r={r} R={R}: ({label.value}) case {case} -> {value:.6f}")
    return BoundResult(value=value, kind=BoundKind.LOWER_D, theorem_case=case,
                       case_label=label, tong_value=tong, a=a, b=b, r=r, R=R)


def upper_bound_D(a: int, b: int, r: float, R: float) -> BoundResult:
    """If D_{n-2} > r and D_n > R then D_{n-1} < value"""
    label = classify(a, b, r, R)
    config = curve_config(a, b, r, R)
    tong = m_tong(a, b, r, R)

    if label.family == 'i_ii':
        case, value = 1, (b + 1) / config.F
    elif label.family == 'iii_iv':
        case, value = 2, (a + 1) / config.G
    elif label is CaseLabel.V:
        case, value = 3, float((a + 1) * (b + 1))
    else:
        case, value = 4, tong

    logger.debug(f"upper_D a={a} b={b} r={r} R={R}: ({label.value}) case {case} -> {value:.6f}")
    return BoundResult(value=value, kind=BoundKind.UPPER_D, theorem_case=case,
                       case_label=label, tong_value=tong, a=a, b=b, r=r, R=R)


# ==================== C BOUNDS ====================

def c_constants(a: int, b: int, t: float, T: float) -> Dict[str, float]:
    """F', G', L' of the C theorems"""
    F_prime = (b + 1) / ((a * b + a + 1) * t - 1)
    G_prime = (a + 1) / ((a * b + b + 1) * T - 1)
    L_prime = t + T + a * b * t * T - 2
    return {'F_prime': F_prime, 'G_prime': G_prime, 'L_prime': L_prime}


def _c_intersection_value(L_prime: float, t: float, T: float) -> float:
    # 1 + (L' - sqrt(L'^2 - 4xy)) / (2xy), rationalized
    xy = (t - 1) * (T - 1)
    return 1 + 2 / (L_prime + math.sqrt(L_prime * L_prime - 4 * xy))


def tong_K(a: int, b: int, t: float, T: float) -> float:
    """
    Tong's K: claimed lower bound for C_{n-1} when C_{n-2} < t and C_n < T,
    and upper bound when C_{n-2} > t and C_n > T. The first claim fails
    whenever K >= 2.
    """
    if not (t > 1 and T > 1):
        raise ParameterDomainError(f"t and T must exceed 1, got t={t}, T={T}")
    x = 1 / (t - 1) + 1 / (T - 1) + a * b * t * T
    return 0.5 * (x + math.sqrt(x * x - 4 / ((t - 1) * (T - 1))))


def upper_bound_C(a: int, b: int, t: float, T: float) -> BoundResult:
    """If C_{n-2} > t and C_n > T then C_{n-1} < value"""
    r, R = _c_to_d(t, T)
    label = classify(a, b, r, R)
    if not region_nonempty(a, b, r, R, Direction.BELOW):
        raise EmptyRegionError(f"no point of Delta_{a},{b} has C_(n-2) > {t} and C_n > {T}")

    constants = c_constants(a, b, t, T)
    if label.family == 'i_ii':
        case, value = 1, T / ((b + 1) * (T - 1))
    elif label.family == 'iii_iv':
        case, value = 2, t / ((a + 1) * (t - 1))
    else:
        case, value = 3, _c_intersection_value(constants['L_prime'], t, T)

    extras = {'t': t, 'T': T, **constants}
    return BoundResult(value=value, kind=BoundKind.UPPER_C, theorem_case=case,
                       case_label=label, tong_value=tong_K(a, b, t, T),
                       a=a, b=b, r=r, R=R, extras=extras)


@functools.lru_cache(maxsize=None)
def _note_lower_c_case_two():
    logger.warning("lower C bound: the reference states case 2 with the same condition as case 1; "
                   "using 1/(t-1) - a < G' and 1/(T-1) - b >= F' instead")


def lower_bound_C(a: int, b: int, t: float, T: float) -> BoundResult:
    """If C_{n-2} < t and C_n < T then C_{n-1} > value"""
    _note_lower_c_case_two()

    r, R = _c_to_d(t, T)
    label = classify(a, b, r, R)
    constants = c_constants(a, b, t, T)

    if label.family == 'i_ii':
        case, value = 1, 1 + constants['F_prime'] / (b + 1)
    elif label.family == 'iii_iv':
        case, value = 2, 1 + constants['G_prime'] / (a + 1)
    elif label is CaseLabel.V:
        case, value = 3, 1 + 1 / ((a + 1) * (b + 1))
    else:
        case, value = 4, _c_intersection_value(constants['L_prime'], t, T)

    extras = {'t': t, 'T': T, **constants}
    return BoundResult(value=value, kind=BoundKind.LOWER_C, theorem_case=case,
                       case_label=label, tong_value=tong_K(a, b, t, T),
                       a=a, b=b, r=r, R=R, extras=extras)


# ==================== WITNESSES ====================

def _candidate(a: int, b: int, r: float, R: float, direction: Direction,
               label: CaseLabel, point: Tuple[float, float], step: float) -> Optional[Tuple[float, float]]:
    """A float point of the hypothesis region at distance ~step from the extremal point"""
    t_lo, t_hi = 1 / (b + 1), 1 / b
    v_lo, v_hi = 1 / (a + 1), 1 / a

    if direction is Direction.BELOW:
        shift = {'i_ii': 1.0, 'iii_iv': -1.0}.get(label.family, 0.0)
        t = point[0] + shift * step
        if not t_lo < t < t_hi:
            return None
        ceiling = min(f_curve(a, r, t), g_curve(b, R, t), v_hi)
        v = ceiling - min(step, (ceiling - v_lo) / 2)
    else:
        t = point[0] + step
        if not t_lo < t < t_hi:
            return None
        floor = max(f_curve(a, r, t), g_curve(b, R, t), v_lo)
        v = floor + min(step, (v_hi - floor) / 2)

    if not v_lo < v < v_hi:
        return None
    return t, v


def _assemble(t: Fraction, v: Fraction) -> Tuple[DigitSequence, int]:
    """x with t_n = t and v_n = v: the digits of v reversed, then those of t"""
    past = expand(v).digits
    future = expand(t).digits
    digits = list(reversed(past)) + list(future)
    return normalize(0, digits), len(past)


def witness(a: int, b: int, r: float, R: float, direction: Direction,
            eps: float = 1e-4) -> Tuple[DigitSequence, int]:
    """
    An exact rational x and index n with a_n = a, a_{n+1} = b whose
    neighbouring coefficients satisfy the hypotheses of the direction and
    |D_{n-1} - bound| < eps * bound. Every condition is checked on Fractions.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    direction = Direction(direction)
    bound = lower_bound_D(a, b, r, R) if direction is Direction.BELOW else upper_bound_D(a, b, r, R)
    point = extremal_point(a, b, r, R, direction)
    exact_r, exact_R = Fraction(r), Fraction(R)

    step = eps / (4 * (a + b + 2))
    for _ in range(WITNESS_MAX_REFINEMENTS):
        if step < WITNESS_MIN_STEP:
            break
        candidate = _candidate(a, b, r, R, direction, bound.case_label, point, step)
        step /= 2
        if candidate is None:
            continue

        x, n = _assemble(Fraction(candidate[0]), Fraction(candidate[1]))
        if x.digit(n) != a or x.digit(n + 1) != b:
            continue
        triple = coefficients(x, n)
        if triple.d_prev is None or triple.d_next is None:
            continue
        if direction is Direction.BELOW:
            hypotheses = triple.d_prev < exact_r and triple.d_next < exact_R
        else:
            hypotheses = triple.d_prev > exact_r and triple.d_next > exact_R
        if hypotheses and abs(float(triple.d) - bound.value) < eps * bound.value:
            logger.debug(f"witness a={a} b={b} {direction.value}: D={float(triple.d):.10f} "
                         f"bound={bound.value:.10f} digits={len(x)}")
            return x, n

    raise UnreachableEpsError(
        f"could not reach relative eps={eps} for a={a} b={b} r={r} R={R} ({direction.value})")
