"""
Natural Extension
=================
Geometry of the natural extension of the Gauss map: the maps T and its
planar extension on Omega = [0,1) x [0,1], the invariant density, the
rectangles Delta_{a,b}, the curves f_{a,r} and g_{b,R} and M_Tong
"""

import json
import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Dict, List, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

LOG2 = float(np.log(2.0))

Number = Union[Fraction, int, float]
Box = Tuple[float, float, float, float]  # (t0, t1, v0, v1)


class FixedPointError(ValueError):
    """The extension map is undefined on the line t = 0"""


def _is_exact(value) -> bool:
    return isinstance(value, (Fraction, int)) and not isinstance(value, bool)


@dataclass(frozen=True)
class OrbitPoint:
    t: Number
    v: Number

    def __post_init__(self):
        if not (0 <= self.t < 1 and 0 <= self.v <= 1):
            raise ValueError(f"({self.t}, {self.v}) is not a point of Omega")

    @property
    def exact(self) -> bool:
        return _is_exact(self.t) and _is_exact(self.v)

    def as_float(self) -> Tuple[float, float]:
        return float(self.t), float(self.v)


@dataclass(frozen=True)
class Rectangle:
    """Delta_{a,b} = [1/(b+1), 1/b) x [1/(a+1), 1/a): a_n = a, a_{n+1} = b"""
    a: int
    b: int

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ValueError(f"rectangle digits must be positive, got a={self.a}, b={self.b}")

    @property
    def t_range(self) -> Tuple[Fraction, Fraction]:
        return Fraction(1, self.b + 1), Fraction(1, self.b)

    @property
    def v_range(self) -> Tuple[Fraction, Fraction]:
        return Fraction(1, self.a + 1), Fraction(1, self.a)

    def contains(self, p: OrbitPoint) -> bool:
        t0, t1 = self.t_range
        v0, v1 = self.v_range
        return t0 <= p.t < t1 and v0 <= p.v < v1

    def measure(self) -> float:
        t0, t1 = self.t_range
        v0, v1 = self.v_range
        return rectangle_measure(float(t0), float(t1), float(v0), float(v1))


@dataclass(frozen=True)
class CurveConfig:
    """Derived quantities of f_{a,r} and g_{b,R} on Delta_{a,b}"""
    a: int
    b: int
    r: float
    R: float
    F: float
    G: float
    G1: float
    S: float
    w: float
    L: float

    def to_dict(self) -> Dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# ==================== MAPS ====================

def gauss_map(x: Number) -> Number:
    """T(x) = {1/x}, T(0) = 0"""
    if x == 0:
        return x
    inverse = Fraction(1) / x if _is_exact(x) else 1.0 / x
    return inverse - math.floor(inverse)


def ext_map(p: OrbitPoint) -> OrbitPoint:
    """(t, v) -> ({1/t}, 1/(a_1(t) + v)) with a_1(t) = floor(1/t)"""
    if p.t == 0:
        raise FixedPointError("the extension map is undefined at t = 0")
    one = Fraction(1) if p.exact else 1.0
    inverse = one / p.t
    digit = math.floor(inverse)
    return OrbitPoint(inverse - digit, one / (digit + p.v))


def orbit(x: Number, n: int) -> List[OrbitPoint]:
    """(x, 0), T(x, 0), ..., up to n steps; stops early if t hits 0"""
    point = OrbitPoint(x, Fraction(0) if _is_exact(x) else 0.0)
    points = [point]
    for _ in range(n):
        if point.t == 0:
            break
        point = ext_map(point)
        points.append(point)
    return points


def rectangle_of(p: OrbitPoint) -> Rectangle:
    if p.t == 0 or p.v == 0:
        raise ValueError("points on the axes belong to no rectangle")
    return Rectangle(a=math.floor(1 / p.v), b=math.floor(1 / p.t))


# ==================== DENSITY / MEASURE ====================

def density_tv(t, v):
    """Invariant density 1/(log 2 (1 + t v)^2); works elementwise on arrays"""
    return 1.0 / (LOG2 * (1.0 + t * v) ** 2)


def density(p: OrbitPoint) -> float:
    t, v = p.as_float()
    return float(density_tv(t, v))


def rectangle_measure(t0: float, t1: float, v0: float, v1: float) -> float:
    """Invariant measure of [t0,t1] x [v0,v1]; log(1+tv) is a mixed antiderivative of the density"""
    return (math.log1p(t1 * v1) - math.log1p(t0 * v1) - math.log1p(t1 * v0) + math.log1p(t0 * v0)) / LOG2


def preimage_boxes(box: Box, max_digit: int = 10_000) -> Tuple[List[Box], float]:
    """
    The inverse image of a box under the extension map, one box per digit branch

    Returns (boxes, tail_bound). Branches beyond max_digit are dropped; their
    total measure is at most tail_bound, which is nonzero only when such
    branches meet the box.
    """
    t0, t1, v0, v1 = box
    boxes = []
    k_min = max(1, math.floor(1.0 / v1 - 1.0)) if v1 > 0 else max_digit + 1
    k_max = max_digit if v0 == 0 else min(max_digit, math.floor(1.0 / v0))
    for k in range(k_min, k_max + 1):
        lo = max(0.0, 1.0 / v1 - k)
        hi = 1.0 if v0 == 0 else min(1.0, 1.0 / v0 - k)
        if lo < hi:
            boxes.append((1.0 / (k + t1), 1.0 / (k + t0), lo, hi))

    tail_bound = 0.0
    if v0 == 0 or math.floor(1.0 / v0) > max_digit:
        tail_bound = math.log1p(1.0 / (max_digit + 1)) / LOG2
    return boxes, tail_bound


# ==================== CURVES ====================

def f_curve(a: int, r: float, t):
    """D_{n-2} < r  <=>  v < f_{a,r}(t)"""
    return r / (a * (r + 1) + t)


def g_curve(b: int, R: float, t):
    """D_n < R  <=>  v < g_{b,R}(t)"""
    if np.any(np.asarray(t) <= 0):
        raise ValueError("g_{b,R} is only defined for t > 0")
    return R / t - b * (R + 1)


def d_on_f(a: int, r: float, t: float) -> float:
    """D_{n-1} along the graph of f_{a,r}; decreasing in t"""
    return (a * (r + 1) + t) / (r * t)


def d_on_g(b: int, R: float, t: float) -> float:
    """D_{n-1} along the graph of g_{b,R}; increasing in t"""
    return 1.0 / (R - b * (R + 1) * t)


def curve_config(a: int, b: int, r: float, R: float) -> CurveConfig:
    """
    F = f(1/(b+1)), G with g(G) = 1/(a+1), G1 with g(G1) = 1/a, and the
    intersection abscissa S of the two curves
    """
    if r <= 1 or R <= 1:
        raise ValueError(f"r and R must exceed 1, got r={r}, R={R}")
    F = r * (b + 1) / (a * (b + 1) * (r + 1) + 1)
    G = R * (a + 1) / ((a + 1) * b * (R + 1) + 1)
    G1 = R * a / (a * b * (R + 1) + 1)

    L = a * b * (r + 1) * (R + 1)
    shifted = L + r - R
    w = math.sqrt(4 * L * R + shifted * shifted)
    # (w - shifted)(w + shifted) = 4LR; use whichever side avoids cancellation
    if shifted >= 0:
        S = 2 * a * (r + 1) * R / (w + shifted)
    else:
        S = (w - shifted) / (2 * b * (R + 1))
    return CurveConfig(a=a, b=b, r=r, R=R, F=F, G=G, G1=G1, S=S, w=w, L=L)


def m_tong(a: int, b: int, r: float, R: float) -> float:
    """Tong's bound; equals D_{n-1} at the intersection point of f_{a,r} and g_{b,R}"""
    config = curve_config(a, b, r, R)
    return 0.5 * (1 / r + 1 / R + (config.L + config.w) / (R * r))
