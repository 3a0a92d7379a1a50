"""
Soundness Verification
======================
Checks the sharp bounds against actual expansions:
- orbit sweep over random 4096-bit rationals: Theorem-style lower and
  upper bounds, Borel, the conjugate property, Dirichlet and the corner
  range ab < D_{n-1} <= (a+1)(b+1), all compared exactly
- sharpness: witnesses within eps of each bound
- Tong's C bound against the corrected one
"""

import logging
import math
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from bounds import (BoundResult, Direction, EmptyRegionError, UnreachableEpsError, lower_bound_D,
                    region_nonempty, tong_K, upper_bound_C, upper_bound_D, witness)
from cf_core import GENERIC_BITS, DigitSequence, coefficients, sample_generic_real

logger = logging.getLogger(__name__)

BOUND_TOLERANCE = 1e-9  # relative slack on float bound values
SHARPNESS_CONFIGS = [(17, 29, 2.9, 3.6, Direction.ABOVE), (1, 3, 2.9, 3.6, Direction.BELOW)]


def orbit_quantities(x: DigitSequence, count: int) -> List[Dict]:
    """
    Exact t_n, v_n, Theta_n, q_n for n = 0..count, updated one step at a time
    from the convergent recurrence instead of refolding the tail
    """
    value = x.value
    p_prev, q_prev = 1, 0
    p, q = x.a0, 1
    rows = []
    for n in range(count + 1):
        theta = q * q * abs(value - Fraction(p, q))
        v = Fraction(q_prev, q)
        t = theta / (1 - theta * v)
        rows.append({'n': n, 't': t, 'v': v, 'theta': theta, 'q': q})
        digit = x.digits[n]
        p, p_prev = digit * p + p_prev, p
        q, q_prev = digit * q + q_prev, q
    return rows


class BoundVerifier:
    """Collects violations of the bounds and classical inequalities"""

    def __init__(self, r: float = 2.9, R: float = 3.6):
        self.r = r
        self.R = R
        self.exact_r = Fraction(r)
        self.exact_R = Fraction(R)
        self.issues: List[Dict] = []
        self.findings: List[Dict] = []
        self.counts = {'points': 0, 'lower_checked': 0, 'upper_checked': 0, 'witnesses': 0}
        self.min_slack: Dict[str, float] = {}   # smallest relative gap per (kind, theorem case)
        self._lower_cache: Dict[Tuple[int, int], Optional[BoundResult]] = {}
        self._upper_cache: Dict[Tuple[int, int], BoundResult] = {}

    def add_issue(self, severity: str, check: str, location: str, message: str):
        self.issues.append({
            'severity': severity,
            'check': check,
            'location': location,
            'message': message,
        })

    # ==================== ORBIT SWEEP ====================

    def _lower(self, a: int, b: int) -> Optional[BoundResult]:
        if (a, b) not in self._lower_cache:
            try:
                self._lower_cache[(a, b)] = lower_bound_D(a, b, self.r, self.R)
            except EmptyRegionError:
                self._lower_cache[(a, b)] = None
        return self._lower_cache[(a, b)]

    def _upper(self, a: int, b: int) -> BoundResult:
        if (a, b) not in self._upper_cache:
            self._upper_cache[(a, b)] = upper_bound_D(a, b, self.r, self.R)
        return self._upper_cache[(a, b)]

    def _record_slack(self, kind: str, result: BoundResult, d: float):
        key = f"{kind}:{result.theorem_case}"
        gap = abs(d - result.value) / result.value
        if gap < self.min_slack.get(key, math.inf):
            self.min_slack[key] = gap

    def check_orbit(self, x: DigitSequence, n_points: int, label: str = ''):
        """Every check at indices n = 2 .. n_points + 1 of one expansion"""
        rows = orbit_quantities(x, n_points + 2)
        d = [None] + [1 / (row['t'] * row['v']) for row in rows[1:]]   # d[n] = D_{n-1}
        bracket = x.to_bracket()

        for n in range(2, n_points + 2):
            a, b = x.digit(n), x.digit(n + 1)
            d_prev, d_mid, d_next = d[n - 1], d[n], d[n + 1]
            where = f"{label}:n={n}"
            replay = f"{where} x={bracket}"
            self.counts['points'] += 1

            if not (a * b < d_mid <= (a + 1) * (b + 1)):
                self.add_issue('ERROR', 'corner', replay, f"D_(n-1) = {float(d_mid)} outside ({a * b}, {(a + 1) * (b + 1)}]")

            if d_prev < self.exact_r and d_next < self.exact_R:
                result = self._lower(a, b)
                self.counts['lower_checked'] += 1
                if result is None:
                    self.add_issue('ERROR', 'lower_D', replay, f"hypotheses hold in the empty region of Delta_{a},{b}")
                else:
                    self._record_slack('lower_D', result, float(d_mid))
                    if float(d_mid) <= result.value * (1 - BOUND_TOLERANCE):
                        self.add_issue('ERROR', 'lower_D', replay, f"D_(n-1) = {float(d_mid)} <= {result.value}")

            if d_prev > self.exact_r and d_next > self.exact_R:
                result = self._upper(a, b)
                self.counts['upper_checked'] += 1
                self._record_slack('upper_D', result, float(d_mid))
                if float(d_mid) >= result.value * (1 + BOUND_TOLERANCE):
                    self.add_issue('ERROR', 'upper_D', replay, f"D_(n-1) = {float(d_mid)} >= {result.value}")

            thetas = [rows[k]['theta'] for k in (n - 1, n, n + 1)]
            low, high = min(thetas), max(thetas)
            if 5 * low * low >= 1:
                self.add_issue('ERROR', 'borel', replay, f"min Theta = {float(low)} >= 1/sqrt(5)")
            if not (low * low * (b * b + 4) < 1 < high * high * (b * b + 4)):
                self.add_issue('ERROR', 'conjugate', replay,
                               f"1/sqrt({b * b + 4}) not strictly between {float(low)} and {float(high)}")
            if rows[n]['theta'] >= Fraction(rows[n]['q'], rows[n + 1]['q']):
                self.add_issue('ERROR', 'dirichlet', replay, "|x - p_n/q_n| >= 1/(q_n q_(n+1))")

    def sweep(self, n_samples: int, n_points: int, seed: int, bits: int = GENERIC_BITS):
        """Orbit checks over n_samples independent random rationals"""
        streams = np.random.SeedSequence(seed).spawn(n_samples)
        for i, stream in enumerate(streams):
            x = sample_generic_real(np.random.default_rng(stream), bits)
            if n_points + 3 > x.n_safe:
                self.add_issue('WARNING', 'sweep', f"sample {i}", f"only {x.n_safe} certified digits")
                continue
            self.check_orbit(x, n_points, label=f"sample {i}")
        logger.info(f"🔍 Orbit sweep: {self.counts['points']} points, "
                    f"{self.counts['lower_checked']} lower / {self.counts['upper_checked']} upper checks")

    # ==================== SHARPNESS ====================

    def check_sharpness(self, a: int, b: int, r: float, R: float, direction: Direction, eps: float):
        """A witness exists within eps and satisfies its hypotheses exactly"""
        direction = Direction(direction)
        where = f"a={a} b={b} r={r} R={R} {direction.value}"
        try:
            x, n = witness(a, b, r, R, direction, eps)
        except UnreachableEpsError as e:
            self.add_issue('ERROR', 'sharpness', where, str(e))
            return None
        except EmptyRegionError:
            self.add_issue('WARNING', 'sharpness', where, "hypothesis region is empty")
            return None

        triple = coefficients(x, n)
        bound = (lower_bound_D if direction is Direction.BELOW else upper_bound_D)(a, b, r, R).value
        if direction is Direction.BELOW:
            holds = triple.d_prev < Fraction(r) and triple.d_next < Fraction(R)
        else:
            holds = triple.d_prev > Fraction(r) and triple.d_next > Fraction(R)
        if not holds:
            self.add_issue('ERROR', 'sharpness', where, "witness violates its hypotheses")
        if abs(float(triple.d) - bound) >= eps * bound:
            self.add_issue('ERROR', 'sharpness', where, f"witness D = {float(triple.d)} not within eps of {bound}")

        self.counts['witnesses'] += 1
        self.findings.append({'check': 'sharpness', 'location': where, 'bound': bound,
                              'witness_d': float(triple.d), 'index': n, 'digits': len(x)})
        return x, n

    def random_sharpness(self, count: int, eps: float, seed: int):
        rng = np.random.default_rng(seed)
        for _ in range(count):
            a, b = (int(k) for k in rng.integers(1, 8, size=2))
            r, R = (float(k) for k in np.round(rng.uniform(1.2, 12.0, size=2), 3))
            direction = Direction.BELOW if region_nonempty(a, b, r, R, Direction.BELOW) and rng.random() < 0.5 \
                else Direction.ABOVE
            self.check_sharpness(a, b, r, R, direction, eps)

    # ==================== TONG'S C BOUND ====================

    def check_tong_counterexample(self, a: int = 1, b: int = 1, t: float = 1.1, T: float = 1.4):
        """
        Under C_{n-2} < t and C_n < T, Tong's K claims C_{n-1} > K; every C
        lies in (1, 2), so K >= 2 is impossible
        """
        k_value = tong_K(a, b, t, T)
        corrected = upper_bound_C(a, b, t, T)
        self.findings.append({'check': 'tong_C', 'tong_K': k_value, 'corrected_upper_C': corrected.value,
                              'theorem_case': corrected.theorem_case, **corrected.extras})
        if k_value < 2:
            self.add_issue('WARNING', 'tong_C', f"a={a} b={b} t={t} T={T}",
                           f"Tong's K = {k_value} is consistent here")
        if not 1 < corrected.value < 2:
            self.add_issue('ERROR', 'tong_C', f"a={a} b={b} t={t} T={T}",
                           f"corrected bound {corrected.value} outside (1, 2)")
        logger.info(f"Tong's K = {k_value:.4f} vs corrected C_(n-1) < {corrected.value:.4f}")

    # ==================== SUMMARY ====================

    @property
    def errors(self) -> List[Dict]:
        return [i for i in self.issues if i['severity'] == 'ERROR']

    @property
    def warnings(self) -> List[Dict]:
        return [i for i in self.issues if i['severity'] == 'WARNING']

    def summary(self) -> Dict:
        return {
            'success': not self.errors,
            'counts': dict(self.counts),
            'min_slack': dict(sorted(self.min_slack.items())),
            'errors': self.errors,
            'warnings': self.warnings,
            'findings': self.findings,
        }

    def log_summary(self):
        logger.info("=" * 80)
        logger.info("VERIFICATION SUMMARY")
        logger.info("=" * 80)
        for key, gap in sorted(self.min_slack.items()):
            logger.info(f"  closest approach {key}: {gap:.3e}")
        logger.info(f"Total Issues: {len(self.issues)}  (errors {len(self.errors)}, warnings {len(self.warnings)})")
        for issue in self.errors:
            logger.error(f"🔴 {issue['check']} {issue['location']} - {issue['message']}")
        for issue in self.warnings[:10]:
            logger.warning(f"🟡 {issue['check']} {issue['location']} - {issue['message']}")
        if len(self.warnings) > 10:
            logger.warning(f"  ... and {len(self.warnings) - 10} more warnings")
        if not self.issues:
            logger.info("✅ NO ISSUES FOUND")
        logger.info("=" * 80)


def run_verification(n_samples: int, n_points: int, seed: int, eps: float = 1e-4,
                     r: float = 2.9, R: float = 3.6, sharpness: Iterable = SHARPNESS_CONFIGS,
                     random_witnesses: int = 20, bits: int = GENERIC_BITS) -> BoundVerifier:
    verifier = BoundVerifier(r, R)
    verifier.sweep(n_samples, n_points, seed, bits)
    for a, b, rr, RR, direction in sharpness:
        verifier.check_sharpness(a, b, rr, RR, direction, eps)
    verifier.random_sharpness(random_witnesses, eps, seed)
    verifier.check_tong_counterexample()
    verifier.log_summary()
    return verifier
