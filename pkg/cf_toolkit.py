"""
Continued Fraction Toolkit - command line
==========================================
Reproducible runs of every operation:

    python cf_toolkit.py expand --x 355/113
    python cf_toolkit.py bound --kind upper_d --a 1 --b 3 --r 2.9 --R 3.6
    python cf_toolkit.py bound --table --r 2.9 --R 3.6 --output csv
    python cf_toolkit.py freq --r 2.9 --R 3.6 --event greater --method closed
    python cf_toolkit.py verify --samples 1000 --seed 1

Results go to stdout (or --out), logs to stderr.
Exit codes: 0 success, 2 parse/usage/config, 3 empty region, 4 verification failure.
"""

import argparse
import io
import json
import logging
import math
import sys
from datetime import datetime, timezone
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from bounds import (BoundKind, Direction, EmptyRegionError, extremal_point, lower_bound_C,
                    lower_bound_D, upper_bound_C, upper_bound_D)
from cf_core import CFError, RationalParseError, coefficient_table, expand, parse_rational, rational_to_str
from config_validator import RunConfigValidator
from frequency import (Event, Method, compare_reference_table, dist_H, dist_H_quadrature, density_h,
                       monte_carlo_frequency, total_frequency, truncated_mean)
from grid_scanner import REFERENCE_R, REFERENCE_RR, BoundGridScanner
from soundness_verifier import SHARPNESS_CONFIGS, BoundVerifier, run_verification
from toolkit_config_template import CONFIG

logger = logging.getLogger('cf_toolkit')

TOOL_VERSION = '1.0.0'

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_EMPTY_REGION = 3
EXIT_VERIFICATION_FAILED = 4

EVENT_ALIASES = {
    'greater': Event.BOTH_GREATER,
    'less': Event.BOTH_LESS,
    **{event.value: event for event in Event},
}
METHOD_ALIASES = {
    'closed': Method.CLOSED_FORM,
    'quadrature': Method.QUADRATURE,
    'mc': Method.MONTE_CARLO,
}

# flag destination -> CONFIG key
TUNABLE_FLAGS = {
    'output': 'output',
    'out': 'out',
    'precision': 'precision',
    'r': 'r',
    'R': 'R',
    'tolerance': 'tolerance',
    'tail_method': 'tail_method',
    'max_a': 'max_a',
    'max_b': 'max_b',
    'seed': 'seed',
    'samples': 'samples',
    'orbit': 'orbit_length',
    'bits': 'bits',
    'eps': 'eps',
    'random_witnesses': 'random_witnesses',
    'log_level': 'log_level',
    'log_file': 'log_file',
}


class UsageError(ValueError):
    """Flags that parse but do not make a runnable command"""


# ==================== SETUP ====================

def setup_logging(level: str = 'INFO', log_file: Optional[str] = None):
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--output', '--format', dest='output', choices=('json', 'csv'))
    common.add_argument('--out', help='write results to this file instead of stdout')
    common.add_argument('--precision', type=int, help='significant digits for CSV floats')
    common.add_argument('--no-timestamp', dest='timestamp', action='store_false', default=None)
    common.add_argument('--log-level', choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'), type=str.upper)
    common.add_argument('--log-file')
    common.add_argument('--config', help='key = value file with defaults')
    common.add_argument('--r', type=float, help='threshold for D_{n-2}')
    common.add_argument('--R', type=float, help='threshold for D_n')

    parser = argparse.ArgumentParser(prog='cf_toolkit', description='Exact continued fraction toolkit')
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('expand', parents=[common], help='digits, convergents and coefficients of x')
    p.add_argument('--x', required=True, help='p/q, integer or decimal string')
    p.add_argument('--n', type=int, default=10_000, help='maximum number of digits')

    p = commands.add_parser('bound', parents=[common], help='sharp bounds on D_{n-1} or C_{n-1}')
    p.add_argument('--kind', type=str.lower, choices=[k.value.lower() for k in BoundKind],
                   default=BoundKind.UPPER_D.value.lower())
    p.add_argument('--a', type=int)
    p.add_argument('--b', type=int)
    p.add_argument('--t', type=float, help='threshold for C_{n-2}')
    p.add_argument('--T', type=float, help='threshold for C_n')
    p.add_argument('--table', action='store_true', help='sweep a = 1..max_a, b = 1..max_b')
    p.add_argument('--max-a', dest='max_a', type=int)
    p.add_argument('--max-b', dest='max_b', type=int)

    p = commands.add_parser('freq', parents=[common], help='asymptotic frequencies')
    p.add_argument('--event', choices=sorted(EVENT_ALIASES), default='greater')
    p.add_argument('--method', choices=sorted(METHOD_ALIASES), default='closed')
    p.add_argument('--tail-method', dest='tail_method', choices=('telescoping', 'integral'))
    p.add_argument('--samples', type=int)
    p.add_argument('--orbit', type=int)
    p.add_argument('--seed', type=int)
    p.add_argument('--bits', type=int)
    p.add_argument('--tolerance', type=float)
    p.add_argument('--dist', type=float, nargs='+', metavar='R', help='H(R) and h(R) at each value')
    p.add_argument('--mean', type=float, nargs='+', metavar='X', help='truncated mean of D_n up to X')
    p.add_argument('--compare', action='store_true', help='closed form, quadrature and Monte Carlo side by side')
    p.add_argument('--reference', action='store_true', help='compare with the published table')

    p = commands.add_parser('verify', parents=[common], help='soundness and sharpness checks')
    p.add_argument('--samples', type=int)
    p.add_argument('--orbit', type=int)
    p.add_argument('--seed', type=int)
    p.add_argument('--bits', type=int)
    p.add_argument('--eps', type=float)
    p.add_argument('--random-witnesses', dest='random_witnesses', type=int)
    p.add_argument('--sharpness', action='store_true', help='witness search only')
    p.add_argument('--a', type=int)
    p.add_argument('--b', type=int)
    p.add_argument('--direction', choices=[d.value for d in Direction], default=Direction.ABOVE.value)
    p.add_argument('--counterexample-tong-c', dest='counterexample', action='store_true')
    p.add_argument('--t', type=float, default=1.1)
    p.add_argument('--T', type=float, default=1.4)
    return parser


def resolve_config(args: argparse.Namespace) -> Dict:
    """CONFIG, overridden by the --config file, overridden by flags"""
    config = dict(CONFIG)
    if args.config:
        config.update(RunConfigValidator.load_config_file(args.config))
    for dest, key in TUNABLE_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            config[key] = value
    if args.timestamp is not None:
        config['timestamp'] = args.timestamp
    config['log_level'] = str(config.get('log_level') or 'INFO').upper()
    config['command'] = args.command
    return config


def _parameters(args: argparse.Namespace) -> Dict:
    """Command-specific flags recorded next to the config"""
    skip = set(TUNABLE_FLAGS) | {'config', 'timestamp', 'command'}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ==================== OUTPUT ====================

def _native(obj):
    """JSON-safe copy: numpy scalars unwrapped, NaN to null, Fractions as p/q"""
    if isinstance(obj, dict):
        return {str(k): _native(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_native(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, Fraction):
        return rational_to_str(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def render(results, frame: Optional[pd.DataFrame], config: Dict, parameters: Dict) -> str:
    if config['output'] == 'csv':
        if frame is None:
            frame = pd.json_normalize(_native(results))
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, float_format=f"%.{config['precision']}g", lineterminator='\n')
        return buffer.getvalue()

    envelope = {
        'tool_version': TOOL_VERSION,
        'config': {**config, 'parameters': parameters},
        'results': results,
    }
    if config.get('timestamp', True):
        envelope['timestamp'] = datetime.now(timezone.utc).isoformat()
    return json.dumps(_native(envelope), indent=2) + '\n'


def write_output(text: str, out: Optional[str]):
    if out:
        with open(out, 'w') as f:
            f.write(text)
        logger.info(f"💾 Results written to {out}")
    else:
        sys.stdout.write(text)


# ==================== COMMANDS ====================

CommandResult = Tuple[object, Optional[pd.DataFrame], int]


def cmd_expand(args: argparse.Namespace, config: Dict) -> CommandResult:
    if args.n < 1:
        raise UsageError(f"--n must be positive, got {args.n}")
    value = parse_rational(args.x)
    digits = expand(value, max_digits=args.n)
    table = coefficient_table(digits)

    rows = []
    for row in table:
        rows.append({
            'n': row['n'],
            'a': row['a'],
            'p': row['p'],
            'q': row['q'],
            'theta': float(row['theta']),
            'c': None if row['c'] is None else float(row['c']),
            'd': None if row['d'] is None else float(row['d']),
        })
    results = {
        'x': rational_to_str(value),
        'digits': digits.to_bracket(),
        'expansion': digits.to_dict(),
        'coefficients': table,
    }
    logger.info(f"{args.x} = [{digits.to_bracket()}] ({digits.exactness.value}, {len(digits)} digits)")
    return results, pd.DataFrame(rows, columns=['n', 'a', 'p', 'q', 'theta', 'c', 'd']), EXIT_OK


def _bound_table(config: Dict, kind: BoundKind) -> pd.DataFrame:
    if kind not in (BoundKind.LOWER_D, BoundKind.UPPER_D):
        raise UsageError("--table sweeps the D bounds only")
    scanner = BoundGridScanner(config['r'], config['R'])
    frame = scanner.scan_grid(range(1, config['max_a'] + 1), range(1, config['max_b'] + 1), kind)

    if kind is BoundKind.UPPER_D and (config['r'], config['R']) == (REFERENCE_R, REFERENCE_RR):
        reference = scanner.compare_reference_table()[
            ['a', 'b', 'reference_case', 'reference_bound', 'bound_delta',
             'reference_tong', 'tong_delta', 'flagged']]
        frame = frame.merge(reference, on=['a', 'b'], how='outer')
        # reference rows outside the requested grid are appended
        missing = frame['case'].isna()
        for index in frame.index[missing]:
            a, b = int(frame.at[index, 'a']), int(frame.at[index, 'b'])
            result = upper_bound_D(a, b, config['r'], config['R'])
            frame.loc[index, ['case', 'theorem_case', 'bound', 'tong_bound', 'improvement']] = [
                result.case_label.value, result.theorem_case, result.value, result.tong_value,
                result.tong_value - result.value]

    top = scanner.get_top_improvements(1)
    if top:
        logger.info(f"📊 Largest improvement over Tong: Delta_{top[0]['a']},{top[0]['b']} "
                    f"by {top[0]['improvement']:.4f}")
    return frame.sort_values(['a', 'b']).reset_index(drop=True)


def cmd_bound(args: argparse.Namespace, config: Dict) -> CommandResult:
    kind = BoundKind(args.kind)
    if args.table:
        frame = _bound_table(config, kind)
        return frame.to_dict(orient='records'), frame, EXIT_OK

    if args.a is None or args.b is None:
        raise UsageError("--a and --b are required unless --table is given")

    try:
        if kind in (BoundKind.LOWER_C, BoundKind.UPPER_C):
            if args.t is None or args.T is None:
                raise UsageError(f"{kind.value} needs --t and --T")
            result = (lower_bound_C if kind is BoundKind.LOWER_C else upper_bound_C)(args.a, args.b, args.t, args.T)
            payload = result.to_dict()
        else:
            r, R = config['r'], config['R']
            if kind is BoundKind.LOWER_D:
                result = lower_bound_D(args.a, args.b, r, R)
                point = extremal_point(args.a, args.b, r, R, Direction.BELOW)
            else:
                result = upper_bound_D(args.a, args.b, r, R)
                point = extremal_point(args.a, args.b, r, R, Direction.ABOVE)
            payload = {**result.to_dict(), 'extremal_point': list(point)}
    except EmptyRegionError as e:
        logger.error(f"❌ {str(e)}")
        payload = {'error': 'empty_region', 'kind': kind.value, 'a': args.a, 'b': args.b, 'message': str(e)}
        return payload, None, EXIT_EMPTY_REGION

    logger.info(f"{kind.value} Delta_{args.a},{args.b} ({payload['case']}, case {payload['theorem_case']}): "
                f"{payload['value']:.6f} vs Tong {payload['tong_value']:.6f}")
    return payload, None, EXIT_OK


def _dist_frame(values: List[float]) -> pd.DataFrame:
    rows = [{'R': R, 'H': dist_H(R), 'h': density_h(R), 'H_quadrature': dist_H_quadrature(R)} for R in values]
    return pd.DataFrame(rows, columns=['R', 'H', 'h', 'H_quadrature'])


def _mean_frame(values: List[float]) -> pd.DataFrame:
    rows = []
    for X in values:
        mean = truncated_mean(X)
        growth = math.log(X) ** 2 / (2 * math.log(2))
        rows.append({'X': X, 'truncated_mean': mean, 'growth': growth,
                     'ratio': mean / growth if growth > 0 else None})
    return pd.DataFrame(rows, columns=['X', 'truncated_mean', 'growth', 'ratio'])


def _monte_carlo(config: Dict, event: Event):
    return monte_carlo_frequency(config['r'], config['R'], event, config['samples'],
                                 config['orbit_length'], config['seed'], config['bits'])


def cmd_freq(args: argparse.Namespace, config: Dict) -> CommandResult:
    if args.dist or args.mean:
        results = {}
        frames = []
        if args.dist:
            frame = _dist_frame(args.dist)
            results['distribution'] = frame.to_dict(orient='records')
            frames.append(frame)
        if args.mean:
            frame = _mean_frame(args.mean)
            results['truncated_mean'] = frame.to_dict(orient='records')
            frames.append(frame)
        return results, pd.concat(frames, ignore_index=True) if len(frames) > 1 else frames[0], EXIT_OK

    event = EVENT_ALIASES[args.event]
    method = METHOD_ALIASES[args.method]
    r, R = config['r'], config['R']

    if args.reference:
        report = total_frequency(r, R, Event.BOTH_GREATER, config['tail_method'])
        frame = compare_reference_table(report)
        return frame.to_dict(orient='records'), frame, EXIT_OK

    if args.compare:
        closed = total_frequency(r, R, event, config['tail_method']).total
        quadrature = total_frequency(r, R, event, 'integral', Method.QUADRATURE).total
        mc = _monte_carlo(config, event)
        if abs(closed - quadrature) > config['tolerance']:
            logger.warning(f"closed form and quadrature differ by {abs(closed - quadrature):.3e}")
        if mc.stderr and abs(mc.value - closed) > 3 * mc.stderr:
            logger.warning(f"Monte Carlo {mc.value:.5f} is more than 3 sigma from {closed:.5f}")
        frame = pd.DataFrame([
            {'method': Method.CLOSED_FORM.value, 'total': closed, 'stderr': None, 'delta': 0.0},
            {'method': Method.QUADRATURE.value, 'total': quadrature, 'stderr': None, 'delta': quadrature - closed},
            {'method': Method.MONTE_CARLO.value, 'total': mc.value, 'stderr': mc.stderr, 'delta': mc.value - closed},
        ], columns=['method', 'total', 'stderr', 'delta'])
        results = {'event': event.value, 'r': r, 'R': R, 'methods': frame.to_dict(orient='records')}
        return results, frame, EXIT_OK

    if method is Method.MONTE_CARLO:
        measure = _monte_carlo(config, event)
        results = {'event': event.value, 'r': r, 'R': R, 'total': measure.value, 'stderr': measure.stderr,
                   'samples': config['samples'], 'orbit_length': config['orbit_length'], 'seed': config['seed']}
        logger.info(f"📊 {event.value}: {measure.value:.5f} +/- {measure.stderr:.5f} (Monte Carlo)")
        return results, pd.DataFrame([results]), EXIT_OK

    if method is Method.QUADRATURE:
        report = total_frequency(r, R, event, 'integral', Method.QUADRATURE)
    else:
        report = total_frequency(r, R, event, config['tail_method'])
    return report.to_dict(), report.to_frame(), EXIT_OK


def cmd_verify(args: argparse.Namespace, config: Dict) -> CommandResult:
    if args.counterexample:
        verifier = BoundVerifier(config['r'], config['R'])
        verifier.check_tong_counterexample(args.a or 1, args.b or 1, args.t, args.T)
    elif args.sharpness:
        verifier = BoundVerifier(config['r'], config['R'])
        if args.a is not None and args.b is not None:
            targets = [(args.a, args.b, config['r'], config['R'], Direction(args.direction))]
        else:
            targets = SHARPNESS_CONFIGS
        for a, b, r, R, direction in targets:
            found = verifier.check_sharpness(a, b, r, R, direction, config['eps'])
            if found is not None:
                x, n = found
                verifier.findings[-1]['witness'] = x.to_bracket()
    else:
        verifier = run_verification(config['samples'], config['orbit_length'], config['seed'],
                                    eps=config['eps'], r=config['r'], R=config['R'],
                                    random_witnesses=config['random_witnesses'], bits=config['bits'])

    if args.counterexample or args.sharpness:
        verifier.log_summary()
    summary = verifier.summary()
    frame = pd.DataFrame(verifier.issues or verifier.findings)
    return summary, frame, EXIT_OK if summary['success'] else EXIT_VERIFICATION_FAILED


COMMANDS = {
    'expand': cmd_expand,
    'bound': cmd_bound,
    'freq': cmd_freq,
    'verify': cmd_verify,
}


# ==================== MAIN ====================

def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        config = resolve_config(args)
    except (OSError, ValueError) as e:
        setup_logging()
        logger.error(f"❌ Cannot read config: {str(e)}")
        return EXIT_USAGE

    setup_logging(config['log_level'], config.get('log_file'))
    is_valid, errors = RunConfigValidator.validate_config(config)
    if not is_valid:
        logger.error(f"❌ Invalid configuration ({len(errors)} errors)")
        return EXIT_USAGE
    config = RunConfigValidator.get_safe_config(config)
    RunConfigValidator.print_config_summary(config)

    try:
        results, frame, code = COMMANDS[args.command](args, config)
    except RationalParseError as e:
        logger.error(f"❌ {str(e)}")
        return EXIT_USAGE
    except EmptyRegionError as e:
        logger.error(f"❌ {str(e)}")
        return EXIT_EMPTY_REGION
    except (CFError, ValueError) as e:
        logger.error(f"❌ {args.command} failed: {str(e)}")
        return EXIT_USAGE

    write_output(render(results, frame, config, _parameters(args)), config.get('out'))
    return code


if __name__ == "__main__":
    sys.exit(main())
