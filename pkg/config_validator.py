"""
Configuration Validator
========================
Validates run configuration before any computation starts, and reads
key = value configuration files
"""

import logging
from typing import Dict, List, Tuple

from cf_core import BITS_PER_SAFE_DIGIT
from toolkit_config_template import CONFIG

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ('json', 'csv')
TAIL_METHODS = ('telescoping', 'integral')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')


def _coerce(raw: str):
    value = raw.strip()
    lowered = value.lower()
    if lowered in ('true', 'yes', 'on'):
        return True
    if lowered in ('false', 'no', 'off'):
        return False
    if lowered in ('none', 'null', ''):
        return None
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value.strip('"\'')


class RunConfigValidator:
    """Validates toolkit run configuration"""

    @staticmethod
    def load_config_file(path: str) -> Dict:
        """
        Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
        Values become bool, None, int, float or str.
        """
        config = {}
        with open(path, 'r') as f:
            for lineno, line in enumerate(f, 1):
                line = line.split('#', 1)[0].strip()
                if not line:
                    continue
                if '=' not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
                key, value = line.split('=', 1)
                key = key.strip()
                if not key:
                    raise ValueError(f"{path}:{lineno}: empty key")
                config[key] = _coerce(value)
        logger.debug(f"Loaded {len(config)} settings from {path}")
        return config

    @staticmethod
    def validate_config(config: Dict) -> Tuple[bool, List[str]]:
        """
        Validate configuration parameters

        Returns:
            (is_valid, list_of_errors)
        """
        errors = []
        warnings = []

        unknown = sorted(set(config) - set(CONFIG) - {'command'})
        for key in unknown:
            warnings.append(f"unknown setting {key!r} is ignored")

        seed = config.get('seed', 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            errors.append(f"seed must be an integer, got {type(seed)}")
        elif seed < 0:
            errors.append(f"seed must be >= 0, got {seed}")

        bits = config.get('bits', 4096)
        n_safe = None
        if not isinstance(bits, int) or isinstance(bits, bool):
            errors.append(f"bits must be an integer, got {type(bits)}")
        elif bits < 64:
            errors.append(f"bits must be at least 64, got {bits}")
        else:
            n_safe = bits // BITS_PER_SAFE_DIGIT

        samples = config.get('samples', 1000)
        if not isinstance(samples, int) or isinstance(samples, bool):
            errors.append(f"samples must be an integer, got {type(samples)}")
        elif not 1 <= samples <= 10_000_000:
            errors.append(f"samples must be between 1 and 10^7, got {samples}")

        orbit_length = config.get('orbit_length', 50)
        if not isinstance(orbit_length, int) or isinstance(orbit_length, bool):
            errors.append(f"orbit_length must be an integer, got {type(orbit_length)}")
        elif n_safe is not None and not 1 <= orbit_length <= n_safe - 3:
            errors.append(f"orbit_length must be between 1 and {n_safe - 3} for bits={bits}, got {orbit_length}")
        elif isinstance(samples, int) and samples * orbit_length > 5_000_000:
            warnings.append(f"samples x orbit_length = {samples * orbit_length} - sweeps will be slow")

        precision = config.get('precision', 6)
        if not isinstance(precision, int) or isinstance(precision, bool):
            errors.append(f"precision must be an integer, got {type(precision)}")
        elif not 1 <= precision <= 17:
            errors.append(f"precision must be between 1 and 17, got {precision}")

        tolerance = config.get('tolerance', 1e-9)
        if not isinstance(tolerance, (int, float)) or isinstance(tolerance, bool):
            errors.append(f"tolerance must be a number, got {type(tolerance)}")
        elif not 0 < tolerance <= 1e-3:
            errors.append(f"tolerance must be in (0, 1e-3], got {tolerance}")

        eps = config.get('eps', 1e-4)
        if not isinstance(eps, (int, float)) or isinstance(eps, bool):
            errors.append(f"eps must be a number, got {type(eps)}")
        elif not 0 < eps <= 0.1:
            errors.append(f"eps must be in (0, 0.1], got {eps}")
        elif eps < 1e-10:
            warnings.append(f"eps is tiny ({eps}) - witnesses may not reach it in double precision")

        for key in ('r', 'R'):
            value = config.get(key, 2.0)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                errors.append(f"{key} must be a number, got {type(value)}")
            elif value <= 1:
                errors.append(f"{key} must exceed 1, got {value}")

        for key in ('max_a', 'max_b', 'random_witnesses'):
            value = config.get(key, 1)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                errors.append(f"{key} must be a nonnegative integer, got {value!r}")

        output = config.get('output', 'json')
        if output not in OUTPUT_FORMATS:
            errors.append(f"output must be one of {OUTPUT_FORMATS}, got {output!r}")

        tail_method = config.get('tail_method', 'telescoping')
        if tail_method not in TAIL_METHODS:
            errors.append(f"tail_method must be one of {TAIL_METHODS}, got {tail_method!r}")

        log_level = str(config.get('log_level', 'INFO')).upper()
        if log_level not in LOG_LEVELS:
            errors.append(f"log_level must be one of {LOG_LEVELS}, got {config.get('log_level')!r}")

        if 'timestamp' in config and not isinstance(config['timestamp'], bool):
            errors.append(f"timestamp must be True or False, got {type(config['timestamp'])}")

        # Log warnings
        for warning in warnings:
            logger.warning(f"⚠️  Config warning: {warning}")

        is_valid = len(errors) == 0

        if not is_valid:
            for error in errors:
                logger.error(f"❌ Config error: {error}")

        return is_valid, errors

    @staticmethod
    def get_safe_config(config: Dict) -> Dict:
        """
        Return config with defaults for missing values
        """
        safe_config = config.copy()

        for key, default_value in CONFIG.items():
            if safe_config.get(key) is None:
                safe_config[key] = default_value
                if default_value is not None:
                    logger.debug(f"Using default value for {key}: {default_value}")

        return safe_config

    @staticmethod
    def print_config_summary(config: Dict):
        """Log a summary of the configuration"""
        logger.info("=" * 80)
        logger.info("📋 CONFIGURATION SUMMARY")
        logger.info("=" * 80)
        logger.info(f"Command: {config.get('command', '-')}")
        logger.info(f"Thresholds: r={config.get('r')}, R={config.get('R')}")
        logger.info(f"Seed: {config.get('seed')}")
        logger.info(f"Samples x orbit: {config.get('samples')} x {config.get('orbit_length')} ({config.get('bits')} bits)")
        logger.info(f"Tail method: {config.get('tail_method')}")
        logger.info(f"Output: {config.get('output')} -> {config.get('out') or 'stdout'}")
        logger.info("=" * 80)
