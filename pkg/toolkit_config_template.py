"""
Continued Fraction Toolkit Configuration Template
=================================================
Defaults for every run; a key = value file passed with --config overrides
them, and command-line flags override both
"""

CONFIG = {
    # ==================== OUTPUT ====================
    'output': 'json',        # json or csv
    'out': None,             # write results here instead of stdout
    'precision': 6,          # significant digits for CSV floats
    'timestamp': True,       # include a timestamp in the JSON envelope
                             # turn off for byte-identical reruns

    # ==================== NUMERICS ====================
    'r': 2.9,                # threshold for D_{n-2}
    'R': 3.6,                # threshold for D_n
    'tolerance': 1e-9,       # agreement required between closed form and quadrature
    'tail_method': 'telescoping',  # telescoping or integral for the infinite digit tails
    'max_a': 17,             # grid size for bound --table
    'max_b': 42,

    # ==================== MONTE CARLO ====================
    'seed': 0,               # every random stream is spawned from this
    'samples': 1000,         # random rationals (one orbit each)
    'orbit_length': 50,      # orbit points per rational
    'bits': 4096,            # denominator 2^bits; certifies bits // 6 digits

    # ==================== VERIFY ====================
    'eps': 1e-4,             # relative distance of witnesses to the bound
    'random_witnesses': 20,  # randomized sharpness configurations

    # ==================== LOGGING ====================
    'log_level': 'INFO',
    'log_file': None,        # e.g. 'cf_toolkit.log'; stderr only when None
}


# ==================== CONFIGURATION NOTES ====================
"""
SUGGESTED SETTINGS:

1. QUICK CHECK:
   - samples: 100
   - orbit_length: 20
   Runs in seconds; Monte Carlo error around 0.01

2. REFERENCE RUN:
   - samples: 1000
   - orbit_length: 50
   Matches the published sweep size

3. TIGHT MONTE CARLO:
   - samples: 20000
   - orbit_length: 100
   Standard error around 0.001 for the both_greater total
"""
