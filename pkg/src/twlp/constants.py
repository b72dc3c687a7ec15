"""Empirical constants shipped with the package.

Each limit is the largest value measured on a calibration corpus (seeds
disjoint from the acceptance seed) times ``HEADROOM``, rounded up.
``demos/calibrate_constants.py`` regenerates the measurements.
"""

HEADROOM = 1.25

# max over 5 seeds x 100 random open sets at 32^2 and 64^2 of
# covering_sum / |omega|, keyed by (type, kappa)
COVERING_LIMITS = {
    ("I", 0.5): 3.5,
    ("I", 1.0): 2.4,
    ("I", 2.0): 1.7,
    ("II", 0.5): 3.4,
    ("II", 1.0): 2.4,
    ("II", 2.0): 1.7,
    ("III", 0.5): 3.2,
    ("III", 1.0): 2.4,
    ("III", 2.0): 1.7,
    ("IV", 0.5): 3.4,
    ("IV", 1.0): 2.4,
    ("IV", 2.0): 1.7,
    ("V", 0.5): 3.2,
    ("V", 1.0): 2.4,
    ("V", 2.0): 1.7,
}

# worst budget ratio of a normalized atom; normalized fixtures reach 1 in the
# first three, decomposed atoms stay below 1e-3
ATOM_LIMITS = {
    "A2": 1.3,
    "A3": 1.3,
    "cancel1": 1.3,
    "cancel2": 1.3,
}

# sum |lambda| / ||S(f)||_1 and sum 2^k |omega~_k| / ||S(f)||_1 over 30
# in-band 64^2 signals (measured maxima 1.71 and 7.03)
LAMBDA_RATIO_LIMIT = 2.2
LAYER_CAKE_LIMIT = 8.8

# sup of m_iterated / m_strong(m_hl) over 20 noise and smooth 64^2 signals
# per seed (measured 1.71)
DOMINATION_BOUND = 2.2
