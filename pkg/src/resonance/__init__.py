"""Resonance-method lower bounds for character sums with multiplicative coefficients.

The building blocks live in submodules: :mod:`.ntcore` (primes, index
tables), :mod:`.characters`, :mod:`.coefficients`, :mod:`.resonator`,
:mod:`.moments` and :mod:`.experiments` (sweeps and the CLI).
"""

from .characters import all_char_sums, char_sum, eval_char, orthogonality_sum
from .coefficients import CoefficientFunction, coefficient_vector, eval_f, make_coefficients
from .errors import ConfigError, RangeError, ResonanceError, ResourceError
from .moments import (
    MomentReport,
    brute_force_max,
    m1_direct,
    m1_identity,
    m2_direct,
    m2_identity,
    moment_report,
    resonance_lower_bound,
    theory_curve,
    validate_range,
)
from .ntcore import PrimeContext, build_index_table, prime_context, primitive_root, sieve_primes
from .resonator import (
    Resonator,
    ResonatorSpec,
    build_resonator,
    canonical_spec,
    check_lemma_condition,
    quadruple_sum,
    resonator_l2,
)

__version__ = "0.1.0"
