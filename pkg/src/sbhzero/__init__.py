"""Subharmonic test functions and integral uniqueness criteria for zero sets."""

from .errors import (ConstructionError, DomainError, InsufficientDataError, NumericalInstabilityError,
                     PreconditionError, SbhError, UnsupportedError)
from .green_domains import LevelSet, ModelDomain, green_value, harmonic_measure_center, level_radius
from .profiles import MonotoneDensity, RadialProfile
from .radial_core import (build_profile_from_density, check_convex_of_h, h_inverse, h_transform, invert_point,
                          kelvin_profile, kelvin_value, onesided_derivatives, radial_riesz_measure, riesz_constant)
from .tails import DivergenceVerdict, Tail
from .testfns import (ClosedBall, EnvelopeFunction, ExtendedTestFunction, GrowthEnvelope, LevelClosure,
                      TestFunction, build_radial_testfn, extend_by_zero, green_superposition,
                      growth_envelope_green, radial_envelope, validate_testfn)
from .uniqueness import (CriterionReport, ZeroSet, counting_function_points, green_counting, green_mass_integral,
                         green_verdict, green_zero_integral, ibp_check_green, ibp_check_radial,
                         radial_mass_integral, radial_verdict, radial_zero_integral)

__version__ = "0.1.0"
