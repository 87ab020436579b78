"""Conditioned one-dimensional diffusions and birth-death chains.

Scale/speed characteristics and boundary classification, h-transforms and
their killing measures, bang-bang resolvents, a truncated-chain laboratory,
a path simulator and a finite-volume generator, with validation suites
exposed through the ``condproc`` command.
"""
from .config import ExperimentConfig, Report
from .diffusion import (BoundaryClass, Characteristics, DiffusionSpec, Interval, KillingMeasure,
                        characteristics_from_spec, classify_boundary, fundamental_pair, green_ab, hitting_prob,
                        mean_exit_time)
from .errors import CondProcError
from .htransform import ExcessiveFn, h_hit, transform_characteristics
from .models import BmWithDrift, LogisticSde, OuProcess

__version__ = "0.1.0"
