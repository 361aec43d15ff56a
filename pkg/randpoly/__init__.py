"""randpoly - A numerical laboratory for random polytopes of atomic measures.

randpoly draws i.i.d. points X_1, ..., X_N from an atomic probability measure
mu on R^n and studies the random polytope K_N = conv{X_1, ..., X_N} through
its captured mass F_{n,N} = E[mu(K_N)]. It evaluates exact formulas where
they exist (the uniform cube, coupon-collector bounds for lattice balls),
estimates F by reproducible Monte Carlo everywhere else, and computes the
quantities that govern thresholds: Cramer transforms, half-space depth,
convex extensions of discrete log-concave laws and the coupon-collector
sandwich around lattice balls. A set of small counterexample constructions
shows where sharp thresholds fail.

Everything is available from python, and through the randpoly command line
client, which writes deterministic CSV files with a provenance header.

Copyright
=========

The MIT License. See LICENSE.txt.
"""

__version__ = "1.0.0"

# Get logging in place first.
from . import log
from . import preset
from . import action
from . import measures
from . import cramer
from . import convext
from . import geometry
from . import lattice
from . import simulate
from . import counterexamples

# Convenience imports:
from .preset import presets
from .action import get_action
from .simulate import ExperimentConfig
