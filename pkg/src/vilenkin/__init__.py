"""Harmonic analysis on bounded Vilenkin groups.

Characters, Dirichlet and Fejér kernels, weighted maximal Fejér operators,
martingale Hardy spaces and p-atoms on finite truncations of ``G_m``, plus
numerical verification drivers for the kernel estimates and the
counterexample construction.
"""

from .group import *  # noqa: F401,F403
from .system import *  # noqa: F401,F403
from .kernels import *  # noqa: F401,F403
from .operators import *  # noqa: F401,F403
from .spaces import *  # noqa: F401,F403
from .experiments import VerificationReport, divergence_sweep, run_counterexample  # noqa: F401
from .io import load_atom, load_step_function, save_atom, save_step_function  # noqa: F401

__version__ = "0.1.0"
