"""
Qutrit Holonomy - pulse-level simulation of non-adiabatic holonomic gates on a three-level atom

Closed-form and time-ordered gate construction, Lindblad evolution and full three-level process
tomography with maximum-likelihood reconstruction.
"""

from qutrit_holonomy import core, tomography
from qutrit_holonomy.core import *  # noqa: F403
from qutrit_holonomy.tomography import *  # noqa: F403

__version__ = "0.1.0"
__author__ = "qutrit-holonomy-team"


__all__ = [
    *core.__all__,
    *tomography.__all__,
    "__version__",
    "__author__",
]
