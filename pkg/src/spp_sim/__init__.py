"""Directional SPP launching by timed-Dicke superradiance above graphene.

Submodules: ``units``, ``specfun``, ``graphene``, ``kernels``, ``dynamics``,
``directionality``, ``planner``, ``lambshift`` and the ``cli`` front end.
"""

__version__ = "0.1.0"

from .errors import SppSimError, ValidationError  # noqa: E402,F401
from .graphene import Emitter, GrapheneModel  # noqa: E402,F401
from .kernels import EnsembleGeometry, KernelParams, MemoryKernel  # noqa: E402,F401
