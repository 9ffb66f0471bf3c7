"""Parametrically loaded small-loop receiver simulator.

Thin wrapper over the C++ core. The main entry points mirror the CLI:
``load_config`` / ``run_scenario`` drive whole experiments, while the
solver-level functions (``ac_response``, ``conversion_matrix_solve``,
``simulate``, ``build_step_library``, ``train_equalizer``, ...) expose the
individual operations.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
