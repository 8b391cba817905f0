"""Conditional-dephasing simulator and bath-polarization bound estimator.

Thin package wrapper around the compiled extension. Supports both layouts:
the installed package (extension lives inside the package as ``nvpol._nvpol``)
and a build-tree import (extension directory plus this package's parent on
``PYTHONPATH``, extension importable as top-level ``_nvpol``).
"""

try:
    from ._nvpol import *  # noqa: F401,F403
    from ._nvpol import __version__  # noqa: F401
except ImportError:  # build-tree layout
    from _nvpol import *  # noqa: F401,F403
    from _nvpol import __version__  # noqa: F401
