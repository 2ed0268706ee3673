"""Lattice solvers for second order BSDEs."""

try:
    from ._twobsde import *  # noqa: F401,F403
    from ._twobsde import __version__
except ImportError:  # in-tree build: the extension sits next to the package
    from _twobsde import *  # noqa: F401,F403
    from _twobsde import __version__
