"""Realized power variation laboratory (C++ core)."""

try:
    from ._powvar import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:  # in-tree build: extension on PYTHONPATH
    from _powvar import *  # noqa: F401,F403
