"""bridgeforest: exact combinatorics of unlabeled trees, labeled forests,
bridge-addable classes, and max-weight tree partition functions."""

__version__ = "0.1.0"

from . import forestlab, optimizer, serialize, treekit, weights  # noqa: E402,F401
