"""Bayesian networks, multinets and similarity networks.

Models are loaded from the JSON format shared with the ``asymnet`` command
line tool. Evidence is a mapping from variable id to value label.
"""

from ._asymnet import AsymnetError, Model, fixture, fixture_names, load, loads

__all__ = ["AsymnetError", "Model", "fixture", "fixture_names", "load", "loads"]
