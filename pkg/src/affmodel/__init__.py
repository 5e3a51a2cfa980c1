"""Affine models of schemes glued from affine charts.

Subpackages: ``polyalg`` (exact polynomial algebra), ``homalg`` (exact
homological algebra). Modules: ``schemes``, ``pushout``, ``model``, ``cli``.
"""

__version__ = "0.1.0"
