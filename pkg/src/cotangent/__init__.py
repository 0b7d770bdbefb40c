"""Exact homological algebra around cotangent-bundle rigidity arguments.

Modules: ``linalg`` (exact fields, matrices, complexes), ``simplicial`` and
``cech`` (triangulations and the Cech dga), ``local_systems`` (flat systems,
presheaf modules, hom complexes), ``spectral`` (filtered complexes and the
corner argument), ``bar`` and ``cobar`` (resolutions and loop-space models),
``exceptional`` (complexes over directed quiver algebras), ``covers`` (finite
covers and group-algebra Ext) and ``cli``.
"""

__version__ = "0.1.0"
SCHEMA_VERSION = 1
