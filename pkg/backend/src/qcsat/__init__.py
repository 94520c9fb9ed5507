# src/qcsat/__init__.py
"""Asignaciones clásicas para circuitos cuánticos de treewidth pequeño."""

__version__ = "1.0.0"
