"""Retarded self-force of an extended, Lorentz-contracted charge.

Natural units with ``c = 1`` and Heaviside-Lorentz charge are used
throughout; SI numbers appear only in :func:`extcharge.balance.critical_field`.
"""
from .particle import ParticleModel

__version__ = "0.1.0"

__all__ = ["ParticleModel", "__version__"]
