"""
Services
"""

from .settings import SolverSettings, get_settings

__all__ = ['SolverSettings', 'get_settings']
