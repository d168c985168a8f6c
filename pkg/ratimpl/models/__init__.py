"""
Models
"""

from .lottery import Lottery, parse_rational, format_rational
from .partition import Partition, set_partitions, enumerate_refinements
from .environment import (
    ActiveSets, ContourKind, ContourSpec, Environment, EnvironmentSchema, load_environment, parse_environment
)
from .reports import AxiomReport, BlockingWitness, CertificateReport, Counterexample, EliminationOrder
from .game import FiniteGame, load_games, parse_games

__all__ = [
    'Lottery',
    'parse_rational',
    'format_rational',
    'Partition',
    'set_partitions',
    'enumerate_refinements',
    'ActiveSets',
    'ContourKind',
    'ContourSpec',
    'Environment',
    'EnvironmentSchema',
    'load_environment',
    'parse_environment',
    'AxiomReport',
    'BlockingWitness',
    'CertificateReport',
    'Counterexample',
    'EliminationOrder',
    'FiniteGame',
    'load_games',
    'parse_games'
]
