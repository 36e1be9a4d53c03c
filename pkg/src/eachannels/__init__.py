"""Entanglement-annihilating classification of local two-qubit channels."""
from . import families, qchannel, qstate
from .errors import DomainError, SpecParseError

__version__ = "0.1.0"
