"""
Core definitions shared by the viewport streaming packages.
"""

from .exceptions import (
    StreamingError,
    InvalidInput,
    InvalidConfig,
    DegenerateInput,
    OutOfFrame,
    InvalidQuaternion,
    InsufficientData,
    InvalidState,
)

__all__ = [
    'StreamingError',
    'InvalidInput',
    'InvalidConfig',
    'DegenerateInput',
    'OutOfFrame',
    'InvalidQuaternion',
    'InsufficientData',
    'InvalidState',
]
