"""
Errors Module
Exception hierarchy shared by the kernel, policy, runtime, simulation and cache layers
"""

from typing import Optional


class OneMaxError(Exception):
    """Base class for every error raised by the modules package"""
    pass


class DomainError(OneMaxError, ValueError):
    """An input lies outside its documented range (fitness, strength, rate, budget...)"""
    pass


class CapacityError(OneMaxError):
    """The exact oracle was asked for a dimension it does not handle"""
    pass


class CacheError(OneMaxError):
    """A cache entry is missing, corrupt, or written by another schema version"""
    pass


class LevelError(OneMaxError):
    """An error tied to one fitness level of a backward computation"""

    def __init__(self, message: str, level: Optional[int] = None):
        self.level = level
        if level is not None:
            message = f"{message} (fitness level {level})"
        super().__init__(message)


class ConvergenceError(LevelError):
    """The scalar optimizer hit its iteration cap"""
    pass


class AbsorbingLevelError(LevelError):
    """A level has zero improvement probability under the policy, so the optimum is never reached"""
    pass
