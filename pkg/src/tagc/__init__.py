"""Tag-aware compiler toolchain for a small imperative language."""

from .core import (Atom, FailStop, ITag, TagErr, Terminate, Timeout,
                   behavior_eq)
from .lowering import lower
from .policies import POLICIES, get_policy
from .rtlgen import compile_program

__all__ = [
    "Atom", "FailStop", "ITag", "TagErr", "Terminate", "Timeout", "behavior_eq",
    "lower", "POLICIES", "get_policy", "compile_program",
]
