"""Numerical tolerances shared by every module.

All thresholds live in a single record so the CLI can override them for one
invocation without touching module globals.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    arith: float = 1e-12  # group-law / norm identities
    relation: float = 1e-9  # defining relations of moduli points, handle constraints
    solver: float = 1e-8  # bisection / Newton residuals
    singular: float = 1e-9  # distance to -I below which log is refused


DEFAULT = Tolerances()

_active: contextvars.ContextVar[Tolerances] = contextvars.ContextVar("hsikit_tolerances", default=DEFAULT)


def tol() -> Tolerances:
    return _active.get()


@contextlib.contextmanager
def use_tolerances(**overrides):
    """Temporarily replace tolerance fields, e.g. ``use_tolerances(relation=1e-7)``."""
    token = _active.set(replace(_active.get(), **overrides))
    try:
        yield _active.get()
    finally:
        _active.reset(token)
