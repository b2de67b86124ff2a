from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from .model import Connective, TruthFunction, TruthValue


class TruthDomainError(ValueError):
    """Raised when a connective receives a value outside [0,1]."""


class ConnectiveArityError(ValueError):
    """Raised when a connective is applied to the wrong number of values."""


Binary = Callable[[float, float], float]


def _min(x: float, y: float) -> float:
    return x if x <= y else y


def _max(x: float, y: float) -> float:
    return x if x >= y else y


def _prod(x: float, y: float) -> float:
    return x * y


def _luka(x: float, y: float) -> float:
    return max(0.0, x + y - 1.0)


def _dprod(x: float, y: float) -> float:
    # probabilistic sum, written so that the result never leaves [0,1]
    return 1.0 - (1.0 - x) * (1.0 - y)


def _dluka(x: float, y: float) -> float:
    return min(1.0, x + y)


@dataclass(frozen=True)
class ConnectiveImpl:
    name: Connective
    apply: Callable[[Sequence[TruthValue]], TruthValue]


def _folding(binary: Binary) -> Callable[[Sequence[TruthValue]], TruthValue]:
    def apply(values: Sequence[TruthValue]) -> TruthValue:
        return reduce(binary, values)

    return apply


def _complement(values: Sequence[TruthValue]) -> TruthValue:
    return 1.0 - values[0]


CONNECTIVES: Dict[Connective, ConnectiveImpl] = {
    Connective.MIN: ConnectiveImpl(Connective.MIN, _folding(_min)),
    Connective.MAX: ConnectiveImpl(Connective.MAX, _folding(_max)),
    Connective.PROD: ConnectiveImpl(Connective.PROD, _folding(_prod)),
    Connective.LUKA: ConnectiveImpl(Connective.LUKA, _folding(_luka)),
    Connective.DPROD: ConnectiveImpl(Connective.DPROD, _folding(_dprod)),
    Connective.DLUKA: ConnectiveImpl(Connective.DLUKA, _folding(_dluka)),
    Connective.COMPLEMENT: ConnectiveImpl(Connective.COMPLEMENT, _complement),
}

T_NORMS = (Connective.MIN, Connective.PROD, Connective.LUKA)
T_CONORMS = (Connective.MAX, Connective.DPROD, Connective.DLUKA)


def apply_connective(op: Connective | str, values: Sequence[TruthValue]) -> TruthValue:
    """Combine truth values with op; binary connectives are left-folded.

    A single value is returned unchanged by every binary connective.
    """
    op = Connective(op)
    if not values:
        raise ConnectiveArityError(f"{op.value} needs at least one value")
    if op.is_unary and len(values) != 1:
        raise ConnectiveArityError(f"complement is unary, got {len(values)} values")
    vals = [float(v) for v in values]
    for v in vals:
        if not (0.0 <= v <= 1.0):
            raise TruthDomainError(f"{op.value}: value {v!r} outside [0,1]")
    return CONNECTIVES[op].apply(vals)


def interpolate(fn: TruthFunction, x: float) -> Optional[TruthValue]:
    """Truth value of x under a function by stretches.

    Returns None when x lies outside [first x, last x]; callers fall through
    to the default tiers. Declared points are reproduced exactly.
    """
    xs = np.fromiter((p[0] for p in fn.points), dtype=float, count=len(fn.points))
    tvs = np.fromiter((p[1] for p in fn.points), dtype=float, count=len(fn.points))
    x = float(x)
    if x < xs[0] or x > xs[-1]:
        return None
    i = int(np.searchsorted(xs, x))
    if xs[i] == x:
        return float(tvs[i])
    return float(np.interp(x, xs, tvs))


__all__ = [
    "TruthDomainError",
    "ConnectiveArityError",
    "ConnectiveImpl",
    "CONNECTIVES",
    "T_NORMS",
    "T_CONORMS",
    "apply_connective",
    "interpolate",
]
