"""
LPStream: Solution Types

The values f(B) takes across the problem plugins. Each carries `words`, the
number of words the solution occupies when stored or broadcast.
"""

from dataclasses import dataclass
from typing import ClassVar, Optional, Union

import numpy as np


def _floats(values) -> tuple:
    return tuple(float(v) for v in np.asarray(values, dtype=float).reshape(-1))


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float
    words: ClassVar[int] = 2

    def __post_init__(self):
        object.__setattr__(self, "center", _floats(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius >= 0:
            raise ValueError(f"ball radius must be >= 0, got {self.radius}")

    def to_dict(self) -> dict:
        return {"kind": "ball", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Hyperplane:
    """Separator u.x - b = 0 with margins y(u.x - b) >= 1."""

    u: tuple
    b: float
    words: ClassVar[int] = 2

    def __post_init__(self):
        object.__setattr__(self, "u", _floats(self.u))
        object.__setattr__(self, "b", float(self.b))

    def to_dict(self) -> dict:
        return {"kind": "hyperplane", "u": list(self.u), "b": self.b}


@dataclass(frozen=True)
class LpPoint:
    x: tuple
    words: ClassVar[int] = 1

    def __post_init__(self):
        object.__setattr__(self, "x", _floats(self.x))

    def to_dict(self) -> dict:
        return {"kind": "lp_point", "x": list(self.x)}


@dataclass(frozen=True)
class SdpMatrix:
    """Symmetric d x d matrix, row-major. `margin` is the sigma of the saddle form."""

    X: tuple
    margin: Optional[float] = None
    words: ClassVar[int] = 1

    def __post_init__(self):
        matrix = np.asarray(self.X, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"SDP solution must be square, got shape {matrix.shape}")
        if np.max(np.abs(matrix - matrix.T), initial=0.0) > 1e-12:
            raise ValueError("SDP solution is not symmetric")
        object.__setattr__(self, "X", tuple(tuple(float(v) for v in row) for row in matrix))
        if self.margin is not None:
            object.__setattr__(self, "margin", float(self.margin))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.X, dtype=float)

    def to_dict(self) -> dict:
        data = {"kind": "sdp_matrix", "X": [list(row) for row in self.X]}
        if self.margin is not None:
            data["margin"] = self.margin
        return data


@dataclass(frozen=True)
class Infeasible:
    words: ClassVar[int] = 1

    def to_dict(self) -> dict:
        return {"kind": "infeasible"}


Solution = Union[Ball, Hyperplane, LpPoint, SdpMatrix, Infeasible]

INFEASIBLE = Infeasible()
