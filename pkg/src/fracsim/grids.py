"""Uniform time partitions and 1-D spatial meshes."""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError

_REL_TOL = 1e-12


@dataclass(frozen=True)
class TimeGrid:
    """Uniform partition 0 = t_0 < t_1 < ... < t_M = T of [0, T]."""

    T: float
    M: int
    dt: float
    nodes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (self.T > 0):
            raise ValidationError(f"T must be > 0, got {self.T}")
        if self.M < 1:
            raise ValidationError(f"M must be >= 1, got {self.M}")
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.shape != (self.M + 1,):
            raise ValidationError("nodes must have M+1 entries")
        if nodes[0] != 0.0 or not np.all(np.diff(nodes) > 0):
            raise ValidationError("nodes must be strictly increasing from 0")
        steps = np.diff(nodes)
        if np.max(np.abs(steps - self.dt)) > _REL_TOL * self.T:
            raise ValidationError("nodes are not uniform")
        if abs(self.dt * self.M - self.T) > _REL_TOL * self.T:
            raise ValidationError("dt*M does not equal T")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, T, M):
        dt = T / M
        nodes = np.linspace(0.0, T, M + 1)
        return cls(T=float(T), M=int(M), dt=dt, nodes=nodes)


@dataclass(frozen=True)
class Mesh1D:
    """Uniform mesh of [0, 1] with N cells and N-1 interior nodes."""

    N: int
    h: float
    nodes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.N < 2:
            raise ValidationError(f"N must be >= 2, got {self.N}")
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.shape != (self.N + 1,):
            raise ValidationError("nodes must have N+1 entries")
        steps = np.diff(nodes)
        if np.max(np.abs(steps - self.h)) > _REL_TOL:
            raise ValidationError("mesh is not uniform")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, N):
        N = int(N)
        return cls(N=N, h=1.0 / N, nodes=np.linspace(0.0, 1.0, N + 1))

    @property
    def interior(self):
        """Interior node coordinates x_1 .. x_{N-1}."""
        return self.nodes[1:-1]
