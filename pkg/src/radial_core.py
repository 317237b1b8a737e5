"""Uniform 1D meshes, trapezoid quadrature and finite differences"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .errors import ContractError, DomainError


class Weight(str, Enum):
    """Weight multiplying the integrand of a prefix/suffix integral."""
    PLAIN = "plain"
    TIMES_R = "times_r"
    INVERSE_R = "inverse_r"


@dataclass(frozen=True)
class Mesh1D:
    """Uniform grid on [a, b] with n intervals."""
    a: float
    b: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.b <= self.a:
            raise DomainError(f"mesh needs finite a < b, got [{self.a}, {self.b}]")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"mesh needs a positive number of intervals, got {self.n}")

    @classmethod
    def radial(cls, radius: float, n: int) -> "Mesh1D":
        return cls(0.0, float(radius), int(n))

    @classmethod
    def line(cls, half_width: float, n: int) -> "Mesh1D":
        return cls(-float(half_width), float(half_width), int(n))

    @classmethod
    def line_with_spacing(cls, half_width: float, spacing: float) -> "Mesh1D":
        """Line mesh of at least the given half width whose nodes sit on multiples of spacing."""
        if not spacing > 0.0:
            raise DomainError(f"spacing must be > 0, got {spacing}")
        half = int(np.ceil(half_width / spacing - 1e-9))
        return cls.line(half * spacing, 2 * half)

    @property
    def spacing(self) -> float:
        return (self.b - self.a) / self.n

    @cached_property
    def nodes(self) -> np.ndarray:
        nodes = np.linspace(self.a, self.b, self.n + 1)
        nodes.setflags(write=False)
        return nodes

    @cached_property
    def weights(self) -> np.ndarray:
        """Composite trapezoid weights."""
        w = np.full(self.n + 1, self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        w.setflags(write=False)
        return w

    @property
    def is_radial(self) -> bool:
        return self.a == 0.0


@dataclass(frozen=True)
class Field:
    """Real samples of a function on every node of a mesh."""
    mesh: Mesh1D
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.mesh.n + 1,):
            raise ContractError(
                f"field has {values.size} samples, mesh has {self.mesh.n + 1} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise ContractError("field samples must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, mesh: Mesh1D, fn: Callable[[np.ndarray], np.ndarray]) -> "Field":
        return cls(mesh, fn(mesh.nodes))

    @classmethod
    def zeros(cls, mesh: Mesh1D) -> "Field":
        return cls(mesh, np.zeros(mesh.n + 1))

    @property
    def nodes(self) -> np.ndarray:
        return self.mesh.nodes

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.mesh, values)


def require_same_mesh(*fields: Field) -> Mesh1D:
    mesh = fields[0].mesh
    for f in fields[1:]:
        if f.mesh != mesh:
            raise ContractError("fields live on different meshes")
    return mesh


def require_radial(mesh: Mesh1D) -> None:
    if not mesh.is_radial:
        raise DomainError(f"radial quantity needs a mesh starting at 0, got a={mesh.a}")


def integrate_line(f: Field) -> float:
    """Trapezoid approximation of the integral of f over [a, b]."""
    return float(trapezoid(f.values, dx=f.mesh.spacing))


def integrate_radial(f: Field) -> float:
    """2*pi * int_0^b f(r) r dr, i.e. the plane integral of a radial function."""
    require_radial(f.mesh)
    return float(2.0 * np.pi * trapezoid(f.values * f.nodes, dx=f.mesh.spacing))


def _weighted(f: Field, weight: Weight) -> np.ndarray:
    r = f.nodes
    if weight is Weight.PLAIN:
        return f.values
    if weight is Weight.TIMES_R:
        return f.values * r
    if weight is Weight.INVERSE_R:
        if f.mesh.a < 0.0:
            raise DomainError("inverse_r weight needs a mesh inside [0, inf)")
        integrand = np.zeros_like(f.values)
        positive = r > 0.0
        integrand[positive] = f.values[positive] / r[positive]
        # r = 0 node: callers pass integrands that are O(r), so the limit is 0
        return integrand
    raise ContractError(f"unknown weight {weight!r}")


def prefix_integral(f: Field, weight: Weight = Weight.PLAIN) -> Field:
    """g(r_i) = int_a^{r_i} f(s) w(s) ds with w in {1, s}."""
    weight = Weight(weight)
    if weight is Weight.INVERSE_R:
        raise ContractError("prefix integrals take plain or times_r weights")
    g = cumulative_trapezoid(_weighted(f, weight), dx=f.mesh.spacing, initial=0.0)
    return Field(f.mesh, g)


def suffix_integral(f: Field, weight: Weight = Weight.PLAIN) -> Field:
    """g(r_i) = int_{r_i}^b f(s) w(s) ds with w in {1, 1/s}."""
    weight = Weight(weight)
    if weight is Weight.TIMES_R:
        raise ContractError("suffix integrals take plain or inverse_r weights")
    integrand = _weighted(f, weight)
    g = cumulative_trapezoid(integrand[::-1], dx=f.mesh.spacing, initial=0.0)[::-1]
    return Field(f.mesh, g)


def derivative(f: Field) -> Field:
    """Central differences inside, second-order one-sided stencils at the ends."""
    if f.mesh.n < 2:
        raise DomainError("derivative needs at least two intervals")
    return Field(f.mesh, np.gradient(f.values, f.mesh.spacing, edge_order=2))


def second_derivative(f: Field) -> Field:
    """Three-point second difference; four-point one-sided stencils at the ends."""
    if f.mesh.n < 3:
        raise DomainError("second derivative needs at least three intervals")
    u = f.values
    h2 = f.mesh.spacing ** 2
    d2 = np.empty_like(u)
    d2[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h2
    d2[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / h2
    d2[-1] = (2.0 * u[-1] - 5.0 * u[-2] + 4.0 * u[-3] - u[-4]) / h2
    return Field(f.mesh, d2)


def forward_difference_energy(f: Field) -> float:
    """int f'^2 dx by the midpoint rule on forward differences.

    Every cell contributes ((u_{j+1} - u_j) / h)^2 * h; an odd/even
    oscillation has positive energy here.
    """
    du = np.diff(f.values)
    return float(np.dot(du, du) / f.mesh.spacing)


def radial_forward_difference_energy(f: Field) -> float:
    """int_0^b f'(r)^2 r dr by the midpoint rule, cell radius r_{j+1/2}."""
    require_radial(f.mesh)
    du = np.diff(f.values)
    mid = f.nodes[:-1] + 0.5 * f.mesh.spacing
    return float(np.dot(mid * du, du) / f.mesh.spacing)
