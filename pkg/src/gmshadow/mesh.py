"""Structured grids on the unit square and the unit N-ball, with Neumann
Laplacians and quadrature for domain averages.

The rectangle uses the standard 5-point stencil with ghost-node reflection
(mirror across the boundary node), exact for even extensions.  The radial
operator u_RR + (N-1)/R * u_R is discretised in conservation form with
cell-face fluxes, which makes the discrete Green identity exact, reproduces
N*u_RR(0) at the origin, and is exact on quadratics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RectGrid:
    """Uniform node-centred grid on [0,1]^2; node (i,j) at (i*hx, j*hy).

    Field values are stored as arrays of shape (ny, nx), axis 0 along y.
    """

    nx: int
    ny: int

    def __post_init__(self) -> None:
        if self.nx < 3 or self.ny < 3:
            raise ValueError(f"need nx, ny >= 3, got {self.nx}x{self.ny}")

    @property
    def hx(self) -> float:
        return 1.0 / (self.nx - 1)

    @property
    def hy(self) -> float:
        return 1.0 / (self.ny - 1)

    @property
    def h_min(self) -> float:
        return min(self.hx, self.hy)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.ny)

    def quad_weights(self) -> np.ndarray:
        wx = np.full(self.nx, self.hx)
        wx[0] = wx[-1] = self.hx / 2
        wy = np.full(self.ny, self.hy)
        wy[0] = wy[-1] = self.hy / 2
        w = np.outer(wy, wx)
        return w / w.sum()


@dataclass(frozen=True)
class RadialGrid:
    """Radial grid for the unit ball in R^N: M nodes on [0,1], node 0 at R=0.

    outer_bc selects the condition at R=1: "neumann" (default) or
    "dirichlet" (boundary node pinned by the solver; kept for side-by-side
    comparison only).
    """

    dim: int
    M: int
    outer_bc: str = "neumann"

    def __post_init__(self) -> None:
        if self.dim not in (1, 2, 3):
            raise ValueError(f"ambient dimension must be 1, 2 or 3, got {self.dim}")
        if self.M < 3:
            raise ValueError(f"need M >= 3 nodes, got {self.M}")
        if self.outer_bc not in ("neumann", "dirichlet"):
            raise ValueError(f"outer_bc must be neumann or dirichlet, got {self.outer_bc}")

    @property
    def h(self) -> float:
        return 1.0 / (self.M - 1)

    @property
    def h_min(self) -> float:
        return self.h

    @property
    def shape(self) -> tuple[int]:
        return (self.M,)

    @property
    def R(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.M)

    def cell_volumes(self) -> np.ndarray:
        """R^{N}-measure of the dual cells [R_i - h/2, R_i + h/2] ∩ [0,1].

        Sums exactly to 1, so these are also the normalised quadrature
        weights for the ball average with weight N*R^(N-1).
        """
        rf = np.minimum(self.R + self.h / 2, 1.0)
        rb = np.maximum(self.R - self.h / 2, 0.0)
        return rf**self.dim - rb**self.dim

    def quad_weights(self) -> np.ndarray:
        return self.cell_volumes()

    def face_areas(self) -> np.ndarray:
        """R^(N-1) at the M-1 interior cell faces R_i + h/2."""
        return (self.R[:-1] + self.h / 2) ** (self.dim - 1)


Grid = RectGrid | RadialGrid


@dataclass
class Field:
    """Nodal values of one scalar concentration on a grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


def laplacian_rect(f: Field) -> Field:
    """5-point Laplacian with Neumann boundaries via ghost-node reflection."""
    g = f.grid
    if not isinstance(g, RectGrid):
        raise TypeError("laplacian_rect needs a Field on a RectGrid")
    u = f.values
    e = np.pad(u, 1, mode="reflect")
    lap = (e[1:-1, 2:] - 2.0 * u + e[1:-1, :-2]) / g.hx**2
    lap += (e[2:, 1:-1] - 2.0 * u + e[:-2, 1:-1]) / g.hy**2
    return Field(g, lap)


def laplacian_radial(f: Field) -> Field:
    """Conservative discretisation of u_RR + (N-1)/R * u_R on [0,1].

    Flux form (1/R^(N-1)) d/dR (R^(N-1) u_R): zero flux at both ends by
    default.  At R=0 this reduces to the symmetry limit N*u_RR(0); interior
    rows agree with central differences to second order.  For a dirichlet
    outer boundary the last row is zeroed (the node is pinned elsewhere).
    """
    g = f.grid
    if not isinstance(g, RadialGrid):
        raise TypeError("laplacian_radial needs a Field on a RadialGrid")
    u = f.values
    h = g.h
    flux = g.face_areas() * (u[1:] - u[:-1]) / h
    vol = g.cell_volumes() / g.dim
    lap = np.empty_like(u)
    lap[0] = flux[0] / vol[0]
    lap[1:-1] = (flux[1:] - flux[:-1]) / vol[1:-1]
    if g.outer_bc == "neumann":
        lap[-1] = -flux[-1] / vol[-1]
    else:
        lap[-1] = 0.0
    return Field(g, lap)


def laplacian(f: Field) -> Field:
    """Dispatch to the grid's Laplacian."""
    if isinstance(f.grid, RectGrid):
        return laplacian_rect(f)
    return laplacian_radial(f)


def mean(f: Field, power: float = 1.0) -> float:
    """Domain average (1/|Omega|) int f^power, exact for constants.

    Rectangle: tensor trapezoid.  Ball: cell-volume weights for the measure
    N*R^(N-1) dR, normalised so mean of 1 is exactly 1.
    """
    u = f.values
    if power < 0.0 and np.any(u <= 0.0):
        raise ValueError("negative power requires strictly positive values")
    w = f.grid.quad_weights()
    if power == 1.0:
        return float(np.sum(w * u))
    return float(np.sum(w * np.power(u, power)))


def sup_norm(f: Field) -> float:
    """Maximum nodal value."""
    return float(f.values.max())


def write_field_csv(f: Field, path: str) -> None:
    """Rectangle: header "nx,ny" then row-major values, one per line.
    Radial: header "R,value" then two columns."""
    g = f.grid
    with open(path, "w") as fh:
        if isinstance(g, RectGrid):
            fh.write(f"{g.nx},{g.ny}\n")
            for v in f.values.ravel(order="C"):
                fh.write(f"{float(v)!r}\n")
        else:
            fh.write("R,value\n")
            for rr, v in zip(g.R, f.values):
                fh.write(f"{float(rr)!r},{float(v)!r}\n")


def read_field_csv(path: str, grid: Grid) -> Field:
    """Inverse of write_field_csv for a known grid."""
    with open(path) as fh:
        lines = fh.read().strip().splitlines()
    if isinstance(grid, RectGrid):
        vals = np.array([float(x) for x in lines[1:]])
        return Field(grid, vals.reshape(grid.shape))
    vals = np.array([float(line.split(",")[1]) for line in lines[1:]])
    return Field(grid, vals)
