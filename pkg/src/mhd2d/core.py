"""Domain types, parameter validation, grid construction, initial data.

The simulator works on an axis-aligned rectangle [0,Lx] x [0,Ly] with a
uniform staggered (MAC) mesh: scalar fields (density rho, vertical
magnetic field b) live at cell centers, velocity components on cell
faces.  All admissibility conditions on physical and regularization
parameters are enforced here, once, so downstream code can assume them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    AdiabaticExponentInadmissible,
    BoundViolation,
    GammaTooSmall,
    ValidationError,
    ViscosityInadmissible,
)

__all__ = [
    "SimulationParams",
    "Grid",
    "State",
    "InitialDataSpec",
    "RatioEnvelope",
    "validate_params",
    "build_grid",
    "init_state",
]


# ------------------------------------------------------------------
# Parameter set
# ------------------------------------------------------------------

@dataclass(frozen=True)
class SimulationParams:
    """Physical constants, regularization knobs and run controls.

    a, gamma        pressure law p = a * rho**gamma
    mu, lam         shear / bulk viscosity (mu > 0, lam + 2*mu > 0)
    eps             artificial diffusion coefficient (>= 0)
    delta, Gamma    artificial pressure delta*(rho+b)**Gamma
    Lx, Ly, nx, ny  rectangle size and cell counts
    cfl             Courant number in (0, 1]
    t_final         end time (>= 0; 0 means diagnostics-only)
    dt_max          optional cap on the time step
    advect_scheme   "upwind" (monotone, default) or "centered" (2nd order,
                    no maximum-principle guarantee; used in order studies)
    freeze_velocity test hook: skip the momentum update entirely
    """

    a: float = 1.0
    gamma: float = 1.4
    mu: float = 0.1
    lam: float = 0.0
    eps: float = 0.0
    delta: float = 0.0
    Gamma: float = 6.0
    Lx: float = 1.0
    Ly: float = 1.0
    nx: int = 64
    ny: int = 64
    cfl: float = 0.4
    t_final: float = 1.0
    dt_max: float | None = None
    advect_scheme: str = "upwind"
    freeze_velocity: bool = False

    def with_(self, **kw) -> "SimulationParams":
        return validate_params(replace(self, **kw))


def validate_params(raw: SimulationParams) -> SimulationParams:
    """Check every admissibility inequality; return params unchanged.

    Raises a named ValidationError subclass quoting the failed
    inequality.
    """
    p = raw
    if not p.mu > 0.0:
        raise ViscosityInadmissible(f"mu must be > 0, got mu={p.mu}")
    if not p.lam + 2.0 * p.mu > 0.0:
        raise ViscosityInadmissible(
            f"lambda + 2*mu must be > 0, got {p.lam} + 2*{p.mu} = {p.lam + 2 * p.mu}"
        )
    if not p.gamma >= 1.0:
        raise AdiabaticExponentInadmissible(f"gamma must be >= 1, got {p.gamma}")
    if not p.a > 0.0:
        raise ValidationError(f"pressure coefficient a must be > 0, got {p.a}")
    if p.eps < 0.0:
        raise ValidationError(f"eps must be >= 0, got {p.eps}")
    if p.delta < 0.0:
        raise ValidationError(f"delta must be >= 0, got {p.delta}")
    if not p.Gamma > 1.0:
        raise GammaTooSmall(f"Gamma must be > 1, got {p.Gamma}")
    if p.delta > 0.0 and not p.Gamma > max(4.0, p.gamma):
        raise GammaTooSmall(
            f"Gamma must exceed max(4, gamma) = {max(4.0, p.gamma)} when "
            f"delta > 0, got Gamma={p.Gamma}"
        )
    if not (p.Lx > 0.0 and p.Ly > 0.0):
        raise ValidationError(f"domain sides must be positive, got Lx={p.Lx}, Ly={p.Ly}")
    if p.nx < 4 or p.ny < 4:
        raise ValidationError(f"need at least 4 cells per direction, got nx={p.nx}, ny={p.ny}")
    if not 0.0 < p.cfl <= 1.0:
        raise ValidationError(f"cfl must lie in (0, 1], got {p.cfl}")
    if p.t_final < 0.0:
        raise ValidationError(f"t_final must be >= 0, got {p.t_final}")
    if p.dt_max is not None and not p.dt_max > 0.0:
        raise ValidationError(f"dt_max must be positive when given, got {p.dt_max}")
    if p.advect_scheme not in ("upwind", "centered"):
        raise ValidationError(f"unknown advect_scheme {p.advect_scheme!r}")
    return p


# ------------------------------------------------------------------
# Grid
# ------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    """Uniform MAC mesh on [0,Lx] x [0,Ly].

    Array shapes: cell-center scalars (nx, ny), x-face fields
    (nx+1, ny), y-face fields (nx, ny+1).  Index [i, j] maps to the
    x and y directions respectively.
    """

    nx: int
    ny: int
    Lx: float
    Ly: float
    hx: float
    hy: float

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def xc(self) -> np.ndarray:
        """x coordinates of cell centers, shape (nx,)."""
        return (np.arange(self.nx) + 0.5) * self.hx

    @property
    def yc(self) -> np.ndarray:
        return (np.arange(self.ny) + 0.5) * self.hy

    @property
    def xf(self) -> np.ndarray:
        """x coordinates of x-faces, shape (nx+1,)."""
        return np.arange(self.nx + 1) * self.hx

    @property
    def yf(self) -> np.ndarray:
        return np.arange(self.ny + 1) * self.hy

    def center_mesh(self):
        return np.meshgrid(self.xc, self.yc, indexing="ij")

    def xface_mesh(self):
        return np.meshgrid(self.xf, self.yc, indexing="ij")

    def yface_mesh(self):
        return np.meshgrid(self.xc, self.yf, indexing="ij")

    def zeros_cc(self) -> np.ndarray:
        return np.zeros((self.nx, self.ny))

    def zeros_xface(self) -> np.ndarray:
        return np.zeros((self.nx + 1, self.ny))

    def zeros_yface(self) -> np.ndarray:
        return np.zeros((self.nx, self.ny + 1))


def build_grid(params: SimulationParams) -> Grid:
    """Uniform MAC grid; hx = Lx/nx, hy = Ly/ny."""
    if params.nx < 4 or params.ny < 4:
        raise ValidationError(f"need at least 4 cells per direction, got nx={params.nx}, ny={params.ny}")
    return Grid(
        nx=params.nx,
        ny=params.ny,
        Lx=params.Lx,
        Ly=params.Ly,
        hx=params.Lx / params.nx,
        hy=params.Ly / params.ny,
    )


# ------------------------------------------------------------------
# State
# ------------------------------------------------------------------

@dataclass(frozen=True)
class State:
    """Fields at one time instant.

    rho, b : cell-center scalars (> 0 everywhere)
    ux, uy : face-normal velocity components; entries on the physical
             boundary are exactly zero (no-slip)
    t      : current time
    """

    rho: np.ndarray
    b: np.ndarray
    ux: np.ndarray
    uy: np.ndarray
    t: float

    def copy(self) -> "State":
        return State(self.rho.copy(), self.b.copy(), self.ux.copy(), self.uy.copy(), self.t)


def check_state(state: State, grid: Grid) -> None:
    """Assert shape consistency, positivity and no-slip closure."""
    if state.rho.shape != (grid.nx, grid.ny) or state.b.shape != (grid.nx, grid.ny):
        raise ValidationError("scalar field shape inconsistent with grid")
    if state.ux.shape != (grid.nx + 1, grid.ny) or state.uy.shape != (grid.nx, grid.ny + 1):
        raise ValidationError("face field shape inconsistent with grid")
    if not (np.all(state.rho > 0.0) and np.all(state.b > 0.0)):
        raise BoundViolation("rho and b must be strictly positive at every cell")
    if np.any(state.ux[0, :] != 0.0) or np.any(state.ux[-1, :] != 0.0):
        raise ValidationError("no-slip violated on x-boundary faces")
    if np.any(state.uy[:, 0] != 0.0) or np.any(state.uy[:, -1] != 0.0):
        raise ValidationError("no-slip violated on y-boundary faces")


# ------------------------------------------------------------------
# Initial data
# ------------------------------------------------------------------

@dataclass(frozen=True)
class InitialDataSpec:
    """Recipe for admissible initial fields.

    kind: one of
      constant             rho0 = rho_base, b0 = b_base
      cosine-perturbation  rho0 = rho_base*(1 + rho_amp*cos(kx pi x/Lx)*cos(ky pi y/Ly)),
                           b0 analogous with b_amp (same wavenumbers)
      ratio-profile        rho0 as above; b0 = rho0*(ratio_mid + ratio_amp*cos(jx pi x/Lx)*cos(jy pi y/Ly))
      snapshot-file        load fields from a snapshot at `path`
    Integer wavenumbers keep the profiles Neumann-compatible at the walls.
    An optional solenoidal initial velocity of amplitude u_amp (no-slip
    sin*sin envelope) can be requested for any analytic kind.

    m, M bound the generated scalars: 0 < m <= rho0, b0 <= M.
    """

    kind: str = "constant"
    rho_base: float = 1.0
    b_base: float = 1.0
    rho_amp: float = 0.0
    b_amp: float = 0.0
    kx: int = 1
    ky: int = 0
    ratio_mid: float = 1.0
    ratio_amp: float = 0.0
    jx: int = 1
    jy: int = 0
    u_amp: float = 0.0
    m: float = 1e-8
    M: float = 1e8
    path: str = ""

    KINDS = ("constant", "cosine-perturbation", "ratio-profile", "snapshot-file")


@dataclass(frozen=True)
class RatioEnvelope:
    """Initial envelope of b0/rho0; the solver must preserve it."""

    c_star: float
    c_upper: float

    def __post_init__(self):
        if not (0.0 < self.c_star <= self.c_upper < np.inf):
            raise BoundViolation(
                f"ratio envelope must satisfy 0 < c_star <= c_upper < inf, "
                f"got ({self.c_star}, {self.c_upper})"
            )


def _cos_profile(grid: Grid, base: float, amp: float, kx: int, ky: int) -> np.ndarray:
    X, Y = grid.center_mesh()
    prof = base * (1.0 + amp * np.cos(kx * np.pi * X / grid.Lx) * np.cos(ky * np.pi * Y / grid.Ly))
    return prof


def _initial_velocity(grid: Grid, amp: float):
    ux = grid.zeros_xface()
    uy = grid.zeros_yface()
    if amp != 0.0:
        XF, YC = grid.xface_mesh()
        XC, YF = grid.yface_mesh()
        ux = amp * np.sin(np.pi * XF / grid.Lx) * np.sin(np.pi * YC / grid.Ly)
        uy = -amp * np.sin(np.pi * XC / grid.Lx) * np.sin(np.pi * YF / grid.Ly)
        # sampled sin() is only zero to round-off at the far wall
        ux[0, :] = 0.0
        ux[-1, :] = 0.0
        uy[:, 0] = 0.0
        uy[:, -1] = 0.0
    return ux, uy


def init_state(grid: Grid, spec: InitialDataSpec) -> tuple[State, RatioEnvelope]:
    """Generate initial fields and the discrete ratio envelope.

    Rejects any spec whose fields leave (0, m, M] admissibility with
    BoundViolation.  The envelope is the discrete min/max of b0/rho0.
    """
    if spec.kind not in InitialDataSpec.KINDS:
        raise ValidationError(f"unknown initial-data kind {spec.kind!r}")

    if spec.kind == "snapshot-file":
        from .storage import read_snapshot

        state = read_snapshot(spec.path, grid=grid)
        rho0, b0 = state.rho, state.b
        ux, uy = state.ux, state.uy
    else:
        if spec.kind == "constant":
            rho0 = np.full((grid.nx, grid.ny), float(spec.rho_base))
            b0 = np.full((grid.nx, grid.ny), float(spec.b_base))
        elif spec.kind == "cosine-perturbation":
            rho0 = _cos_profile(grid, spec.rho_base, spec.rho_amp, spec.kx, spec.ky)
            b0 = _cos_profile(grid, spec.b_base, spec.b_amp, spec.kx, spec.ky)
        else:  # ratio-profile
            rho0 = _cos_profile(grid, spec.rho_base, spec.rho_amp, spec.kx, spec.ky)
            X, Y = grid.center_mesh()
            ratio = spec.ratio_mid + spec.ratio_amp * np.cos(
                spec.jx * np.pi * X / grid.Lx
            ) * np.cos(spec.jy * np.pi * Y / grid.Ly)
            b0 = rho0 * ratio
        ux, uy = _initial_velocity(grid, spec.u_amp)

    for name, f in (("rho0", rho0), ("b0", b0)):
        if not np.all(np.isfinite(f)):
            raise BoundViolation(f"{name} contains non-finite entries")
        lo, hi = float(f.min()), float(f.max())
        if lo <= 0.0:
            raise BoundViolation(f"{name} must be strictly positive, min = {lo}")
        if lo < spec.m or hi > spec.M:
            raise BoundViolation(
                f"{name} range [{lo}, {hi}] escapes declared bounds [{spec.m}, {spec.M}]"
            )

    ratio_field = b0 / rho0
    envelope = RatioEnvelope(float(ratio_field.min()), float(ratio_field.max()))
    state = State(rho=rho0, b=b0, ux=ux, uy=uy, t=0.0)
    check_state(state, grid)
    return state, envelope
