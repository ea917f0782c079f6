"""Discrete differential and transport operators on the MAC grid.

Boundary conventions are baked in once and for all:
  * cell-center scalars obey homogeneous Neumann conditions, realized by
    mirrored ghost cells (equivalently: zero gradient on boundary faces);
  * velocity obeys no-slip, realized by holding boundary-normal faces at
    zero and reflecting tangential ghosts with a sign flip.

With these closures the face gradient and the cell divergence are exact
negative adjoints of each other (summation by parts), which is what makes
the discrete energy/mass bookkeeping of the solver clean.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import Grid

__all__ = [
    "FaceField",
    "gradient_cc_to_face",
    "divergence_face_to_cc",
    "laplacian_neumann",
    "laplacian_velocity_noslip",
    "grad_div_velocity",
    "upwind_scalar_flux_div",
    "momentum_advection",
    "eps_gradrho_gradu",
    "face_average_x",
    "face_average_y",
    "face_to_center",
]


class FaceField(NamedTuple):
    """Pair of face-normal component arrays: x on (nx+1, ny), y on (nx, ny+1)."""

    x: np.ndarray
    y: np.ndarray


# ------------------------------------------------------------------
# First-order building blocks
# ------------------------------------------------------------------

def gradient_cc_to_face(grid: Grid, q: np.ndarray) -> FaceField:
    """Centered two-point gradient of a cell scalar, zero on boundary faces.

    The zero closure is the Neumann mirror: ghost = first interior cell.
    """
    gx = grid.zeros_xface()
    gy = grid.zeros_yface()
    gx[1:-1, :] = (q[1:, :] - q[:-1, :]) / grid.hx
    gy[:, 1:-1] = (q[:, 1:] - q[:, :-1]) / grid.hy
    return FaceField(gx, gy)


def divergence_face_to_cc(grid: Grid, f: FaceField) -> np.ndarray:
    """Conservative flux difference per cell."""
    fx, fy = f
    return (fx[1:, :] - fx[:-1, :]) / grid.hx + (fy[:, 1:] - fy[:, :-1]) / grid.hy


def laplacian_neumann(grid: Grid, q: np.ndarray) -> np.ndarray:
    """5-point Laplacian with mirrored ghost cells (zero-flux walls).

    Composition div(grad q): row and column sums vanish, the operator is
    symmetric negative semidefinite, constants are in its kernel.
    """
    return divergence_face_to_cc(grid, gradient_cc_to_face(grid, q))


def laplacian_velocity_noslip(grid: Grid, ux: np.ndarray, uy: np.ndarray) -> FaceField:
    """Componentwise 5-point Laplacian of a no-slip face velocity.

    Boundary-normal faces are held at zero (output rows zeroed); the wall
    value of the tangential component is realized by sign-flip ghosts.
    """
    hx2, hy2 = grid.hx ** 2, grid.hy ** 2

    lx = grid.zeros_xface()
    # normal (x) direction: Dirichlet by exclusion, u[0]=u[nx]=0 enter the stencil
    lx[1:-1, :] = (ux[2:, :] - 2.0 * ux[1:-1, :] + ux[:-2, :]) / hx2
    # tangential (y) direction: sign-flip ghosts at the walls
    uxg = np.empty((grid.nx + 1, grid.ny + 2))
    uxg[:, 1:-1] = ux
    uxg[:, 0] = -ux[:, 0]
    uxg[:, -1] = -ux[:, -1]
    lx[1:-1, :] += (uxg[1:-1, 2:] - 2.0 * uxg[1:-1, 1:-1] + uxg[1:-1, :-2]) / hy2

    ly = grid.zeros_yface()
    ly[:, 1:-1] = (uy[:, 2:] - 2.0 * uy[:, 1:-1] + uy[:, :-2]) / hy2
    uyg = np.empty((grid.nx + 2, grid.ny + 1))
    uyg[1:-1, :] = uy
    uyg[0, :] = -uy[0, :]
    uyg[-1, :] = -uy[-1, :]
    ly[:, 1:-1] += (uyg[2:, 1:-1] - 2.0 * uyg[1:-1, 1:-1] + uyg[:-2, 1:-1]) / hx2

    return FaceField(lx, ly)


def grad_div_velocity(grid: Grid, ux: np.ndarray, uy: np.ndarray) -> FaceField:
    """grad(div u) as the composition of the two adjoint operators.

    The result is zero on boundary-normal faces, where the velocity is
    held at zero anyway.
    """
    div = divergence_face_to_cc(grid, FaceField(ux, uy))
    return gradient_cc_to_face(grid, div)


# ------------------------------------------------------------------
# Transport
# ------------------------------------------------------------------

def _scalar_face_fluxes(grid: Grid, q, ux, uy, scheme: str):
    """Mass fluxes q*u on faces; upwind or centered face value of q."""
    fx = grid.zeros_xface()
    fy = grid.zeros_yface()
    if scheme == "upwind":
        qx = np.where(ux[1:-1, :] > 0.0, q[:-1, :], q[1:, :])
        qy = np.where(uy[:, 1:-1] > 0.0, q[:, :-1], q[:, 1:])
    elif scheme == "centered":
        qx = 0.5 * (q[:-1, :] + q[1:, :])
        qy = 0.5 * (q[:, :-1] + q[:, 1:])
    else:
        raise ValueError(f"unknown transport scheme {scheme!r}")
    fx[1:-1, :] = ux[1:-1, :] * qx
    fy[:, 1:-1] = uy[:, 1:-1] * qy
    # u is no-slip so the wall flux is physically zero; keep it exact
    return fx, fy


def upwind_scalar_flux_div(grid: Grid, q, ux, uy, scheme: str = "upwind") -> np.ndarray:
    """Conservative flux-difference divergence of q*u.

    Cell sums telescope to the (zero) boundary flux, so the integral of q
    is conserved exactly under forward Euler.  With scheme="upwind" a
    CFL-compliant step is also monotone: new q stays in [min q, max q].
    """
    fx, fy = _scalar_face_fluxes(grid, q, ux, uy, scheme)
    return divergence_face_to_cc(grid, FaceField(fx, fy))


def momentum_advection(grid: Grid, rho, ux, uy, scheme: str = "upwind") -> FaceField:
    """Flux divergence of rho*u (x) u evaluated on faces.

    Face momenta rho_f*u are transported by face-interpolated velocity:
    x-momentum fluxes live at cell centers (x-direction) and at mesh
    nodes (y-direction), mirrored for y-momentum.  All wall fluxes carry
    an interpolated normal velocity that vanishes identically, so the
    total momentum budget telescopes to interior boundary terms only.
    """
    hx, hy = grid.hx, grid.hy

    def pick(a_lo, a_hi, vel):
        if scheme == "upwind":
            return np.where(vel > 0.0, a_lo, a_hi)
        return 0.5 * (a_lo + a_hi)

    # --- x momentum, control volumes around x-faces ---
    mx = face_average_x(rho) * ux  # (nx+1, ny)
    # x-direction fluxes at cell centers
    uc = 0.5 * (ux[:-1, :] + ux[1:, :])  # (nx, ny)
    fxc = uc * pick(mx[:-1, :], mx[1:, :], uc)
    # y-direction fluxes at interior nodes; wall nodes carry zero velocity
    vn = 0.5 * (uy[:-1, 1:-1] + uy[1:, 1:-1])  # (nx-1, ny-1), nodes i=1..nx-1, j=1..ny-1
    fxn = np.zeros((grid.nx - 1, grid.ny + 1))
    fxn[:, 1:-1] = vn * pick(mx[1:-1, :-1], mx[1:-1, 1:], vn)
    ax = grid.zeros_xface()
    ax[1:-1, :] = (fxc[1:, :] - fxc[:-1, :]) / hx + (fxn[:, 1:] - fxn[:, :-1]) / hy

    # --- y momentum, control volumes around y-faces ---
    my = face_average_y(rho) * uy  # (nx, ny+1)
    vc = 0.5 * (uy[:, :-1] + uy[:, 1:])  # (nx, ny)
    fyc = vc * pick(my[:, :-1], my[:, 1:], vc)
    un = 0.5 * (ux[1:-1, :-1] + ux[1:-1, 1:])  # (nx-1, ny-1)
    fyn = np.zeros((grid.nx + 1, grid.ny - 1))
    fyn[1:-1, :] = un * pick(my[:-1, 1:-1], my[1:, 1:-1], un)
    ay = grid.zeros_yface()
    ay[:, 1:-1] = (fyc[:, 1:] - fyc[:, :-1]) / hy + (fyn[1:, :] - fyn[:-1, :]) / hx

    return FaceField(ax, ay)


def eps_gradrho_gradu(grid: Grid, rho, ux, uy, eps: float) -> FaceField:
    """The regularization force eps*(grad rho . grad) u_i at faces.

    Centered differences throughout; zero when eps == 0 or rho constant.
    Boundary-normal faces get zero (the velocity there is pinned).
    """
    fx = grid.zeros_xface()
    fy = grid.zeros_yface()
    if eps == 0.0:
        return FaceField(fx, fy)
    hx, hy = grid.hx, grid.hy

    grho = gradient_cc_to_face(grid, rho)

    # x faces: d(rho)/dx natural, d(rho)/dy averaged from 4 adjacent y-faces
    drdx = grho.x[1:-1, :]  # (nx-1, ny)
    gy = grho.y  # (nx, ny+1), zero on wall rows
    drdy = 0.25 * (gy[:-1, :-1] + gy[:-1, 1:] + gy[1:, :-1] + gy[1:, 1:])  # (nx-1, ny)
    duxdx = (ux[2:, :] - ux[:-2, :]) / (2.0 * hx)
    uxg = np.empty((grid.nx + 1, grid.ny + 2))
    uxg[:, 1:-1] = ux
    uxg[:, 0] = -ux[:, 0]
    uxg[:, -1] = -ux[:, -1]
    duxdy = (uxg[1:-1, 2:] - uxg[1:-1, :-2]) / (2.0 * hy)
    fx[1:-1, :] = eps * (drdx * duxdx + drdy * duxdy)

    # y faces, mirror roles
    drdy2 = grho.y[:, 1:-1]  # (nx, ny-1)
    gx = grho.x  # (nx+1, ny)
    drdx2 = 0.25 * (gx[:-1, :-1] + gx[:-1, 1:] + gx[1:, :-1] + gx[1:, 1:])  # (nx, ny-1)
    duydy = (uy[:, 2:] - uy[:, :-2]) / (2.0 * hy)
    uyg = np.empty((grid.nx + 2, grid.ny + 1))
    uyg[1:-1, :] = uy
    uyg[0, :] = -uy[0, :]
    uyg[-1, :] = -uy[-1, :]
    duydx = (uyg[2:, 1:-1] - uyg[:-2, 1:-1]) / (2.0 * hx)
    fy[:, 1:-1] = eps * (drdx2 * duydx + drdy2 * duydy)

    return FaceField(fx, fy)


# ------------------------------------------------------------------
# Interpolations
# ------------------------------------------------------------------

def face_average_x(q: np.ndarray) -> np.ndarray:
    """Cell scalar averaged to x-faces; wall faces copy the adjacent cell."""
    out = np.empty((q.shape[0] + 1, q.shape[1]))
    out[1:-1, :] = 0.5 * (q[:-1, :] + q[1:, :])
    out[0, :] = q[0, :]
    out[-1, :] = q[-1, :]
    return out


def face_average_y(q: np.ndarray) -> np.ndarray:
    out = np.empty((q.shape[0], q.shape[1] + 1))
    out[:, 1:-1] = 0.5 * (q[:, :-1] + q[:, 1:])
    out[:, 0] = q[:, 0]
    out[:, -1] = q[:, -1]
    return out


def face_to_center(ux: np.ndarray, uy: np.ndarray):
    """Arithmetic face-to-center interpolation of both velocity components."""
    ucx = 0.5 * (ux[:-1, :] + ux[1:, :])
    ucy = 0.5 * (uy[:, :-1] + uy[:, 1:])
    return ucx, ucy
