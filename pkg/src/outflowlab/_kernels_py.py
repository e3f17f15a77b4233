"""Pure-numpy spatial operator; reference for the compiled kernel in ``_kernels.pyx``."""
import numpy as np


def rhs(rho, u, th, p, p_t, e_t, dx, mu, kappa, drho, du, dth):
    """Fill ``(drho, du, dth)`` with the semi-discrete time derivatives.

    Continuity is in flux form with upwinded interface densities (the
    boundary face uses the centered average, node 0 is a half cell);
    momentum and temperature use the primitive form with upwind convection
    and centered pressure gradient, work and diffusion.  Boundary entries of
    ``du``/``dth`` and the last entry of ``drho`` are zeroed (Dirichlet).
    Returns ``(F_0, F_right)``, the mass fluxes through x = 0 and through the
    face left of the last node.
    """
    uf = 0.5 * (u[:-1] + u[1:])
    F = uf * np.where(uf < 0, rho[1:], rho[:-1])
    F[0] = uf[0] * 0.5 * (rho[0] + rho[1])
    F0 = rho[0] * u[0]
    drho[0] = (F0 - F[0]) / (0.5 * dx)
    drho[1:-1] = (F[:-1] - F[1:]) / dx
    drho[-1] = 0.0

    ui = u[1:-1]
    left = ui < 0
    du_up = np.where(left, u[2:] - ui, ui - u[:-2]) / dx
    ti = th[1:-1]
    dt_up = np.where(left, th[2:] - ti, ti - th[:-2]) / dx
    ux = (u[2:] - u[:-2]) / (2 * dx)
    px = (p[2:] - p[:-2]) / (2 * dx)
    uxx = (u[2:] - 2 * ui + u[:-2]) / dx**2
    txx = (th[2:] - 2 * ti + th[:-2]) / dx**2
    r = rho[1:-1]
    du[1:-1] = -ui * du_up + (mu * uxx - px) / r
    dth[1:-1] = -ui * dt_up + (kappa * txx + mu * ux * ux - ti * p_t[1:-1] * ux) / (r * e_t[1:-1])
    du[0] = du[-1] = 0.0
    dth[0] = dth[-1] = 0.0
    return float(F0), float(F[-1])


def max_rate(rho, u, c, e_t, dx, mu, kappa):
    """Largest of ``(|u|+c)/dx``, ``2 mu/(rho dx^2)``, ``2 kappa/(rho e_t dx^2)``."""
    a = np.max((np.abs(u) + c) / dx)
    b = np.max(2 * mu / (rho * dx * dx))
    d = np.max(2 * kappa / (rho * e_t * dx * dx))
    return float(max(a, b, d))
