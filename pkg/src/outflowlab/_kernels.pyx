# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled spatial operator; same contract as ``_kernels_py``."""
from libc.math cimport fabs


def rhs(double[::1] rho, double[::1] u, double[::1] th, double[::1] p, double[::1] p_t,
        double[::1] e_t, double dx, double mu, double kappa,
        double[::1] drho, double[::1] du, double[::1] dth):
    cdef Py_ssize_t n = rho.shape[0], i
    cdef double uf, F, Fl, F0, ui, ti, du_up, dt_up, ux, px, uxx, txx, r
    cdef double idx = 1.0 / dx, idx2 = 1.0 / (dx * dx), ih = 0.5 / dx
    F0 = rho[0] * u[0]
    uf = 0.5 * (u[0] + u[1])
    Fl = uf * 0.5 * (rho[0] + rho[1])
    drho[0] = (F0 - Fl) * 2.0 * idx
    for i in range(1, n - 1):
        uf = 0.5 * (u[i] + u[i + 1])
        F = uf * (rho[i + 1] if uf < 0 else rho[i])
        drho[i] = (Fl - F) * idx
        ui = u[i]
        ti = th[i]
        if ui < 0:
            du_up = (u[i + 1] - ui) * idx
            dt_up = (th[i + 1] - ti) * idx
        else:
            du_up = (ui - u[i - 1]) * idx
            dt_up = (ti - th[i - 1]) * idx
        ux = (u[i + 1] - u[i - 1]) * ih
        px = (p[i + 1] - p[i - 1]) * ih
        uxx = (u[i + 1] - 2 * ui + u[i - 1]) * idx2
        txx = (th[i + 1] - 2 * ti + th[i - 1]) * idx2
        r = rho[i]
        du[i] = -ui * du_up + (mu * uxx - px) / r
        dth[i] = -ui * dt_up + (kappa * txx + mu * ux * ux - ti * p_t[i] * ux) / (r * e_t[i])
        Fl = F
    drho[n - 1] = 0.0
    du[0] = 0.0
    du[n - 1] = 0.0
    dth[0] = 0.0
    dth[n - 1] = 0.0
    return F0, Fl


def max_rate(double[::1] rho, double[::1] u, double[::1] c, double[::1] e_t,
             double dx, double mu, double kappa):
    cdef Py_ssize_t n = rho.shape[0], i
    cdef double m = 0.0, a
    for i in range(n):
        a = (fabs(u[i]) + c[i]) / dx
        if a > m:
            m = a
        a = 2 * mu / (rho[i] * dx * dx)
        if a > m:
            m = a
        a = 2 * kappa / (rho[i] * e_t[i] * dx * dx)
        if a > m:
            m = a
    return m
