"""Explicit finite-difference solver for the outflow initial-boundary value problem.

Unknowns ``(rho, u, theta)`` live on the nodes of a uniform grid on
``[0, L]``.  Velocity and temperature are prescribed at ``x = 0``; the
density there is evolved (the characteristic leaves the domain).  At
``x = L`` all three fields are held at the far-field values or copied from
the neighbour.  Time stepping is the two-stage SSP Runge-Kutta method.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels as _kern
from .eos import GasModel, IdealPolytropic, PhysicalParams
from .errors import ConfigError, NumericalError, OutflowViolation, StepRejected
from .io import write_csv

FAR_FIELD_MODES = ("profile", "farfield", "zero-gradient")
CFL_MAX = 1.0


@dataclass(frozen=True)
class Grid1D:
    L: float
    N: int

    def __post_init__(self):
        if not (self.L > 0 and int(self.N) >= 4):
            raise ConfigError(f"grid needs L > 0 and N >= 4, got L={self.L}, N={self.N}")

    @property
    def dx(self):
        return self.L / self.N

    @property
    def x(self):
        return np.linspace(0.0, self.L, int(self.N) + 1)


@dataclass
class FlowState:
    t: float
    rho: np.ndarray
    u: np.ndarray
    theta: np.ndarray

    def copy(self):
        return FlowState(self.t, self.rho.copy(), self.u.copy(), self.theta.copy())

    @property
    def v(self):
        return 1.0 / self.rho


@dataclass(frozen=True)
class BoundaryData:
    u_minus: float
    theta_minus: float
    rho_right: float
    u_right: float
    theta_right: float

    def __post_init__(self):
        if not self.u_minus < 0:
            raise ConfigError(f"outflow problem requires u_minus < 0, got {self.u_minus}")


@dataclass(frozen=True)
class SolverConfig:
    cfl: float = 0.4
    t_end: float = 10.0
    stride: int = 100
    far_field: str = "profile"
    phys: PhysicalParams = field(default_factory=PhysicalParams)
    max_retries: int = 5
    backend: str | None = None

    def __post_init__(self):
        if not 0 < self.cfl <= CFL_MAX:
            raise ConfigError(f"cfl must lie in (0, {CFL_MAX}], got {self.cfl}")
        if not self.t_end >= 0:
            raise ConfigError(f"t_end must be >= 0, got {self.t_end}")
        if int(self.stride) < 1:
            raise ConfigError("stride must be >= 1")
        if self.far_field not in FAR_FIELD_MODES:
            raise ConfigError(f"far_field must be one of {FAR_FIELD_MODES}")


def boundary_from_profile(profile, mode="profile"):
    """Boundary data for a run around ``profile``.

    ``mode="profile"`` holds ``x = L`` at the profile's own value there (the
    algebraic tail has not reached the far field at finite L);
    ``"farfield"`` uses ``(rho_+, u_+, theta_+)``.
    """
    sp = profile.spec
    if mode == "farfield":
        right = (sp.rho_plus, sp.u_plus, sp.theta_plus)
    else:
        right = (float(profile.rho[-1]), float(profile.u[-1]), float(profile.theta[-1]))
    return BoundaryData(profile.u_minus, profile.theta_minus, *right)


def thermo(model: GasModel, rho, theta):
    """``(p, p_theta, e_theta, c)`` on the grid."""
    if type(model) is IdealPolytropic:
        # closed forms in density variables; avoids the generic partials
        R = model.R
        p = R * rho * theta
        return p, R * rho, np.full_like(rho, model.cv), np.sqrt(model.gamma * R * theta)
    v = 1.0 / rho
    p, _, p_v, p_t, _, e_t = model.first_partials(v, theta)
    c2 = -v * v * (p_v - theta * p_t**2 / e_t)
    if np.any(~(c2 > 0)):
        raise NumericalError("p~_v >= 0 on the grid: sound speed undefined")
    return p, p_t, e_t, np.sqrt(c2)


def cfl_dt(model: GasModel, grid: Grid1D, state: FlowState, cfg: SolverConfig, kern=None) -> float:
    """``cfl * min(dx/(|u|+c), dx^2 rho/(2 mu), dx^2 rho e_theta/(2 kappa))``."""
    kern = kern or _kern
    _, _, e_t, c = thermo(model, state.rho, state.theta)
    rate = kern.max_rate(state.rho, state.u, c, np.ascontiguousarray(e_t, dtype=float), grid.dx,
                         cfg.phys.mu, cfg.phys.kappa)
    if not (math.isfinite(rate) and rate > 0):
        raise NumericalError(f"non-finite wave speed at t={state.t}")
    return cfg.cfl / rate


def apply_bcs(state: FlowState, bc: BoundaryData, mode: str = "profile") -> FlowState:
    """Impose the boundary conditions in place and return ``state``."""
    state.u[0] = bc.u_minus
    state.theta[0] = bc.theta_minus
    if mode == "zero-gradient":
        state.rho[-1] = state.rho[-2]
        state.u[-1] = state.u[-2]
        state.theta[-1] = state.theta[-2]
    else:
        state.rho[-1] = bc.rho_right
        state.u[-1] = bc.u_right
        state.theta[-1] = bc.theta_right
    if not state.u[0] < 0:
        raise OutflowViolation(f"u(0) = {state.u[0]} >= 0 at t={state.t}", time=state.t)
    return state


def discrete_mass(grid: Grid1D, rho) -> float:
    """Mass of nodes ``0..N-1`` (half cell at x = 0); telescopes with the update."""
    return grid.dx * (0.5 * rho[0] + float(np.sum(rho[1:-1])))


def _bad_node(state):
    ok = (state.rho > 0) & (state.theta > 0) & np.isfinite(state.rho) & np.isfinite(state.u) \
        & np.isfinite(state.theta)
    bad = np.nonzero(~ok)[0]
    return int(bad[0]) if len(bad) else None


class Solver:
    """Binds a closure, grid, configuration and boundary data."""

    def __init__(self, model: GasModel, grid: Grid1D, cfg: SolverConfig, bc: BoundaryData):
        self.model = model
        self.grid = grid
        self.cfg = cfg
        self.bc = bc
        self.kern = _kern.get(cfg.backend) if cfg.backend else _kern
        n = grid.N + 1
        self._d = [np.empty(n) for _ in range(3)]

    def residual(self, state: FlowState):
        """Semi-discrete time derivative and the two boundary mass fluxes."""
        p, p_t, e_t, _ = thermo(self.model, state.rho, state.theta)
        drho, du, dth = self._d
        f0, fr = self.kern.rhs(state.rho, state.u, state.theta,
                               np.ascontiguousarray(p, dtype=float),
                               np.ascontiguousarray(p_t, dtype=float),
                               np.ascontiguousarray(e_t, dtype=float),
                               self.grid.dx, self.cfg.phys.mu, self.cfg.phys.kappa, drho, du, dth)
        return drho, du, dth, f0 - fr

    def cfl_dt(self, state):
        return cfl_dt(self.model, self.grid, state, self.cfg, self.kern)

    def step(self, state: FlowState, dt: float):
        """One SSP-RK2 step.  Returns ``(new_state, mass_flux_integral)`` or raises StepRejected."""
        mode = self.cfg.far_field
        dr, du, dth, fa = self.residual(state)
        s1 = FlowState(state.t + dt, state.rho + dt * dr, state.u + dt * du, state.theta + dt * dth)
        apply_bcs(s1, self.bc, mode)
        bad = _bad_node(s1)
        if bad is not None:
            raise StepRejected(f"positivity lost at node {bad} (stage 1)", time=state.t, node=bad)
        dr, du, dth, fb = self.residual(s1)
        s2 = FlowState(state.t + dt, 0.5 * (state.rho + s1.rho + dt * dr),
                       0.5 * (state.u + s1.u + dt * du), 0.5 * (state.theta + s1.theta + dt * dth))
        apply_bcs(s2, self.bc, mode)
        bad = _bad_node(s2)
        if bad is not None:
            raise StepRejected(f"positivity lost at node {bad} (stage 2)", time=state.t, node=bad)
        return s2, 0.5 * dt * (fa + fb)

    def run(self, initial: FlowState, observers=(), keep_snapshots: int = 0):
        """Advance ``initial`` to ``cfg.t_end``.

        Observers are called with the state at step 0, every ``stride``
        steps and at the final time (nothing is observed when ``t_end = 0``).
        ``keep_snapshots`` > 0 retains every k-th observed state.
        """
        cfg = self.cfg
        state = apply_bcs(initial.copy(), self.bc, cfg.far_field)
        if _bad_node(state) is not None:
            raise NumericalError("initial state is not admissible (rho, theta > 0, finite)")
        res = RunResult(grid=self.grid, initial=state.copy(), final=state,
                        mass_initial=discrete_mass(self.grid, state.rho))
        if cfg.t_end == 0:
            res.mass_final = res.mass_initial
            return res

        def observe(s, n):
            for ob in observers:
                ob(s)
            res.times.append(s.t)
            res.steps.append(n)
            if keep_snapshots and (len(res.times) - 1) % keep_snapshots == 0:
                res.snapshots.append(s.copy())

        observe(state, 0)
        n = 0
        flux = 0.0
        while state.t < cfg.t_end:
            dt = min(self.cfl_dt(state), cfg.t_end - state.t)
            for attempt in range(cfg.max_retries + 1):
                try:
                    new, f = self.step(state, dt)
                    break
                except StepRejected as err:
                    if attempt == cfg.max_retries:
                        raise StepRejected(f"{err} after {attempt} dt halvings", time=state.t,
                                           node=err.node) from err
                    dt *= 0.5
                    res.rejected += 1
            if state.t + dt >= cfg.t_end or cfg.t_end - (state.t + dt) < 1e-12 * cfg.t_end:
                new.t = cfg.t_end
            state = new
            flux += f
            n += 1
            if n % cfg.stride == 0 or state.t >= cfg.t_end:
                observe(state, n)
        res.final = state
        res.n_steps = n
        res.boundary_flux = flux
        res.mass_final = discrete_mass(self.grid, state.rho)
        return res


@dataclass
class RunResult:
    grid: Grid1D
    initial: FlowState
    final: FlowState
    mass_initial: float
    mass_final: float = float("nan")
    boundary_flux: float = 0.0
    n_steps: int = 0
    rejected: int = 0
    times: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)

    @property
    def mass_audit_error(self):
        """``|Delta M - int (F_0 - F_R) dt| / M_0``."""
        return abs((self.mass_final - self.mass_initial) - self.boundary_flux) / abs(self.mass_initial)

    def summary(self):
        return {"n_steps": self.n_steps, "rejected_steps": self.rejected,
                "t_final": self.final.t, "mass_initial": self.mass_initial,
                "mass_final": self.mass_final, "boundary_flux_integral": self.boundary_flux,
                "mass_audit_rel_error": self.mass_audit_error, "n_observed": len(self.times)}


def state_from_profile(profile) -> FlowState:
    return FlowState(0.0, profile.rho.astype(float).copy(), profile.u.astype(float).copy(),
                     profile.theta.astype(float).copy())


def sup_deviation(state: FlowState, ref: FlowState) -> float:
    return float(max(np.max(np.abs(state.rho - ref.rho)), np.max(np.abs(state.u - ref.u)),
                     np.max(np.abs(state.theta - ref.theta))))


def relative_drift(state: FlowState, ref: FlowState) -> float:
    """Sup-norm deviation relative to the sup norm of the reference fields."""
    scale = max(np.max(np.abs(ref.rho)), np.max(np.abs(ref.u)), np.max(np.abs(ref.theta)))
    return sup_deviation(state, ref) / scale


def write_snapshots(path, grid: Grid1D, states):
    """Long-format CSV ``t, x, rho, u, theta``."""
    x = grid.x
    cols = [np.concatenate([np.full_like(x, s.t) for s in states]),
            np.concatenate([x for _ in states]),
            np.concatenate([s.rho for s in states]),
            np.concatenate([s.u for s in states]),
            np.concatenate([s.theta for s in states])]
    write_csv(path, ["t", "x", "rho", "u", "theta"], cols)


def with_backend(cfg: SolverConfig, backend: str) -> SolverConfig:
    return replace(cfg, backend=backend)


def discrete_steady_state(solver: Solver, guess: FlowState, tol: float = 1e-11, max_iter: int = 25):
    """Newton solve of ``residual(W) = 0`` for the scheme's own stationary state.

    A continuous profile is only an O(dx) approximation of the discrete
    equilibrium; perturbation decay is measured against this state.  The
    Jacobian is assembled column-wise by centered differences, perturbing
    every third node of one field at a time (the stencil is three wide).
    Returns ``(state, info)``.
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.linalg import spsolve

    if solver.cfg.far_field == "zero-gradient":
        raise ConfigError("discrete steady state needs a Dirichlet far-field mode")
    n = solver.grid.N + 1
    st = apply_bcs(guess.copy(), solver.bc, solver.cfg.far_field)
    # free unknowns: rho at 0..N-1, u and theta at 1..N-1
    free = np.zeros(3 * n, dtype=bool)
    free[0:n - 1] = True
    free[n + 1:2 * n - 1] = True
    free[2 * n + 1:3 * n - 1] = True
    idx = np.nonzero(free)[0]
    pos = -np.ones(3 * n, dtype=int)
    pos[idx] = np.arange(len(idx))

    def unpack(z):
        return FlowState(st.t, z[:n].copy(), z[n:2 * n].copy(), z[2 * n:].copy())

    def R(z):
        dr, du, dth, _ = solver.residual(unpack(z))
        return np.concatenate([dr, du, dth])

    z = np.concatenate([st.rho, st.u, st.theta])
    history = []
    for it in range(max_iter):
        r = R(z)
        res = float(np.max(np.abs(r[free])))
        history.append(res)
        if res < tol:
            break
        rows, cols, vals = [], [], []
        for f in range(3):
            for c in range(3):
                cj = np.arange(f * n + c, (f + 1) * n, 3)
                cj = cj[free[cj]]
                h = 1e-6 * np.maximum(1.0, np.abs(z[cj]))
                zp, zm = z.copy(), z.copy()
                zp[cj] += h
                zm[cj] -= h
                d = R(zp) - R(zm)
                for j, hj in zip(cj, h):
                    node = j - f * n
                    for g in range(3):
                        for k in (node - 1, node, node + 1):
                            if 0 <= k < n and free[g * n + k]:
                                rows.append(pos[g * n + k])
                                cols.append(pos[j])
                                vals.append(d[g * n + k] / (2 * hj))
        J = coo_matrix((vals, (rows, cols)), shape=(len(idx), len(idx))).tocsc()
        dz = spsolve(J, -r[free])
        if not np.all(np.isfinite(dz)):
            raise NumericalError("singular Jacobian in the discrete steady-state solve")
        z[idx] += dz
    else:
        raise NumericalError(f"discrete steady state did not converge: residuals {history[-3:]}")
    out = unpack(z)
    if _bad_node(out) is not None:
        raise NumericalError("discrete steady state left the admissible domain")
    return out, {"iterations": it, "residual": history[-1], "history": history}
