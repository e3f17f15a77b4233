"""Perturbation experiments around stationary profiles.

Builds admissible initial perturbations, tracks perturbation norms and the
relative-entropy energy during a transient run, checks the quadratic form
that drives the transonic energy estimate, and classifies the decay trend.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import eos, transient
from .errors import AdmissibilityError, ConfigError
from .io import write_csv
from .transient import FlowState, Grid1D

# numpy >= 2 renamed trapz
_trapz = getattr(np, "trapezoid", None) or np.trapz

SHAPES = ("gaussian-bump", "compact-bump", "decaying-wave")


@dataclass(frozen=True)
class PerturbationSpec:
    shape: str = "gaussian-bump"
    a_rho: float = 0.01
    a_u: float = 0.01
    a_theta: float = 0.01
    x_c: float = 8.0
    width: float = 1.5
    phase: float = 0.0

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ConfigError(f"shape must be one of {SHAPES}, got {self.shape!r}")
        if not self.width > 0:
            raise ConfigError("perturbation width must be positive")

    def scaled(self, factor):
        return PerturbationSpec(self.shape, self.a_rho * factor, self.a_u * factor,
                                self.a_theta * factor, self.x_c, self.width, self.phase)

    @property
    def amplitude(self):
        return max(abs(self.a_rho), abs(self.a_u), abs(self.a_theta))


def shape_function(spec: PerturbationSpec, x):
    """Shape ``b(x)`` and its exact derivative ``b'(x)``."""
    x = np.asarray(x, dtype=float)
    r = (x - spec.x_c) / spec.width
    if spec.shape == "gaussian-bump":
        b = np.exp(-r * r)
        return b, -2 * r / spec.width * b
    if spec.shape == "compact-bump":
        inside = np.abs(r) < 1
        q = np.where(inside, 1 - r * r, 0.0)
        return q**3, np.where(inside, -6 * r * q**2 / spec.width, 0.0)
    # decaying-wave: an oscillation under a one-sided exponential envelope, zero at x = 0
    k = 2 * math.pi / spec.width
    env = np.exp(-x / spec.x_c)
    osc = np.sin(k * x + spec.phase) - math.sin(spec.phase) * np.exp(-x / spec.width)
    d_osc = k * np.cos(k * x + spec.phase) + math.sin(spec.phase) / spec.width * np.exp(-x / spec.width)
    return env * osc, env * (d_osc - osc / spec.x_c)


def with_random_phase(spec: PerturbationSpec, seed: int | None):
    if seed is None or spec.shape != "decaying-wave":
        return spec
    rng = np.random.default_rng(seed)
    return PerturbationSpec(spec.shape, spec.a_rho, spec.a_u, spec.a_theta, spec.x_c, spec.width,
                            float(rng.uniform(0, 2 * math.pi)))


def h1_norm(x, fields, derivs):
    """``sqrt(int sum f^2 + f_x^2)`` by the composite trapezoid rule."""
    tot = sum(_trapz(f * f, x) for f in fields) + sum(_trapz(d * d, x) for d in derivs)
    return float(math.sqrt(tot))


def make_initial(base: FlowState, grid: Grid1D, spec: PerturbationSpec):
    """``base + (phi0, psi0, zeta0)`` with ``psi0(0) = zeta0(0) = 0`` exactly.

    Returns ``(state, info)``; ``info`` holds the pre-taper boundary values
    and the H^1 norm of the perturbation from the exact shape derivatives.
    """
    x = grid.x
    b, db = shape_function(spec, x)
    boundary_raw = float(abs(b[0]))
    # one-cell taper: vanishes at node 0, identity from node 1 on
    taper = np.minimum(1.0, x / grid.dx)
    d_taper = np.where(x < grid.dx, 1.0 / grid.dx, 0.0)
    bt, dbt = b * taper, db * taper + b * d_taper
    phi, psi, zeta = spec.a_rho * b, spec.a_u * bt, spec.a_theta * bt
    state = FlowState(0.0, base.rho + phi, base.u + psi, base.theta + zeta)
    if np.any(state.rho <= 0) or np.any(state.theta <= 0):
        raise AdmissibilityError("perturbation amplitude too large: density or temperature not positive")
    norm = h1_norm(x, (phi, psi, zeta), (spec.a_rho * db, spec.a_u * dbt, spec.a_theta * dbt))
    return state, {"boundary_value_before_taper": boundary_raw, "h1_norm": norm,
                   "sup": float(max(np.max(np.abs(phi)), np.max(np.abs(psi)), np.max(np.abs(zeta))))}


def energy_density(model: eos.GasModel, base: FlowState, state: FlowState):
    """Pointwise ``(e - e^) - theta^ (s - s^) + psi^2/2 + p^ (v - v^)``."""
    v, vb = 1.0 / state.rho, 1.0 / base.rho
    e = np.asarray(model.energy(v, state.theta))
    eb = np.asarray(model.energy(vb, base.theta))
    s = np.asarray(model.entropy(v, state.theta))
    sb = np.asarray(model.entropy(vb, base.theta))
    pb = np.asarray(model.pressure(vb, base.theta))
    psi = state.u - base.u
    return (e - eb) - base.theta * (s - sb) + 0.5 * psi * psi + pb * (v - vb)


def equivalence_constants(model, base: FlowState, state: FlowState, rel_floor: float = 1e-6):
    """Inf and sup of ``E / |(phi, psi, zeta)|^2`` over nodes with a visible perturbation."""
    E = energy_density(model, base, state)
    q = (state.rho - base.rho) ** 2 + (state.u - base.u) ** 2 + (state.theta - base.theta) ** 2
    keep = q > rel_floor * np.max(q) if np.max(q) > 0 else np.zeros_like(q, dtype=bool)
    if not np.any(keep):
        return float("nan"), float("nan")
    r = E[keep] / q[keep]
    return float(np.min(r)), float(np.max(r))


# --- quadratic form ----------------------------------------------------------

@dataclass
class QuadraticFormReport:
    minors: tuple
    minors_positive: bool
    min_eigenvalue: float
    n_samples: int
    min_f_ratio: float
    all_positive: bool
    sylvester_consistent: bool
    minor3_det: float
    minor3_closed: float | None
    minor3_rel_diff: float | None

    def to_dict(self):
        return dict(self.__dict__)


def quadratic_form(A, samples):
    samples = np.atleast_2d(samples)
    return np.einsum("ni,ij,nj->n", samples, A, samples)


def quadratic_form_check(report_or_matrix, samples: int = 10_000, seed: int = 0) -> QuadraticFormReport:
    """Evaluate ``f = X^T A X`` on random nonzero triples and compare with Sylvester's criterion."""
    if isinstance(report_or_matrix, eos.ConditionReport):
        A = np.asarray(report_or_matrix.matrix_A, dtype=float)
        closed = report_or_matrix.minor3_closed
    else:
        A = np.asarray(report_or_matrix, dtype=float)
        closed = None
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((samples, 3))
    # the least-eigenvalue direction makes the sampled verdict exact
    X = np.vstack([X, np.linalg.eigh(A)[1][:, 0]])
    f = quadratic_form(A, X)
    ratio = f / np.einsum("ni,ni->n", X, X)
    m = eos.leading_minors(A)
    minors_pos = all(mi > 0 for mi in m)
    all_pos = bool(np.all(f > 0))
    d3 = float(np.linalg.det(A))
    rel = None if closed is None else abs(closed - d3) / max(abs(d3), 1e-300)
    return QuadraticFormReport(minors=tuple(float(x) for x in m), minors_positive=minors_pos,
                               min_eigenvalue=float(np.min(np.linalg.eigvalsh(A))),
                               n_samples=samples, min_f_ratio=float(np.min(ratio)),
                               all_positive=all_pos, sylvester_consistent=(all_pos == minors_pos),
                               minor3_det=d3, minor3_closed=closed, minor3_rel_diff=rel)


# --- tracking ----------------------------------------------------------------

@dataclass
class NormSeries:
    times: list = field(default_factory=list)
    L2: list = field(default_factory=list)
    H1_semi: list = field(default_factory=list)
    H1: list = field(default_factory=list)
    sup: list = field(default_factory=list)
    boundary_trace: list = field(default_factory=list)
    boundary_trace_x: list = field(default_factory=list)
    dissipation: list = field(default_factory=list)
    boundary_dissipation: list = field(default_factory=list)
    apriori_ratio: list = field(default_factory=list)

    COLUMNS = ("times", "L2", "H1_semi", "H1", "sup", "boundary_trace", "boundary_trace_x",
               "dissipation", "boundary_dissipation", "apriori_ratio")

    def __len__(self):
        return len(self.times)

    def write_csv(self, path):
        write_csv(path, ["t"] + list(self.COLUMNS[1:]), [getattr(self, c) for c in self.COLUMNS])


@dataclass
class EnergyReport:
    times: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    c1: list = field(default_factory=list)
    c2: list = field(default_factory=list)
    quadratic_form_min_eigenvalue: float | None = None

    def write_csv(self, path):
        write_csv(path, ["t", "energy", "c1", "c2"], [self.times, self.energy, self.c1, self.c2])


def perturbation_norms(grid: Grid1D, base: FlowState, state: FlowState):
    """``(L2, H1 seminorm, sup, phi(0), phi_x(0), ||phi_x||^2 + ||(psi_x, zeta_x)||_1^2, ||(psi_x, zeta_x)||^2)``.

    Derivatives are second-order finite differences (one-sided at the ends),
    integrals use the composite trapezoid rule.
    """
    x, dx = grid.x, grid.dx
    ph = state.rho - base.rho
    ps = state.u - base.u
    ze = state.theta - base.theta
    grads = [np.gradient(f, dx, edge_order=2) for f in (ph, ps, ze)]
    l2 = sum(_trapz(f * f, x) for f in (ph, ps, ze))
    semi = sum(_trapz(g * g, x) for g in grads)
    second = [np.gradient(g, dx, edge_order=2) for g in grads[1:]]
    visc = float(sum(_trapz(g * g, x) for g in grads[1:]))
    diss = float(_trapz(grads[0] ** 2, x)) + visc + float(sum(_trapz(g * g, x) for g in second))
    sup = float(max(np.max(np.abs(ph)), np.max(np.abs(ps)), np.max(np.abs(ze))))
    return (math.sqrt(l2), math.sqrt(semi), sup, float(ph[0]), float(grads[0][0]), diss, visc)


class Tracker:
    """Observer accumulating a :class:`NormSeries` and an :class:`EnergyReport`.

    Time integrals use the trapezoid rule over the observed times, so they
    are only as fine as the snapshot stride.
    """

    def __init__(self, model, grid: Grid1D, base: FlowState, energy: bool = True):
        self.model = model
        self.grid = grid
        self.base = base
        self.energy_on = energy
        self.series = NormSeries()
        self.energy = EnergyReport()
        self.viscous_dissipation = []
        self._prev = None
        self._acc = 0.0
        self._acc_b = 0.0
        self._acc_v = 0.0
        self._n0 = None

    def __call__(self, state: FlowState):
        l2, semi, sup, tr, trx, diss, visc = perturbation_norms(self.grid, self.base, state)
        b = tr * tr + trx * trx
        if self._prev is not None:
            t0, d0, b0, v0 = self._prev
            h = state.t - t0
            self._acc += 0.5 * h * (d0 + diss)
            self._acc_b += 0.5 * h * (b0 + b)
            self._acc_v += 0.5 * h * (v0 + visc)
        self._prev = (state.t, diss, b, visc)
        h1sq = l2 * l2 + semi * semi
        if self._n0 is None:
            self._n0 = h1sq
        s = self.series
        s.times.append(float(state.t))
        s.L2.append(l2)
        s.H1_semi.append(semi)
        s.H1.append(math.sqrt(h1sq))
        s.sup.append(sup)
        s.boundary_trace.append(abs(tr))
        s.boundary_trace_x.append(abs(trx))
        s.dissipation.append(self._acc)
        s.boundary_dissipation.append(self._acc_b)
        s.apriori_ratio.append((h1sq + self._acc + self._acc_b) / self._n0 if self._n0 > 0 else 0.0)
        self.viscous_dissipation.append(self._acc_v)
        if self.energy_on:
            E = energy_density(self.model, self.base, state)
            self.energy.times.append(float(state.t))
            self.energy.energy.append(float(_trapz(self.base.rho * E, self.grid.x)))
            c1, c2 = equivalence_constants(self.model, self.base, state)
            self.energy.c1.append(c1)
            self.energy.c2.append(c2)


def track(model, grid: Grid1D, base: FlowState, states) -> tuple[NormSeries, EnergyReport]:
    """Norm series of a sequence of retained states (post-processing path)."""
    tr = Tracker(model, grid, base)
    for s in states:
        tr(s)
    return tr.series, tr.energy


# --- verdicts ----------------------------------------------------------------

@dataclass(frozen=True)
class DecayVerdict:
    verdict: str
    half_life: float | None
    envelope_slope: float | None
    ratio_end_start: float | None

    def to_dict(self):
        return dict(self.__dict__)


def monotone_envelope(values):
    """Suffix maximum: the smallest non-increasing sequence dominating ``values``."""
    return np.maximum.accumulate(np.asarray(values, dtype=float)[::-1])[::-1]


def decay_report(times, values) -> DecayVerdict:
    """Classify a sup-norm history as converging, stagnating or diverging."""
    t = np.asarray(times, dtype=float)
    s = np.asarray(values, dtype=float)
    if len(s) < 3:
        return DecayVerdict("inconclusive", None, None, None)
    if s[0] == 0:
        return DecayVerdict("stagnating" if np.all(s == 0) else "diverging", None, None, None)
    env = monotone_envelope(s)
    ratio = float(env[-1] / env[0])
    pos = env > 0
    slope = None
    half = None
    if pos.sum() >= 3 and t[-1] > t[0]:
        slope = float(np.polyfit(t[pos], np.log(env[pos]), 1)[0])
        half = math.log(2) / -slope if slope < 0 else math.inf
    if s[-1] > 1.1 * s[0]:
        verdict = "diverging"
    elif env[-1] <= 0.9 * env[0] and np.all(np.diff(env) <= 0):
        verdict = "converging"
    else:
        verdict = "stagnating"
    return DecayVerdict(verdict, half, slope, ratio)


# --- orchestration -----------------------------------------------------------

@dataclass
class StabilityResult:
    perturbation: PerturbationSpec
    initial_info: dict
    series: NormSeries
    energy: EnergyReport
    verdict: DecayVerdict
    run: transient.RunResult
    steady_info: dict
    sup_ratio: float
    apriori_max: float

    def summary(self):
        return {"amplitude": self.perturbation.amplitude, "initial": self.initial_info,
                "verdict": self.verdict.to_dict(), "sup_ratio_end_start": self.sup_ratio,
                "apriori_ratio_max": self.apriori_max, "run": self.run.summary(),
                "discrete_steady_state": {k: v for k, v in self.steady_info.items() if k != "history"},
                "c1_initial": self.energy.c1[0] if self.energy.c1 else None,
                "c2_initial": self.energy.c2[0] if self.energy.c2 else None}


def steady_base(solver: transient.Solver, profile):
    """The scheme's stationary state near ``profile`` (see ``transient.discrete_steady_state``)."""
    base, info = transient.discrete_steady_state(solver, transient.state_from_profile(profile))
    info = dict(info)
    info["distance_to_profile"] = transient.sup_deviation(base, transient.state_from_profile(profile))
    return base, info


def stability_run(model, profile, pert: PerturbationSpec, cfg: transient.SolverConfig,
                  base=None, steady_info=None, keep_snapshots: int = 0) -> StabilityResult:
    grid = Grid1D(profile.L, profile.N)
    solver = transient.Solver(model, grid, cfg, transient.boundary_from_profile(profile, cfg.far_field))
    if base is None:
        base, steady_info = steady_base(solver, profile)
    init, info = make_initial(base, grid, pert)
    tracker = Tracker(model, grid, base)
    run = solver.run(init, observers=[tracker], keep_snapshots=keep_snapshots)
    s = tracker.series
    verdict = decay_report(s.times, s.sup)
    ratio = s.sup[-1] / s.sup[0] if s.sup and s.sup[0] > 0 else float("nan")
    return StabilityResult(pert, info, s, tracker.energy, verdict, run, steady_info or {},
                           float(ratio), float(max(s.apriori_ratio)) if s.apriori_ratio else float("nan"))
