"""Equation-of-state closures and the thermodynamic identities built on them.

Every closure is written in the (v, theta) chart, v = 1/rho.  Entropy and
the (v, s) chart are derived from the second law ``theta ds = de + p dv``:

    s_v = p_theta,   s_theta = e_theta / theta,   e_v = theta p_theta - p

The entropy additive constant is fixed by ``s(v_ref, theta_ref) = 0``; every
quantity used downstream is an entropy *difference*, so the choice cancels.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, RegimeError

EPS = np.finfo(float).eps
# first derivatives: central differences, truncation ~ h^2 vs roundoff ~ eps/h
H_FIRST = EPS ** (1.0 / 3.0)
# second derivatives: one Richardson level (h, 2h) -> truncation ~ h^4 vs eps/h^2
H_SECOND = EPS ** (1.0 / 6.0)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


@dataclass(frozen=True)
class ThermoState:
    v: float
    theta: float

    def __post_init__(self):
        if not (self.v > 0 and self.theta > 0) or not np.isfinite([self.v, self.theta]).all():
            raise DomainError(f"thermodynamic state out of domain: v={self.v}, theta={self.theta}")

    @property
    def rho(self) -> float:
        return 1.0 / self.v

    @classmethod
    def from_rho(cls, rho: float, theta: float) -> "ThermoState":
        if not rho > 0:
            raise DomainError(f"density must be positive, got {rho}")
        return cls(1.0 / rho, theta)


@dataclass(frozen=True)
class PhysicalParams:
    mu: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        if not (self.mu > 0 and self.kappa > 0):
            raise DomainError(f"viscosity and heat conductivity must be positive: {self}")


@dataclass(frozen=True)
class Partials:
    """p, e and their first and second partial derivatives in (v, theta)."""

    p: float
    e: float
    p_v: float
    p_theta: float
    e_v: float
    e_theta: float
    p_vv: float
    p_vtheta: float
    p_thetatheta: float
    e_vv: float
    e_vtheta: float
    e_thetatheta: float

    @property
    def s_v(self):
        return self.p_theta

    def s_theta(self, theta):
        return self.e_theta / theta


def _as_pair(v, theta):
    v = np.asarray(v, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return v, theta


def _step(x, h_rel):
    h = h_rel * np.maximum(1.0, np.abs(x))
    # make x + h exactly representable so the difference quotient sees h
    return (x + h) - x


def _scalar(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


class GasModel:
    """A pressure/internal-energy closure ``p(v, theta)``, ``e(v, theta)``.

    The base class differentiates numerically (centered differences, one
    Richardson level for second derivatives) and integrates entropy by
    Gauss-Legendre quadrature in logarithmic variables.  Subclasses with
    closed forms override :meth:`first_partials`, :meth:`partials` and
    :meth:`entropy`.
    """

    name = "generic"
    analytic = False

    def __init__(self, pressure: Callable | None = None, energy: Callable | None = None,
                 v_ref: float = 1.0, theta_ref: float = 1.0, name: str | None = None,
                 v_min: float = 0.0):
        self._p = pressure
        self._e = energy
        self.v_ref = float(v_ref)
        self.theta_ref = float(theta_ref)
        # closures with excluded volume (van der Waals) need v > v_min
        self.v_min = float(v_min)
        if name is not None:
            self.name = name
        ThermoState(self.v_ref, self.theta_ref)

    def __repr__(self):
        return f"{type(self).__name__}(name={self.name!r})"

    # --- closure -------------------------------------------------------
    def pressure(self, v, theta):
        return self._p(v, theta)

    def energy(self, v, theta):
        return self._e(v, theta)

    def params(self) -> dict:
        return {}

    def check_domain(self, v, theta, margin_v=0.0, margin_theta=0.0):
        v, theta = _as_pair(v, theta)
        if np.any(~np.isfinite(v)) or np.any(~np.isfinite(theta)):
            raise DomainError("non-finite thermodynamic state")
        if np.any(v - margin_v <= self.v_min) or np.any(theta - margin_theta <= 0):
            raise DomainError(
                f"state (or difference stencil) leaves the domain v > {self.v_min}, theta > 0: "
                f"min v={np.min(v)}, min theta={np.min(theta)}")

    # --- derivatives ---------------------------------------------------
    def first_partials(self, v, theta):
        """Return ``(p, e, p_v, p_theta, e_v, e_theta)``; vectorised."""
        v, theta = _as_pair(v, theta)
        hv, ht = _step(v, H_FIRST), _step(theta, H_FIRST)
        self.check_domain(v, theta, hv, ht)
        P, E = self.pressure, self.energy
        p = P(v, theta)
        e = E(v, theta)
        p_v = (P(v + hv, theta) - P(v - hv, theta)) / (2 * hv)
        p_t = (P(v, theta + ht) - P(v, theta - ht)) / (2 * ht)
        e_v = (E(v + hv, theta) - E(v - hv, theta)) / (2 * hv)
        e_t = (E(v, theta + ht) - E(v, theta - ht)) / (2 * ht)
        return p, e, p_v, p_t, e_v, e_t

    def partials(self, v, theta) -> Partials:
        v, theta = _as_pair(v, theta)
        p, e, p_v, p_t, e_v, e_t = self.first_partials(v, theta)
        hv, ht = _step(v, H_SECOND), _step(theta, H_SECOND)
        self.check_domain(v, theta, 2 * hv, 2 * ht)
        second = [_second_partials(f, v, theta, hv, ht) for f in (self.pressure, self.energy)]
        (p_vv, p_vt, p_tt), (e_vv, e_vt, e_tt) = second
        vals = [p, e, p_v, p_t, e_v, e_t, p_vv, p_vt, p_tt, e_vv, e_vt, e_tt]
        return Partials(*map(_scalar, vals))

    # --- entropy -------------------------------------------------------
    def entropy(self, v, theta):
        """Entropy relative to the reference state, by line integration.

        Path: (v_ref, theta_ref) -> (v_ref, theta) -> (v, theta), in log
        variables so the 1/theta weight is absorbed.
        """
        v, theta = _as_pair(v, theta)
        self.check_domain(v, theta)
        x, w = _GL_NODES, _GL_WEIGHTS
        lt0, lt1 = math.log(self.theta_ref), np.log(theta)[..., None]
        sig = 0.5 * (lt1 + lt0) + 0.5 * (lt1 - lt0) * x
        _, _, _, _, _, e_t = self.first_partials(np.full_like(sig, self.v_ref), np.exp(sig))
        s_theta = 0.5 * (lt1[..., 0] - lt0) * np.sum(w * e_t, axis=-1)

        lv0, lv1 = math.log(self.v_ref), np.log(v)[..., None]
        eta = 0.5 * (lv1 + lv0) + 0.5 * (lv1 - lv0) * x
        vv = np.exp(eta)
        _, _, _, p_t, _, _ = self.first_partials(vv, np.broadcast_to(theta[..., None], vv.shape))
        s_v = 0.5 * (lv1[..., 0] - lv0) * np.sum(w * p_t * vv, axis=-1)
        return _scalar(s_theta + s_v)

    def theta_from_entropy(self, v: float, s: float) -> float:
        """Invert ``s(v, theta) = s`` for theta (monotone since s_theta = e_theta/theta > 0)."""
        v = float(v)
        s = float(s)
        self.check_domain(v, self.theta_ref)

        def f(th):
            return self.entropy(v, th) - s

        # Newton in log theta (ds/dlog theta = e_theta); bracketing below is the fallback
        lt = math.log(self.theta_ref)
        for _ in range(12):
            th = math.exp(lt)
            r = f(th)
            if abs(r) <= 8 * EPS * (1.0 + abs(s)):
                return th
            e_t = float(self.first_partials(v, th)[5])
            if not e_t > 0:
                break
            step = max(-1.0, min(1.0, r / e_t))
            lt -= step
            if abs(step) < 1e-11:
                return math.exp(lt)

        lo = hi = self.theta_ref
        flo = fhi = f(lo)
        factor = 2.0
        for _ in range(200):
            if flo <= 0.0 <= fhi:
                break
            if flo > 0:
                hi, fhi = lo, flo
                lo = lo / factor
                flo = f(lo)
            else:
                lo, flo = hi, fhi
                hi = hi * factor
                fhi = f(hi)
        else:
            raise DomainError(f"could not bracket theta for v={v}, s={s}")
        if flo == 0.0:
            return lo
        if fhi == 0.0:
            return hi
        th = brentq(f, lo, hi, xtol=1e-300, rtol=4 * EPS, maxiter=200)
        # one Newton polish: s_theta = e_theta / theta
        _, _, _, _, _, e_t = self.first_partials(v, th)
        th_new = th - f(th) * th / float(e_t)
        return th_new if abs(f(th_new)) <= abs(f(th)) else th


def _second_partials(f, v, theta, hv, ht):
    f0 = f(v, theta)

    def dvv(h):
        return (f(v + h, theta) - 2 * f0 + f(v - h, theta)) / h**2

    def dtt(k):
        return (f(v, theta + k) - 2 * f0 + f(v, theta - k)) / k**2

    def dvt(h, k):
        return (f(v + h, theta + k) - f(v + h, theta - k)
                - f(v - h, theta + k) + f(v - h, theta - k)) / (4 * h * k)

    def rich(d2h, dh):
        return (4 * dh - d2h) / 3

    return (rich(dvv(2 * hv), dvv(hv)), rich(dvt(2 * hv, 2 * ht), dvt(hv, ht)),
            rich(dtt(2 * ht), dtt(ht)))


class IdealPolytropic(GasModel):
    """p = R theta / v,  e = R theta / (gamma - 1)."""

    name = "ideal-polytropic"
    analytic = True

    def __init__(self, gamma: float = 1.4, R: float = 1.0, A: float = 1.0,
                 v_ref: float = 1.0, theta_ref: float = 1.0):
        if not gamma > 1:
            raise DomainError(f"adiabatic exponent must exceed 1, got {gamma}")
        if not (R > 0 and A > 0):
            raise DomainError("R and A must be positive")
        self.gamma = float(gamma)
        self.R = float(R)
        self.A = float(A)
        self.cv = self.R / (self.gamma - 1.0)
        super().__init__(v_ref=v_ref, theta_ref=theta_ref)

    def params(self):
        return {"gamma": self.gamma, "R": self.R, "A": self.A}

    def pressure(self, v, theta):
        return self.R * np.asarray(theta) / np.asarray(v)

    def energy(self, v, theta):
        return self.cv * np.asarray(theta) + 0.0 * np.asarray(v)

    def first_partials(self, v, theta):
        v, theta = _as_pair(v, theta)
        p = self.R * theta / v
        e = self.cv * theta + 0.0 * v
        return p, e, -p / v, self.R / v + 0.0 * theta, 0.0 * p, self.cv + 0.0 * p

    def partials(self, v, theta):
        v, theta = _as_pair(v, theta)
        self.check_domain(v, theta)
        R = self.R
        p, e, p_v, p_t, e_v, e_t = self.first_partials(v, theta)
        z = 0.0 * p
        vals = [p, e, p_v, p_t, e_v, e_t, 2 * R * theta / v**3, -R / v**2, z, z, z, z]
        return Partials(*map(_scalar, vals))

    def entropy(self, v, theta):
        v, theta = _as_pair(v, theta)
        self.check_domain(v, theta)
        return _scalar(self.cv * np.log(theta / self.theta_ref) + self.R * np.log(v / self.v_ref))

    def absolute_entropy(self, v, theta):
        """Entropy in the normalisation ``p = A rho^gamma exp((gamma-1) s / R)``."""
        v, theta = _as_pair(v, theta)
        return _scalar(self.cv * np.log(self.R * theta * v ** (self.gamma - 1.0) / self.A))

    def pressure_from_entropy(self, v, s_abs):
        return self.A * np.asarray(v) ** (-self.gamma) * np.exp((self.gamma - 1.0) * np.asarray(s_abs) / self.R)



class VanDerWaals(GasModel):
    """p = R theta/(v - b) - a/v^2,  e = cv theta - a/v.

    Thermodynamically consistent (e_v = theta p_theta - p = a/v^2); used as a
    non-ideal test closure.
    """

    name = "van-der-waals"
    analytic = True

    def __init__(self, a: float = 0.05, b: float = 0.05, R: float = 1.0, cv: float = 2.5,
                 v_ref: float = 1.0, theta_ref: float = 1.0):
        if not (R > 0 and cv > 0 and a >= 0 and b >= 0):
            raise DomainError("van der Waals parameters must be non-negative (R, cv positive)")
        self.a, self.b, self.R, self.cv = float(a), float(b), float(R), float(cv)
        super().__init__(v_ref=v_ref, theta_ref=theta_ref, v_min=self.b)

    def params(self):
        return {"a": self.a, "b": self.b, "R": self.R, "cv": self.cv}

    def pressure(self, v, theta):
        v, theta = _as_pair(v, theta)
        return self.R * theta / (v - self.b) - self.a / v**2

    def energy(self, v, theta):
        v, theta = _as_pair(v, theta)
        return self.cv * theta - self.a / v

    def first_partials(self, v, theta):
        v, theta = _as_pair(v, theta)
        w = v - self.b
        p = self.R * theta / w - self.a / v**2
        e = self.cv * theta - self.a / v
        p_v = -self.R * theta / w**2 + 2 * self.a / v**3
        p_t = self.R / w + 0.0 * theta
        e_v = self.a / v**2 + 0.0 * theta
        e_t = self.cv + 0.0 * p
        return p, e, p_v, p_t, e_v, e_t

    def partials(self, v, theta):
        v, theta = _as_pair(v, theta)
        self.check_domain(v, theta)
        w = v - self.b
        p, e, p_v, p_t, e_v, e_t = self.first_partials(v, theta)
        z = 0.0 * p
        vals = [p, e, p_v, p_t, e_v, e_t,
                2 * self.R * theta / w**3 - 6 * self.a / v**4, -self.R / w**2 + z, z,
                -2 * self.a / v**3 + z, z, z]
        return Partials(*map(_scalar, vals))

    def entropy(self, v, theta):
        v, theta = _as_pair(v, theta)
        self.check_domain(v, theta)
        return _scalar(self.cv * np.log(theta / self.theta_ref)
                       + self.R * np.log((v - self.b) / (self.v_ref - self.b)))


def _power_law(K: float = 1.0, cv: float = 2.5, v_ref: float = 1.0, theta_ref: float = 1.0):
    """p = K theta / v^2, e = cv theta; exercises the finite-difference path."""
    return GasModel(pressure=lambda v, th: K * np.asarray(th) / np.asarray(v) ** 2,
                    energy=lambda v, th: cv * np.asarray(th) + 0.0 * np.asarray(v),
                    v_ref=v_ref, theta_ref=theta_ref, name="power-law")


_REGISTRY: dict[str, Callable[..., GasModel]] = {
    "ideal-polytropic": IdealPolytropic,
    "van-der-waals": VanDerWaals,
    "power-law": _power_law,
}


def register_closure(name: str, factory: Callable[..., GasModel]) -> None:
    _REGISTRY[name] = factory


def registered_closures() -> list[str]:
    return sorted(_REGISTRY)


def make_gas(name: str, **params) -> GasModel:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown closure {name!r}; registered: {registered_closures()}") from None
    return factory(**params)


# --- operations ----------------------------------------------------------

def entropy(model: GasModel, st: ThermoState) -> float:
    return float(model.entropy(st.v, st.theta))


def partials(model: GasModel, st: ThermoState) -> Partials:
    return model.partials(st.v, st.theta)


@dataclass(frozen=True)
class TildeDerivatives:
    """Derivatives in the (v, s) chart."""

    p_v: float
    p_s: float
    theta_v: float
    theta_s: float
    e_vv: float
    e_vs: float
    e_ss: float


def basic_conditions(d: Partials) -> bool:
    # p_rho = -v^2 p_v > 0  <=>  p_v < 0
    return bool(d.p_v < 0 and d.e_theta > 0)


def tilde_derivatives(model: GasModel, st: ThermoState) -> TildeDerivatives:
    d = model.partials(st.v, st.theta)
    if not basic_conditions(d):
        raise RegimeError(f"closure violates p_rho > 0 or e_theta > 0 at {st}: "
                          f"p_v={d.p_v}, e_theta={d.e_theta}")
    th = st.theta
    r = th * d.p_theta / d.e_theta
    p_v = d.p_v - r * d.p_theta
    return TildeDerivatives(p_v=p_v, p_s=r, theta_v=-r, theta_s=th / d.e_theta,
                            e_vv=-p_v, e_vs=-r, e_ss=th / d.e_theta)


@dataclass(frozen=True)
class SecondTilde:
    p: float
    s: float
    p_v: float
    p_s: float
    p_vv: float
    p_vs: float
    p_ss: float


def _tilde_chain(model: GasModel, st: ThermoState) -> SecondTilde:
    d = model.partials(st.v, st.theta)
    th, et = st.theta, d.e_theta
    Tv = -th * d.p_theta / et
    Ts = th / et
    dTv_dv = -th * (d.p_vtheta * et - d.p_theta * d.e_vtheta) / et**2
    dTv_dt = -((d.p_theta + th * d.p_thetatheta) * et - th * d.p_theta * d.e_thetatheta) / et**2
    dTs_dt = (et - th * d.e_thetatheta) / et**2
    dTs_dv = -th * d.e_vtheta / et**2
    p_v = d.p_v + d.p_theta * Tv
    p_s = d.p_theta * Ts
    p_vv = (d.p_vv + d.p_vtheta * Tv) + (d.p_vtheta + d.p_thetatheta * Tv) * Tv \
        + d.p_theta * (dTv_dv + dTv_dt * Tv)
    p_vs = (d.p_vtheta + d.p_thetatheta * Tv) * Ts + d.p_theta * dTv_dt * Ts
    p_ss = d.p_thetatheta * Ts**2 + d.p_theta * dTs_dt * Ts
    # symmetric check of the mixed derivative through the other order
    p_sv = d.p_vtheta * Ts + d.p_thetatheta * Tv * Ts + d.p_theta * (dTs_dv + dTs_dt * Tv)
    p_vs = 0.5 * (p_vs + p_sv)
    return SecondTilde(float(d.p), float(model.entropy(st.v, st.theta)), p_v, p_s, p_vv, p_vs, p_ss)


def _tilde_fd(model: GasModel, st: ThermoState) -> SecondTilde:
    v0 = st.v
    s0 = float(model.entropy(st.v, st.theta))

    def P(v, s):
        return float(model.pressure(v, model.theta_from_entropy(v, s)))

    hv = float(_step(v0, H_SECOND))
    hs = float(_step(s0, H_SECOND))
    h1v = float(_step(v0, H_FIRST))
    h1s = float(_step(s0, H_FIRST))
    model.check_domain(v0 - 2 * hv, st.theta)
    p0 = P(v0, s0)

    def dvv(h):
        return (P(v0 + h, s0) - 2 * p0 + P(v0 - h, s0)) / h**2

    def dss(k):
        return (P(v0, s0 + k) - 2 * p0 + P(v0, s0 - k)) / k**2

    def dvs(h, k):
        return (P(v0 + h, s0 + k) - P(v0 + h, s0 - k) - P(v0 - h, s0 + k) + P(v0 - h, s0 - k)) / (4 * h * k)

    p_v = (P(v0 + h1v, s0) - P(v0 - h1v, s0)) / (2 * h1v)
    p_s = (P(v0, s0 + h1s) - P(v0, s0 - h1s)) / (2 * h1s)
    p_vv = (4 * dvv(hv) - dvv(2 * hv)) / 3
    p_ss = (4 * dss(hs) - dss(2 * hs)) / 3
    p_vs = (4 * dvs(hv, hs) - dvs(2 * hv, 2 * hs)) / 3
    return SecondTilde(p0, s0, p_v, p_s, p_vv, p_vs, p_ss)


def second_tilde_derivatives(model: GasModel, st: ThermoState, method: str = "fd") -> SecondTilde:
    """Second derivatives of ``p(v, s)``.

    ``method="fd"`` differences ``p(v, theta(v, s))`` directly with theta
    recovered by root finding; ``method="chain"`` assembles them from the
    (v, theta) partials by the chain rule.  The two routes are independent.
    """
    tilde_derivatives(model, st)  # sign conditions
    if method == "fd":
        return _tilde_fd(model, st)
    if method == "chain":
        return _tilde_chain(model, st)
    raise ValueError(f"unknown method {method!r}")


def sound_speed(model: GasModel, v, theta):
    """Vectorised ``c = sqrt(-v^2 p~_v)``."""
    p, e, p_v, p_t, e_v, e_t = model.first_partials(v, theta)
    pv_tilde = p_v - np.asarray(theta) * p_t**2 / e_t
    if np.any(pv_tilde >= 0):
        raise RegimeError("p~_v >= 0: sound speed undefined")
    return np.sqrt(-np.asarray(v) ** 2 * pv_tilde)


def sound_speed_mach(model: GasModel, st: ThermoState, u: float) -> tuple[float, float]:
    td = tilde_derivatives(model, st)
    if td.p_v >= 0:
        raise RegimeError(f"p~_v = {td.p_v} >= 0")
    c = math.sqrt(-st.v**2 * td.p_v)
    return c, abs(u) / c


TRANSONIC_TOL = 1e-8


@dataclass
class ConditionReport:
    basic_ok: bool
    p_rho: float
    e_theta: float
    tilde_pv: float
    mach: float
    is_transonic: bool
    transonic_signs: dict
    transonic_extra_ok: bool
    beta1: float
    beta2: float
    beta3: float
    beta_ok: bool
    matrix_A: list
    minors: tuple
    minor3_closed: float
    minors_ok: bool
    tilde: dict = field(default_factory=dict)
    v_plus: float = 0.0
    u_plus: float = 0.0

    def to_dict(self):
        d = asdict(self)
        d["minors"] = list(self.minors)
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def quadratic_form_matrix(v_plus: float, u_plus: float, t: SecondTilde) -> np.ndarray:
    """Symmetric matrix of the quadratic form f(phi, chi, psi) at the far field."""
    rho = 1.0 / v_plus
    a11 = t.p_vv + t.p_v / v_plus
    a12 = t.p_vs + t.p_s / (2 * v_plus)
    a23 = t.p_s / (2 * u_plus)
    return np.array([[a11, a12, 0.0], [a12, t.p_ss, a23], [0.0, a23, rho]])


def leading_minors(A: np.ndarray) -> tuple[float, float, float]:
    return (float(A[0, 0]), float(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]), float(np.linalg.det(A)))


def check_conditions(model: GasModel, plus_state: ThermoState, u_plus: float,
                     method: str = "fd") -> ConditionReport:
    """Evaluate every sign condition at the far field; failures are report entries."""
    d = model.partials(plus_state.v, plus_state.theta)
    v = plus_state.v
    basic = basic_conditions(d)
    pv_t = d.p_v - plus_state.theta * d.p_theta**2 / d.e_theta if d.e_theta != 0 else float("nan")
    mach = abs(u_plus) / math.sqrt(-v**2 * pv_t) if basic else float("nan")
    # tolerance for the non-strict signs when partials come from differencing
    tol = 0.0 if model.analytic else 1e-7 * (1.0 + abs(d.p) + abs(d.e))
    signs = {
        "p_theta>0": bool(d.p_theta > 0),
        "p_vv>=0": bool(d.p_vv >= -tol),
        "p_thetatheta>=0": bool(d.p_thetatheta >= -tol),
        "p_vtheta<=0": bool(d.p_vtheta <= tol),
        "e_vv<=0": bool(d.e_vv <= tol),
        "e_thetatheta<=0": bool(d.e_thetatheta <= tol),
    }
    nan = float("nan")
    if basic:
        t = second_tilde_derivatives(model, plus_state, method=method)
        b1 = t.p_vv + t.p_v / v
        b2 = b1 * t.p_ss - (t.p_vs + t.p_s / (2 * v)) ** 2
        b3 = -4 * v * t.p_v * b2 - t.p_s**2 * b1
        A = quadratic_form_matrix(v, u_plus, t)
        minors = leading_minors(A)
        m3 = (-4 * v * t.p_v * minors[1] - t.p_s**2 * minors[0]) / (2 * u_plus) ** 2
        tilde = asdict(t)
    else:
        b1 = b2 = b3 = m3 = nan
        A = np.full((3, 3), nan)
        minors = (nan, nan, nan)
        tilde = {}
    return ConditionReport(
        basic_ok=basic, p_rho=float(-v**2 * d.p_v), e_theta=float(d.e_theta),
        tilde_pv=float(pv_t), mach=float(mach),
        is_transonic=bool(abs(mach - 1.0) < TRANSONIC_TOL),
        transonic_signs=signs, transonic_extra_ok=all(signs.values()),
        beta1=float(b1), beta2=float(b2), beta3=float(b3),
        beta_ok=bool(b1 > 0 and b2 > 0 and b3 > 0),
        matrix_A=A.tolist(), minors=minors, minor3_closed=float(m3),
        minors_ok=bool(all(m > 0 for m in minors)),
        tilde=tilde, v_plus=v, u_plus=float(u_plus),
    )
