"""Closed-form verification solutions and error metrics.

Balloon inflation (membrane), pure bending of a strip, and the inflated
spherical shell, together with the evolution functions of the intermediate
configuration.  All oracles are pure functions of time; parameter structs
validate pole conditions at construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ViscoShellError

POLE_REL = 1e-8


@dataclass(frozen=True)
class BalloonParams:
    """Inflated membrane balloon (incompressible NH + NH Maxwell branch)."""

    R: float
    mu: float
    mu1: float
    eta_s: float
    lam_end: float
    t_end: float

    def __post_init__(self):
        for name in ("R", "mu", "mu1", "eta_s", "t_end"):
            if getattr(self, name) <= 0.0:
                raise ViscoShellError(f"balloon parameter {name} must be positive")
        if self.lam_end <= 1.0:
            raise ViscoShellError("lam_end must exceed 1")

    @property
    def tau_lam(self) -> float:
        return self.t_end / np.log(self.lam_end)

    def stretch(self, t):
        return np.exp(np.asarray(t, dtype=float) / self.tau_lam)


def a_ev(mu1, eta_s, tau_lam, t):
    """Evolution function of the intermediate metric, ahat^ab = A^ab a_ev(t).

    Near the removable pole mu1 tau_lam = 2 eta_s the limiting expression
    exp(-2t/tau) (1 + 2t/tau) is used.
    """
    t = np.asarray(t, dtype=float)
    denom = mu1 * tau_lam - 2.0 * eta_s
    if abs(denom) < POLE_REL * abs(mu1 * tau_lam):
        return np.exp(-2.0 * t / tau_lam) * (1.0 + 2.0 * t / tau_lam)
    return (mu1 * tau_lam * np.exp(-2.0 * t / tau_lam)
            - 2.0 * eta_s * np.exp(-mu1 * t / eta_s)) / denom


def balloon_pressure(p: BalloonParams, t):
    """(p_el, p_visc, p_total, a_ev) of the balloon at time t."""
    lam = p.stretch(t)
    aev = a_ev(p.mu1, p.eta_s, p.tau_lam, t)
    p_el = 2.0 * p.mu / p.R * (1.0 / lam - 1.0 / lam**7)
    p_visc = 2.0 * p.mu1 / p.R * (1.0 / lam - 1.0 / (lam**3 * aev))
    return p_el, p_visc, p_el + p_visc, aev


@dataclass(frozen=True)
class PureBendParams:
    """Stretch-free bending of a flat strip (Koiter bending both branches)."""

    c: float
    c1: float
    eta_b: float
    t_end: float
    kappa_end: float
    S: float = np.pi  # strip length in the bent direction

    def __post_init__(self):
        for name in ("c", "c1", "eta_b", "t_end", "kappa_end"):
            if getattr(self, name) <= 0.0:
                raise ViscoShellError(f"pure-bend parameter {name} must be positive")

    @property
    def tau_b(self) -> float:
        return self.eta_b * (self.c + self.c1) / (self.c * self.c1)

    @property
    def moment_rate(self) -> float:
        # chosen so kappa2(t_end) = kappa_end exactly
        tb = self.tau_b
        shape = tb * (np.exp(-self.t_end / tb) + self.t_end / tb - 1.0) / self.c
        return self.kappa_end * (self.c + self.c1) / (self.t_end + self.c1 * shape)


def pure_bend_solution(p: PureBendParams, t):
    """kappa2, kappa2_in, applied moment M, edge displacement u_y and pressure."""
    t = np.asarray(t, dtype=float)
    tb = p.tau_b
    M = p.moment_rate * t
    k_in = p.moment_rate * tb / p.c * (np.exp(-t / tb) + t / tb - 1.0)
    k2 = (M + p.c1 * k_in) / (p.c + p.c1)
    # chord of a circular arc of length S and curvature k2 (k2 -> 0 safe)
    chord = p.S * np.sinc(p.S * k2 / (2.0 * np.pi))
    u_y = -(p.S - chord)
    pr = -((p.c + p.c1) * k2**3 - p.c1 * k2**2 * k_in)
    return {"kappa2": k2, "kappa2_in": k_in, "M": M, "u_y": u_y, "p": pr}


@dataclass(frozen=True)
class SphereParams:
    """Inflated spherical shell with bending resistance.

    Elastic branch: incompressible NH membrane + Helfrich bending (kstar = 0).
    Maxwell branch: NH membrane (K = 0) + Koiter bending.
    """

    R: float
    mu: float
    mu1: float
    c1: float
    k: float
    H0: float
    eta_s: float
    eta_b: float
    lam_end: float
    t_end: float

    def __post_init__(self):
        for name in ("R", "mu", "mu1", "c1", "k", "eta_s", "eta_b", "t_end"):
            if getattr(self, name) <= 0.0:
                raise ViscoShellError(f"sphere parameter {name} must be positive")
        if self.eta_b + self.c1 * self.tau_lam == 0.0:
            raise ViscoShellError("pole of b_ev: eta_b + c1 tau_lam must not vanish")

    @property
    def tau_lam(self) -> float:
        return self.t_end / np.log(self.lam_end)

    def stretch(self, t):
        return np.exp(np.asarray(t, dtype=float) / self.tau_lam)


def b_ev(c1, eta_b, tau_lam, t):
    """Evolution function of the intermediate curvature, bhat_ab = B_ab b_ev(t)."""
    t = np.asarray(t, dtype=float)
    return (c1 * tau_lam * np.exp(t / tau_lam)
            + eta_b * np.exp(-c1 * t / eta_b)) / (eta_b + c1 * tau_lam)


def sphere_pressure(p: SphereParams, t):
    """(p_el, p_visc, p_total, a_ev, b_ev) of the spherical shell at time t."""
    lam = p.stretch(t)
    aev = a_ev(p.mu1, p.eta_s, p.tau_lam, t)
    bev = b_ev(p.c1, p.eta_b, p.tau_lam, t)
    p_el = 2.0 / p.R**3 * (p.mu * p.R**2 * (1.0 / lam - 1.0 / lam**7)
                           + p.k * (p.H0 * p.R / lam**2 + p.H0**2 * p.R**2 / lam))
    p_visc = 2.0 / p.R**3 * (p.mu1 * p.R**2 * (1.0 / lam - 1.0 / (lam**3 * aev))
                             + p.c1 * aev * (1.0 / lam - bev / lam**2))
    return p_el, p_visc, p_el + p_visc, aev, bev


# -------------------------------------------------------------- error metrics

def relative_error(numerical, analytical):
    analytical = float(analytical)
    if analytical == 0.0:
        raise ViscoShellError("relative error undefined: analytical value is zero")
    return abs(float(numerical) - analytical) / abs(analytical)


def fit_order(step_sizes, errors):
    """Least-squares slope of log(error) vs log(step size)."""
    h = np.log(np.asarray(step_sizes, dtype=float))
    e = np.log(np.asarray(errors, dtype=float))
    if len(h) < 2:
        raise ViscoShellError("order fit needs at least two points")
    return float(np.polyfit(h, e, 1)[0])
