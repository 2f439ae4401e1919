"""Elastic-branch constitution: stresses, moments and material tangents.

Cauchy components follow sigma = (2/J) dPsi/da_ab and M = (1/J) dPsi/db_ab;
the weak form uses the Kirchhoff quantities tau = J sigma and M0 = J M.
Tangent blocks use the conventions c = 2 dtau/da, d = dtau/db, e = 2 dM0/da,
f = dM0/db, all symmetrized in the derivative index pair.

All evaluators are stateless and batched (leading dimensions pass through).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvertedElementError, ViscoShellError
from .geometry import SurfaceState, det2

MEMBRANE_KINDS = (
    "KoiterMembrane",
    "NeoHookeanMembrane",
    "NeoHookeanSplitMembrane",
    "IncompressibleNeoHookeanMembrane",
    "ConstantSurfaceTension",
)
BENDING_KINDS = ("KoiterBending", "HelfrichBending")


@dataclass(frozen=True)
class ElasticModel:
    """One elastic model choice with its parameters.

    Only the parameters relevant to `kind` are used: K, mu (membranes),
    gamma (surface tension), c (Koiter bending), k, kstar, H0 (Helfrich).
    """

    kind: str
    K: float = 0.0
    mu: float = 0.0
    gamma: float = 0.0
    c: float = 0.0
    k: float = 0.0
    kstar: float = 0.0
    H0: float = 0.0

    def __post_init__(self):
        if self.kind not in MEMBRANE_KINDS + BENDING_KINDS:
            raise ViscoShellError(f"unknown material kind '{self.kind}'")
        for name in ("K", "mu", "gamma", "c", "k"):
            if getattr(self, name) < 0.0:
                raise ViscoShellError(f"modulus {name} must be >= 0")
        if self.kstar != 0.0:
            raise ViscoShellError("kstar is fixed to zero in this formulation")

    @property
    def is_membrane(self) -> bool:
        return self.kind in MEMBRANE_KINDS


@dataclass(frozen=True)
class MaxwellBranch:
    """Spring models and dashpot viscosities of one Maxwell branch.

    A branch may be membrane-only, bending-only, or both.  An active
    membrane (bending) part requires eta_s > 0 (eta_b > 0).
    """

    membrane: ElasticModel | None = None
    bending: ElasticModel | None = None
    eta_s: float = 0.0
    eta_b: float = 0.0

    def __post_init__(self):
        from .errors import DegenerateViscosityError

        if self.eta_s < 0.0 or self.eta_b < 0.0:
            raise ViscoShellError("viscosities must be >= 0")
        if self.membrane is not None:
            if not self.membrane.is_membrane:
                raise ViscoShellError("membrane part of a branch must be a membrane kind")
            if self.eta_s == 0.0:
                raise DegenerateViscosityError(
                    "membrane Maxwell branch with eta_s = 0: remove the branch instead")
        if self.bending is not None:
            if self.bending.kind != "KoiterBending":
                raise ViscoShellError("bending Maxwell branches support the Koiter model only")
            if self.eta_b == 0.0:
                raise DegenerateViscosityError(
                    "bending Maxwell branch with eta_b = 0: remove the branch instead")


@dataclass(frozen=True)
class MaterialSpec:
    """Elastic branch (membrane and/or bending model) plus Maxwell branches."""

    membrane: ElasticModel | None = None
    bending: ElasticModel | None = None
    branches: tuple[MaxwellBranch, ...] = ()

    def __post_init__(self):
        if self.membrane is not None and not self.membrane.is_membrane:
            raise ViscoShellError("elastic membrane model must be a membrane kind")
        if self.bending is not None and self.bending.is_membrane:
            raise ViscoShellError("elastic bending model must be a bending kind")
        object.__setattr__(self, "branches", tuple(self.branches))

    @property
    def has_bending(self) -> bool:
        return self.bending is not None or any(b.bending is not None for b in self.branches)


# ---------------------------------------------------------------- helpers

def sym4(a, b=None):
    """0.5 (a^ag b^bd + a^ad b^bg); with b=None uses b=a."""
    if b is None:
        b = a
    return 0.5 * (np.einsum("...ag,...bd->...abgd", a, b)
                  + np.einsum("...ad,...bg->...abgd", a, b))


def outer4(a, b):
    return np.einsum("...ab,...gd->...abgd", a, b)


def dcon_dco(a_con):
    """a^abgd := da^ab/da_gd = -sym(a x a)."""
    return -sym4(a_con)


def stretch_and_invariant(ref: SurfaceState, cur: SurfaceState):
    J2 = cur.det_a / ref.det_a
    if np.any(J2 <= 0.0):
        raise InvertedElementError("surface stretch J <= 0")
    J = np.sqrt(J2)
    I1 = np.einsum("...ab,...ab->...", ref.a_con, cur.a_co)
    return J, I1


def koiter_membrane_tensor(model: ElasticModel, A_con):
    return model.K * outer4(A_con, A_con) + 2.0 * model.mu * sym4(A_con)


def koiter_bending_tensor(modulus: float, A_con):
    return modulus * sym4(A_con)


def _e(x):
    """Broadcast a scalar batch to (..., 1, 1) for metric scaling."""
    return np.asarray(x)[..., None, None]


@dataclass
class TangentBlocks:
    """The four material-tangent component arrays entering the stiffness."""

    c: np.ndarray
    d: np.ndarray
    e: np.ndarray
    f: np.ndarray

    @staticmethod
    def zeros(batch_shape):
        z = np.zeros(batch_shape + (2, 2, 2, 2))
        return TangentBlocks(c=z.copy(), d=z.copy(), e=z.copy(), f=z.copy())

    def __iadd__(self, other):
        self.c += other.c
        self.d += other.d
        self.e += other.e
        self.f += other.f
        return self


# ---------------------------------------------------------------- stresses

def membrane_stress(model: ElasticModel, ref: SurfaceState, cur: SurfaceState):
    """Cauchy membrane stress sigma^ab of one membrane model."""
    J, I1 = stretch_and_invariant(ref, cur)
    J_, a_con, A_con = _e(J), cur.a_con, ref.a_con
    k = model.kind
    if k == "KoiterMembrane":
        cc = koiter_membrane_tensor(model, A_con)
        de = cur.a_co - ref.a_co
        return np.einsum("...abgd,...gd->...ab", cc, de) / (2.0 * J_)
    if k == "NeoHookeanMembrane":
        return (0.5 * model.K * (J_**2 - 1.0) * a_con + model.mu * (A_con - a_con)) / J_
    if k == "NeoHookeanSplitMembrane":
        return (0.5 * model.K * (J_**2 - 1.0) * a_con
                + 0.5 * model.mu / J_ * (2.0 * A_con - _e(I1) * a_con)) / J_
    if k == "IncompressibleNeoHookeanMembrane":
        return model.mu / J_ * (A_con - a_con / J_**2)
    if k == "ConstantSurfaceTension":
        return model.gamma * a_con
    raise ViscoShellError(f"'{k}' is not a membrane model")


def bending_stress(model: ElasticModel | None, ref: SurfaceState, cur: SurfaceState):
    """In-plane stress contributed by a bending model (nonzero for Helfrich)."""
    if model is None or model.kind != "HelfrichBending":
        return np.zeros_like(cur.a_co)
    h = _e(cur.H - model.H0)
    b_con = np.einsum("...ag,...gd,...db->...ab", cur.a_con, cur.b_co, cur.a_con)
    sig = model.k * h**2 * cur.a_con - 2.0 * model.k * h * b_con
    if model.kstar != 0.0:
        sig = sig - model.kstar * _e(cur.gauss) * cur.a_con
    return sig


def bending_moment(model: ElasticModel, ref: SurfaceState, cur: SurfaceState):
    """Cauchy moment components M^ab of one bending model."""
    J, _ = stretch_and_invariant(ref, cur)
    if model.kind == "KoiterBending":
        f4 = koiter_bending_tensor(model.c, ref.a_con)
        return np.einsum("...abgd,...gd->...ab", f4, cur.b_co - ref.b_co) / _e(J)
    if model.kind == "HelfrichBending":
        h = _e(cur.H - model.H0)
        m = model.k * h * cur.a_con
        if model.kstar != 0.0:
            b_con = np.einsum("...ag,...gd,...db->...ab", cur.a_con, cur.b_co, cur.a_con)
            m = m + 2.0 * model.kstar * _e(cur.H) * cur.a_con - model.kstar * b_con
        return m
    raise ViscoShellError(f"'{model.kind}' is not a bending model")


def energy_density(model: ElasticModel, ref: SurfaceState, cur: SurfaceState):
    """Hyperelastic energy density per reference area (where one exists)."""
    J, I1 = stretch_and_invariant(ref, cur)
    k = model.kind
    if k == "KoiterMembrane":
        cc = koiter_membrane_tensor(model, ref.a_con)
        de = cur.a_co - ref.a_co
        return 0.125 * np.einsum("...ab,...abgd,...gd->...", de, cc, de)
    if k == "NeoHookeanMembrane":
        return 0.25 * model.K * (J**2 - 1.0 - 2.0 * np.log(J)) \
            + 0.5 * model.mu * (I1 - 2.0 - 2.0 * np.log(J))
    if k == "NeoHookeanSplitMembrane":
        return 0.25 * model.K * (J**2 - 1.0 - 2.0 * np.log(J)) \
            + 0.5 * model.mu * (I1 / J - 2.0)
    if k == "ConstantSurfaceTension":
        return model.gamma * J
    if k == "KoiterBending":
        f4 = koiter_bending_tensor(model.c, ref.a_con)
        dk = cur.b_co - ref.b_co
        return 0.5 * np.einsum("...ab,...abgd,...gd->...", dk, f4, dk)
    if k == "HelfrichBending":
        return J * (model.k * (cur.H - model.H0) ** 2 + model.kstar * cur.gauss)
    raise ViscoShellError(f"no closed-form energy density for '{k}'")


# ---------------------------------------------------------------- tangents

def elastic_tangents(model: ElasticModel, ref: SurfaceState, cur: SurfaceState) -> TangentBlocks:
    """Material tangent blocks of one elastic model (analytic)."""
    J, I1 = stretch_and_invariant(ref, cur)
    batch = np.shape(J)
    blocks = TangentBlocks.zeros(batch)
    J_, I1_ = _e(J), _e(I1)
    a_con, A_con = cur.a_con, ref.a_con
    aabgd = dcon_dco(a_con)
    k = model.kind
    if k == "KoiterMembrane":
        blocks.c = koiter_membrane_tensor(model, A_con) + np.zeros(batch + (2, 2, 2, 2))
    elif k == "NeoHookeanMembrane":
        blocks.c = (model.K * J_**2)[..., None, None] * outer4(a_con, a_con) \
            + (model.K * (J_**2 - 1.0) - 2.0 * model.mu)[..., None, None] * aabgd
    elif k == "NeoHookeanSplitMembrane":
        blocks.c = (model.K * J_**2)[..., None, None] * outer4(a_con, a_con) \
            + (model.K * (J_**2 - 1.0))[..., None, None] * aabgd \
            - (0.5 * model.mu / J_)[..., None, None] * (
                2.0 * outer4(A_con, a_con) - I1_[..., None, None] * outer4(a_con, a_con)) \
            - (model.mu / J_)[..., None, None] * (
                outer4(a_con, A_con) + I1_[..., None, None] * aabgd)
    elif k == "IncompressibleNeoHookeanMembrane":
        blocks.c = (2.0 * model.mu / J_**2)[..., None, None] * (outer4(a_con, a_con) - aabgd)
    elif k == "ConstantSurfaceTension":
        blocks.c = (model.gamma * J_)[..., None, None] * (outer4(a_con, a_con) + 2.0 * aabgd)
    elif k == "KoiterBending":
        blocks.f = koiter_bending_tensor(model.c, A_con) + np.zeros(batch + (2, 2, 2, 2))
    elif k == "HelfrichBending":
        h = _e(cur.H - model.H0)
        b_con = np.einsum("...ag,...gd,...db->...ab", cur.a_con, cur.b_co, cur.a_con)
        # db^ab/da_gd (symmetrized)
        db_da = -0.5 * (np.einsum("...ag,...db->...abgd", a_con, b_con)
                        + np.einsum("...ad,...gb->...abgd", a_con, b_con)
                        + np.einsum("...ag,...db->...abgd", b_con, a_con)
                        + np.einsum("...ad,...gb->...abgd", b_con, a_con))
        kJ = (model.k * J_)[..., None, None]
        h4 = h[..., None, None]
        tau_sig = h**2 * a_con - 2.0 * h * b_con
        blocks.c = 2.0 * kJ * (
            0.5 * outer4(tau_sig, a_con)
            - h4 * outer4(a_con, b_con)
            + h4**2 * aabgd
            + outer4(b_con, b_con)
            - 2.0 * h4 * db_da)
        blocks.d = kJ * (h4 * outer4(a_con, a_con)
                         - outer4(b_con, a_con) - 2.0 * h4 * sym4(a_con))
        blocks.e = kJ * (h4 * outer4(a_con, a_con)
                         - outer4(a_con, b_con) - 2.0 * h4 * sym4(a_con))
        blocks.f = 0.5 * kJ * outer4(a_con, a_con)
    else:
        raise ViscoShellError(f"unknown material kind '{k}'")
    return blocks


def surface_tension_of(sigma, a_co):
    """gamma = sigma^ab a_ab / 2."""
    return 0.5 * np.einsum("...ab,...ab->...", sigma, a_co)
