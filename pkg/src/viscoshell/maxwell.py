"""Evolution-law integration and consistent tangents for Maxwell branches.

The intermediate metric ahat^ab and curvature bhat_ab are history variables
stored per quadrature point (3 components each; the 12/21 symmetry is built
in).  Implicit Euler turns the evolution laws into algebraic equations per
branch and point; the Neo-Hookean and constant-surface-tension membrane
models and the Koiter bending model admit closed-form updates, the others
use a local Newton iteration.  The consistent tangents include the implicit
dependence of the history on the current metric/curvature through 4x4
sensitivity systems (or their closed-form specializations).

Symmetric 2x2 tensors travel as 3-vectors (11, 12, 22); helpers convert.
Everything is batched over leading dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LocalSolverError, TangentSingularityError, ViscoShellError
from .geometry import det2, inv2
from .materials import MaxwellBranch, TangentBlocks, dcon_dco, outer4, sym4

LOCAL_TOL = 1e-10
LOCAL_MAXITER = 25

_EYE4 = np.einsum("ag,bd->abgd", np.eye(2), np.eye(2))  # unsymmetrized identity


def to22(v3):
    """(..., 3) with slots (11, 12, 22) -> symmetric (..., 2, 2)."""
    v3 = np.asarray(v3)
    m = np.empty(v3.shape[:-1] + (2, 2))
    m[..., 0, 0] = v3[..., 0]
    m[..., 0, 1] = v3[..., 1]
    m[..., 1, 0] = v3[..., 1]
    m[..., 1, 1] = v3[..., 2]
    return m


def to3(m22):
    return np.stack([m22[..., 0, 0], m22[..., 0, 1], m22[..., 1, 1]], axis=-1)


@dataclass
class MaxwellHistory:
    """Committed history of one Maxwell branch over a batch of points.

    ahat: (..., 3) contravariant intermediate metric; bhat: (..., 3)
    covariant intermediate curvature; dissipation: (...,) accumulated
    pointwise dissipation density.
    """

    ahat: np.ndarray
    bhat: np.ndarray
    dissipation: np.ndarray

    @staticmethod
    def initial(A_con, B_co):
        """Virgin history: ahat = A^ab, bhat = B_ab."""
        A_con = np.asarray(A_con, dtype=float)
        return MaxwellHistory(ahat=to3(A_con),
                              bhat=to3(np.asarray(B_co, dtype=float)),
                              dissipation=np.zeros(A_con.shape[:-2]))

    def copy(self):
        return MaxwellHistory(self.ahat.copy(), self.bhat.copy(), self.dissipation.copy())


def _el_split(ahat22, a_co):
    """J_el and I1_el from the intermediate contravariant metric."""
    j_el = np.sqrt(det2(a_co) * det2(ahat22))
    i1_el = np.einsum("...ab,...ab->...", ahat22, a_co)
    return j_el, i1_el


def spring_stress_hat(model, ahat22, a_co, a_con):
    """Spring stress referred to the intermediate configuration: sigma_hat = J_el sigma_1."""
    k = model.kind
    if k == "NeoHookeanMembrane":
        return model.mu * (ahat22 - a_con)
    if k == "ConstantSurfaceTension":
        return model.gamma * ahat22
    j_el, i1_el = _el_split(ahat22, a_co)
    j_el, i1_el = j_el[..., None, None], i1_el[..., None, None]
    if k == "KoiterMembrane":
        aha = np.einsum("...ag,...gd,...db->...ab", ahat22, a_co, ahat22)
        return 0.5 * model.K * (i1_el - 2.0) * ahat22 + model.mu * (aha - ahat22)
    if k == "NeoHookeanSplitMembrane":
        return 0.5 * model.K * (j_el**2 - 1.0) * a_con \
            + 0.5 * model.mu / j_el * (2.0 * ahat22 - i1_el * a_con)
    if k == "IncompressibleNeoHookeanMembrane":
        return model.mu * (ahat22 - a_con / j_el**2)
    raise ViscoShellError(f"'{k}' is not a membrane model")


def residual_surface(branch: MaxwellBranch, ahat_new3, ahat_old3, a_co, a_con, dt):
    """Implicit-Euler residual g_s (3 components) of the surface evolution law."""
    if dt <= 0.0:
        raise ViscoShellError("time step must be positive")
    sig_hat = spring_stress_hat(branch.membrane, to22(ahat_new3), a_co, a_con)
    return (np.asarray(ahat_new3) - ahat_old3) / dt + to3(sig_hat) / branch.eta_s


def _reduce4(d4):
    """Collapse d g^ab / d ahat^gd (4-index) to the reduced 3x3 system.

    Rows are (11, 12, 22); the middle column sums the 12- and 21-derivatives
    because ahat^21 is eliminated.
    """
    rows = [(0, 0), (0, 1), (1, 1)]
    out = np.empty(d4.shape[:-4] + (3, 3))
    for i, (a, b) in enumerate(rows):
        out[..., i, 0] = d4[..., a, b, 0, 0]
        out[..., i, 1] = d4[..., a, b, 0, 1] + d4[..., a, b, 1, 0]
        out[..., i, 2] = d4[..., a, b, 1, 1]
    return out


def _dghat_dahat4(model, ahat22, a_co, a_con, eta_s, dt):
    """4-index derivative of the residual w.r.t. the four entries of ahat^gd."""
    k = model.kind
    batch = ahat22.shape[:-2]
    eye4 = np.broadcast_to(_EYE4, batch + (2, 2, 2, 2))
    if k == "NeoHookeanMembrane":
        return (1.0 / dt + model.mu / eta_s) * eye4
    if k == "ConstantSurfaceTension":
        return (1.0 / dt + model.gamma / eta_s) * eye4
    j_el, i1_el = _el_split(ahat22, a_co)
    j4 = j_el[..., None, None, None, None]
    i4 = i1_el[..., None, None, None, None]
    if k == "KoiterMembrane":
        cmix = np.einsum("...ae,...eg->...ag", ahat22, a_co)  # c^a_g
        t4 = np.einsum("ag,...bd->...abgd", np.eye(2), cmix) \
            + np.einsum("bg,...ad->...abgd", np.eye(2), cmix)
        return eye4 / dt + 0.5 * model.K / eta_s * (
            outer4(ahat22, a_co) + (i4 - 2.0) * eye4) \
            + model.mu / eta_s * (t4 - eye4)
    ahat_co = inv2(ahat22, what="intermediate metric")
    if k == "NeoHookeanSplitMembrane":
        return eye4 / dt + 0.5 * model.K / eta_s * j4**2 * outer4(a_con, ahat_co) \
            + 0.5 * model.mu / (eta_s * j4) * (
                2.0 * eye4 - outer4(a_con, a_co) - outer4(ahat22, ahat_co)
                + 0.5 * i4 * outer4(a_con, ahat_co))
    if k == "IncompressibleNeoHookeanMembrane":
        return eye4 / dt + model.mu / eta_s * (
            eye4 + outer4(a_con, ahat_co) / j4**2)
    raise ViscoShellError(f"'{k}' is not a membrane model")


def jacobian_surface(branch: MaxwellBranch, ahat_new3, a_co, a_con, dt):
    """Reduced 3x3 Jacobian of residual_surface (12/21 column summed)."""
    d4 = _dghat_dahat4(branch.membrane, to22(ahat_new3), a_co, a_con,
                       branch.eta_s, dt)
    return _reduce4(d4)


def update_intermediate_metric(branch: MaxwellBranch, ahat_old3, a_co, a_con, dt):
    """Solve the surface evolution law for ahat at t_{n+1}.

    Closed form for the Neo-Hookean and constant-surface-tension springs,
    local Newton (tol 1e-10 on ||delta ahat||_2, cap 25) otherwise.
    Returns (ahat_new3, iterations).
    """
    if dt <= 0.0:
        raise ViscoShellError("time step must be positive")
    model = branch.membrane
    if model is None:
        return np.array(ahat_old3, copy=True), 0
    eta = branch.eta_s
    if model.kind == "NeoHookeanMembrane":
        return (eta * ahat_old3 + model.mu * dt * to3(a_con)) / (eta + model.mu * dt), 0
    if model.kind == "ConstantSurfaceTension":
        return eta / (eta + model.gamma * dt) * np.array(ahat_old3, copy=True), 0
    v = np.array(ahat_old3, copy=True)
    for it in range(1, LOCAL_MAXITER + 1):
        g = residual_surface(branch, v, ahat_old3, a_co, a_con, dt)
        j3 = jacobian_surface(branch, v, a_co, a_con, dt)
        try:
            dv = np.linalg.solve(j3, -g[..., None])[..., 0]
        except np.linalg.LinAlgError as exc:
            raise LocalSolverError("singular local Jacobian", iterations=it) from exc
        v = v + dv
        if np.all(np.linalg.norm(dv, axis=-1) <= LOCAL_TOL):
            return v, it
    gnorm = float(np.max(np.linalg.norm(
        residual_surface(branch, v, ahat_old3, a_co, a_con, dt), axis=-1)))
    raise LocalSolverError(
        f"local Newton did not converge in {LOCAL_MAXITER} iterations",
        residual_norm=gnorm, iterations=LOCAL_MAXITER)


def residual_bending(branch: MaxwellBranch, bhat_new3, bhat_old3, b_co, dt):
    """Implicit-Euler residual of the Koiter bending evolution law."""
    c1 = branch.bending.c
    return (np.asarray(bhat_new3) - bhat_old3) / dt \
        + c1 / branch.eta_b * (np.asarray(bhat_new3) - to3(b_co))


def update_intermediate_curvature(branch: MaxwellBranch, bhat_old3, b_co, dt):
    """Closed-form implicit-Euler update of bhat (Koiter bending spring)."""
    if dt <= 0.0:
        raise ViscoShellError("time step must be positive")
    if branch.bending is None:
        return np.array(bhat_old3, copy=True)
    c1, eta = branch.bending.c, branch.eta_b
    return (eta * bhat_old3 + c1 * dt * to3(b_co)) / (eta + c1 * dt)


def maxwell_stress_and_moment(branch: MaxwellBranch, ahat_new3, bhat_new3,
                              a_co, a_con, b_co):
    """Branch Cauchy stress sigma_1 and moment M_1 after the history update."""
    batch = a_co.shape[:-2]
    sigma1 = np.zeros(batch + (2, 2))
    m1 = np.zeros(batch + (2, 2))
    ahat22 = to22(ahat_new3)
    j_el = np.sqrt(det2(a_co) * det2(ahat22))[..., None, None]
    if branch.membrane is not None:
        sigma1 = spring_stress_hat(branch.membrane, ahat22, a_co, a_con) / j_el
    if branch.bending is not None:
        kel = b_co - to22(bhat_new3)
        m1 = branch.bending.c / j_el * np.einsum(
            "...ag,...gd,...db->...ab", ahat22, kel, ahat22)
    return sigma1, m1


# ------------------------------------------------------- consistent tangents

def _outer44(x22, y22):
    """4x4 outer product of two 2x2 tensors in (11, 12, 21, 22) ordering."""
    xv = x22.reshape(x22.shape[:-2] + (4,))
    yv = y22.reshape(y22.shape[:-2] + (4,))
    return np.einsum("...i,...j->...ij", xv, yv)


def _as44(t4):
    return t4.reshape(t4.shape[:-4] + (4, 4))


def _as2222(m44):
    return m44.reshape(m44.shape[:-2] + (2, 2, 2, 2))


def metric_sensitivity(branch: MaxwellBranch, ahat_new3, a_co, a_con, dt):
    """S = d ahat^ab / d a_gd of the converged update, as (..., 2, 2, 2, 2).

    Closed form for the Neo-Hookean spring, zero for constant surface
    tension (its update never sees the current metric), dense 4x4 solves
    with partial pivoting otherwise.
    """
    model = branch.membrane
    batch = a_co.shape[:-2]
    if model is None:
        return np.zeros(batch + (2, 2, 2, 2))
    eta = branch.eta_s
    if model.kind == "NeoHookeanMembrane":
        phi = model.mu * dt / (eta + model.mu * dt)
        return phi * dcon_dco(a_con)
    if model.kind == "ConstantSurfaceTension":
        return np.zeros(batch + (2, 2, 2, 2))

    ahat22 = to22(ahat_new3)
    ahat_co = inv2(ahat22, what="intermediate metric")
    eye44 = np.broadcast_to(np.eye(4), batch + (4, 4))
    j_el, i1_el = _el_split(ahat22, a_co)
    j = j_el[..., None, None]
    i1 = i1_el[..., None, None]
    dcon44 = _as44(dcon_dco(a_con))

    if model.kind == "KoiterMembrane":
        cmix = np.einsum("...ae,...eg->...ag", ahat22, a_co)
        t4 = np.einsum("ag,...bd->...abgd", np.eye(2), cmix) \
            + np.einsum("bg,...ad->...abgd", np.eye(2), cmix)
        lhs = (eta / dt - model.mu + 0.5 * model.K * (i1 - 2.0)) * eye44 \
            + 0.5 * model.K * _outer44(ahat22, a_co) + model.mu * _as44(t4)
        rhs = -0.5 * model.K * _outer44(ahat22, ahat22) \
            + model.mu * _as44(dcon_dco(ahat22))
    elif model.kind == "NeoHookeanSplitMembrane":
        lhs = (2.0 * eta / dt + 2.0 * model.mu / j) * eye44 \
            + (model.K * j**2 + 0.5 * model.mu * i1 / j) * _outer44(a_con, ahat_co) \
            - model.mu / j * (_outer44(ahat22, ahat_co) + _outer44(a_con, a_co))
        rhs = -model.K * (j**2 * _outer44(a_con, a_con) + (j**2 - 1.0) * dcon44) \
            + model.mu / j * (_outer44(a_con, ahat22) + i1 * dcon44
                              + _outer44(ahat22, a_con)
                              - 0.5 * i1 * _outer44(a_con, a_con))
    elif model.kind == "IncompressibleNeoHookeanMembrane":
        lhs = (eta / dt + model.mu) * eye44 \
            + model.mu / j**2 * _outer44(a_con, ahat_co)
        rhs = model.mu / j**2 * (dcon44 - _outer44(a_con, a_con))
    else:
        raise ViscoShellError(f"'{model.kind}' is not a membrane model")
    try:
        s44 = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise TangentSingularityError("singular 4x4 sensitivity system") from exc
    return _as2222(s44)


def maxwell_tangents(branch: MaxwellBranch, ahat_new3, bhat_new3, a_co, a_con,
                     b_co, det_A, dt, history_sensitivity=True) -> TangentBlocks:
    """Branch contribution to the material tangents (c1, e1, f1; d1 = 0).

    det_A is det(A_co) of the reference metric (enters through J_in).  With
    history_sensitivity=False the implicit dependence of ahat/bhat on the
    deformation is dropped (controlled-defect tangent for the regression
    guard; not a valid consistent tangent).
    """
    batch = a_co.shape[:-2]
    blocks = TangentBlocks.zeros(batch)
    ahat22 = to22(ahat_new3)
    ahat_co = inv2(ahat22, what="intermediate metric")
    det_A = np.asarray(det_A, dtype=float)
    j_in = (1.0 / np.sqrt(det_A * det2(ahat22)))[..., None, None]
    j_el = np.sqrt(det2(a_co) * det2(ahat22))[..., None, None]
    i1_el = np.einsum("...ab,...ab->...", ahat22, a_co)[..., None, None]

    if history_sensitivity:
        s = metric_sensitivity(branch, ahat_new3, a_co, a_con, dt)
    else:
        s = np.zeros(batch + (2, 2, 2, 2))

    # total derivatives of J_in, J_el, I1_el w.r.t. a_gd ((gd) slot as 2x2)
    tr_s = np.einsum("...ez,...ezgd->...gd", ahat_co, s)
    d_jin = -0.5 * j_in * tr_s
    d_jel = 0.5 * j_el * a_con + 0.5 * j_el * tr_s
    d_i1el = ahat22 + np.einsum("...ezgd,...ez->...gd", s, a_co)
    aabgd = dcon_dco(a_con)

    model = branch.membrane
    if model is not None:
        mu1, K1 = model.mu, model.K
        k = model.kind
        if k == "KoiterMembrane":
            aha = np.einsum("...ag,...gd,...db->...ab", ahat22, a_co, ahat22)
            c1 = K1 * outer4((i1_el - 2.0) * ahat22, d_jin) \
                + j_in[..., None, None] * (
                    K1 * outer4(ahat22, d_i1el)
                    + K1 * (i1_el - 2.0)[..., None, None] * s) \
                + 2.0 * mu1 * outer4(aha - ahat22, d_jin) \
                + 2.0 * mu1 * j_in[..., None, None] * (
                    np.einsum("...aegd,...ez,...bz->...abgd", s, a_co, ahat22)
                    + sym4(ahat22)
                    + np.einsum("...ae,...ez,...bzgd->...abgd", ahat22, a_co, s)
                    - s)
        elif k == "NeoHookeanMembrane":
            c1 = 2.0 * mu1 * (outer4(ahat22 - a_con, d_jin)
                              + j_in[..., None, None] * (s - aabgd))
        elif k == "NeoHookeanSplitMembrane":
            two_i = 2.0 * ahat22 - i1_el * a_con
            jj = (j_el * j_in)[..., None, None]
            c1 = K1 * (outer4((j_el**2 - 1.0) * a_con, d_jin)
                       + 2.0 * jj * outer4(a_con, d_jel)
                       + (j_in * (j_el**2 - 1.0))[..., None, None] * aabgd) \
                + mu1 * (-outer4(j_in / j_el**2 * two_i, d_jel)
                         + outer4(two_i / j_el, d_jin)
                         + (j_in / j_el)[..., None, None] * (
                             2.0 * s - outer4(a_con, d_i1el)
                             - i1_el[..., None, None] * aabgd))
        elif k == "IncompressibleNeoHookeanMembrane":
            c1 = 2.0 * mu1 * (outer4(ahat22 - a_con / j_el**2, d_jin)
                              + j_in[..., None, None] * (
                                  s - aabgd / j_el[..., None, None]**2
                                  + outer4(2.0 * a_con / j_el**3, d_jel)))
        elif k == "ConstantSurfaceTension":
            # the update never sees the current metric, so only J_in varies
            c1 = 2.0 * model.gamma * outer4(ahat22, d_jin)
        else:
            raise ViscoShellError(f"'{k}' is not a membrane model")
        blocks.c += c1

    if branch.bending is not None:
        c1b, eta_b = branch.bending.c, branch.eta_b
        fhat = c1b * sym4(ahat22)
        factor = eta_b / (eta_b + c1b * dt) if history_sensitivity else 1.0
        blocks.f += factor * j_in[..., None, None] * fhat
        kel = b_co - to22(bhat_new3)
        mhat = c1b * np.einsum("...ag,...gd,...db->...ab", ahat22, kel, ahat22)
        e1 = 2.0 * outer4(mhat, d_jin)
        if history_sensitivity:
            q = np.einsum("...zl,...lb->...zb", kel, ahat22)
            r = np.einsum("...ak,...kz->...az", ahat22, kel)
            e1 = e1 + 2.0 * (j_in * c1b)[..., None, None] * (
                np.einsum("...zb,...azgd->...abgd", q, s)
                + np.einsum("...az,...zbgd->...abgd", r, s))
        blocks.e += e1
    return blocks


def dissipation_increment(branch: MaxwellBranch, ahat_old3, ahat_new3, sigma1):
    """Pointwise density increment sigma_1 : (ahat_co_new - ahat_co_old)/2.

    Backward-rectangle quadrature in time, consistent with implicit Euler;
    the caller multiplies by the current area measure.
    """
    dinel = 0.5 * (inv2(to22(ahat_new3), what="intermediate metric")
                   - inv2(to22(ahat_old3), what="intermediate metric"))
    return np.einsum("...ab,...ab->...", sigma1, dinel)


def stability_factor(branch: MaxwellBranch, dt):
    """Amplification factor of the Neo-Hookean implicit-Euler update (< 1 for dt > 0)."""
    return branch.eta_s / (branch.eta_s + branch.membrane.mu * dt)
