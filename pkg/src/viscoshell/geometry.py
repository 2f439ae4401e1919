"""Curvilinear surface quantities at material points.

All functions are pure and accept arrays with arbitrary leading batch
dimensions; the trailing dimensions carry the tensor structure (2x2 metrics,
3-vectors, ...).  Reference-configuration states are computed once and shared
read-only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, DegenerateMetricError

EPS_GEO = 1e-12  # degeneracy threshold in nondimensional model units


def det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def inv2(m, *, err=DegenerateMetricError, what="2x2 metric"):
    """Closed-form adjugate inverse of (..., 2, 2) matrices."""
    d = det2(m)
    if np.any(d <= 0.0):
        raise err(f"singular or indefinite {what} (det={np.min(d):g})")
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    return out / d[..., None, None]


@dataclass
class SurfaceState:
    """Metric, curvature and derived quantities of one configuration.

    a1, a2: covariant tangents (..., 3); n: unit normal (..., 3);
    a_co/a_con: co-/contravariant metric (..., 2, 2); b_co: curvature
    components (..., 2, 2); christoffel: Gamma^g_ab as (..., 2, 2, 2)
    indexed [g, a, b] (None outside FE use); H: mean curvature; gauss:
    Gaussian curvature; det_a: det of a_co.
    """

    a1: np.ndarray | None
    a2: np.ndarray | None
    n: np.ndarray | None
    a_co: np.ndarray
    a_con: np.ndarray
    b_co: np.ndarray
    H: np.ndarray
    gauss: np.ndarray
    det_a: np.ndarray
    christoffel: np.ndarray | None = None


def surface_point(basis, controls):
    """Tangents, second parametric derivatives and unit normal from one basis eval.

    controls is (n_e, 3).  Returns (a1, a2, axx, n) with axx of shape (3, 3)
    holding x_,11, x_,12, x_,22 rows.
    """
    x = np.asarray(controls, dtype=float)
    a = basis.d1.T @ x              # (2, 3)
    axx = basis.d2.T @ x            # (3, 3)
    cr = np.cross(a[0], a[1])
    nrm = np.linalg.norm(cr)
    if nrm <= EPS_GEO:
        raise DegenerateGeometryError(f"|a1 x a2| = {nrm:g} below threshold")
    return a[0], a[1], axx, cr / nrm


def metric_and_curvature(a1, a2, axx, n, with_christoffel=True) -> SurfaceState:
    """Assemble a SurfaceState from tangents/second derivatives/normal.

    Works on single points: a1, a2, n are (3,), axx is (3, 3).
    b_ab = x_,ab . n; H = 1/2 a^ab b_ab; kappa = det(a^ag b_gb).
    """
    a_co = np.array([[a1 @ a1, a1 @ a2], [a1 @ a2, a2 @ a2]])
    a_con = inv2(a_co)
    b = axx @ n  # (b11, b12, b22)
    b_co = np.array([[b[0], b[1]], [b[1], b[2]]])
    mixed = a_con @ b_co
    H = 0.5 * np.trace(mixed)
    gauss = det2(mixed)
    gamma = None
    if with_christoffel:
        # Gamma^g_ab = x_,ab . a^g
        a_up = a_con @ np.stack([a1, a2])   # (2, 3) contravariant tangents
        g = axx @ a_up.T                    # (3 slots, 2)
        gamma = np.empty((2, 2, 2))
        for gi in range(2):
            gamma[gi] = np.array([[g[0, gi], g[1, gi]], [g[1, gi], g[2, gi]]])
    return SurfaceState(a1=a1, a2=a2, n=n, a_co=a_co, a_con=a_con, b_co=b_co,
                        H=H, gauss=gauss, det_a=det2(a_co), christoffel=gamma)


def state_from_metric(a_co, b_co=None) -> SurfaceState:
    """SurfaceState carrying only metric/curvature data (point-driver use)."""
    a_co = np.asarray(a_co, dtype=float)
    if b_co is None:
        b_co = np.zeros_like(a_co)
    b_co = np.asarray(b_co, dtype=float)
    a_con = inv2(a_co)
    mixed = a_con @ b_co
    return SurfaceState(a1=None, a2=None, n=None, a_co=a_co, a_con=a_con,
                        b_co=b_co, H=0.5 * np.trace(mixed, axis1=-2, axis2=-1),
                        gauss=det2(mixed), det_a=det2(a_co))


def invariants(A_con, a_co, A_co):
    """First invariant I1 = A^ab a_ab and surface stretch J."""
    i1 = np.einsum("...ab,...ab->...", A_con, a_co)
    j = np.sqrt(det2(a_co) / det2(A_co))
    return i1, j


@dataclass
class SplitState:
    """Elastic/inelastic split quantities induced by the intermediate metric."""

    ahat_con: np.ndarray
    ahat_co: np.ndarray
    bhat_co: np.ndarray | None
    J: np.ndarray
    J_el: np.ndarray
    J_in: np.ndarray
    I1: np.ndarray
    I1_el: np.ndarray
    eps: np.ndarray
    eps_el: np.ndarray
    eps_in: np.ndarray
    kappa: np.ndarray | None = None
    kappa_el: np.ndarray | None = None
    kappa_in: np.ndarray | None = None


def split_quantities(a_co, A_co, ahat_con, b_co=None, B_co=None, bhat_co=None) -> SplitState:
    """Multiplicative stretch split and additive strain/curvature splits.

    J = J_el * J_in with J_el = sqrt(det a_co * det ahat_con) and
    J_in = 1 / sqrt(det A_co * det ahat_con); eps = eps_el + eps_in with
    eps_el = (a - ahat)/2, eps_in = (ahat - A)/2.
    """
    ahat_con = np.asarray(ahat_con, dtype=float)
    ahat_co = inv2(ahat_con, what="intermediate metric")
    det_a = det2(a_co)
    det_A = det2(A_co)
    det_hat_con = det2(ahat_con)
    J = np.sqrt(det_a / det_A)
    J_el = np.sqrt(det_a * det_hat_con)
    J_in = np.sqrt(1.0 / (det_A * det_hat_con))
    A_con = inv2(A_co)
    I1 = np.einsum("...ab,...ab->...", A_con, a_co)
    I1_el = np.einsum("...ab,...ab->...", ahat_con, a_co)
    eps = 0.5 * (a_co - A_co)
    eps_el = 0.5 * (a_co - ahat_co)
    eps_in = 0.5 * (ahat_co - A_co)
    kap = kap_el = kap_in = None
    if b_co is not None and B_co is not None and bhat_co is not None:
        kap = b_co - B_co
        kap_el = b_co - bhat_co
        kap_in = bhat_co - B_co
    return SplitState(ahat_con=ahat_con, ahat_co=ahat_co, bhat_co=bhat_co,
                      J=J, J_el=J_el, J_in=J_in, I1=I1, I1_el=I1_el,
                      eps=eps, eps_el=eps_el, eps_in=eps_in,
                      kappa=kap, kappa_el=kap_el, kappa_in=kap_in)


def principal_stretches(A_con, a_co):
    """Principal surface stretches: sqrt of eigenvalues of A^ag a_gb."""
    mixed = np.einsum("...ag,...gb->...ab", A_con, a_co)
    tr = mixed[..., 0, 0] + mixed[..., 1, 1]
    dt = det2(mixed)
    disc = np.sqrt(np.maximum(tr * tr / 4.0 - dt, 0.0))
    lam2 = np.stack([tr / 2.0 - disc, tr / 2.0 + disc], axis=-1)
    return np.sqrt(np.maximum(lam2, 0.0))
