"""Batched element quadrature: internal/external forces and stiffness blocks.

The assembler caches every geometry-independent quantity (basis values,
reference states, quadrature weights) at construction; each call then runs
a handful of vectorized contractions over all quadrature points of the
patch.  Stiffness blocks follow the material/geometric decomposition
k = k_tt + k_tM + k_Mt + k_MM + k_t + k_M plus exact follower-load terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import InvertedElementError, ProjectionError
from .geometry import SurfaceState, det2, inv2
from .materials import (MaterialSpec, TangentBlocks, bending_moment,
                        bending_stress, elastic_tangents, membrane_stress)
from .maxwell import (MaxwellHistory, dissipation_increment,
                      maxwell_stress_and_moment, maxwell_tangents, to22,
                      update_intermediate_curvature, update_intermediate_metric)
from .mesh import PatchMesh, gauss_legendre01


def _skew(v):
    s = np.zeros(v.shape[:-1] + (3, 3))
    s[..., 0, 1] = -v[..., 2]
    s[..., 0, 2] = v[..., 1]
    s[..., 1, 0] = v[..., 2]
    s[..., 1, 2] = -v[..., 0]
    s[..., 2, 0] = -v[..., 1]
    s[..., 2, 1] = v[..., 0]
    return s


@dataclass
class LoadSpec:
    """Time-dependent external loads; every entry may be None.

    pressure: follower pressure p(t) along the current normal.
    body_force: dead force density (t -> 3-vector) per reference area.
    tangential: (t -> (f1, f2)) components along the current tangents,
        per current area.
    edge_tractions: edge name -> (t -> 3-vector), per current edge length.
    edge_moments: edge name -> (t -> scalar), distributed moment about the
        current edge tangent (counterclockwise traversal orientation).
    """

    pressure: object = None
    body_force: object = None
    tangential: object = None
    edge_tractions: dict = field(default_factory=dict)
    edge_moments: dict = field(default_factory=dict)


@dataclass
class Kinematics:
    """Current-configuration quantities at all quadrature points."""

    aal: np.ndarray        # (nel, nq, 2, 3) covariant tangents
    cr: np.ndarray         # (nel, nq, 3) a1 x a2
    jac: np.ndarray        # (nel, nq)
    state: SurfaceState    # batched current state
    a_up: np.ndarray       # (nel, nq, 2, 3) contravariant tangents
    covd2: np.ndarray      # (nel, nq, n_e, 2, 2) covariant second derivatives
    J: np.ndarray          # (nel, nq) surface stretch


@dataclass
class InternalResult:
    f_int: np.ndarray
    K: object
    trial: list
    kin: Kinematics
    local_iters: int
    sigma: np.ndarray
    moment: np.ndarray


class PatchAssembler:
    """Assembly engine for one NURBS patch with one material spec."""

    def __init__(self, mesh: PatchMesh, material: MaterialSpec):
        self.mesh = mesh
        self.material = material
        p, q = mesh.p, mesh.q
        gx, wx = gauss_legendre01(p + 1)
        ge, we = gauss_legendre01(q + 1)
        self.nq = (p + 1) * (q + 1)
        nel, ne, nq = mesh.nel, mesh.n_e, self.nq

        N = np.empty((nel, nq, ne))
        dN = np.empty((nel, nq, ne, 2))
        d2N = np.empty((nel, nq, ne, 3))
        gw = np.empty((nel, nq))
        for e in range(nel):
            (x0, x1), (e0, e1) = mesh.element_box(e)
            ei, ej = e % mesh.nel_xi, e // mesh.nel_xi
            wts = mesh.weights[mesh.conn[e]]
            k = 0
            for j in range(q + 1):
                for i in range(p + 1):
                    xi = x0 + gx[i] * (x1 - x0)
                    eta = e0 + ge[j] * (e1 - e0)
                    from .splines import nurbs_element_eval
                    be = nurbs_element_eval(mesh.ops_xi[ei], mesh.ops_eta[ej],
                                            ((x0, x1), (e0, e1)), wts, xi, eta)
                    N[e, k] = be.values
                    dN[e, k] = be.d1
                    d2N[e, k] = be.d2
                    gw[e, k] = wx[i] * we[j] * (x1 - x0) * (e1 - e0)
                    k += 1
        self.N, self.dN, self.d2N, self.gw = N, dN, d2N, gw

        # reference kinematics
        X = mesh.controls
        xq = X[mesh.conn]
        Aal = np.einsum("eqna,enx->eqax", dN, xq)
        Axx = np.einsum("eqns,enx->eqsx", d2N, xq)
        cr = np.cross(Aal[..., 0, :], Aal[..., 1, :])
        jac = np.linalg.norm(cr, axis=-1)
        if np.any(jac <= 0.0):
            raise InvertedElementError("degenerate reference geometry")
        Nrm = cr / jac[..., None]
        A_co = np.einsum("eqax,eqbx->eqab", Aal, Aal)
        A_con = inv2(A_co)
        B3 = np.einsum("eqsx,eqx->eqs", Axx, Nrm)
        B_co = to22(B3)
        mixed = np.einsum("eqag,eqgb->eqab", A_con, B_co)
        self.ref = SurfaceState(a1=Aal[..., 0, :], a2=Aal[..., 1, :], n=Nrm,
                                a_co=A_co, a_con=A_con, b_co=B_co,
                                H=0.5 * np.trace(mixed, axis1=-2, axis2=-1),
                                gauss=det2(mixed), det_a=det2(A_co))
        self.wJ = gw * jac  # reference area measure incl. quadrature weights

        dofs = (3 * mesh.conn[:, :, None] + np.arange(3)).reshape(nel, 3 * ne)
        self.rows = np.repeat(dofs[:, :, None], 3 * ne, axis=2)
        self.cols = np.repeat(dofs[:, None, :], 3 * ne, axis=1)
        self.ndof = 3 * mesh.ncp

        # boundary-edge caches
        self.edges = {}
        for name in ("xi-", "xi+", "eta-", "eta+"):
            elems, t_idx, sign = mesh.edge_elements(name)
            n1 = (p + 1) if t_idx == 0 else (q + 1)
            g1, w1 = gauss_legendre01(n1)
            eN = np.empty((len(elems), n1, ne))
            edN = np.empty((len(elems), n1, ne, 2))
            egw = np.empty((len(elems), n1))
            for ke, e in enumerate(elems):
                (x0, x1), (e0, e1) = mesh.element_box(e)
                ei, ej = e % mesh.nel_xi, e // mesh.nel_xi
                wts = mesh.weights[mesh.conn[e]]
                for kq, g in enumerate(g1):
                    if t_idx == 0:
                        xi = x0 + g * (x1 - x0)
                        eta = e0 if name == "eta-" else e1
                        scale = x1 - x0
                    else:
                        eta = e0 + g * (e1 - e0)
                        xi = x0 if name == "xi-" else x1
                        scale = e1 - e0
                    from .splines import nurbs_element_eval
                    be = nurbs_element_eval(mesh.ops_xi[ei], mesh.ops_eta[ej],
                                            ((x0, x1), (e0, e1)), wts, xi, eta)
                    eN[ke, kq] = be.values
                    edN[ke, kq] = be.d1
                    egw[ke, kq] = w1[kq] * scale
            xt0 = np.einsum("kqn,knx->kqx", edN[..., t_idx],
                            mesh.controls[mesh.conn[np.asarray(elems)]])
            jac0 = np.linalg.norm(xt0, axis=-1)
            self.edges[name] = dict(elems=np.asarray(elems), t=t_idx, sign=sign,
                                    N=eN, dN=edN, gw=egw, jac0=jac0,
                                    ehat=sign * xt0 / jac0[..., None])

    # ------------------------------------------------------------- histories

    def initial_histories(self):
        return [MaxwellHistory.initial(self.ref.a_con, self.ref.b_co)
                for _ in self.material.branches]

    # ------------------------------------------------------------ kinematics

    def kinematics(self, x) -> Kinematics:
        mesh = self.mesh
        xq = x[mesh.conn]
        aal = np.einsum("eqna,enx->eqax", self.dN, xq)
        axx = np.einsum("eqns,enx->eqsx", self.d2N, xq)
        cr = np.cross(aal[..., 0, :], aal[..., 1, :])
        jac = np.linalg.norm(cr, axis=-1)
        a_co = np.einsum("eqax,eqbx->eqab", aal, aal)
        det_a = det2(a_co)
        bad = det_a <= 0.0
        if np.any(bad):
            e = int(np.argwhere(np.any(bad, axis=1))[0, 0])
            raise InvertedElementError(f"element {e}: surface stretch J <= 0", element=e)
        n = cr / jac[..., None]
        a_con = inv2(a_co)
        b3 = np.einsum("eqsx,eqx->eqs", axx, n)
        b_co = to22(b3)
        mixed = np.einsum("eqag,eqgb->eqab", a_con, b_co)
        a_up = np.einsum("eqgd,eqdx->eqgx", a_con, aal)
        gamma = np.einsum("eqsx,eqgx->eqsg", axx, a_up)  # (.., 3 slots, 2)
        covd2_slots = self.d2N - np.einsum("eqsg,eqng->eqns", gamma, self.dN)
        covd2 = np.empty(covd2_slots.shape[:-1] + (2, 2))
        covd2[..., 0, 0] = covd2_slots[..., 0]
        covd2[..., 0, 1] = covd2_slots[..., 1]
        covd2[..., 1, 0] = covd2_slots[..., 1]
        covd2[..., 1, 1] = covd2_slots[..., 2]
        state = SurfaceState(a1=aal[..., 0, :], a2=aal[..., 1, :], n=n,
                             a_co=a_co, a_con=a_con, b_co=b_co,
                             H=0.5 * np.trace(mixed, axis1=-2, axis2=-1),
                             gauss=det2(mixed), det_a=det_a)
        return Kinematics(aal=aal, cr=cr, jac=jac, state=state, a_up=a_up,
                          covd2=covd2, J=np.sqrt(det_a / self.ref.det_a))

    # ------------------------------------------------------- internal forces

    def internal(self, x, dt, histories, history_sensitivity=True,
                 want_stiffness=True) -> InternalResult:
        """Internal force vector, tangent matrix and trial history updates."""
        kin = self.kinematics(x)
        cur, ref = kin.state, self.ref
        batch = (self.mesh.nel, self.nq)
        sigma = np.zeros(batch + (2, 2))
        moment = np.zeros(batch + (2, 2))
        blocks = TangentBlocks.zeros(batch) if want_stiffness else None

        mat = self.material
        if mat.membrane is not None:
            sigma += membrane_stress(mat.membrane, ref, cur)
            if want_stiffness:
                blocks += elastic_tangents(mat.membrane, ref, cur)
        if mat.bending is not None:
            sigma += bending_stress(mat.bending, ref, cur)
            moment += bending_moment(mat.bending, ref, cur)
            if want_stiffness:
                blocks += elastic_tangents(mat.bending, ref, cur)

        trial = []
        local_iters = 0
        for branch, hist in zip(mat.branches, histories):
            ahat_new, iters = update_intermediate_metric(
                branch, hist.ahat, cur.a_co, cur.a_con, dt)
            local_iters = max(local_iters, iters)
            bhat_new = update_intermediate_curvature(branch, hist.bhat, cur.b_co, dt)
            s1, m1 = maxwell_stress_and_moment(branch, ahat_new, bhat_new,
                                               cur.a_co, cur.a_con, cur.b_co)
            sigma += s1
            moment += m1
            if want_stiffness:
                blocks += maxwell_tangents(branch, ahat_new, bhat_new,
                                           cur.a_co, cur.a_con, cur.b_co,
                                           ref.det_a, dt,
                                           history_sensitivity=history_sensitivity)
            trial.append((ahat_new, bhat_new, s1))

        J = kin.J[..., None, None]
        tau = J * sigma
        m0 = J * moment

        dN, wJ = self.dN, self.wJ
        fe = np.einsum("eq,eqab,eqna,eqbx->enx", wJ, tau, dN, kin.aal, optimize=True)
        fe += np.einsum("eq,eqab,eqnab,eqx->enx", wJ, m0, kin.covd2, cur.n, optimize=True)
        f_int = np.zeros((self.mesh.ncp, 3))
        np.add.at(f_int, self.mesh.conn, fe)

        K = None
        if want_stiffness:
            nel, nq, ne = self.N.shape
            ne3 = 3 * ne
            # membrane/bending strain-displacement rows as (nel, nq, 4, 3 n_e)
            Bm = np.einsum("eqna,eqbx->eqabnx", dN, kin.aal).reshape(nel, nq, 4, ne3)
            Bb = np.einsum("eqnab,eqx->eqabnx", kin.covd2, cur.n).reshape(nel, nq, 4, ne3)
            cf = blocks.c.reshape(nel, nq, 4, 4)
            df = blocks.d.reshape(nel, nq, 4, 4)
            ef = blocks.e.reshape(nel, nq, 4, 4)
            ff = blocks.f.reshape(nel, nq, 4, 4)
            p1 = (cf @ Bm + df @ Bb) * wJ[..., None, None]
            p2 = (ef @ Bm + ff @ Bb) * wJ[..., None, None]
            ke = Bm.reshape(nel, nq * 4, ne3).transpose(0, 2, 1) \
                @ p1.reshape(nel, nq * 4, ne3)
            ke += Bb.reshape(nel, nq * 4, ne3).transpose(0, 2, 1) \
                @ p2.reshape(nel, nq * 4, ne3)
            ke = ke.reshape(nel, ne, 3, ne, 3)
            # geometric stress term (block-diagonal in the 3 components)
            ktau = np.einsum("eq,eqab,eqna,eqmb->enm", wJ, tau, dN, dN, optimize=True)
            ke += ktau[:, :, None, :, None] * np.eye(3)[None, None, :, None, :]
            # geometric bending terms k_M1 + k_M2 + k_M2^T
            G = np.einsum("eqng,eqx->eqgnx", dN, cur.n).reshape(nel, nq, 2, ne3)
            s1g = (wJ * np.einsum("eqab,eqab->eq", cur.b_co, m0))[..., None, None]
            TG = (cur.a_con @ G) * s1g
            km1 = -(G.reshape(nel, nq * 2, ne3).transpose(0, 2, 1)
                    @ TG.reshape(nel, nq * 2, ne3))
            w_m = np.einsum("eqab,eqmab->eqm", m0, kin.covd2)
            V = np.einsum("eqgy,eqm->eqgmy", kin.a_up, w_m).reshape(nel, nq, 2, ne3)
            km2 = -(G.reshape(nel, nq * 2, ne3).transpose(0, 2, 1)
                    @ (V * wJ[..., None, None]).reshape(nel, nq * 2, ne3))
            ke += (km1 + km2 + np.swapaxes(km2, 1, 2)).reshape(nel, ne, 3, ne, 3)
            K = sp.coo_matrix((ke.ravel(), (self.rows.ravel(), self.cols.ravel())),
                              shape=(self.ndof, self.ndof)).tocsr()
        return InternalResult(f_int=f_int, K=K, trial=trial, kin=kin,
                              local_iters=local_iters, sigma=sigma, moment=moment)

    def commit(self, histories, result: InternalResult):
        """Write trial histories back and accumulate dissipation.

        Returns the global dissipation increment (integral over the current
        surface of sigma_1 : d eps_in).
        """
        total = 0.0
        wda = self.gw * result.kin.jac  # current area measure
        for branch, hist, (ahat_new, bhat_new, s1) in zip(
                self.material.branches, histories, result.trial):
            inc = dissipation_increment(branch, hist.ahat, ahat_new, s1)
            hist.dissipation += inc
            total += float(np.sum(wda * inc))
            hist.ahat = ahat_new
            hist.bhat = bhat_new
        return total

    # ------------------------------------------------------- external forces

    def external(self, x, loads: LoadSpec, t, want_stiffness=True):
        """Follower/dead loads and their exact linearization."""
        f_ext = np.zeros((self.mesh.ncp, 3))
        kdata = []

        def add_k(ke):
            ne3 = 3 * self.mesh.n_e
            kdata.append(ke.reshape(-1, ne3, ne3))

        need_kin = (loads.pressure is not None or loads.tangential is not None)
        if need_kin:
            kin = self.kinematics(x)

        if loads.pressure is not None:
            p = float(loads.pressure(t))
            fe = p * np.einsum("eq,eqn,eqx->enx", self.gw, self.N, kin.cr)
            np.add.at(f_ext, self.mesh.conn, fe)
            if want_stiffness:
                s1 = _skew(kin.aal[..., 0, :])
                s2 = _skew(kin.aal[..., 1, :])
                ke = p * np.einsum("eq,eqn,eqxy,eqm->enxmy", self.gw, self.N,
                                   s1, self.dN[..., 1], optimize=True)
                ke -= p * np.einsum("eq,eqn,eqxy,eqm->enxmy", self.gw, self.N,
                                    s2, self.dN[..., 0], optimize=True)
                add_k(ke)

        if loads.body_force is not None:
            fv = np.asarray(loads.body_force(t), dtype=float)
            fe = np.einsum("eq,eqn,x->enx", self.wJ, self.N, fv)
            np.add.at(f_ext, self.mesh.conn, fe)

        if loads.tangential is not None:
            f12 = np.asarray(loads.tangential(t), dtype=float)
            fvec = np.einsum("a,eqax->eqx", f12, kin.aal)
            fe = np.einsum("eq,eq,eqn,eqx->enx", self.gw, kin.jac, self.N, fvec)
            np.add.at(f_ext, self.mesh.conn, fe)
            if want_stiffness:
                ke = np.einsum("eq,eq,eqn,a,eqma->enm", self.gw, kin.jac,
                               self.N, f12, self.dN, optimize=True)
                kee = ke[:, :, None, :, None] * np.eye(3)[None, None, :, None, :]
                s1 = _skew(kin.aal[..., 0, :])
                s2 = _skew(kin.aal[..., 1, :])
                dcr = np.einsum("eqzy,eqm->eqmzy", s1, self.dN[..., 1]) \
                    - np.einsum("eqzy,eqm->eqmzy", s2, self.dN[..., 0])
                djac = np.einsum("eqz,eqmzy->eqmy", kin.cr / kin.jac[..., None], dcr)
                kee += np.einsum("eq,eqn,eqx,eqmy->enxmy", self.gw, self.N,
                                 fvec, djac, optimize=True)
                add_k(kee)

        for name, func in loads.edge_tractions.items():
            T = np.asarray(func(t), dtype=float)
            ed = self.edges[name]
            xq = x[self.mesh.conn[ed["elems"]]]
            xt = np.einsum("kqn,knx->kqx", ed["dN"][..., ed["t"]], xq)
            j1 = np.linalg.norm(xt, axis=-1)
            fe = np.einsum("kq,kq,kqn,x->knx", ed["gw"], j1, ed["N"], T)
            np.add.at(f_ext, self.mesh.conn[ed["elems"]], fe)
            if want_stiffness:
                that = xt / j1[..., None]
                ke = np.zeros((len(ed["elems"]), self.mesh.n_e, 3, self.mesh.n_e, 3))
                ke += np.einsum("kq,kqn,x,kqy,kqm->knxmy", ed["gw"], ed["N"],
                                T, that, ed["dN"][..., ed["t"]], optimize=True)
                kdata.append((ke, ed["elems"]))

        for name, func in loads.edge_moments.items():
            # Distributed moment of magnitude M about the fixed axis ehat
            # (traversal-oriented reference edge tangent), per unit reference
            # edge length.  Weak form: int dn . M (ehat x n) dS0, so
            # f_M[n,x] = -M int W^g dN[n,g] n_x dS0 with W^g = a^g.(ehat x n).
            M = float(func(t))
            ed = self.edges[name]
            conn = self.mesh.conn[ed["elems"]]
            xq = x[conn]
            aal = np.einsum("kqna,knx->kqax", ed["dN"], xq)
            cr = np.cross(aal[..., 0, :], aal[..., 1, :])
            n = cr / np.linalg.norm(cr, axis=-1)[..., None]
            a_con = inv2(np.einsum("kqax,kqbx->kqab", aal, aal))
            a_up = np.einsum("kqgd,kqdx->kqgx", a_con, aal)
            ehat = ed["ehat"]
            w = np.cross(ehat, n)
            w_up = np.einsum("kqgx,kqx->kqg", a_up, w)
            gwr = ed["gw"] * ed["jac0"]
            pm = np.einsum("kqg,kqng->kqn", w_up, ed["dN"])
            fe = -M * np.einsum("kq,kqn,kqx->knx", gwr, pm, n)
            np.add.at(f_ext, conn, fe)
            if want_stiffness:
                dn = -np.einsum("kqdx,kqy,kqmd->kqxmy", a_up, n, ed["dN"])
                # dW^g = dn.(a^g x ehat) - a^ge W^z da_ez + a^gd w_y dN[m,d]
                axe = np.cross(a_up, ehat[..., None, :])
                dW = np.einsum("kqgz,kqzmy->kqgmy", axe, dn)
                da = np.einsum("kqey,kqmz->kqezmy", aal, ed["dN"]) \
                    + np.einsum("kqzy,kqme->kqezmy", aal, ed["dN"])
                dW -= np.einsum("kqge,kqz,kqezmy->kqgmy", a_con, w_up, da)
                dW += np.einsum("kqgd,kqy,kqmd->kqgmy", a_con, w, ed["dN"])
                dP = np.einsum("kqgmy,kqng->kqnmy", dW, ed["dN"])
                ke = -M * (np.einsum("kq,kqnmy,kqx->knxmy", gwr, dP, n, optimize=True)
                           + np.einsum("kq,kqn,kqxmy->knxmy", gwr, pm, dn, optimize=True))
                kdata.append((ke, ed["elems"]))

        K_ext = None
        if want_stiffness:
            parts = []
            for item in kdata:
                if isinstance(item, tuple):
                    ke, elems = item
                    ne3 = 3 * self.mesh.n_e
                    parts.append(sp.coo_matrix(
                        (ke.reshape(-1, ne3, ne3).ravel(),
                         (self.rows[elems].ravel(), self.cols[elems].ravel())),
                        shape=(self.ndof, self.ndof)))
                else:
                    parts.append(sp.coo_matrix(
                        (item.ravel(), (self.rows.ravel(), self.cols.ravel())),
                        shape=(self.ndof, self.ndof)))
            if parts:
                K_ext = sum(parts).tocsr()
        return f_ext, K_ext

    # ---------------------------------------------------------- projections

    def l2_project(self, values):
        """Map per-quadrature-point values (nel, nq) to control-point coefficients."""
        nel, nq, ne = self.N.shape
        g = np.einsum("eq,eqn,eqm->enm", self.wJ, self.N, self.N)
        rows = np.repeat(self.mesh.conn[:, :, None], ne, axis=2)
        cols = np.repeat(self.mesh.conn[:, None, :], ne, axis=1)
        gram = sp.coo_matrix((g.ravel(), (rows.ravel(), cols.ravel())),
                             shape=(self.mesh.ncp, self.mesh.ncp)).tocsr()
        rhs = np.zeros(self.mesh.ncp)
        np.add.at(rhs, self.mesh.conn,
                  np.einsum("eq,eq,eqn->en", self.wJ, values, self.N))
        from scipy.sparse.linalg import spsolve
        try:
            coeffs = spsolve(gram.tocsc(), rhs)
        except Exception as exc:
            raise ProjectionError("singular Gram matrix") from exc
        if not np.all(np.isfinite(coeffs)):
            raise ProjectionError("singular Gram matrix")
        return coeffs

    def eval_coeffs(self, coeffs, xi, eta):
        e, be = self.mesh.eval_basis(xi, eta)
        return float(coeffs[self.mesh.conn[e]] @ be.values)
