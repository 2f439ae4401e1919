"""Homogeneous material-point simulator.

Imposes metric/curvature histories a_ab(t), b_ab(t) (or a traction for the
creep mode) and integrates the full constitutive machinery without any FE
assembly: the same stresses, local updates and dissipation as one quadrature
point of the FE solver.  Pressure recovery for balloon/sphere programs uses
p = 2 T_nu / r with T_nu the physical in-plane traction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError, ViscoShellError
from .geometry import state_from_metric
from .materials import (MaterialSpec, bending_moment, bending_stress,
                        membrane_stress)
from .maxwell import (MaxwellHistory, dissipation_increment,
                      maxwell_stress_and_moment, to22,
                      update_intermediate_curvature, update_intermediate_metric)


@dataclass
class KinematicProgram:
    """Imposed metric/curvature history for the point driver.

    a_co(t) and b_co(t) return 2x2 arrays; radius (if set) activates
    pressure recovery with current radius r = lam(t) * radius.
    """

    a_co: object
    b_co: object = None
    A_co: np.ndarray = field(default_factory=lambda: np.eye(2))
    B_co: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))
    radius: float = None
    lam: object = None


def pure_shear(u_fn, L0=1.0) -> KinematicProgram:
    """lam_y = 1 + u/L0 on the top edge, lam_x = 1/lam_y."""
    def a_co(t):
        ly = 1.0 + u_fn(t) / L0
        return np.diag([1.0 / ly**2, ly**2])
    return KinematicProgram(a_co=a_co)


def pure_dilatation(u_fn, L0=1.0) -> KinematicProgram:
    def a_co(t):
        lam = 1.0 + u_fn(t) / L0
        return lam**2 * np.eye(2)
    return KinematicProgram(a_co=a_co)


def cyclic(omega, amplitude=0.25, L0=1.0) -> KinematicProgram:
    return pure_shear(lambda t: amplitude * L0 * np.sin(omega * t), L0)


def balloon_stretch(lam_fn, radius) -> KinematicProgram:
    return KinematicProgram(a_co=lambda t: lam_fn(t)**2 * np.eye(2),
                            radius=radius, lam=lam_fn)


def sphere_stretch_bend(lam_fn, radius) -> KinematicProgram:
    """a_ab = lam^2 A_ab and b_ab = lam B_ab on a sphere of initial radius R."""
    B = -np.eye(2) / radius
    return KinematicProgram(a_co=lambda t: lam_fn(t)**2 * np.eye(2),
                            b_co=lambda t: lam_fn(t) * B,
                            B_co=B, radius=radius, lam=lam_fn)


class PointDriver:
    """Integrates the constitution of a single material point."""

    def __init__(self, material: MaterialSpec, program: KinematicProgram,
                 ref_area=1.0):
        self.material = material
        self.program = program
        self.ref = state_from_metric(program.A_co, program.B_co)
        self.ref_area = ref_area
        self.histories = [MaxwellHistory.initial(self.ref.a_con, self.ref.b_co)
                          for _ in material.branches]
        self.dissipation = 0.0
        self.max_local_iters = 0

    def _constitution(self, cur, trial_update=True, dt=None):
        """Total stress/moment at state `cur` with trial history updates."""
        mat = self.material
        sigma = np.zeros((2, 2))
        moment = np.zeros((2, 2))
        sigma0 = np.zeros((2, 2))
        if mat.membrane is not None:
            sigma0 += membrane_stress(mat.membrane, self.ref, cur)
        if mat.bending is not None:
            sigma0 += bending_stress(mat.bending, self.ref, cur)
            moment += bending_moment(mat.bending, self.ref, cur)
        sigma += sigma0
        trial = []
        sigma1 = np.zeros((2, 2))
        for branch, hist in zip(mat.branches, self.histories):
            ahat_new, iters = update_intermediate_metric(
                branch, hist.ahat, cur.a_co, cur.a_con, dt)
            self.max_local_iters = max(self.max_local_iters, iters)
            bhat_new = update_intermediate_curvature(branch, hist.bhat, cur.b_co, dt)
            s1, m1 = maxwell_stress_and_moment(branch, ahat_new, bhat_new,
                                               cur.a_co, cur.a_con, cur.b_co)
            sigma1 += s1
            moment += m1
            trial.append((ahat_new, bhat_new, s1))
        return sigma0, sigma1, sigma0 + sigma1, moment, trial

    def _commit(self, cur, trial):
        J = np.sqrt(cur.det_a / self.ref.det_a)
        for branch, hist, (ahat_new, bhat_new, s1) in zip(
                self.material.branches, self.histories, trial):
            inc = dissipation_increment(branch, hist.ahat, ahat_new, s1)
            hist.dissipation += inc
            self.dissipation += float(inc) * float(J) * self.ref_area
            hist.ahat = ahat_new
            hist.bhat = bhat_new

    def _record(self, t, cur, sigma0, sigma1, sigma, moment):
        ref = self.ref
        J = float(np.sqrt(cur.det_a / ref.det_a))
        I1 = float(np.einsum("ab,ab->", ref.a_con, cur.a_co))
        rec = {"t": t, "J": J, "I1": I1,
               "sig11": sigma[0, 0], "sig12": sigma[0, 1], "sig22": sigma[1, 1],
               "sig0_22": sigma0[1, 1], "sig1_22": sigma1[1, 1],
               "sig_phys_11": sigma[0, 0] * cur.a_co[0, 0],
               "sig_phys_22": sigma[1, 1] * cur.a_co[1, 1],
               "M22": moment[1, 1], "dissipation": self.dissipation}
        if self.histories:
            h = self.histories[0]
            ahat22 = to22(h.ahat)
            det_hat_con = float(np.linalg.det(ahat22))
            J_el = float(np.sqrt(cur.det_a * det_hat_con))
            J_in = float(1.0 / np.sqrt(ref.det_a * det_hat_con))
            rec.update({"J_el": J_el, "J_in": J_in,
                        "I1_el": float(np.einsum("ab,ab->", ahat22, cur.a_co)),
                        "ahat11": h.ahat[0], "ahat12": h.ahat[1], "ahat22": h.ahat[2],
                        "bhat11": h.bhat[0], "bhat12": h.bhat[1], "bhat22": h.bhat[2]})
        else:
            rec.update({"J_el": J, "J_in": 1.0, "I1_el": I1})
        if self.program.radius is not None:
            lam = float(self.program.lam(t))
            # physical traction on any meridian cut; programs keep a_co = lam^2 I
            N = sigma + np.einsum("ag,gd,db->ab", cur.a_con, cur.b_co, moment)
            T_nu = float(N[0, 0] * cur.a_co[0, 0])
            rec["p"] = 2.0 * T_nu / (lam * self.program.radius)
            rec["lam"] = lam
        return rec

    def drive(self, dt, t_end):
        """March the imposed program with constant steps; returns records."""
        nsteps = int(round(t_end / dt))
        if abs(nsteps * dt - t_end) > 1e-9 * max(1.0, abs(t_end)):
            raise ViscoShellError("t_end must be an integer multiple of dt")
        prog = self.program
        records = []
        for n in range(1, nsteps + 1):
            t = n * dt
            b = prog.b_co(t) if prog.b_co is not None else np.zeros((2, 2))
            cur = state_from_metric(prog.a_co(t), b)
            sigma0, sigma1, sigma, moment, trial = self._constitution(cur, dt=dt)
            self._commit(cur, trial)
            records.append(self._record(t, cur, sigma0, sigma1, sigma, moment))
        return records

    def drive_creep(self, traction_fn, dt, t_end, lam0=1.0):
        """Equibiaxial creep: solve sig_phys(lam) = imposed traction per step.

        Safeguarded scalar Newton (secant derivative, bisection fallback).
        """
        nsteps = int(round(t_end / dt))
        records = []
        lam = lam0

        def resid(lam_trial, tbar):
            cur = state_from_metric(lam_trial**2 * np.eye(2))
            _, _, sigma, moment, trial = self._constitution(cur, dt=dt)
            return sigma[0, 0] * lam_trial**2 - tbar, cur, trial, sigma, moment

        for n in range(1, nsteps + 1):
            t = n * dt
            tbar = float(traction_fn(t))
            lo, hi = 0.2, 5.0
            rlo = resid(lo, tbar)[0]
            rhi = resid(hi, tbar)[0]
            if rlo * rhi > 0.0:
                raise SolverError(f"creep solve: no bracket in [{lo}, {hi}] at t={t:g}")
            x = np.clip(lam, lo, hi)
            converged = False
            for _ in range(60):
                r, cur, trial, sigma, moment = resid(x, tbar)
                if abs(r) <= 1e-11 * max(1.0, abs(tbar)):
                    converged = True
                    break
                h = 1e-7 * max(1.0, abs(x))
                dr = (resid(x + h, tbar)[0] - resid(x - h, tbar)[0]) / (2.0 * h)
                same_sign_as_lo = (r < 0.0) == (rlo < 0.0)
                if same_sign_as_lo:
                    lo = x
                else:
                    hi = x
                step = -r / dr if dr != 0.0 else np.nan
                x_new = x + step
                if not np.isfinite(x_new) or not (lo < x_new < hi):
                    x_new = 0.5 * (lo + hi)
                x = x_new
            if not converged:
                raise SolverError(
                    f"creep scalar Newton stalled at t={t:g}, bracket [{lo:g}, {hi:g}]")
            lam = x
            self._commit(cur, trial)
            sigma0 = sigma - sum(s for (_, _, s) in trial) if trial else sigma
            sigma1 = sigma - sigma0
            rec = self._record(t, cur, sigma0, sigma1, sigma, moment)
            rec["lam"] = lam
            rec["u"] = lam - 1.0
            records.append(rec)
        return records


def frequency_sweep(material_fn, omegas, cycles=10, total_steps=10000,
                    amplitude=0.25, threads=1):
    """Dissipation after `cycles` loading-unloading cycles for each frequency.

    material_fn() builds a fresh MaterialSpec per run (histories are stateful).
    Returns a list of (omega, dissipation) in input order.
    """
    def one(omega):
        t_end = 2.0 * np.pi * cycles / omega
        drv = PointDriver(material_fn(), cyclic(omega, amplitude))
        recs = drv.drive(t_end / total_steps, t_end)
        return recs[-1]["dissipation"]

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            ds = list(pool.map(one, omegas))
    else:
        ds = [one(w) for w in omegas]
    return list(zip(omegas, ds))
