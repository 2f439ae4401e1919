"""Global assembly, Dirichlet handling, time stepping and Newton-Raphson."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .element import InternalResult, LoadSpec, PatchAssembler
from .errors import SolverError
from .geometry import det2, inv2
from .maxwell import to22

NEWTON_MAXITER = 30
NEWTON_RTOL = 1e-9     # on ||r||_2, load-normalized
NEWTON_XTOL = 1e-10    # fallback on ||dx||_2


def _const(v):
    return (lambda t, _v=v: _v)


class DofMap:
    """Free/prescribed partition of the 3*ncp displacement components.

    Prescribed entries carry displacement time functions; every DOF is
    exactly one of free or prescribed (re-fixing overwrites).
    """

    def __init__(self, ncp):
        self.ncp = ncp
        self.prescribed = {}

    def fix(self, cps, comp, value=0.0):
        func = value if callable(value) else _const(float(value))
        for cp in np.atleast_1d(cps):
            self.prescribed[(int(cp), int(comp))] = func
        return self

    def free_mask(self):
        mask = np.ones((self.ncp, 3), dtype=bool)
        for (cp, comp) in self.prescribed:
            mask[cp, comp] = False
        return mask.ravel()

    def apply(self, x, X, t):
        for (cp, comp), func in self.prescribed.items():
            x[cp, comp] = X[cp, comp] + float(func(t))


@dataclass
class StepInfo:
    t: float
    iterations: int
    residual_norms: list
    local_iters: int
    converged: bool


@dataclass
class RunResult:
    times: np.ndarray
    records: list
    x: np.ndarray
    histories: list
    dissipation: np.ndarray
    step_infos: list
    split_dev: float  # max |J - J_el J_in| and strain/curvature split defects


def newton_step(assembler: PatchAssembler, x, dt, histories, loads, t, free,
                history_sensitivity=True):
    """Solve one load/time step with Newton-Raphson (backtracking line search).

    Full steps are always tried first, so the quadratic tail of a converging
    iteration is untouched; backtracking only rescues oversized increments.
    Returns (x, InternalResult at the converged state, StepInfo).
    """

    def residual_at(xc, want_stiffness):
        result = assembler.internal(xc, dt, histories,
                                    history_sensitivity=history_sensitivity)
        f_ext, K_ext = assembler.external(xc, loads, t,
                                          want_stiffness=want_stiffness)
        r = (result.f_int - f_ext).ravel()[free]
        return result, K_ext, r, float(np.linalg.norm(r)), \
            float(np.linalg.norm(f_ext.ravel()[free]))

    rnorms = []
    result, K_ext, r, rnorm, fnorm = residual_at(x, True)
    for it in range(NEWTON_MAXITER + 1):
        rnorms.append(rnorm)
        tol = NEWTON_RTOL * max(1.0, fnorm)
        if rnorm <= tol:
            return x, result, StepInfo(t, it, rnorms, result.local_iters, True)
        if it == NEWTON_MAXITER:
            break
        K = result.K if K_ext is None else result.K - K_ext
        try:
            dx = spla.spsolve(K[free][:, free].tocsc(), -r)
        except Exception as exc:
            raise SolverError(f"linear solve failed at t={t:g}",
                              residual_norm=rnorm) from exc
        if not np.all(np.isfinite(dx)):
            raise SolverError(f"singular tangent at t={t:g}", residual_norm=rnorm)

        alpha, best = 1.0, None
        for _ in range(9):
            x_try = x.copy()
            xf = x_try.ravel()
            xf[free] += alpha * dx
            trial = residual_at(x_try, True)
            if best is None or trial[3] < best[1][3]:
                best = (x_try, trial, alpha)
            if trial[3] <= (1.0 - 1e-4 * alpha) * rnorm or trial[3] <= tol:
                best = (x_try, trial, alpha)
                break
            alpha *= 0.5
        x, (result, K_ext, r, rnorm_new, fnorm), alpha = best
        if rnorm_new >= rnorm and alpha < 1.0:
            raise SolverError(f"Newton diverged at t={t:g}", iterations=it,
                              residual_norm=rnorm_new)
        rnorm = rnorm_new
        if alpha * np.linalg.norm(dx) <= NEWTON_XTOL:
            rnorms.append(rnorm)
            return x, result, StepInfo(t, it + 1, rnorms, result.local_iters, True)
    raise SolverError(f"Newton did not converge at t={t:g}",
                      iterations=NEWTON_MAXITER, residual_norm=rnorms[-1])


def _split_deviation(assembler, result: InternalResult):
    """Max violation of J = J_el J_in and the additive strain/curvature splits."""
    dev = 0.0
    kin = result.kin
    for (ahat_new, bhat_new, _s1) in result.trial:
        ahat22 = to22(ahat_new)
        ahat_co = inv2(ahat22, what="intermediate metric")
        j_el = np.sqrt(det2(kin.state.a_co) * det2(ahat22))
        j_in = np.sqrt(det2(ahat_co) / assembler.ref.det_a)
        dev = max(dev, float(np.max(np.abs(kin.J - j_el * j_in))))
        eps = 0.5 * (kin.state.a_co - assembler.ref.a_co)
        eps_el = 0.5 * (kin.state.a_co - ahat_co)
        eps_in = 0.5 * (ahat_co - assembler.ref.a_co)
        dev = max(dev, float(np.max(np.abs(eps - eps_el - eps_in))))
        kap = kin.state.b_co - assembler.ref.b_co
        kap_el = kin.state.b_co - to22(bhat_new)
        kap_in = to22(bhat_new) - assembler.ref.b_co
        dev = max(dev, float(np.max(np.abs(kap - kap_el - kap_in))))
    return dev


def run(assembler: PatchAssembler, dofmap: DofMap, loads: LoadSpec, dt, t_end,
        probes=None, history_sensitivity=True, x0=None, check_splits=True):
    """Constant-step implicit time integration with history commit per step."""
    nsteps = int(round(t_end / dt))
    if abs(nsteps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise SolverError("t_end must be an integer multiple of dt")
    X = assembler.mesh.controls
    x = X.copy() if x0 is None else x0.copy()
    histories = assembler.initial_histories()
    free = dofmap.free_mask()
    records = []
    infos = []
    diss = np.zeros(nsteps + 1)
    times = np.linspace(0.0, t_end, nsteps + 1)
    total_diss = 0.0
    split_dev = 0.0
    x_prev = None
    for step in range(1, nsteps + 1):
        t = times[step]
        if x_prev is not None:
            x_pred = 2.0 * x - x_prev  # secant predictor for the Newton start
            x_prev = x.copy()
            x = x_pred
        else:
            x_prev = x.copy()
        dofmap.apply(x, X, t)
        try:
            x, result, info = newton_step(assembler, x, dt, histories, loads, t,
                                          free, history_sensitivity)
        except SolverError:
            # retry once from the last converged state (predictor overshoot)
            x = x_prev.copy()
            dofmap.apply(x, X, t)
            try:
                x, result, info = newton_step(assembler, x, dt, histories, loads,
                                              t, free, history_sensitivity)
            except SolverError as exc:
                exc.step = step
                raise
        if check_splits:
            split_dev = max(split_dev, _split_deviation(assembler, result))
        total_diss += assembler.commit(histories, result)
        diss[step] = total_diss
        infos.append(info)
        if probes is not None:
            rec = {"t": t, "newton_iters": info.iterations,
                   "local_iters": info.local_iters, "dissipation": total_diss}
            rec.update(probes(assembler, x, result, histories, t))
            records.append(rec)
    return RunResult(times=times, records=records, x=x, histories=histories,
                     dissipation=diss, step_infos=infos, split_dev=split_dev)
