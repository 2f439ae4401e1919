"""B-spline / NURBS basis evaluation through Bezier extraction.

Everything here is geometry-independent: basis values at quadrature points
are computed once per mesh and cached.  Evaluation follows the extraction
route (per-element operators applied to Bernstein polynomials); the direct
Cox-de Boor recursion only appears in the test suite as an independent
oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDegreeError, InvalidWeightError, UnsupportedKnotVectorError


def bernstein(p: int, xi: float):
    """Values and first/second derivatives of the p+1 Bernstein polynomials at xi in [0,1].

    Returns (values, d1, d2), each of shape (p+1,).
    """
    if p < 1:
        raise InvalidDegreeError(f"polynomial degree must be >= 1, got {p}")

    def _values(pp, t):
        b = np.zeros(pp + 1)
        b[0] = 1.0
        for j in range(1, pp + 1):
            saved = 0.0
            for k in range(j):
                tmp = b[k]
                b[k] = saved + (1.0 - t) * tmp
                saved = t * tmp
            b[j] = saved
        return b

    vals = _values(p, xi)
    bm1 = _values(p - 1, xi)
    d1 = np.zeros(p + 1)
    for i in range(p + 1):
        lo = bm1[i - 1] if 1 <= i <= p else 0.0
        hi = bm1[i] if i <= p - 1 else 0.0
        d1[i] = p * (lo - hi)
    d2 = np.zeros(p + 1)
    if p >= 2:
        bm2 = _values(p - 2, xi)

        def _b2(i):
            return bm2[i] if 0 <= i <= p - 2 else 0.0

        for i in range(p + 1):
            d2[i] = p * (p - 1) * (_b2(i - 2) - 2.0 * _b2(i - 1) + _b2(i))
    return vals, d1, d2


@dataclass(frozen=True)
class KnotVector:
    """Open (clamped) knot vector with degree p."""

    knots: np.ndarray
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "knots", np.asarray(self.knots, dtype=float))
        p, u = self.degree, self.knots
        if p < 1:
            raise InvalidDegreeError(f"degree must be >= 1, got {p}")
        if u.ndim != 1 or len(u) < 2 * (p + 1):
            raise UnsupportedKnotVectorError("knot vector too short for its degree")
        if np.any(np.diff(u) < 0):
            raise UnsupportedKnotVectorError("knot vector must be nondecreasing")
        if not (np.all(u[: p + 1] == u[0]) and np.all(u[-(p + 1):] == u[-1])):
            raise UnsupportedKnotVectorError("only open (clamped) knot vectors are supported")
        _, counts = np.unique(u, return_counts=True)
        if np.any(counts > p + 1):
            raise UnsupportedKnotVectorError("knot multiplicity exceeds degree + 1")
        if len(self.spans()) < 1:
            raise UnsupportedKnotVectorError("knot vector has no nonempty span")

    @property
    def num_funcs(self) -> int:
        return len(self.knots) - self.degree - 1

    def spans(self):
        """Indices i of the nonempty knot spans [u_i, u_{i+1})."""
        u, p = self.knots, self.degree
        return [i for i in range(p, len(u) - p - 1) if u[i + 1] > u[i]]

    def find_span(self, t: float) -> int:
        u, p = self.knots, self.degree
        n = self.num_funcs
        if t >= u[n]:
            return n - 1
        if t <= u[p]:
            return p
        return int(np.searchsorted(u, t, side="right") - 1)

    def greville(self) -> np.ndarray:
        """Greville abscissae (control-point parameters; reproduce linears)."""
        u, p = self.knots, self.degree
        return np.array([u[i + 1: i + p + 1].mean() for i in range(self.num_funcs)])


def bezier_extraction(kv: KnotVector):
    """Per-element Bezier extraction operators of an open knot vector.

    Returns (operators, spans): operators[e] is (p+1, p+1) and maps the
    Bernstein basis on element e to the p+1 B-spline basis functions with
    support there (functions spans[e]-p .. spans[e] in global numbering).
    """
    u, p = kv.knots, kv.degree
    m = len(u)
    ops = [np.eye(p + 1)]
    a = p
    b = a + 1
    while b < m - 1:
        i = b
        while b < m - 1 and u[b + 1] == u[b]:
            b += 1
        mult = b - i + 1
        if mult >= p:
            if b < m - 1:
                ops.append(np.eye(p + 1))
                a = b
                b += 1
            continue
        nxt = np.eye(p + 1)
        numer = u[b] - u[a]
        alphas = np.zeros(p - mult)
        for j in range(p, mult, -1):
            alphas[j - mult - 1] = numer / (u[a + j] - u[a])
        r = p - mult
        cur = ops[-1]
        for j in range(1, r + 1):
            save = r - j
            s = mult + j
            for k in range(p, s - 1, -1):
                alpha = alphas[k - s]
                cur[:, k] = alpha * cur[:, k] + (1.0 - alpha) * cur[:, k - 1]
            if b < m - 1:
                nxt[save: save + j + 1, save] = cur[p - j: p + 1, p]
        if b < m - 1:
            ops.append(nxt)
            a = b
            b += 1
    spans = kv.spans()
    if len(ops) != len(spans):
        raise UnsupportedKnotVectorError("extraction produced inconsistent element count")
    return ops, spans


@dataclass
class BasisEval:
    """NURBS basis values and parametric derivatives at one point.

    values: (n_e,); d1: (n_e, 2) columns (d/dxi, d/deta);
    d2: (n_e, 3) columns (d2/dxi2, d2/dxideta, d2/deta2).
    """

    values: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


def _bspline_1d(op, span_lo, span_hi, p, t):
    """B-spline values/derivatives on one element via extraction."""
    h = span_hi - span_lo
    s = (t - span_lo) / h
    b, db, d2b = bernstein(p, s)
    return op @ b, (op @ db) / h, (op @ d2b) / (h * h)


def nurbs_element_eval(op_xi, op_eta, box, weights, xi, eta) -> BasisEval:
    """Rational tensor-product basis on one element at (xi, eta).

    `box` is ((xi0, xi1), (eta0, eta1)); `weights` has length n_e ordered
    xi-fastest.  Includes exact second derivatives of the rational functions.
    """
    weights = np.asarray(weights, dtype=float)
    if np.any(weights <= 0.0):
        raise InvalidWeightError("all control weights must be positive")
    p = op_xi.shape[0] - 1
    q = op_eta.shape[0] - 1
    (x0, x1), (e0, e1) = box
    if not (x0 <= xi <= x1 and e0 <= eta <= e1):
        raise ValueError("evaluation point outside the element's parametric box")
    bx, dbx, d2bx = _bspline_1d(op_xi, x0, x1, p, xi)
    be, dbe, d2be = _bspline_1d(op_eta, e0, e1, q, eta)

    n = np.outer(be, bx).ravel()  # xi fastest
    n_x = np.outer(be, dbx).ravel()
    n_e = np.outer(dbe, bx).ravel()
    n_xx = np.outer(be, d2bx).ravel()
    n_xe = np.outer(dbe, dbx).ravel()
    n_ee = np.outer(d2be, bx).ravel()

    wn = weights * n
    W = wn.sum()
    Wx = (weights * n_x).sum()
    We = (weights * n_e).sum()
    Wxx = (weights * n_xx).sum()
    Wxe = (weights * n_xe).sum()
    Wee = (weights * n_ee).sum()

    vals = wn / W
    d1 = np.empty((len(n), 2))
    d1[:, 0] = weights * (n_x * W - n * Wx) / W**2
    d1[:, 1] = weights * (n_e * W - n * We) / W**2

    # quotient rule, second order
    def _second(nab, na, nb, Wab, Wa, Wb):
        return weights * (
            nab / W
            - (na * Wb + nb * Wa + n * Wab) / W**2
            + 2.0 * n * Wa * Wb / W**3
        )

    d2 = np.empty((len(n), 3))
    d2[:, 0] = _second(n_xx, n_x, n_x, Wxx, Wx, Wx)
    d2[:, 1] = _second(n_xe, n_x, n_e, Wxe, Wx, We)
    d2[:, 2] = _second(n_ee, n_e, n_e, Wee, We, We)
    return BasisEval(values=vals, d1=d1, d2=d2)


def insert_knot(kv: KnotVector, ctrl_hom: np.ndarray, t: float):
    """Boehm single-knot insertion on a curve in homogeneous coordinates.

    ctrl_hom is (n, d) with the weight in the last column and weighted
    coordinates in the others; the curve is unchanged exactly.
    """
    u, p = kv.knots, kv.degree
    k = kv.find_span(t)
    n = ctrl_hom.shape[0]
    out = np.zeros((n + 1, ctrl_hom.shape[1]))
    out[: k - p + 1] = ctrl_hom[: k - p + 1]
    out[k + 1:] = ctrl_hom[k:]
    for i in range(k - p + 1, k + 1):
        alpha = (t - u[i]) / (u[i + p] - u[i])
        out[i] = alpha * ctrl_hom[i] + (1.0 - alpha) * ctrl_hom[i - 1]
    new_knots = np.insert(u, k + 1, t)
    return KnotVector(new_knots, p), out


def uniform_open_knots(p: int, n_elems: int, lo: float = 0.0, hi: float = 1.0) -> KnotVector:
    interior = np.linspace(lo, hi, n_elems + 1)[1:-1]
    knots = np.concatenate([np.full(p + 1, lo), np.repeat(interior, 1), np.full(p + 1, hi)])
    return KnotVector(knots, p)
