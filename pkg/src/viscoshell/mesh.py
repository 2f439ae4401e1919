"""Single-patch NURBS meshes: builders, quadrature caches, plain-text I/O.

Control points are numbered on the tensor grid with the xi index fastest.
Boundary edges are tagged 'xi-', 'xi+', 'eta-', 'eta+'; their traversal
orientation (for edge moments) follows the counterclockwise parametric
boundary loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidWeightError, ViscoShellError
from .splines import (KnotVector, bezier_extraction, insert_knot,
                      nurbs_element_eval, uniform_open_knots)

EDGE_NAMES = ("xi-", "xi+", "eta-", "eta+")


def gauss_legendre01(n):
    """Gauss points/weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@dataclass
class PatchMesh:
    """Reference geometry of one tensor-product NURBS patch."""

    kv_xi: KnotVector
    kv_eta: KnotVector
    controls: np.ndarray  # (ncp, 3)
    weights: np.ndarray   # (ncp,)

    def __post_init__(self):
        self.controls = np.asarray(self.controls, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if np.any(self.weights <= 0.0):
            raise InvalidWeightError("all control weights must be positive")
        self.n_xi = self.kv_xi.num_funcs
        self.n_eta = self.kv_eta.num_funcs
        if self.controls.shape != (self.n_xi * self.n_eta, 3):
            raise ViscoShellError("control net does not match the knot vectors")
        self.p = self.kv_xi.degree
        self.q = self.kv_eta.degree
        self.ops_xi, self.spans_xi = bezier_extraction(self.kv_xi)
        self.ops_eta, self.spans_eta = bezier_extraction(self.kv_eta)
        self.nel_xi = len(self.spans_xi)
        self.nel_eta = len(self.spans_eta)
        self.nel = self.nel_xi * self.nel_eta
        self.n_e = (self.p + 1) * (self.q + 1)
        conn = np.empty((self.nel, self.n_e), dtype=int)
        for ej, se in enumerate(self.spans_eta):
            for ei, sx in enumerate(self.spans_xi):
                ids = [(se - self.q + j) * self.n_xi + (sx - self.p + i)
                       for j in range(self.q + 1) for i in range(self.p + 1)]
                conn[ej * self.nel_xi + ei] = ids
        self.conn = conn

    @property
    def ncp(self) -> int:
        return self.n_xi * self.n_eta

    def element_box(self, e):
        ei, ej = e % self.nel_xi, e // self.nel_xi
        sx, se = self.spans_xi[ei], self.spans_eta[ej]
        return ((self.kv_xi.knots[sx], self.kv_xi.knots[sx + 1]),
                (self.kv_eta.knots[se], self.kv_eta.knots[se + 1]))

    def element_of(self, xi, eta):
        sx = self.kv_xi.find_span(xi)
        se = self.kv_eta.find_span(eta)
        ei = self.spans_xi.index(sx)
        ej = self.spans_eta.index(se)
        return ej * self.nel_xi + ei

    def eval_basis(self, xi, eta):
        """(element id, BasisEval) at an arbitrary parametric point."""
        e = self.element_of(xi, eta)
        ei, ej = e % self.nel_xi, e // self.nel_xi
        return e, nurbs_element_eval(self.ops_xi[ei], self.ops_eta[ej],
                                     self.element_box(e),
                                     self.weights[self.conn[e]], xi, eta)

    def edge_controls(self, edge):
        """Global control-point ids lying on a boundary edge."""
        i = np.arange(self.n_xi)
        j = np.arange(self.n_eta)
        if edge == "xi-":
            return j * self.n_xi
        if edge == "xi+":
            return j * self.n_xi + (self.n_xi - 1)
        if edge == "eta-":
            return i
        if edge == "eta+":
            return (self.n_eta - 1) * self.n_xi + i
        raise ViscoShellError(f"unknown edge '{edge}'")

    def edge_elements(self, edge):
        """(element ids, tangent direction index, traversal sign) of an edge."""
        ix = np.arange(self.nel_xi)
        ie = np.arange(self.nel_eta)
        if edge == "eta-":
            return ix, 0, +1.0
        if edge == "xi+":
            return ie * self.nel_xi + (self.nel_xi - 1), 1, +1.0
        if edge == "eta+":
            return (self.nel_eta - 1) * self.nel_xi + ix, 0, -1.0
        if edge == "xi-":
            return ie * self.nel_xi, 1, -1.0
        raise ViscoShellError(f"unknown edge '{edge}'")


def flat_patch(lx, ly, nel_x, nel_y, p=2, q=2) -> PatchMesh:
    """Flat rectangle [0,lx]x[0,ly] at z=0 with unit weights (exact plane)."""
    kvx = uniform_open_knots(p, nel_x)
    kve = uniform_open_knots(q, nel_y)
    gx = kvx.greville() * lx
    ge = kve.greville() * ly
    xx, yy = np.meshgrid(gx, ge)  # eta-major
    controls = np.column_stack([xx.ravel(), yy.ravel(), np.zeros(xx.size)])
    return PatchMesh(kvx, kve, controls, np.ones(len(controls)))


def _refined_arc(radius, half_angle, nel):
    """Exact circular arc (quadratic rational Bezier + knot insertion).

    Arc around the crown of the x-z plane: angle phi in [-half_angle,
    +half_angle] measured from the z axis, point (R sin phi, R cos phi).
    """
    if not 0.0 < half_angle < np.pi / 2.0:
        raise ViscoShellError("arc half-angle must be in (0, pi/2)")
    w1 = np.cos(half_angle)
    p0 = np.array([-radius * np.sin(half_angle), radius * np.cos(half_angle)])
    p2 = np.array([+radius * np.sin(half_angle), radius * np.cos(half_angle)])
    p1 = np.array([0.0, radius / np.cos(half_angle)])
    ctrl = np.array([p0, p1, p2])
    wts = np.array([1.0, w1, 1.0])
    hom = np.column_stack([ctrl * wts[:, None], wts])
    kv = KnotVector([0, 0, 0, 1, 1, 1], 2)
    for t in np.linspace(0.0, 1.0, nel + 1)[1:-1]:
        kv, hom = insert_knot(kv, hom, t)
    wts = hom[:, -1]
    return kv, hom[:, :-1] / wts[:, None], wts


def cylinder_patch(radius, half_angle, length, nel_circ, nel_ax, q=2) -> PatchMesh:
    """Exact-conic cylindrical shell patch (arc in x-z, axis along y)."""
    kvx, arc_xz, warc = _refined_arc(radius, half_angle, nel_circ)
    kve = uniform_open_knots(q, nel_ax)
    gy = kve.greville() * length
    n_xi = len(warc)
    controls = np.empty((n_xi * len(gy), 3))
    weights = np.empty(n_xi * len(gy))
    for j, y in enumerate(gy):
        sl = slice(j * n_xi, (j + 1) * n_xi)
        controls[sl, 0] = arc_xz[:, 0]
        controls[sl, 1] = y
        controls[sl, 2] = arc_xz[:, 1]
        weights[sl] = warc
    return PatchMesh(kvx, kve, controls, weights)


def write_mesh(mesh: PatchMesh, path):
    with open(path, "w") as fh:
        fh.write("viscoshell-mesh 1\n")
        fh.write(f"degrees {mesh.p} {mesh.q}\n")
        fh.write("knots_xi " + " ".join("%.17g" % v for v in mesh.kv_xi.knots) + "\n")
        fh.write("knots_eta " + " ".join("%.17g" % v for v in mesh.kv_eta.knots) + "\n")
        fh.write(f"controls {mesh.ncp}\n")
        for (x, y, z), w in zip(mesh.controls, mesh.weights):
            fh.write("%.17g %.17g %.17g %.17g\n" % (x, y, z, w))


def read_mesh(path) -> PatchMesh:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if lines[0].split()[0] != "viscoshell-mesh":
        raise ViscoShellError(f"{path}: not a mesh file")
    p, q = map(int, lines[1].split()[1:])
    kvx = KnotVector([float(v) for v in lines[2].split()[1:]], p)
    kve = KnotVector([float(v) for v in lines[3].split()[1:]], q)
    ncp = int(lines[4].split()[1])
    rows = [list(map(float, ln.split())) for ln in lines[5:5 + ncp]]
    arr = np.array(rows)
    return PatchMesh(kvx, kve, arr[:, :3], arr[:, 3])
