"""Domains and composite mid-point quadrature meshes.

Every integral in the solver is a weighted sum over a fixed set of
quadrature points.  Interior rules are composite mid-point rules: uniform
in x on intervals, uniform in (r, theta) on polar domains (with the polar
Jacobian r folded into the weights), tensor mid-point on rectangles.
Boundary rules are 1D mid-point rules on each boundary piece at the same
resolution as the adjacent interior direction; interval endpoints are
evaluated exactly with unit weight.

Meshes are immutable once built and safe for concurrent reads.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Interval",
    "PolarSector",
    "UnitDisk",
    "Rectangle",
    "Domain",
    "QuadratureMesh",
    "build_interval_mesh",
    "build_polar_mesh",
    "build_rectangle_mesh",
    "build_mesh",
    "mesh_to_csv",
]


def _check_piece_split(pieces, dirichlet, neumann):
    pieces = frozenset(pieces)
    dirichlet = frozenset(dirichlet)
    neumann = frozenset(neumann)
    if dirichlet & neumann:
        raise ValueError(f"boundary pieces assigned twice: {sorted(dirichlet & neumann)}")
    if dirichlet | neumann != pieces:
        raise ValueError(
            f"boundary split {sorted(dirichlet)} + {sorted(neumann)} does not cover {sorted(pieces)}"
        )
    return dirichlet, neumann


@dataclass(frozen=True)
class Interval:
    """1D domain (a, b); boundary pieces are 'left' and 'right'."""

    a: float
    b: float
    dirichlet: frozenset = frozenset({"left", "right"})
    neumann: frozenset = frozenset()

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"invalid interval: a={self.a} must be < b={self.b}")
        d, n = _check_piece_split(self.pieces, self.dirichlet, self.neumann)
        object.__setattr__(self, "dirichlet", d)
        object.__setattr__(self, "neumann", n)

    @property
    def dim(self):
        return 1

    @property
    def pieces(self):
        return frozenset({"left", "right"})

    @property
    def measure(self):
        return self.b - self.a


@dataclass(frozen=True)
class PolarSector:
    """Circular sector r in (0, r_max), theta in (theta_min, theta_max).

    Boundary pieces: 'edge_start' (theta = theta_min), 'edge_end'
    (theta = theta_max) and 'arc' (r = r_max).
    """

    r_max: float
    theta_min: float
    theta_max: float
    dirichlet: frozenset = frozenset({"edge_start", "edge_end", "arc"})
    neumann: frozenset = frozenset()

    def __post_init__(self):
        if not self.r_max > 0:
            raise ValueError(f"invalid sector radius: {self.r_max}")
        if not (self.theta_min < self.theta_max <= 2 * math.pi + 1e-12):
            raise ValueError(
                f"invalid angular range: ({self.theta_min}, {self.theta_max}]"
            )
        d, n = _check_piece_split(self.pieces, self.dirichlet, self.neumann)
        object.__setattr__(self, "dirichlet", d)
        object.__setattr__(self, "neumann", n)

    @property
    def dim(self):
        return 2

    @property
    def pieces(self):
        return frozenset({"edge_start", "edge_end", "arc"})

    @property
    def measure(self):
        return 0.5 * self.r_max**2 * (self.theta_max - self.theta_min)


@dataclass(frozen=True)
class UnitDisk:
    """Unit disk; the only boundary piece is 'circle'."""

    dirichlet: frozenset = frozenset({"circle"})
    neumann: frozenset = frozenset()

    def __post_init__(self):
        d, n = _check_piece_split(self.pieces, self.dirichlet, self.neumann)
        object.__setattr__(self, "dirichlet", d)
        object.__setattr__(self, "neumann", n)

    @property
    def dim(self):
        return 2

    @property
    def pieces(self):
        return frozenset({"circle"})

    @property
    def measure(self):
        return math.pi


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle (x0, x1) x (y0, y1).

    Boundary pieces: 'left', 'right', 'bottom', 'top'.
    """

    x0: float
    x1: float
    y0: float
    y1: float
    dirichlet: frozenset = frozenset({"left", "right", "bottom", "top"})
    neumann: frozenset = frozenset()

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("invalid rectangle: need x0 < x1 and y0 < y1")
        d, n = _check_piece_split(self.pieces, self.dirichlet, self.neumann)
        object.__setattr__(self, "dirichlet", d)
        object.__setattr__(self, "neumann", n)

    @property
    def dim(self):
        return 2

    @property
    def pieces(self):
        return frozenset({"left", "right", "bottom", "top"})

    @property
    def measure(self):
        return (self.x1 - self.x0) * (self.y1 - self.y0)


Domain = Interval | PolarSector | UnitDisk | Rectangle


@dataclass(frozen=True)
class QuadratureMesh:
    """Fixed quadrature point sets for one domain.

    All point arrays have shape (n_points, d) in Cartesian coordinates;
    weights carry length/area units so that sum(interior_weights) equals
    the domain measure.  Normals are outward unit vectors.
    """

    domain: Domain
    interior_points: np.ndarray
    interior_weights: np.ndarray
    dirichlet_points: np.ndarray
    dirichlet_weights: np.ndarray
    dirichlet_normals: np.ndarray
    neumann_points: np.ndarray
    neumann_weights: np.ndarray
    neumann_normals: np.ndarray

    @property
    def dim(self):
        return self.interior_points.shape[1]

    def __post_init__(self):
        for arr in (self.interior_weights, self.dirichlet_weights, self.neumann_weights):
            if arr.size and arr.min() <= 0:
                raise ValueError("quadrature weights must be strictly positive")


def _empty_boundary(d):
    return np.zeros((0, d)), np.zeros(0), np.zeros((0, d))


def _split_boundary(domain, piece_data):
    """Distribute per-piece (points, weights, normals) into the D/N arrays."""
    d = domain.dim
    dir_parts, neu_parts = [], []
    for piece in sorted(piece_data):
        entry = piece_data[piece]
        if piece in domain.dirichlet:
            dir_parts.append(entry)
        else:
            neu_parts.append(entry)

    def cat(parts):
        if not parts:
            return _empty_boundary(d)
        pts = np.concatenate([p[0] for p in parts])
        w = np.concatenate([p[1] for p in parts])
        nrm = np.concatenate([p[2] for p in parts])
        return pts, w, nrm

    return cat(dir_parts), cat(neu_parts)


def build_interval_mesh(a, b, m, domain=None):
    """Composite mid-point rule with m cells on (a, b).

    Boundary "quadrature" is exact evaluation at the two endpoints with
    unit weight, so the penalty term is gamma_D * sum of squared endpoint
    mismatches.
    """
    if a >= b:
        raise ValueError(f"invalid range: a={a} must be < b={b}")
    if m < 1:
        raise ValueError(f"need at least one cell, got m={m}")
    if domain is None:
        domain = Interval(a, b)
    h = (b - a) / m
    x = a + (np.arange(m) + 0.5) * h
    piece_data = {
        "left": (np.array([[a]], dtype=float), np.array([1.0]), np.array([[-1.0]])),
        "right": (np.array([[b]], dtype=float), np.array([1.0]), np.array([[1.0]])),
    }
    (dp, dw, dn), (np_, nw, nn) = _split_boundary(domain, piece_data)
    return QuadratureMesh(
        domain=domain,
        interior_points=x[:, None],
        interior_weights=np.full(m, h),
        dirichlet_points=dp,
        dirichlet_weights=dw,
        dirichlet_normals=dn,
        neumann_points=np_,
        neumann_weights=nw,
        neumann_normals=nn,
    )


def build_polar_mesh(domain, m_r, m_theta, boundary_refine=1):
    """Mid-point rule on a uniform (r, theta) grid, mapped to Cartesian.

    The interior weight of cell (i, j) is r_ij * dr * dtheta with r_ij the
    cell mid-radius, which never vanishes, so the origin needs no special
    treatment.  Boundary pieces get 1D mid-point rules with arc-length
    weights at the interior resolution times ``boundary_refine``.
    """
    if not isinstance(domain, (PolarSector, UnitDisk)):
        raise ValueError(f"polar mesh needs a polar domain, got {type(domain).__name__}")
    if m_r < 1 or m_theta < 1:
        raise ValueError("need m_r >= 1 and m_theta >= 1")
    if isinstance(domain, UnitDisk):
        r_max, t0, t1 = 1.0, 0.0, 2 * math.pi
    else:
        r_max, t0, t1 = domain.r_max, domain.theta_min, domain.theta_max

    dr = r_max / m_r
    dth = (t1 - t0) / m_theta
    r_mid = (np.arange(m_r) + 0.5) * dr
    th_mid = t0 + (np.arange(m_theta) + 0.5) * dth
    R, TH = np.meshgrid(r_mid, th_mid, indexing="ij")
    pts = np.column_stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel()])
    w = (R * dr * dth).ravel()

    kb = max(1, int(boundary_refine))
    th_b = t0 + (np.arange(m_theta * kb) + 0.5) * dth / kb
    arc_pts = np.column_stack([r_max * np.cos(th_b), r_max * np.sin(th_b)])
    arc_w = np.full(th_b.size, r_max * dth / kb)
    arc_n = np.column_stack([np.cos(th_b), np.sin(th_b)])

    piece_data = {}
    if isinstance(domain, UnitDisk):
        piece_data["circle"] = (arc_pts, arc_w, arc_n)
    else:
        piece_data["arc"] = (arc_pts, arc_w, arc_n)
        r_b = (np.arange(m_r * kb) + 0.5) * dr / kb
        for piece, th in (("edge_start", t0), ("edge_end", t1)):
            e_pts = np.column_stack([r_b * math.cos(th), r_b * math.sin(th)])
            e_w = np.full(r_b.size, dr / kb)
            if piece == "edge_start":
                n = np.array([math.sin(th), -math.cos(th)])
            else:
                n = np.array([-math.sin(th), math.cos(th)])
            piece_data[piece] = (e_pts, e_w, np.tile(n, (r_b.size, 1)))

    (dp, dw, dn), (np_, nw, nn) = _split_boundary(domain, piece_data)
    return QuadratureMesh(
        domain=domain,
        interior_points=pts,
        interior_weights=w,
        dirichlet_points=dp,
        dirichlet_weights=dw,
        dirichlet_normals=dn,
        neumann_points=np_,
        neumann_weights=nw,
        neumann_normals=nn,
    )


def build_rectangle_mesh(domain, m_x, m_y, boundary_refine=1):
    """Tensor mid-point rule with m_x * m_y cells on a rectangle."""
    if not isinstance(domain, Rectangle):
        raise ValueError(f"rectangle mesh needs a Rectangle, got {type(domain).__name__}")
    if m_x < 1 or m_y < 1:
        raise ValueError("need m_x >= 1 and m_y >= 1")
    hx = (domain.x1 - domain.x0) / m_x
    hy = (domain.y1 - domain.y0) / m_y
    x = domain.x0 + (np.arange(m_x) + 0.5) * hx
    y = domain.y0 + (np.arange(m_y) + 0.5) * hy
    X, Y = np.meshgrid(x, y, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    w = np.full(pts.shape[0], hx * hy)

    kb = max(1, int(boundary_refine))
    xb = domain.x0 + (np.arange(m_x * kb) + 0.5) * hx / kb
    yb = domain.y0 + (np.arange(m_y * kb) + 0.5) * hy / kb
    piece_data = {
        "left": (
            np.column_stack([np.full(yb.size, domain.x0), yb]),
            np.full(yb.size, hy / kb),
            np.tile([-1.0, 0.0], (yb.size, 1)),
        ),
        "right": (
            np.column_stack([np.full(yb.size, domain.x1), yb]),
            np.full(yb.size, hy / kb),
            np.tile([1.0, 0.0], (yb.size, 1)),
        ),
        "bottom": (
            np.column_stack([xb, np.full(xb.size, domain.y0)]),
            np.full(xb.size, hx / kb),
            np.tile([0.0, -1.0], (xb.size, 1)),
        ),
        "top": (
            np.column_stack([xb, np.full(xb.size, domain.y1)]),
            np.full(xb.size, hx / kb),
            np.tile([0.0, 1.0], (xb.size, 1)),
        ),
    }
    (dp, dw, dn), (np_, nw, nn) = _split_boundary(domain, piece_data)
    return QuadratureMesh(
        domain=domain,
        interior_points=pts,
        interior_weights=w,
        dirichlet_points=dp,
        dirichlet_weights=dw,
        dirichlet_normals=dn,
        neumann_points=np_,
        neumann_weights=nw,
        neumann_normals=nn,
    )


def build_mesh(domain, resolution):
    """Build the mesh for any domain from a resolution tuple.

    resolution: (m,) for intervals, (m_r, m_theta) for polar domains and
    (m_x, m_y) for rectangles.
    """
    if isinstance(domain, Interval):
        (m,) = resolution
        return build_interval_mesh(domain.a, domain.b, m, domain=domain)
    if isinstance(domain, (PolarSector, UnitDisk)):
        m_r, m_theta = resolution
        return build_polar_mesh(domain, m_r, m_theta)
    if isinstance(domain, Rectangle):
        m_x, m_y = resolution
        return build_rectangle_mesh(domain, m_x, m_y)
    raise ValueError(f"unsupported domain type: {type(domain).__name__}")


def _fmt(x):
    return f"{x:.17g}"


def mesh_to_csv(mesh, path):
    """Write one row per quadrature point: coordinates, weight, tag, normal."""
    d = mesh.dim
    coord_cols = ["x", "y"][:d]
    normal_cols = ["n_x", "n_y"][:d]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(coord_cols + ["weight", "tag"] + normal_cols)
        zero_n = [_fmt(0.0)] * d
        for p, w in zip(mesh.interior_points, mesh.interior_weights):
            writer.writerow([_fmt(c) for c in p] + [_fmt(w), "interior"] + zero_n)
        for p, w, n in zip(mesh.dirichlet_points, mesh.dirichlet_weights, mesh.dirichlet_normals):
            writer.writerow([_fmt(c) for c in p] + [_fmt(w), "dirichlet"] + [_fmt(c) for c in n])
        for p, w, n in zip(mesh.neumann_points, mesh.neumann_weights, mesh.neumann_normals):
            writer.writerow([_fmt(c) for c in p] + [_fmt(w), "neumann"] + [_fmt(c) for c in n])
