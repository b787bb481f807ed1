"""Two-layer spline networks: c0 + sum_i c_i * relu(w_i . x - b_i)^k.

Directions w_i live on the unit sphere.  For d=2 they are stored as angles
phi_i with w_i = (cos phi_i, sin phi_i), so the unit-norm constraint holds
by construction under any parameter update; for d=1 the direction is fixed
at +1 (a sign flip is absorbed by the bias and the output weight) and only
the bias is trained.

The trainable parameters form one flat vector with layout

    [out_bias (o)] + per neuron i: [phi_i (d=2 only), bias_i, out_weights_i (o)]

which gives exactly (d + o) * n + o entries.  Networks are immutable
values; updates go through :func:`with_params`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SplineNetwork",
    "make_network",
    "activation",
    "activation_deriv",
    "activation_deriv2",
    "evaluate",
    "gradient_x",
    "param_gradient",
    "get_params",
    "with_params",
    "param_count",
    "network_to_dict",
    "network_from_dict",
    "save_network",
    "load_network",
]


def activation(k, t):
    """Spline activation max(0, t)^k (k=1 is ReLU)."""
    if k < 1:
        raise ValueError(f"degree must be >= 1, got {k}")
    pos = np.maximum(t, 0.0)
    return pos if k == 1 else pos**k


def activation_deriv(k, t):
    """First derivative k * max(0, t)^(k-1); at the k=1 kink we take 0."""
    if k < 1:
        raise ValueError(f"degree must be >= 1, got {k}")
    if k == 1:
        return (np.asarray(t) > 0).astype(float)
    pos = np.maximum(t, 0.0)
    return k * pos ** (k - 1)


def activation_deriv2(k, t):
    """Second derivative k(k-1) * max(0, t)^(k-2), zero on t <= 0."""
    if k < 1:
        raise ValueError(f"degree must be >= 1, got {k}")
    t = np.asarray(t)
    if k == 1:
        return np.zeros_like(t, dtype=float)
    if k == 2:
        return 2.0 * (t > 0)
    pos = np.maximum(t, 0.0)
    return k * (k - 1) * pos ** (k - 2)


@dataclass(frozen=True)
class SplineNetwork:
    k: int
    d: int
    o: int
    phis: np.ndarray | None  # (n,) direction angles, d=2 only
    biases: np.ndarray  # (n,)
    out_weights: np.ndarray  # (n, o)
    out_bias: np.ndarray  # (o,)

    @property
    def n(self):
        return self.biases.shape[0]

    @property
    def omegas(self):
        """Unit directions, shape (n, d)."""
        if self.d == 1:
            return np.ones((self.n, 1))
        return np.column_stack([np.cos(self.phis), np.sin(self.phis)])

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"degree must be >= 1, got {self.k}")
        if self.d not in (1, 2):
            raise ValueError(f"input dimension must be 1 or 2, got {self.d}")
        if self.o < 1:
            raise ValueError(f"output dimension must be >= 1, got {self.o}")
        if self.n < 1:
            raise ValueError("need at least one neuron")
        if self.d == 2 and (self.phis is None or self.phis.shape != self.biases.shape):
            raise ValueError("d=2 networks need one direction angle per neuron")
        if self.out_weights.shape != (self.n, self.o):
            raise ValueError(
                f"output weights must have shape {(self.n, self.o)}, got {self.out_weights.shape}"
            )


def make_network(k, d, o, omegas, biases, out_weights, out_bias):
    """Build a network from explicit directions (normalized to the sphere)."""
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    norms = np.linalg.norm(omegas, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-8):
        raise ValueError("directions must be unit vectors")
    if d == 1:
        if np.any(omegas[:, 0] < 0):
            raise ValueError("1D directions are fixed at +1")
        phis = None
    else:
        phis = np.arctan2(omegas[:, 1] / norms, omegas[:, 0] / norms)
    return SplineNetwork(
        k=k,
        d=d,
        o=o,
        phis=phis,
        biases=np.asarray(biases, dtype=float).copy(),
        out_weights=np.asarray(out_weights, dtype=float).reshape(len(biases), o).copy(),
        out_bias=np.asarray(out_bias, dtype=float).reshape(o).copy(),
    )


def _check_points(net, points):
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if points.shape[1] != net.d:
        raise ValueError(
            f"points have dimension {points.shape[1]}, network expects {net.d}"
        )
    return points


def evaluate(net, points):
    """Network values at points (Q, d) -> (Q, o)."""
    x = _check_points(net, points)
    z = x @ net.omegas.T - net.biases
    return activation(net.k, z) @ net.out_weights + net.out_bias


def gradient_x(net, points):
    """Spatial Jacobians at points (Q, d) -> (Q, o, d)."""
    x = _check_points(net, points)
    omegas = net.omegas
    z = x @ omegas.T - net.biases
    t1 = activation_deriv(net.k, z)  # (Q, n)
    # sum_i c_i (x) w_i * k relu(z_i)^(k-1)
    return np.einsum("qi,io,ia->qoa", t1, net.out_weights, omegas)


def param_count(net):
    return (net.d + net.o) * net.n + net.o


def get_params(net):
    """Flatten trainable parameters (see module docstring for the layout)."""
    n, o = net.n, net.o
    per = (net.d - 1) + 1 + o
    vec = np.empty(o + n * per)
    vec[:o] = net.out_bias
    block = vec[o:].reshape(n, per)
    col = 0
    if net.d == 2:
        block[:, 0] = net.phis
        col = 1
    block[:, col] = net.biases
    block[:, col + 1 :] = net.out_weights
    return vec


def with_params(net, vec):
    """New network with parameters taken from a flat vector."""
    n, o = net.n, net.o
    per = (net.d - 1) + 1 + o
    if vec.shape != (o + n * per,):
        raise ValueError(f"expected {o + n * per} parameters, got {vec.shape}")
    block = vec[o:].reshape(n, per)
    col = 0
    phis = None
    if net.d == 2:
        phis = block[:, 0].copy()
        col = 1
    return SplineNetwork(
        k=net.k,
        d=net.d,
        o=net.o,
        phis=phis,
        biases=block[:, col].copy(),
        out_weights=block[:, col + 1 :].copy(),
        out_bias=vec[:o].copy(),
    )


def param_gradient(net, cotangents, points, grad_cotangents=None):
    """Adjoint of ``evaluate`` (and optionally ``gradient_x``) in parameters.

    cotangents: (Q, o) weights on the network values.
    grad_cotangents: optional (Q, o, d) weights on the spatial Jacobians;
    when given, the returned vector is the adjoint of the pair
    (evaluate, gradient_x), which is what quadrature losses involving both
    v and grad(v) need.

    Returns a flat vector matching the :func:`get_params` layout.
    """
    x = _check_points(net, points)
    ybar = np.asarray(cotangents, dtype=float).reshape(x.shape[0], net.o)
    n, o, d = net.n, net.o, net.d
    omegas = net.omegas
    z = x @ omegas.T - net.biases
    t0 = activation(net.k, z)
    t1 = activation_deriv(net.k, z)

    grad_c0 = ybar.sum(axis=0)
    grad_c = t0.T @ ybar  # (n, o)
    u = ybar @ net.out_weights.T  # (Q, n): ybar . c_i
    grad_b = -(u * t1).sum(axis=0)
    if d == 2:
        perp = np.column_stack([-np.sin(net.phis), np.cos(net.phis)])  # dw/dphi
        p = x @ perp.T  # (Q, n): x . w_i^perp
        grad_phi = (u * t1 * p).sum(axis=0)

    if grad_cotangents is not None:
        gbar = np.asarray(grad_cotangents, dtype=float).reshape(x.shape[0], o, d)
        t2 = activation_deriv2(net.k, z)
        # c_i^T gbar_q w_i and c_i^T gbar_q w_i^perp
        gw = np.einsum("qoa,ia->qio", gbar, omegas)
        wq = np.einsum("qio,io->qi", gw, net.out_weights)
        grad_c += np.einsum("qi,qio->io", t1, gw)
        grad_b -= (wq * t2).sum(axis=0)
        if d == 2:
            gperp = np.einsum("qoa,ia->qio", gbar, perp)
            vq = np.einsum("qio,io->qi", gperp, net.out_weights)
            grad_phi += (wq * t2 * p + vq * t1).sum(axis=0)

    per = (d - 1) + 1 + o
    out = np.empty(o + n * per)
    out[:o] = grad_c0
    block = out[o:].reshape(n, per)
    col = 0
    if d == 2:
        block[:, 0] = grad_phi
        col = 1
    block[:, col] = grad_b
    block[:, col + 1 :] = grad_c
    return out


def network_to_dict(net):
    return {
        "k": net.k,
        "d": net.d,
        "o": net.o,
        "n": net.n,
        "omegas": net.omegas.tolist(),
        "biases": net.biases.tolist(),
        "out_weights": net.out_weights.tolist(),
        "out_bias": net.out_bias.tolist(),
    }


def network_from_dict(data):
    return make_network(
        k=data["k"],
        d=data["d"],
        o=data["o"],
        omegas=np.asarray(data["omegas"], dtype=float),
        biases=np.asarray(data["biases"], dtype=float),
        out_weights=np.asarray(data["out_weights"], dtype=float),
        out_bias=np.asarray(data["out_bias"], dtype=float),
    )


def save_network(net, path):
    with open(path, "w") as fh:
        json.dump(network_to_dict(net), fh, indent=2)


def load_network(path):
    with open(path) as fh:
        return network_from_dict(json.load(fh))
