"""Panel quadrature along curves with power-law singularities at vertices.

Panels are bisected until each is short compared with its distance to the
nearest singular point.  A panel that ends exactly on a singular vertex is
bisected geometrically down to ``endpoint_scale`` and then closed with a
Gauss-Jacobi rule carrying the known exponent.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import QuadratureFail

N_NODES = 16
MAX_PANELS = 20000
HIT_RTOL = 1e-11


@lru_cache(maxsize=None)
def legendre01(n: int = N_NODES):
    x, w = roots_legendre(n)
    return 0.5 * (x + 1), 0.5 * w


@lru_cache(maxsize=None)
def jacobi01(exponent: float, at_start: bool, n: int = N_NODES):
    """Nodes/weights on [0, 1] for integrals of tau^e g(tau) (or (1-tau)^e g)."""
    if at_start:
        x, w = roots_jacobi(n, 0.0, exponent)
    else:
        x, w = roots_jacobi(n, exponent, 0.0)
    w = w / 2 ** (exponent + 1)
    tau = 0.5 * (x + 1)
    dist = tau if at_start else 1 - tau
    # divide out the weight so the rule applies to the full integrand
    return tau, w / dist**exponent


@dataclass(frozen=True)
class Singularity:
    point: complex
    exponent: float
    scale: float  # panels touching the point stop splitting below this length


def _hit(z, sing, tol):
    for s in sing:
        if abs(z - s.point) <= tol:
            return s
    return None


def panel_rule(path, dpath, t0: float, t1: float, sing=(), ratio: float = 0.4,
               n: int = N_NODES):
    """Nodes t_i and complex weights w_i with sum w_i f(path(t_i)) ~ int f dz."""
    z0, z1 = complex(path(t0)), complex(path(t1))
    s_start = _hit(z0, sing, HIT_RTOL * (1 + abs(z0)))
    s_end = _hit(z1, sing, HIT_RTOL * (1 + abs(z1)))
    pts = np.array([s.point for s in sing], complex)
    stack = [(t0, t1)]
    panels = []
    while stack:
        a, b = stack.pop()
        za, zb = complex(path(a)), complex(path(b))
        zm = complex(path(0.5 * (a + b)))
        length = abs(zm - za) + abs(zb - zm)
        kind = "gl"
        if a == t0 and s_start is not None:
            if length <= s_start.scale:
                panels.append((a, b, "start", s_start.exponent))
                continue
            split = True
        elif b == t1 and s_end is not None:
            if length <= s_end.scale:
                panels.append((a, b, "end", s_end.exponent))
                continue
            split = True
        else:
            if len(pts):
                d = np.min(np.abs(np.array([za, zm, zb])[:, None] - pts[None, :]))
                split = length > ratio * d
            else:
                split = False
        if split:
            if len(panels) + len(stack) > MAX_PANELS:
                raise QuadratureFail("panel budget exhausted")
            c = 0.5 * (a + b)
            stack.append((a, c))
            stack.append((c, b))
        else:
            panels.append((a, b, kind, 0.0))
    ts, ws = [], []
    for a, b, kind, e in panels:
        if kind == "gl":
            tau, w = legendre01(n)
        else:
            tau, w = jacobi01(float(e), kind == "start", n)
        t = a + (b - a) * tau
        ts.append(t)
        ws.append((b - a) * w * np.asarray(dpath(t)))
    return np.concatenate(ts), np.concatenate(ws)


def integrate(f, path, dpath, t0=0.0, t1=1.0, sing=(), **kw):
    t, w = panel_rule(path, dpath, t0, t1, sing, **kw)
    vals = f(path(t))
    return np.tensordot(w, vals, axes=(0, 0))


def cumulative(f, path, dpath, ts, sing=(), **kw):
    """Integrals from ts[0] to each ts[k] along the path (first entry zero)."""
    nodes, weights, bounds = [], [], [0]
    for a, b in zip(ts[:-1], ts[1:]):
        t, w = panel_rule(path, dpath, a, b, sing, **kw)
        nodes.append(t)
        weights.append(w)
        bounds.append(bounds[-1] + len(t))
    t = np.concatenate(nodes)
    w = np.concatenate(weights)
    vals = np.asarray(f(path(t)))
    contrib = w.reshape((-1,) + (1,) * (vals.ndim - 1)) * vals
    seg = np.add.reduceat(contrib, bounds[:-1], axis=0)
    out = np.zeros((len(ts),) + vals.shape[1:], complex)
    out[1:] = np.cumsum(seg, axis=0)
    return out


def segment_path(a: complex, b: complex):
    return (lambda t: a + (b - a) * np.asarray(t)), (lambda t: np.full(np.shape(t), b - a, complex))
