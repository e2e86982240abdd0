"""Upper half-plane maps: Omega -> H by edge directions, and Schwarz-Christoffel H -> P."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import CurvilinearPolygon
from .edgemap import EdgeDirectionMap
from .errors import NoConvergence, QuadratureFail
from .quadrature import Singularity, integrate, segment_path

PI = math.pi


class HalfPlaneMap:
    """Phi: H -> Omega with Phi(0) = vertex 0, Phi(1) = vertex 1, Phi(inf) = last vertex.

    ``inverse`` (Omega -> H) is the fitted map; ``__call__`` inverts it by
    Newton continuation.
    """

    def __init__(self, poly: CurvilinearPolygon, path_from_base=None, **fit):
        n = len(poly.edges)
        angles = [PI] * n
        angles[-1] = -PI
        self.poly = poly
        self.emap = EdgeDirectionMap(poly, [0.0] * n, angles, **fit)
        self._path = path_from_base
        e0 = poly.edges[0]
        raw = integrate(self.emap.derivative, e0.at, e0.dat, 0.0, 1.0, self.emap.singularities())
        self.emap.scale = 1.0 / abs(complex(raw))
        pre = [0.0]
        for k in range(n - 2):
            e = poly.edges[k]
            seg = integrate(self.emap.derivative, e.at, e.dat, 0.0, 1.0, self.emap.singularities())
            pre.append(pre[-1] + float(np.real(seg)))
        pre.append(math.inf)
        self.prevertices = tuple(pre)
        self.accuracy = self.emap.check_residual

    def _from_base(self, z):
        v0 = self.poly.vertices[0]
        if self._path is not None:
            path, dpath = self._path(z)
        else:
            path, dpath = segment_path(v0, z)
        return complex(integrate(self.emap.derivative, path, dpath, 0.0, 1.0,
                                 self.emap.singularities()))

    def inverse(self, z):
        """Omega -> H."""
        z = np.atleast_1d(np.asarray(z, complex))
        return np.array([self._from_base(complex(v)) for v in z]).reshape(z.shape)

    def derivative_inverse(self, z):
        return self.emap.derivative(z)

    def __call__(self, w, start: complex | None = None, steps: int = 8, tol: float = 1e-13):
        """H -> Omega by Newton continuation from an interior start point."""
        w = complex(w)
        if start is None:
            verts = np.array(self.poly.vertices)
            start = complex(np.mean(verts))
            if not self.poly.contains(start)[0]:
                start = complex(0.5 * (verts[0] + np.mean(self.poly.polyline(16))))
        z = start
        fz = self._from_base(z)
        w0 = fz
        for j in range(1, steps + 1):
            goal = w0 + (w - w0) * j / steps
            for _ in range(40):
                step = (goal - fz) / complex(self.emap.derivative(z))
                z_new = z + step
                fz = fz + complex(integrate(self.emap.derivative, *segment_path(z, z_new)))
                z = z_new
                if abs(goal - fz) <= tol * (1 + abs(goal)):
                    break
            else:
                raise NoConvergence("half-plane inversion stalled", abs(goal - fz), z)
        return z


def _power(w, x, e):
    d = np.asarray(w, complex) - x
    d = np.where(d.imag == 0, d.real + 0j, d)  # keep arg in [0, pi] on the real axis
    return np.exp(e * np.log(d))


@dataclass(frozen=True)
class SCMap:
    prevertices: tuple  # finite prevertices on the real axis
    exponents: tuple    # beta_k / pi - 1
    constant: complex = 1.0 + 0j

    def integrand(self, w):
        out = np.full(np.shape(w), self.constant, complex)
        for x, e in zip(self.prevertices, self.exponents):
            out = out * _power(w, x, e)
        return out

    def singularities(self):
        xs = sorted(self.prevertices)
        gap = min([b - a for a, b in zip(xs[:-1], xs[1:])] + [1.0])
        scale = 0.25 * gap
        return tuple(Singularity(complex(x), e, scale) for x, e in zip(self.prevertices, self.exponents))

    def __call__(self, w):
        return sc_evaluate(self, w)

    def normalized(self, w_ref: complex, image: complex) -> "SCMap":
        """Copy with the constant chosen so that the map sends w_ref to image."""
        raw = sc_evaluate(SCMap(self.prevertices, self.exponents, 1.0 + 0j), w_ref)
        return SCMap(self.prevertices, self.exponents, image / raw)


def sc_evaluate(sc: SCMap, w) -> complex:
    """Integral of the SC integrand from 0 to w along 0 -> i h -> w (h > 0)."""
    w = complex(w)
    if w.imag < 0:
        raise ValueError("w must lie in the closed upper half plane")
    if w == 0:
        return 0j
    sing = sc.singularities()
    h = max(1.0, abs(w))
    mid = 0.5 * w.real + 1j * h
    total = 0j
    for a, b in ((0j, mid), (mid, w)):
        path, dpath = segment_path(a, b)
        val = integrate(sc.integrand, path, dpath, 0.0, 1.0, sing)
        if not np.isfinite(val):
            raise QuadratureFail(f"non-finite SC integral towards {w}")
        total += complex(val)
    return total


def sc_for_target(prevertices, target_angles, image_of_one: complex) -> SCMap:
    finite = [x for x in prevertices if math.isfinite(x)]
    exps = [target_angles[k] / PI - 1 for k, x in enumerate(prevertices) if math.isfinite(x)]
    return SCMap(tuple(finite), tuple(exps)).normalized(1.0 + 0j, image_of_one)
