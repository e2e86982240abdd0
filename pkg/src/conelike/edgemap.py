"""Conformal maps of a curvilinear polygon with prescribed edge directions.

A holomorphic f on the polygon whose boundary image is a polygonal curve
with edge k along direction ``exp(i*theta_k)`` satisfies, on edge k,

    arg f'(z) + arg(tangent) = theta_k.

Factoring out the vertex powers (z - v_k)^gamma_k with
gamma_k = beta_k/alpha_k - 1 (alpha: domain angle, beta: target angle)
leaves log f' = sum gamma_k Log_k(z - v_k) + H with Im H known and
continuous on the boundary.  H is fitted in a lightning basis.  The bounded
solution is unique up to a real additive constant (the scale of f).
A negative beta puts the vertex image at infinity (half-plane maps).
"""
from __future__ import annotations

import math

import numpy as np

from . import lightning
from .domain import CurvilinearPolygon
from .errors import SolverDiverged
from .quadrature import Singularity, integrate, segment_path

TWO_PI = 2 * math.pi


class EdgeDirectionMap:
    def __init__(self, poly: CurvilinearPolygon, directions, target_angles,
                 degree: int = 40, n_poles: int = 40, sigma: float = 3.0):
        self.poly = poly
        self.directions = np.asarray(directions, float)
        self.target_angles = np.asarray(target_angles, float)
        self.alpha = np.asarray(poly.interior_angles)
        self.gamma = self.target_angles / self.alpha - 1.0
        self.vertices = np.array(poly.vertices)
        self.basis = lightning.LightningBasis(poly, degree, n_poles, sigma)
        self.cuts = lightning.exterior_bisectors(poly)
        self._check_cuts()
        self.scale = 1.0
        self.offset = 0.0
        self._fit()
        # the real part of H is free; centre it on the boundary samples
        self.offset = -float(np.median(self.log_derivative(self.basis.samples).real))

    # branch of log(z - v_k) with its cut along the exterior bisector
    def _log_k(self, k, w):
        ref = -self.cuts[k]
        return np.log(w / ref) + 1j * np.angle(ref)

    def _singular(self, z):
        z = np.asarray(z, complex)
        out = np.zeros(z.shape, complex)
        for k, g in enumerate(self.gamma):
            if g != 0.0:
                out = out + g * self._log_k(k, z - self.vertices[k])
        return out

    def _check_cuts(self):
        diam = self.poly.diameter()
        s = diam * np.geomspace(1e-6, 2.0, 200)
        for k in range(len(self.vertices)):
            ray = self.vertices[k] + self.cuts[k] * s
            if np.any(self.poly.contains(ray)):
                raise SolverDiverged(f"branch cut at vertex {k} crosses the domain")

    def _boundary_data(self, edge_idx, tau):
        """Im H prescribed at boundary points, unwrapped to be continuous."""
        n = len(self.poly.edges)
        data = np.empty(len(tau))
        limits = []
        pieces = []
        for k, e in enumerate(self.poly.edges):
            sel = np.nonzero(edge_idx == k)[0]
            order = sel[np.argsort(tau[sel])]
            tt = tau[order]
            z = e.at(tt)
            r = self.directions[k] - np.angle(e.dat(tt)) - self._singular(z).imag
            # one-sided limits at the two ends
            ends = []
            for end in (0.0, 1.0):
                zv = complex(e.at(end))
                tan = complex(e.tangent(end))
                val = self.directions[k] - np.angle(tan)
                for j, g in enumerate(self.gamma):
                    if g == 0.0:
                        continue
                    if abs(zv - self.vertices[j]) < 1e-12 * (1 + abs(zv)):
                        w = tan if end == 0.0 else -tan
                    else:
                        w = zv - self.vertices[j]
                    val -= g * self._log_k(j, w).imag
                ends.append(val)
            full = np.unwrap(np.concatenate([[ends[0]], r, [ends[1]]]))
            pieces.append((order, full))
            limits.append((full[0], full[-1]))
        shift = 0.0
        prev_end = None
        shifts = []
        for k in range(n):
            start, end = limits[k]
            if prev_end is not None:
                shift = TWO_PI * round((prev_end - (start)) / TWO_PI)
            shifts.append(shift)
            prev_end = end + shift
        mismatch = (limits[0][0] + shifts[0]) - prev_end
        self.closure_mismatch = float(mismatch)
        if abs(mismatch) > 1e-6:
            raise SolverDiverged(f"boundary data does not close: mismatch {mismatch:.3e}")
        self.vertex_jumps = [
            (limits[k][0] + shifts[k]) - (limits[k - 1][1] + shifts[k - 1]) for k in range(n)
        ]
        for (order, full), sh in zip(pieces, shifts):
            data[order] = full[1:-1] + sh
        return data

    def _fit(self):
        b = self.basis
        V = b.values(b.samples)
        rhs = self._boundary_data(b.sample_edge, b.sample_tau)
        M = lightning.real_columns(V, "im")
        x = lightning.lstsq(M, rhs)
        self.coef = lightning.complex_coefficients(x)
        self.fit_residual = float(np.max(np.abs(M @ x - rhs)))
        # independent check points between the samples
        rng_tau = np.linspace(0.0005, 0.9995, 301)
        errs = []
        for k, e in enumerate(self.poly.edges):
            target = self._boundary_data_single(k, rng_tau)
            got = b.evaluate(self.coef, e.at(rng_tau)).imag
            d = got - target
            d = d - TWO_PI * np.round(d / TWO_PI)
            errs.append(np.max(np.abs(d)))
        self.check_residual = float(max(errs))

    def _boundary_data_single(self, k, tau):
        e = self.poly.edges[k]
        z = e.at(tau)
        return self.directions[k] - np.angle(e.dat(tau)) - self._singular(z).imag

    # public evaluators -------------------------------------------------
    def log_derivative(self, z):
        z = np.asarray(z, complex)
        return (self._singular(z) + self.basis.evaluate(self.coef, z)
                + self.offset + math.log(self.scale))

    def derivative(self, z):
        return np.exp(self.log_derivative(z))

    def singularities(self, power: float = 1.0, extra: float = 0.0):
        """Quadrature singularities of (f')^power times a smooth factor."""
        out = []
        for k, v in enumerate(self.vertices):
            scale = max(0.5 * self.basis.min_pole_distance[k], 1e-12 * (1 + abs(v)))
            out.append(Singularity(complex(v), power * self.gamma[k] + extra, scale))
        return tuple(out)

    def integrate_segment(self, a: complex, b: complex):
        path, dpath = segment_path(a, b)
        return complex(integrate(self.derivative, path, dpath, sing=self.singularities()))

    def edge_image_length(self, k: int) -> float:
        e = self.poly.edges[k]
        fn = lambda z: np.abs(self.derivative(z))
        # |f'||dz| along the edge: integrate |f'(z(t))| |z'(t)| dt
        from .quadrature import panel_rule
        t, w = panel_rule(e.at, e.dat, 0.0, 1.0, self.singularities())
        return float(np.sum(np.abs(w) * fn(e.at(t))))
