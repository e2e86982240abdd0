"""Integration paths inside Omega_st starting at p2.

Under the Mobius map M(z) = (z - p2)/(z - p1) the circles Gamma_1 and
Gamma_2 become rays from the origin and Omega_st becomes star-shaped about
M(p2) = 0.  The path to z is the preimage of the segment [0, M(z)], an arc of
a circle through p1 and p2.
"""
from __future__ import annotations

import numpy as np

from .domain import normalizing_mobius
from .quadrature import integrate

MOBIUS = normalizing_mobius()
INVERSE = MOBIUS.inverse()


def ray_path(z: complex, w_start: complex = 0j):
    """Path t -> M^{-1}(w_start + t (M(z) - w_start)) on [0, 1] and its derivative."""
    w1 = complex(MOBIUS(z))
    d = w1 - w_start

    def path(t):
        return INVERSE(w_start + np.asarray(t) * d)

    def dpath(t):
        return INVERSE.derivative(w_start + np.asarray(t) * d) * d

    return path, dpath


def polar_point(r, theta):
    """Point of Omega_st with M-coordinates r exp(i theta)."""
    return INVERSE(np.asarray(r) * np.exp(1j * np.asarray(theta)))


def integrate_from_p2(f, z: complex, sing=()):
    path, dpath = ray_path(z)
    return integrate(f, path, dpath, 0.0, 1.0, sing)
