"""Conelike soap films spanning a two-parameter family of tetrahedra."""
from .assembly import ConeFilm, FilmMesh, assemble_film, build_film, dihedral_along_edge, flat_cone
from .developing import DevelopingMap, build_zeta, solve_pentagon_lengths
from .domain import CurvilinearPolygon, build_gauss_domain
from .errors import *  # noqa: F401,F403
from .extremal import ext_length
from .tetra import Region, TetraParams, classify, classify_by_circles, make_params, tetra_vertices
from .verify import Tolerances, VerificationReport, sweep, verify_film
from .weierstrass import build_fundamental_mesh, weierstrass_data

__version__ = "0.1.0"
