"""ASCII OBJ and PLY export and re-import."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .assembly import ConeFilm, FilmMesh

CURVES = ("Y1", "Y2", "Y3", "Y4")
TPOINT_TAG = 9
CURVE_TAG = 10   # Yk vertices carry CURVE_TAG + k


def _pieces(film):
    if isinstance(film, ConeFilm):
        return film.vertices, [("cone", film.triangles)], {}
    groups = [(name, film.group(name)) for name in film.group_names]
    return film.vertices, groups, film.curve_indices or {}


def write_obj(film, path) -> Path:
    V, groups, curves = _pieces(film)
    lines = [f"# conelike film s={film.params.s!r} t={film.params.t!r}",
             f"o film_{film.params.s:g}_{film.params.t:g}"]
    lines += [f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in V]
    for name, tris in groups:
        lines.append(f"g {name}")
        lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in tris]
    for name in CURVES:
        if name in curves:
            lines.append(f"g {name}")
            lines.append("l " + " ".join(str(i + 1) for i in curves[name]))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def vertex_tags(film) -> np.ndarray:
    V, groups, curves = _pieces(film)
    tags = np.zeros(len(V), int)
    for k, (_, tris) in enumerate(groups):
        tags[np.unique(tris)] = k
    for k, name in enumerate(CURVES, start=1):
        if name in curves:
            tags[curves[name]] = CURVE_TAG + k
    if isinstance(film, ConeFilm):
        tags[0] = TPOINT_TAG
    elif curves:
        tags[curves["Y1"][0]] = TPOINT_TAG
    return tags


def write_ply(film, path) -> Path:
    V, groups, _ = _pieces(film)
    F = np.vstack([t for _, t in groups])
    tags = vertex_tags(film)
    names = " ".join(f"{k}={n}" for k, (n, _) in enumerate(groups))
    head = ["ply", "format ascii 1.0",
            f"comment tags {names} {TPOINT_TAG}=Tpoint "
            + " ".join(f"{CURVE_TAG + k}={c}" for k, c in enumerate(CURVES, start=1)),
            f"element vertex {len(V)}", "property double x", "property double y",
            "property double z", "property int tag",
            f"element face {len(F)}", "property list uchar int vertex_indices", "end_header"]
    body = [f"{x:.17g} {y:.17g} {z:.17g} {g}" for (x, y, z), g in zip(V, tags)]
    body += [f"3 {a} {b} {c}" for a, b, c in F]
    path = Path(path)
    path.write_text("\n".join(head + body) + "\n")
    return path


def write_mesh(film, path) -> Path:
    suffix = Path(path).suffix.lower()
    if suffix == ".obj":
        return write_obj(film, path)
    if suffix == ".ply":
        return write_ply(film, path)
    raise ValueError(f"unsupported mesh format {suffix!r}; use .obj or .ply")


def read_obj(path) -> dict:
    V, faces, lines, group = [], {}, {}, None
    for raw in Path(path).read_text().splitlines():
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "v":
            V.append([float(x) for x in parts[1:4]])
        elif parts[0] == "g":
            group = parts[1]
        elif parts[0] == "f":
            faces.setdefault(group, []).append([int(x.split("/")[0]) - 1 for x in parts[1:]])
        elif parts[0] == "l":
            lines[group] = [int(x) - 1 for x in parts[1:]]
    return {"vertices": np.array(V), "faces": {k: np.array(v) for k, v in faces.items()},
            "lines": lines}


def read_ply(path) -> dict:
    text = Path(path).read_text().splitlines()
    end = text.index("end_header")
    n_v = n_f = 0
    for line in text[:end]:
        if line.startswith("element vertex"):
            n_v = int(line.split()[-1])
        elif line.startswith("element face"):
            n_f = int(line.split()[-1])
    rows = [line.split() for line in text[end + 1:end + 1 + n_v]]
    V = np.array([[float(x) for x in r[:3]] for r in rows])
    tags = np.array([int(r[3]) for r in rows])
    F = np.array([[int(x) for x in line.split()[1:]] for line in text[end + 1 + n_v:end + 1 + n_v + n_f]])
    return {"vertices": V, "tags": tags, "faces": F}


def read_mesh(path) -> dict:
    return read_obj(path) if Path(path).suffix.lower() == ".obj" else read_ply(path)
