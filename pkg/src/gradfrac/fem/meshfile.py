"""Plain-text mesh format.

Grammar (``#`` starts a comment, blank lines ignored)::

    nodes <count>
    <id> <x> <y>                      # ids dense 0..count-1, mm
    elements <count>
    <id> <n1> ... <n8>                # corners CCW, then midsides 12 23 34 41
    nodeset <name> <count>
    <id> <id> ...                     # any number of ids per line
    elemset <name> <count>
    <id> <id> ...
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from gradfrac.core.errors import MeshError
from gradfrac.fem.mesh import Mesh


def write_mesh(path: Path, mesh: Mesh) -> Path:
    path = Path(path)
    lines = ["# gradfrac Q8 mesh", f"nodes {mesh.n_nodes}"]
    lines += [f"{i} {x!r} {y!r}" for i, (x, y) in enumerate(mesh.coords.tolist())]
    lines.append(f"elements {mesh.n_elements}")
    lines += [f"{e} " + " ".join(str(n) for n in row) for e, row in enumerate(mesh.elements.tolist())]
    for keyword, sets in (("nodeset", mesh.node_sets), ("elemset", mesh.element_sets)):
        for name, ids in sets.items():
            lines.append(f"{keyword} {name} {ids.size}")
            for start in range(0, ids.size, 16):
                lines.append(" ".join(str(i) for i in ids[start:start + 16].tolist()))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _tokens(path: Path):
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def read_mesh(path: Path) -> Mesh:
    path = Path(path)
    if not path.exists():
        raise MeshError(f"mesh file not found: {path}")
    coords: list[list[float]] | None = None
    elements: list[list[int]] | None = None
    node_sets: dict[str, np.ndarray] = {}
    element_sets: dict[str, np.ndarray] = {}

    lines = list(_tokens(path))
    pos = 0

    def take_ids(count: int) -> np.ndarray:
        nonlocal pos
        ids: list[int] = []
        while len(ids) < count:
            if pos >= len(lines):
                raise MeshError(f"{path}: unexpected end of file while reading {count} ids")
            ids.extend(int(t) for t in lines[pos][1])
            pos += 1
        if len(ids) != count:
            raise MeshError(f"{path}: expected {count} ids, found {len(ids)}")
        return np.array(ids, dtype=np.int64)

    while pos < len(lines):
        lineno, head = lines[pos]
        pos += 1
        keyword = head[0].lower()
        try:
            if keyword == "nodes":
                count = int(head[1])
                rows = lines[pos:pos + count]
                pos += count
                coords = [[0.0, 0.0]] * count
                for (ln, tok) in rows:
                    idx = int(tok[0])
                    if not 0 <= idx < count:
                        raise MeshError(f"{path}:{ln}: node id {idx} out of range")
                    coords[idx] = [float(tok[1]), float(tok[2])]
            elif keyword == "elements":
                count = int(head[1])
                rows = lines[pos:pos + count]
                pos += count
                elements = [[0] * 8] * count
                for (ln, tok) in rows:
                    if len(tok) != 9:
                        raise MeshError(f"{path}:{ln}: Q8 element needs an id and 8 node ids")
                    elements[int(tok[0])] = [int(t) for t in tok[1:]]
            elif keyword == "nodeset":
                node_sets[head[1]] = take_ids(int(head[2]))
            elif keyword == "elemset":
                element_sets[head[1]] = take_ids(int(head[2]))
            else:
                raise MeshError(f"{path}:{lineno}: unknown section {head[0]!r}")
        except (IndexError, ValueError) as exc:
            raise MeshError(f"{path}:{lineno}: malformed {keyword!r} section ({exc})") from exc

    if coords is None or elements is None:
        raise MeshError(f"{path}: both 'nodes' and 'elements' sections are required")
    return Mesh(
        coords=np.array(coords, dtype=np.float64),
        elements=np.array(elements, dtype=np.int64),
        node_sets=node_sets,
        element_sets=element_sets,
    )
