"""Generate the fullerene data files shipped in src/modemd/data/.

C20 and C60 come from exact polyhedra (dodecahedron, truncated
icosahedron).  C26 (unique fullerene isomer, D3h) is wound up from its
face spiral and embedded spectrally.  C70 (D5h) is built by splitting the
C60 truncated icosahedron at the equator perpendicular to a five-fold
axis and inserting a ten-atom belt.

Run from the repository root:  python scripts/build_molecule_files.py
"""

from pathlib import Path

import numpy as np

PHI = (1.0 + np.sqrt(5.0)) / 2.0
TARGET_BOND = 1.42  # angstrom, approximate starting bond length
DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "modemd" / "data"


def nearest_neighbor_bonds(coords, k=3):
    """Bond each vertex to its k nearest neighbors (must be mutual)."""
    n = len(coords)
    d = np.linalg.norm(coords[:, None] - coords[None, :], axis=2)
    np.fill_diagonal(d, np.inf)
    bonds = set()
    for i in range(n):
        for j in np.argsort(d[i])[:k]:
            bonds.add((min(i, int(j)), max(i, int(j))))
    assert len(bonds) == 3 * n // 2, "not trivalent"
    return sorted(bonds)


def dodecahedron():
    pts = []
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                pts.append((sx, sy, sz))
    for s1 in (1, -1):
        for s2 in (1, -1):
            pts.append((0, s1 / PHI, s2 * PHI))
            pts.append((s1 / PHI, s2 * PHI, 0))
            pts.append((s1 * PHI, 0, s2 / PHI))
    pts = np.array(pts, dtype=float)
    return pts * (TARGET_BOND / (2.0 / PHI))


def truncated_icosahedron():
    ico = []
    for s1 in (1, -1):
        for s2 in (1, -1):
            ico.append((0, s1, s2 * PHI))
            ico.append((s1, s2 * PHI, 0))
            ico.append((s1 * PHI, 0, s2))
    ico = np.array(ico, dtype=float)
    # icosahedron edges connect vertices at distance 2
    edges = [(i, j) for i in range(12) for j in range(12)
             if i != j and abs(np.linalg.norm(ico[i] - ico[j]) - 2.0) < 1e-9]
    pts = {tuple(np.round((2 * ico[i] + ico[j]) / 3.0, 12)) for i, j in edges}
    pts = np.array(sorted(pts))
    assert len(pts) == 60
    return pts * (TARGET_BOND / (2.0 / 3.0))


def spiral_windup(face_sizes):
    """Wind a cubic planar graph from its face spiral.

    Faces are attached one at a time around the boundary of the growing
    patch.  Each new face shares with the boundary a contiguous path that
    starts and ends on degree-2 vertices and passes only through degree-3
    vertices.  Returns the bond list; raises ValueError if the spiral
    cannot be wound.
    """
    F = len(face_sizes)
    deg = {}
    edges = set()
    nv = 0

    def new_vertex():
        nonlocal nv
        deg[nv] = 0
        nv += 1
        return nv - 1

    def connect(a, b):
        e = (min(a, b), max(a, b))
        if e in edges:
            raise ValueError("duplicate edge")
        edges.add(e)
        deg[a] += 1
        deg[b] += 1

    s0 = face_sizes[0]
    boundary = [new_vertex() for _ in range(s0)]
    for i in range(s0):
        connect(boundary[i], boundary[(i + 1) % s0])
    cursor = 1  # boundary position of the far end of the last shared path

    for fi in range(1, F - 1):
        s = face_sizes[fi]
        nb = len(boundary)
        # path start: scan backward from just before the cursor vertex for
        # the first degree-2 vertex
        i = (cursor - 1) % nb
        for _ in range(nb):
            if deg[boundary[i]] == 2:
                break
            i = (i - 1) % nb
        else:
            raise ValueError(f"face {fi}: no open boundary vertex")
        # path end: scan forward through degree-3 vertices
        j = (i + 1) % nb
        for _ in range(nb):
            if deg[boundary[j]] != 3:
                break
            j = (j + 1) % nb
        else:
            raise ValueError(f"face {fi}: boundary fully saturated")
        path = [boundary[i]]
        k = i
        while k != j:
            k = (k + 1) % nb
            path.append(boundary[k])
        L = len(path)
        m = s - L  # new vertices
        if m < 0:
            raise ValueError(f"face {fi}: boundary run longer than face")
        new = [new_vertex() for _ in range(m)]
        chain = [path[-1]] + new + [path[0]]
        for a, b in zip(chain[:-1], chain[1:]):
            connect(a, b)
        # replace interior of the shared path with the new chain
        rotated = boundary[i:] + boundary[:i]  # starts at path[0]
        rest = rotated[L - 1:]                 # path[-1] .. around .. path[0]
        boundary = [path[0]] + list(reversed(new)) + rest
        cursor = boundary.index(path[-1])

    # closing face: the boundary must be exactly its cycle, fully saturated
    if len(boundary) != face_sizes[-1]:
        raise ValueError("closure failed: wrong boundary length")
    if any(deg[v] != 3 for v in boundary):
        raise ValueError("closure failed: unsaturated boundary vertex")
    V = 2 * F - 4
    if nv != V or len(edges) != 3 * V // 2 or any(deg[v] != 3 for v in deg):
        raise ValueError("wound graph is not the expected cubic polyhedron")
    return sorted(edges)


def spectral_embedding(bonds, n):
    adj = np.zeros((n, n))
    for i, j in bonds:
        adj[i, j] = adj[j, i] = 1.0
    w, v = np.linalg.eigh(adj)
    pts = v[:, -4:-1]  # eigenvectors 2..4 by descending eigenvalue
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    mean_bond = np.mean([np.linalg.norm(pts[i] - pts[j]) for i, j in bonds])
    return pts * (TARGET_BOND / mean_bond)


def c26():
    # unique C26 fullerene (D3h); every valid 12-pentagon/3-hexagon spiral
    # winds to the same graph, this one verified to wind
    sizes = [5] * 15
    for h in (0, 8, 11):
        sizes[h] = 6
    bonds = spiral_windup(sizes)
    return spectral_embedding(bonds, 26), bonds


def face_sizes_from_embedding(pts, bonds):
    """Trace the faces of a convex-ish embedded cubic graph.

    Neighbors are ordered around each vertex's outward radial direction;
    faces follow the resulting rotation system.
    """
    n = len(pts)
    adj = {i: [] for i in range(n)}
    for i, j in bonds:
        adj[i].append(j)
        adj[j].append(i)
    rot = {}
    for v in range(n):
        r = pts[v] / np.linalg.norm(pts[v])
        ref = np.array([0.017, 0.37, 0.92])
        t1 = np.cross(r, ref)
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(r, t1)
        rot[v] = sorted(adj[v], key=lambda w: np.arctan2(
            (pts[w] - pts[v]) @ t2, (pts[w] - pts[v]) @ t1))
    nxt = {}
    for v in rot:
        for k, w in enumerate(rot[v]):
            nxt[(w, v)] = rot[v][(k + 1) % len(rot[v])]
    seen = set()
    sizes = []
    for e0 in list(nxt):
        if e0 in seen:
            continue
        e, size = e0, 0
        while e not in seen:
            seen.add(e)
            size += 1
            e = (e[1], nxt[e])
        sizes.append(size)
    return sorted(sizes)


def c70():
    c60 = truncated_icosahedron()
    # orient a five-fold axis (through an icosahedron vertex) along z
    axis = np.array([0.0, 1.0, PHI])
    axis /= np.linalg.norm(axis)
    zhat = np.array([0.0, 0.0, 1.0])
    v = np.cross(axis, zhat)
    c = float(axis @ zhat)
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    R = np.eye(3) + vx + vx @ vx / (1.0 + c)
    pts = c60 @ R.T
    bonds60 = nearest_neighbor_bonds(pts)

    top = [i for i in range(60) if pts[i, 2] > 0]
    half_bonds = [b for b in bonds60 if (b[0] in top) == (b[1] in top)]

    # C60 halves are staggered about the five-fold axis; in C70 the rim
    # dimers must be eclipsed, so rotate the bottom half by 36 degrees.
    rot36 = np.radians(36.0)
    cz, sz = np.cos(rot36), np.sin(rot36)
    Rz = np.array([[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]])
    shift = 0.75  # half the height of the inserted belt
    new_pts = pts.copy()
    new_pts[~np.isin(np.arange(60), top)] = \
        new_pts[~np.isin(np.arange(60), top)] @ Rz.T
    new_pts[:, 2] += np.where(pts[:, 2] > 0, shift, -shift)

    zmin = np.min(np.abs(pts[:, 2]))
    rim_top = sorted((i for i in range(60)
                      if abs(abs(pts[i, 2]) - zmin) < 1e-6 and pts[i, 2] > 0),
                     key=lambda i: np.arctan2(new_pts[i, 1], new_pts[i, 0]))
    rim_bot = sorted((i for i in range(60)
                      if abs(abs(pts[i, 2]) - zmin) < 1e-6 and pts[i, 2] < 0),
                     key=lambda i: np.arctan2(new_pts[i, 1], new_pts[i, 0]))
    # align index-wise: rotate rim_bot so b_k sits at the angle of t_k
    angt = [np.arctan2(new_pts[i, 1], new_pts[i, 0]) for i in rim_top]
    angb = [np.arctan2(new_pts[i, 1], new_pts[i, 0]) for i in rim_bot]
    roll = int(np.argmin([abs((angb[k] - angt[0] + np.pi) % (2 * np.pi)
                              - np.pi) for k in range(10)]))
    rim_bot = rim_bot[roll:] + rim_bot[:roll]

    belt_r = 1.05 * np.mean([np.hypot(new_pts[i, 0], new_pts[i, 1])
                             for i in rim_top])
    base = 60
    belt_pts = np.array([[belt_r * np.cos(a), belt_r * np.sin(a), 0.0]
                         for a in angt])
    all_pts = np.vstack([new_pts, belt_pts])
    bonds = list(half_bonds)
    for k in range(10):
        bonds.append(tuple(sorted((rim_top[k], base + k))))
        bonds.append(tuple(sorted((rim_bot[k], base + k))))
    # belt dimers bridge the gaps between rim dimers
    adj60 = {frozenset(b) for b in bonds60}
    dimers = [(base + k, base + (k + 1) % 10) for k in range(10)
              if frozenset((rim_top[k], rim_top[(k + 1) % 10])) not in adj60]
    assert len(dimers) == 5, f"expected 5 belt dimers, got {len(dimers)}"
    bonds = sorted(bonds + [tuple(sorted(d)) for d in dimers])

    degs = np.zeros(70, dtype=int)
    for i, j in bonds:
        degs[i] += 1
        degs[j] += 1
    assert (degs == 3).all() and len(bonds) == 105
    sizes = face_sizes_from_embedding(all_pts, bonds)
    assert sizes == [5] * 12 + [6] * 25, f"C70 faces wrong: {sizes}"
    return all_pts, bonds


def write_mol(path, name, coords, bonds, comment):
    with open(path, "w") as fh:
        fh.write(f"# {comment}\n")
        fh.write(f"name {name}\nmass 12.011\ncoords\n")
        for x, y, z in coords:
            fh.write(f"{x: .12f} {y: .12f} {z: .12f}\n")
        fh.write("bonds\n")
        for i, j in bonds:
            fh.write(f"{i} {j}\n")


def main():
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    pts = dodecahedron()
    write_mol(DATA_DIR / "c20.mol", "c20", pts, nearest_neighbor_bonds(pts),
              "C20 fullerene: regular dodecahedron (Ih topology)")
    pts = truncated_icosahedron()
    write_mol(DATA_DIR / "c60.mol", "c60", pts, nearest_neighbor_bonds(pts),
              "C60 fullerene: truncated icosahedron (Ih)")
    pts, bonds = c26()
    write_mol(DATA_DIR / "c26.mol", "c26", pts, bonds,
              "C26 fullerene: the unique isomer (D3h), spectral embedding")
    pts, bonds = c70()
    write_mol(DATA_DIR / "c70.mol", "c70", pts, bonds,
              "C70 fullerene: D5h isomer, C60 halves with equatorial belt")
    print("wrote data files to", DATA_DIR)


if __name__ == "__main__":
    main()
