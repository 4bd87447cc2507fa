#!/usr/bin/env python3
"""Regenerate the synthetic test structures under crates/core/tests/fixtures.

Geometry is built from ideal internal coordinates so the fixtures are
reproducible without any cheminformatics toolkit. Run from the repo root:

    python3 scripts/make_fixtures.py
"""

import math
import os

import numpy as np

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "fixtures")
RNG = np.random.default_rng(20240917)


def unit(v):
    return v / np.linalg.norm(v)


def place(a, b, c, bond, angle_deg, dihedral_deg):
    """NeRF: position of d bonded to c with angle b-c-d and dihedral a-b-c-d."""
    angle = math.radians(angle_deg)
    dihedral = math.radians(dihedral_deg)
    bc = unit(c - b)
    n = unit(np.cross(b - a, bc))
    m = np.cross(n, bc)
    d2 = np.array([
        -bond * math.cos(angle),
        bond * math.sin(angle) * math.cos(dihedral),
        bond * math.sin(angle) * math.sin(dihedral),
    ])
    return c + d2[0] * bc + d2[1] * m + d2[2] * n


def dihedral(a, b, c, d):
    b1, b2, b3 = b - a, c - b, d - c
    n1, n2 = np.cross(b1, b2), np.cross(b2, b3)
    m1 = np.cross(n1, unit(b2))
    # same sign convention as place()
    return -math.degrees(math.atan2(np.dot(m1, n2), np.dot(n1, n2)))


def rotation_about(axis, angle_rad):
    axis = unit(axis)
    x, y, z = axis
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    C = 1 - c
    return np.array([
        [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
        [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
        [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
    ])


def align(u, v):
    """Rotation taking unit vector u onto unit vector v."""
    u, v = unit(u), unit(v)
    axis = np.cross(u, v)
    s = np.linalg.norm(axis)
    c = np.dot(u, v)
    if s < 1e-12:
        if c > 0:
            return np.eye(3)
        perp = unit(np.cross(u, [1.0, 0.0, 0.0] if abs(u[0]) < 0.9 else [0.0, 1.0, 0.0]))
        return rotation_about(perp, math.pi)
    return rotation_about(axis, math.atan2(s, c))


# ---------------------------------------------------------------------------
# molecules: list of (element, xyz) plus bonds (i, j, order) 0-based
# ---------------------------------------------------------------------------


def phenylethanol():
    atoms, bonds = [], []
    ring = [np.array([1.39 * math.cos(math.radians(60 * k)), 1.39 * math.sin(math.radians(60 * k)), 0.0]) for k in range(6)]
    for p in ring:
        atoms.append(["C", p])
    for k in range(6):
        bonds.append((k, (k + 1) % 6, 4))
    c7 = unit(ring[0]) * (1.39 + 1.51)
    atoms.append(["C", c7])  # 6
    bonds.append((0, 6, 1))
    c8 = place(ring[1], ring[0], c7, 1.53, 112.0, 90.0)
    atoms.append(["C", c8])  # 7
    bonds.append((6, 7, 1))
    o9 = place(ring[0], c7, c8, 1.43, 109.5, 180.0)
    atoms.append(["O", o9])  # 8
    bonds.append((7, 8, 1))
    for k in range(1, 6):
        h = unit(ring[k]) * (1.39 + 1.08)
        atoms.append(["H", h])
        bonds.append((k, len(atoms) - 1, 1))
    phi = dihedral(o9, c8, c7, ring[0])
    for off in (120.0, -120.0):
        atoms.append(["H", place(o9, c8, c7, 1.09, 109.5, phi + off)])
        bonds.append((6, len(atoms) - 1, 1))
    phi = dihedral(ring[0], c7, c8, o9)
    for off in (120.0, -120.0):
        atoms.append(["H", place(ring[0], c7, c8, 1.09, 109.5, phi + off)])
        bonds.append((7, len(atoms) - 1, 1))
    atoms.append(["H", place(c7, c8, o9, 0.96, 108.5, 180.0)])
    bonds.append((8, len(atoms) - 1, 1))
    return atoms, bonds


def benzene():
    atoms, bonds = [], []
    for k in range(6):
        a = math.radians(60 * k)
        atoms.append(["C", np.array([1.39 * math.cos(a), 1.39 * math.sin(a), 0.0])])
    for k in range(6):
        a = math.radians(60 * k)
        atoms.append(["H", np.array([2.47 * math.cos(a), 2.47 * math.sin(a), 0.0])])
    for k in range(6):
        bonds.append((k, (k + 1) % 6, 4))
        bonds.append((k, k + 6, 1))
    return atoms, bonds


def butane(central_dihedral):
    c1 = np.array([0.0, 0.0, 0.0])
    c2 = np.array([1.53, 0.0, 0.0])
    c3 = place(np.array([0.0, 1.0, 0.0]), c1, c2, 1.53, 109.5, 180.0)
    c4 = place(c1, c2, c3, 1.53, 109.5, central_dihedral)
    atoms = [["C", c1], ["C", c2], ["C", c3], ["C", c4]]
    bonds = [(0, 1, 1), (1, 2, 1), (2, 3, 1)]

    def add_h(center_idx, a, b, c, dihedrals):
        for d in dihedrals:
            atoms.append(["H", place(a, b, c, 1.09, 109.5, d)])
            bonds.append((center_idx, len(atoms) - 1, 1))

    add_h(0, c3, c2, c1, [60.0, 180.0, -60.0])
    phi = dihedral(c4, c3, c2, c1)
    add_h(1, c4, c3, c2, [phi + 120.0, phi - 120.0])
    phi = dihedral(c1, c2, c3, c4)
    add_h(2, c1, c2, c3, [phi + 120.0, phi - 120.0])
    add_h(3, c2, c3, c4, [60.0, 180.0, -60.0])
    return atoms, bonds


def cyclohexane_chair():
    # D3d chair with C-C 1.53 A and C-C-C 111.4 deg
    d13 = 2 * 1.53 * math.sin(math.radians(111.4 / 2))
    r = d13 / math.sqrt(3)
    h = 0.5 * math.sqrt(1.53 ** 2 - r ** 2)
    atoms = []
    for k in range(6):
        a = math.radians(60 * k)
        atoms.append(["C", np.array([r * math.cos(a), r * math.sin(a), h if k % 2 == 0 else -h])])
    bonds = [(k, (k + 1) % 6, 1) for k in range(6)]
    return atoms, bonds


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------


def write_sdf(path, name, atoms, bonds, charges=None):
    charges = charges or {}
    lines = [name, "  synthetic", ""]
    lines.append(f"{len(atoms):3d}{len(bonds):3d}  0  0  0  0  0  0  0  0999 V2000")
    for el, p in atoms:
        lines.append(f"{p[0]:10.4f}{p[1]:10.4f}{p[2]:10.4f} {el:<3} 0  0  0  0  0  0  0  0  0  0  0  0")
    for a, b, o in bonds:
        lines.append(f"{a + 1:3d}{b + 1:3d}{o:3d}  0")
    if charges:
        entries = "".join(f" {i + 1:3d} {q:3d}" for i, q in sorted(charges.items()))
        lines.append(f"M  CHG{len(charges):3d}{entries}")
    lines.append("M  END")
    lines.append("$$$$")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


SYBYL = {"C": "C.3", "O": "O.3", "H": "H", "N": "N.3"}


def write_mol2(path, name, atoms, bonds, charges):
    aromatic = set()
    for a, b, o in bonds:
        if o == 4:
            aromatic.update((a, b))
    lines = ["@<TRIPOS>MOLECULE", name, f"{len(atoms):5d}{len(bonds):6d}     1     0     0", "SMALL", "USER_CHARGES", ""]
    lines.append("@<TRIPOS>ATOM")
    for i, (el, p) in enumerate(atoms):
        t = "C.ar" if i in aromatic else SYBYL.get(el, el)
        lines.append(f"{i + 1:7d} {el}{i + 1:<7d}{p[0]:10.4f}{p[1]:10.4f}{p[2]:10.4f} {t:<6}{1:5d}  LIG1  {charges[i]:9.4f}")
    lines.append("@<TRIPOS>BOND")
    for k, (a, b, o) in enumerate(bonds):
        t = "ar" if o == 4 else str(o)
        lines.append(f"{k + 1:6d}{a + 1:6d}{b + 1:6d} {t}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def pdb_atom_line(record, serial, name, resname, chain, resseq, p, element):
    name_field = f" {name:<3}" if len(name) < 4 and len(element) == 1 else f"{name:<4}"
    return (
        f"{record:<6}{serial:5d} {name_field} {resname:>3} {chain}{resseq:4d}    "
        f"{p[0]:8.3f}{p[1]:8.3f}{p[2]:8.3f}{1.0:6.2f}{0.0:6.2f}          {element:>2}"
    )


# ---------------------------------------------------------------------------
# protein fragments
# ---------------------------------------------------------------------------


def backbone():
    n = np.array([0.0, 0.0, 0.0])
    ca = np.array([1.458, 0.0, 0.0])
    ang = math.radians(180 - 111.2)
    c = ca + 1.525 * np.array([math.cos(ang), math.sin(ang), 0.0])
    o = place(n, ca, c, 1.231, 120.5, 150.0)
    cb = place(c, n, ca, 1.53, 110.5, 122.5)
    return {"N": n, "CA": ca, "C": c, "O": o, "CB": cb}


def residue(name):
    r = backbone()
    N, CA, CB = r["N"], r["CA"], r["CB"]
    if name == "GLY":
        del r["CB"]
    elif name == "LEU":
        r["CG"] = place(N, CA, CB, 1.53, 116.0, -60.0)
        r["CD1"] = place(CA, CB, r["CG"], 1.52, 110.5, 180.0)
        r["CD2"] = place(CA, CB, r["CG"], 1.52, 110.5, 60.0)
    elif name == "SER":
        r["OG"] = place(N, CA, CB, 1.417, 111.0, 60.0)
    elif name == "LYS":
        r["CG"] = place(N, CA, CB, 1.52, 114.0, 180.0)
        r["CD"] = place(CA, CB, r["CG"], 1.52, 111.0, 180.0)
        r["CE"] = place(CB, r["CG"], r["CD"], 1.52, 111.0, 180.0)
        r["NZ"] = place(r["CG"], r["CD"], r["CE"], 1.49, 111.7, 180.0)
    elif name == "ASP":
        r["CG"] = place(N, CA, CB, 1.52, 113.0, -60.0)
        r["OD1"] = place(CA, CB, r["CG"], 1.25, 119.0, 30.0)
        r["OD2"] = place(CA, CB, r["CG"], 1.25, 119.0, 210.0)
    elif name == "PHE":
        r["CG"] = place(N, CA, CB, 1.50, 114.0, -60.0)
        r["CD1"] = place(CA, CB, r["CG"], 1.39, 120.7, 90.0)
        r["CD2"] = place(CA, CB, r["CG"], 1.39, 120.7, -90.0)
        r["CE1"] = place(CB, r["CG"], r["CD1"], 1.39, 120.0, 180.0)
        r["CE2"] = place(CB, r["CG"], r["CD2"], 1.39, 120.0, 180.0)
        r["CZ"] = place(r["CG"], r["CD1"], r["CE1"], 1.39, 120.0, 0.0)
    return r


def transform(frag, R, t):
    return {k: R @ v + t for k, v in frag.items()}


def place_by_key(frag, key_point, target, outward, other_atoms, min_dist=3.0):
    """Put key_point at target with CA pushed along `outward`; pick the roll clearing `other_atoms`."""
    shifted = {k: v - key_point for k, v in frag.items()}
    R0 = align(shifted["CA"], outward)
    best = None
    for roll in range(0, 360, 10):
        R = rotation_about(outward, math.radians(roll)) @ R0
        cand = transform(shifted, R, target)
        dmin = min(
            (np.linalg.norm(p - q) for name, p in cand.items() for q in other_atoms if np.linalg.norm(p - target) > 1e-6),
            default=99.0,
        )
        if best is None or dmin > best[0]:
            best = (dmin, cand)
        if dmin >= min_dist:
            return cand
    return best[1]


def build_complex():
    lig_atoms, lig_bonds = phenylethanol()
    lig_xyz = [p for _, p in lig_atoms]
    centroid = np.mean(lig_xyz[:6], axis=0)
    o9 = lig_xyz[8]
    c8 = lig_xyz[7]
    placed = []
    occupied = list(lig_xyz)

    # face-to-face stacked PHE ring, slightly offset
    phe = residue("PHE")
    ring_names = ["CG", "CD1", "CD2", "CE1", "CE2", "CZ"]
    rc = np.mean([phe[n] for n in ring_names], axis=0)
    rn = unit(np.cross(phe["CD1"] - phe["CG"], phe["CD2"] - phe["CG"]))
    shifted = {k: v - rc for k, v in phe.items()}
    R = align(rn, np.array([0.0, 0.0, 1.0]))
    shifted = {k: R @ v for k, v in shifted.items()}
    cb_dir = shifted["CB"].copy()
    cb_dir[2] = 0.0
    ang = math.atan2(cb_dir[1], cb_dir[0])
    R2 = rotation_about(np.array([0.0, 0.0, 1.0]), math.pi - ang)
    phe = {k: R2 @ v + np.array([-0.6, 0.0, 3.75]) for k, v in shifted.items()}
    placed.append(("PHE", phe))
    occupied += list(phe.values())

    # lysine ammonium under the ring (pi-cation)
    lys = residue("LYS")
    lys = place_by_key(lys, lys["NZ"], centroid + np.array([0.0, 0.0, -4.1]), np.array([0.0, 0.0, -1.0]), occupied)
    placed.append(("LYS", lys))
    occupied += list(lys.values())

    # serine hydroxyl hydrogen-bonded to the ligand hydroxyl
    away = unit(o9 - c8)
    ser = residue("SER")
    target = o9 + 2.85 * unit(away + np.array([0.0, 0.0, 0.8]))
    ser = place_by_key(ser, ser["OG"], target, unit(target - o9), occupied)
    placed.append(("SER", ser))
    occupied += list(ser.values())

    # leucine methyl against the far ring edge (hydrophobic)
    leu = residue("LEU")
    c4 = lig_xyz[3]
    target = c4 + np.array([-3.9, 0.0, 0.3])
    leu = place_by_key(leu, leu["CD1"], target, np.array([-1.0, 0.0, 0.0]), occupied)
    placed.append(("LEU", leu))
    occupied += list(leu.values())

    # aspartate a little further away on -y
    asp = residue("ASP")
    target = centroid + np.array([0.5, -5.6, 0.8])
    asp = place_by_key(asp, asp["OD1"], target, np.array([0.0, -1.0, 0.0]), occupied)
    placed.append(("ASP", asp))
    occupied += list(asp.values())

    # glycine carbonyl near the +y ring edge
    gly = residue("GLY")
    target = centroid + np.array([-0.5, 5.3, -0.6])
    gly = place_by_key(gly, gly["O"], target, np.array([0.0, 1.0, 0.0]), occupied)
    placed.append(("GLY", gly))
    occupied += list(gly.values())

    zn = o9 + 1.9 * unit(away + np.array([0.0, -1.2, -0.6]))
    water = centroid + np.array([6.5, -3.0, -3.0])
    return lig_atoms, lig_bonds, placed, zn, water


def write_protein(path, placed, zn, water):
    lines = []
    serial = 1
    for seq, (name, frag) in enumerate(placed, start=1):
        for atom, p in frag.items():
            lines.append(pdb_atom_line("ATOM", serial, atom, name, "A", seq, p, atom[0]))
            serial += 1
    lines.append("TER")
    lines.append(pdb_atom_line("HETATM", serial, "ZN", "ZN", "A", 101, zn, "ZN"))
    serial += 1
    lines.append(pdb_atom_line("HETATM", serial, "O", "HOH", "A", 201, water, "O"))
    lines.append("END")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def rigid(atoms, R, t):
    return [[el, R @ p + t] for el, p in atoms]


def twist(atoms, bonds, axis_pair, angle_deg):
    """Rotate the side of bond axis_pair containing its second atom."""
    a, b = axis_pair
    adj = {i: set() for i in range(len(atoms))}
    for i, j, _ in bonds:
        adj[i].add(j)
        adj[j].add(i)
    moving, stack = {b}, [b]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y == a or y in moving:
                continue
            moving.add(y)
            stack.append(y)
    pa, pb = atoms[a][1], atoms[b][1]
    R = rotation_about(pb - pa, math.radians(angle_deg))
    return [[el, (R @ (p - pb) + pb) if i in moving else p] for i, (el, p) in enumerate(atoms)]


def main():
    os.makedirs(OUT, exist_ok=True)
    lig_atoms, lig_bonds, placed, zn, water = build_complex()
    write_protein(os.path.join(OUT, "complex_protein.pdb"), placed, zn, water)
    write_sdf(os.path.join(OUT, "complex_ligand.sdf"), "phenylethanol", lig_atoms, lig_bonds)

    # partial charges for the MOL2 copy: simple polar pattern summing to zero
    charges = [0.0] * len(lig_atoms)
    for i, (el, _) in enumerate(lig_atoms):
        if el == "O":
            charges[i] = -0.68
        elif el == "H" and any((b == i and lig_atoms[a][0] == "O") or (a == i and lig_atoms[b][0] == "O") for a, b, _ in lig_bonds):
            charges[i] = 0.42
    charges[7] = 0.26
    write_mol2(os.path.join(OUT, "complex_ligand.mol2"), "phenylethanol", lig_atoms, lig_bonds, charges)

    b_atoms, b_bonds = benzene()
    write_sdf(os.path.join(OUT, "benzene.sdf"), "benzene", b_atoms, b_bonds)
    for name, phi in (("butane_eclipsed", 120.0), ("butane_anti", 180.0)):
        atoms, bonds = butane(phi)
        write_sdf(os.path.join(OUT, f"{name}.sdf"), name, atoms, bonds)
    ch_atoms, ch_bonds = cyclohexane_chair()
    write_sdf(os.path.join(OUT, "cyclohexane_chair.sdf"), "cyclohexane", ch_atoms, ch_bonds)

    # ten-pair audit set sharing the protein; pair_07 is driven into the protein, pair_09 is corrupt
    audit = os.path.join(OUT, "audit")
    for k in range(10):
        d = os.path.join(audit, f"pair_{k:02d}")
        os.makedirs(d, exist_ok=True)
        write_protein(os.path.join(d, "protein.pdb"), placed, zn, water)
        atoms = lig_atoms
        if k not in (0, 7, 9):
            atoms = twist(atoms, lig_bonds, (6, 7), RNG.uniform(-50.0, 50.0))
            axis = unit(RNG.normal(size=3))
            R = rotation_about(axis, math.radians(RNG.uniform(-12.0, 12.0)))
            c = np.mean([p for _, p in atoms], axis=0)
            atoms = rigid(atoms, R, c - R @ c + RNG.uniform(-0.6, 0.6, size=3))
        if k == 7:
            atoms = rigid(atoms, np.eye(3), np.array([-0.6, 0.0, 3.0]))
        if k == 9:
            with open(os.path.join(d, "ligand.sdf"), "w") as f:
                f.write("broken\n\n\n  3  1  0  0  0  0  0  0  0  0999 V2000\n    0.0000    0.0000    0.0000 C   0  0\nM  END\n")
            continue
        if k % 3 == 1:
            write_mol2(os.path.join(d, "ligand.mol2"), f"pair_{k:02d}", atoms, lig_bonds, charges)
        else:
            write_sdf(os.path.join(d, "ligand.sdf"), f"pair_{k:02d}", atoms, lig_bonds)


if __name__ == "__main__":
    main()
