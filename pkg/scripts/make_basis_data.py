"""Regenerate the embedded basis-set data files.

STO-3G entries follow the standard construction: universal 3-Gaussian
expansions of 1s/2sp Slater orbitals, scaled by the published per-element
Slater exponents (exponents scale with zeta**2). Anchor elements carry the
exact published exponents; the rest are derived from the same universal
constants, which reproduces the published tables to ~9 significant digits.

6-31G / 6-31G* use the published exponents and contraction coefficients
directly (H, C, N, O, F).
"""

import hashlib
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "src" / "vqecalc" / "basisdata"

# Universal STO-3G expansion for a zeta=1 Slater function.
ALPHA_1S = (2.227660584, 0.4057711562, 0.1098175104)
C_1S = (0.1543289673, 0.5353281423, 0.4446345422)
ALPHA_2SP = (0.9942027190, 0.2310313333, 0.0751385653)
C_2S = (-0.09996722919, 0.3995128261, 0.7001154689)
C_2P = (0.1559162750, 0.6076837186, 0.3919573931)

# (zeta_1s, zeta_2sp) per element; second-row values are not included.
STO3G_ZETA = {
    "H": (1.24, None),
    "He": (1.69, None),
    "Li": (2.69, 0.80),
    "Be": (3.68, 1.15),
    "B": (4.68, 1.50),
    "C": (5.67, 1.72),
    "N": (6.67, 1.95),
    "O": (7.66, 2.25),
    "F": (8.65, 2.55),
    "Ne": (9.64, 2.88),
}

G631 = {
    "H": [
        ("S", [(18.73113696, 0.03349460434),
               (2.825394365, 0.2347269535),
               (0.6401216923, 0.8137573261)]),
        ("S", [(0.1612777588, 1.0)]),
    ],
    "C": [
        ("S", [(3047.524880, 0.001834737132),
               (457.3695180, 0.01403732281),
               (103.9486850, 0.06884262226),
               (29.21015530, 0.2321844432),
               (9.286662960, 0.4679413484),
               (3.163926960, 0.3623119853)]),
        ("SP", [(7.868272350, -0.1193324198, 0.06899906659),
                (1.881288540, -0.1608541517, 0.3164239610),
                (0.5442492580, 1.143456438, 0.7443082909)]),
        ("SP", [(0.1687144782, 1.0, 1.0)]),
    ],
    "N": [
        ("S", [(4173.511460, 0.001834772160),
               (627.4579110, 0.01399462700),
               (142.9020930, 0.06858655181),
               (40.23432930, 0.2322408730),
               (12.82021290, 0.4690699481),
               (4.390437010, 0.3604551991)]),
        ("SP", [(11.62636186, -0.1149611817, 0.06757974388),
                (2.716279807, -0.1691174786, 0.3239072959),
                (0.7722183966, 1.145851947, 0.7408951398)]),
        ("SP", [(0.2120314975, 1.0, 1.0)]),
    ],
    "O": [
        ("S", [(5484.671660, 0.001831074430),
               (825.2349460, 0.01395017220),
               (188.0469580, 0.06844507810),
               (52.96450000, 0.2327143360),
               (16.89757040, 0.4701928980),
               (5.799635340, 0.3585208530)]),
        ("SP", [(15.53961625, -0.1107775495, 0.07087426823),
                (3.599933586, -0.1480262627, 0.3397528391),
                (1.013761750, 1.130767015, 0.7271585773)]),
        ("SP", [(0.2700058226, 1.0, 1.0)]),
    ],
    "F": [
        ("S", [(7001.713090, 0.001819616901),
               (1051.366090, 0.01391607961),
               (239.2856900, 0.06840532453),
               (67.39744530, 0.2331857601),
               (21.51995730, 0.4712674392),
               (7.403101300, 0.3566185462)]),
        ("SP", [(20.84795280, -0.1085069751, 0.07162872424),
                (4.808308340, -0.1464516581, 0.3459121027),
                (1.344069860, 1.128688581, 0.7224699564)]),
        ("SP", [(0.3581513930, 1.0, 1.0)]),
    ],
}

# Polarization d exponents for 6-31G* (first row; H unchanged).
POLARIZATION_D = {"C": 0.8, "N": 0.8, "O": 0.8, "F": 0.8}


def sto3g_blocks(symbol):
    z1, z2 = STO3G_ZETA[symbol]
    blocks = [("S", [(a * z1 * z1, c) for a, c in zip(ALPHA_1S, C_1S)])]
    if z2 is not None:
        blocks.append(
            ("SP", [(a * z2 * z2, cs, cp)
                    for a, cs, cp in zip(ALPHA_2SP, C_2S, C_2P)])
        )
    return blocks


def format_basis(blocks_by_element, title):
    lines = [f"# {title}", "# element blocks: symbol, then 'LETTER n' followed by n primitive rows,",
             "# each row 'exponent coeff' (or 'exponent s_coeff p_coeff' for SP); block ends with '*'."]
    for sym, blocks in blocks_by_element.items():
        lines.append(sym)
        for letter, prims in blocks:
            lines.append(f"{letter} {len(prims)}")
            for row in prims:
                lines.append("  " + "  ".join(f"{v: .12g}" for v in row))
        lines.append("*")
    return "\n".join(lines) + "\n"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    files = {
        "sto-3g.dat": format_basis(
            {sym: sto3g_blocks(sym) for sym in STO3G_ZETA}, "STO-3G"),
        "6-31g.dat": format_basis(G631, "6-31G"),
        "6-31g_star.dat": format_basis(
            {sym: blocks + ([("D", [(POLARIZATION_D[sym], 1.0)])]
                            if sym in POLARIZATION_D else [])
             for sym, blocks in G631.items()},
            "6-31G* (6-31G plus Cartesian d polarization on heavy atoms)"),
    }
    checks = []
    for name, text in files.items():
        path = OUT / name
        path.write_text(text)
        digest = hashlib.sha256(text.encode()).hexdigest()
        checks.append(f"{digest}  {name}")
        print(f"wrote {path} ({len(text)} bytes)")
    (OUT / "CHECKSUMS").write_text("\n".join(checks) + "\n")
    print("wrote CHECKSUMS")


if __name__ == "__main__":
    main()
