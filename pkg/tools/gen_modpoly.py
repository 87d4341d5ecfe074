"""Regenerate the shipped modular polynomial data files.

Usage: python tools/gen_modpoly.py [--check-pari]
"""

import argparse
import sys

from moddeg.gross.modpoly import (
    SUPPORTED_ELLS,
    compute_modular_polynomial,
    data_path,
    format_data_file,
    validate,
)


def pari_triples(ell):
    import cypari

    cypari.pari.allocatemem(2 * 10**9, silent=True)
    pol = cypari.pari.polmodular(ell, 0, "X", "Y", 0)
    out = []
    for i in range(ell + 2):
        cx = pol.polcoef(i, "X")
        for j in range(ell + 2):
            c = int(cx.polcoef(j, "Y"))
            if c:
                out.append((i, j, c))
    return tuple(sorted(out))


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--check-pari", action="store_true")
    args = ap.parse_args(argv)
    for ell in SUPPORTED_ELLS:
        phi = compute_modular_polynomial(ell)
        validate(phi)
        if args.check_pari and pari_triples(ell) != phi.coefficients:
            sys.exit(f"Phi_{ell} disagrees with PARI polmodular")
        data_path(ell).write_text(format_data_file(phi))
        print(f"Phi_{ell}: {len(phi.coefficients)} terms, sha256 {phi.checksum()[:16]}")


if __name__ == "__main__":
    main()
