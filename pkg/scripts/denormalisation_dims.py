#!/usr/bin/env python3
"""Tabulate dim of the (level, weight) slices of the denormalisation D^n A.

Each entry is compared against sum_m C(n, m) dim A^m_w.
"""
import argparse

from stackycdga import doldkan, samples

ALGEBRAS = {
    "koszul": samples.koszul_line,
    "derham1": lambda: samples.de_rham_affine(1),
    "derham2": lambda: samples.de_rham_affine(2),
    "sl2": samples.sl2_ce,
}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("algebra", choices=sorted(ALGEBRAS), nargs="?", default="derham2")
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--weights", type=int, default=3)
    args = p.parse_args(argv)
    A = ALGEBRAS[args.algebra]()
    print("n  " + " ".join(f"w={w:<4d}" for w in range(args.weights + 1)))
    for n in range(args.levels + 1):
        cells = []
        for w in range(args.weights + 1):
            got = len(doldkan.level_basis(A, n, w))
            want = doldkan.dimension_formula(A, n, w)
            cells.append(f"{got:<6d}" if got == want else f"{got}!={want}")
        print(f"{n:<2d} " + " ".join(cells))


if __name__ == "__main__":
    main()
