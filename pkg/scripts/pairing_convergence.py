"""Convergence of the circle winding pairing and torus projection checks.

The Lott-style pairing of the two-patch circle projection with the
winding cocycle is a Riemann sum, so its value should approach the
integer winding number at first order in the grid spacing. The script
tabulates the error against the grid size for several windings, then
verifies the algebraic identities (idempotency, self-adjointness, rank
one trace) of the magnetic torus projection on a coarse sample grid.
"""

import argparse
import sys
from fractions import Fraction

from twistlab import (
    CircleCover,
    LatticeGeometry,
    Projection,
    lott_pairing_circle,
    torus_projection,
)


def circle_table(windings, grids):
    header = "n_grid" + "".join(f"   w={w} error" for w in windings)
    print(header)
    for n in grids:
        errs = []
        for w in windings:
            value = lott_pairing_circle(CircleCover(w), n_grid=n)
            errs.append(abs(value - w))
        print(f"{n:6d}" + "".join(f"  {e:10.2e}" for e in errs))


def torus_report(theta, n_grid):
    geometry = LatticeGeometry(Fraction(theta))
    proj = torus_projection(geometry)
    report = proj.verify(n_grid=n_grid)
    print(f"theta={theta}  idempotent_defect={report['idempotent_defect']:.2e}"
          f"  star_defect={report['selfadjoint_defect']:.2e}"
          f"  rank_trace={proj.rank_trace(n_grid):.12f}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--windings", default="1,2,3")
    ap.add_argument("--grids", default="64,256,1024,4096")
    ap.add_argument("--theta", default="1/3")
    ap.add_argument("--torus-grid", type=int, default=12)
    args = ap.parse_args(argv)

    windings = [int(w) for w in args.windings.split(",")]
    grids = [int(n) for n in args.grids.split(",")]
    circle_table(windings, grids)
    print()
    torus_report(args.theta, args.torus_grid)
    two_patch = Projection(CircleCover(1))
    circle = two_patch.verify(n_grid=64)
    print(f"circle  idempotent_defect={circle['idempotent_defect']:.2e}"
          f"  star_defect={circle['selfadjoint_defect']:.2e}"
          f"  rank_trace={two_patch.rank_trace(64):.12f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
