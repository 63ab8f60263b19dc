"""Exact uniform mixing times of the lazy walk on tori.

    python scripts/mixing_table.py --dim 2 --sizes 4 6 8 12 16
"""

import argparse

from lerwray.graphs import make_graph
from lerwray.walk import green_sum, mixing_time


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 6, 8, 12, 16])
    ap.add_argument("--green", action="store_true", help="also report the Green-type sum")
    args = ap.parse_args()
    print("n,N,tau,tau_over_n2" + (",green_sum" if args.green else ""))
    for n in args.sizes:
        g = make_graph("torus", d=args.dim, n=n)
        tau = mixing_time(g).tau
        row = f"{n},{g.vertex_count},{tau},{tau / n**2:.4f}"
        if args.green:
            row += f",{green_sum(g):.4f}"
        print(row)


if __name__ == "__main__":
    main()
