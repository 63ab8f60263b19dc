"""KS distance between Z_n(2) and R(2) on the 5-torus for growing n.

Constants come from the ``constants`` pipeline with explicit segment
lengths r = floor(sqrt N) and s = floor(sqrt tau) + 1 (the case formulas are
infeasible at these sizes).

    python scripts/trend_torus5.py --sizes 6 8 10 --seeds 1 2 3
"""

import argparse
import math

from lerwray.experiments import parse_config, run_experiment
from lerwray.graphs import make_graph
from lerwray.walk import mixing_time


def ks_at(n, seed, t, replicates, const_replicates, cap_replicates):
    g = make_graph("torus", d=5, n=n)
    r = math.isqrt(g.vertex_count)
    s = math.isqrt(mixing_time(g).tau) + 1
    const = run_experiment(parse_config("", {
        "subcommand": "constants", "seed": seed, "graph": g.spec(),
        "replicates": const_replicates, "cap_replicates": cap_replicates, "r": r, "s": s}),
        write=False).estimates
    fdd = run_experiment(parse_config("", {
        "subcommand": "fdd", "seed": seed, "graph": g.spec(), "times": str(t),
        "replicates": replicates, "rayleigh_replicates": 10**4,
        "a": const["a"], "b": const["b"]}), write=False)
    return const, fdd.estimates["ks"][str(float(t))]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--time", type=float, default=2.0)
    ap.add_argument("--replicates", type=int, default=500)
    ap.add_argument("--const-replicates", type=int, default=200)
    ap.add_argument("--cap-replicates", type=int, default=400)
    args = ap.parse_args()
    print("seed,n,gamma,alpha,a,b,ks")
    for seed in args.seeds:
        for n in args.sizes:
            c, ks = ks_at(n, seed, args.time, args.replicates,
                          args.const_replicates, args.cap_replicates)
            print(f"{seed},{n},{c['gamma']:.4f},{c['alpha']:.4f},{c['a']:.4f},{c['b']:.4f},{ks:.4f}")


if __name__ == "__main__":
    main()
