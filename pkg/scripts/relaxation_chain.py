"""Compare best product state, exact maximum energy and SDP bound on small random graphs."""
import argparse

import numpy as np

from qmclab.instances import random_graph
from qmclab.quantum import build_hamiltonian, max_energy, product_state_value
from qmclab.sdp import QMC, solve_vector_program


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 6, 8, 10])
    ap.add_argument("--per-size", type=int, default=3)
    ap.add_argument("--p", type=float, default=0.5, help="edge probability")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'n':>3} {'edges':>5} {'prod':>9} {'qmc':>9} {'sdp':>9} {'prod/qmc':>9} {'qmc/sdp':>9}")
    for n in args.sizes:
        for _ in range(args.per_size):
            g = random_graph(n, args.p, rng)
            if g.edge_count == 0:
                continue
            prod, _ = product_state_value(g)
            qmc, _ = max_energy(build_hamiltonian(g), "dense" if n <= 12 else "iterative")
            sdp = solve_vector_program(g, QMC).value
            print(f"{n:>3} {g.edge_count:>5} {prod:9.5f} {qmc:9.5f} {sdp:9.5f} "
                  f"{prod / qmc:9.5f} {qmc / sdp:9.5f}")


if __name__ == "__main__":
    main()
