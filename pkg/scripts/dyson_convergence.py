"""Measured error of the truncated Dyson series against dense diagonalization."""
import argparse

import numpy as np

from subqchem.dyson import evolve, exact_propagator, plan_schedule, random_split, split_from_cell
from subqchem.lattice import make_cell


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--time", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    splits = {"hydrogen-like cell": split_from_cell(make_cell(1, 2, 50.0, [(1, (0.13, 0.37, 0.71))]))}
    rng = np.random.default_rng(args.seed)
    for k in range(3):
        splits[f"random 16-dim #{k}"] = random_split(16, rng)

    print("system,epsilon,segments,K,error,unitarity")
    for name, split in splits.items():
        exact = exact_propagator(split, args.time)
        for eps in (1e-3, 1e-6, 1e-9):
            plan = plan_schedule(split.lambda_B, args.time, eps)
            U = evolve(split, args.time, eps, plan=plan)
            err = np.linalg.norm(U - exact, ord=2)
            unit = np.linalg.norm(U.conj().T @ U - np.eye(split.dim), ord=2)
            print(f"{name},{eps:g},{plan.segments},{plan.K},{err:.3e},{unit:.3e}")


if __name__ == "__main__":
    main()
