"""Plug-in cost arithmetic for a FeMoco-sized problem (eta = 54, N = 1e6)."""
import argparse
import json

from subqchem.estimator import estimate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta", type=int, default=54)
    ap.add_argument("--n-orbitals", type=float, default=1e6)
    ap.add_argument("--nuclei", type=int, default=8)
    ap.add_argument("--time", type=float, default=1.0)
    ap.add_argument("--epsilon", type=float, default=1e-3)
    args = ap.parse_args()

    rep = estimate(args.eta, args.n_orbitals, args.time, args.epsilon, args.nuclei)
    print(f"interaction picture  eta^(8/3) N^(1/3) = {rep.interaction_picture_powerlaw:.3e}")
    print(f"second quantized     N^(8/3) / eta^(2/3) = {rep.comparison_second_quantized:.3e}")
    print(f"qubitization total   {rep.qubitization_total:.3e} ({rep.qubitization_dominant} term dominates)")
    print(json.dumps(rep.to_dict(), indent=1, sort_keys=True))


if __name__ == "__main__":
    main()
