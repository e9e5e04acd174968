"""Log-log fits of the exact LCU 1-norm against N and eta."""
import argparse

import numpy as np

from subqchem.estimator import calibrate_lambda, default_calibration_cells
from subqchem.lattice import make_cell
from subqchem.lcu import lambda_parts


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta", type=int, default=2)
    ap.add_argument("--omega", type=float, default=10.0)
    ap.add_argument("--np-max", type=int, default=7)
    args = ap.parse_args()

    print("n_p,N,lambda,lambda_U,lambda_V")
    Ns, lams = [], []
    for n_p in range(3, args.np_max + 1):
        cell = make_cell(args.eta, n_p, args.omega, [(args.eta, (0.0, 0.0, 0.0))])
        parts = lambda_parts(cell)
        Ns.append(cell.n_orbitals)
        lams.append(parts["lambda"])
        print(f"{n_p},{cell.n_orbitals},{parts['lambda']!r},{parts['lambda_U']!r},{parts['lambda_V']!r}")
    print(f"# slope vs N: {np.polyfit(np.log(Ns), np.log(lams), 1)[0]:.4f}")

    etas = [1, 2, 4, 8, 16]
    lam_eta = [lambda_parts(make_cell(e, 4, args.omega, [(e, (0.0, 0.0, 0.0))]))["lambda"] for e in etas]
    print(f"# slope vs eta at fixed omega: {np.polyfit(np.log(etas), np.log(lam_eta), 1)[0]:.4f}")

    cal = calibrate_lambda(default_calibration_cells())
    print(f"# calibration constant {cal.constant!r}, max relative residual {cal.max_rel_residual:.3f}")


if __name__ == "__main__":
    main()
