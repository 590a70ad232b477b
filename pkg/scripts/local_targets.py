"""Local conifold and local P^2: multiple-cover law and instanton numbers."""

import argparse

from localize.mirror import BundleSpec, local_conifold, one_parameter_pipeline, projective_space


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=9)
    args = ap.parse_args()
    con = local_conifold(args.order)
    print("conifold K_d d^3:", [str(k * d**3) for d, k in sorted(con.K.items())])
    p2 = one_parameter_pipeline(projective_space(2), BundleSpec(((-3,),)), args.order)
    print("local P^2 n_d:   ", [str(p2.n[d]) for d in sorted(p2.n)])


if __name__ == "__main__":
    main()
