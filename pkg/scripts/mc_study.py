"""Monte-Carlo holonomy integral against the character sum over several t and seeds."""

import argparse

from localize.liegroups import TorusElement, build_root_system
from localize.moduli import holonomy_integral_mc


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--alcove", type=float, default=0.3)
    args = ap.parse_args()
    A1 = build_root_system("A1")
    c = TorusElement.from_alcove(A1, [args.alcove])
    for t in (1.0, 0.5, 0.25, 0.125):
        zs = []
        for seed in range(args.seeds):
            r = holonomy_integral_mc(A1, 2, c, t, samples=args.samples, seed=seed)
            zs.append(r.z_score)
        print(f"t={t:<6} exact={r.exact:.6e} rel.SE={r.standard_error / r.exact:.2e} z={[round(z, 2) for z in zs]}")


if __name__ == "__main__":
    main()
