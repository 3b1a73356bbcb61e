"""Effect of the Fock-space mode truncation M on the ED ground energy, compared with delta0."""

import argparse

from bogospec.bogoliubov import compute_E, predict_ground_energy
from bogospec.domain import BOX, TORUS, ExternalPotentialSpec, GridSpec, InteractionSpec
from bogospec.fock import assemble_HN, build_basis, compute_tensors, ed_lowest
from bogospec.hartree import solve_hartree
from bogospec.onebody import assemble_onebody


def setup(kind: str, g: float):
    if kind == "torus":
        return GridSpec(TORUS, 256), ExternalPotentialSpec("none"), InteractionSpec.cosine_torus(g)
    return GridSpec(BOX, 256, 8.0), ExternalPotentialSpec("harmonic"), InteractionSpec.gaussian(g, 0.5)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", choices=("torus", "trap"), default="trap")
    ap.add_argument("--g", type=float, default=1.0)
    ap.add_argument("--M", type=int, nargs="+", default=[2, 4, 6, 8])
    ap.add_argument("--N", type=int, nargs="+", default=[4, 8])
    args = ap.parse_args()

    disc, V_ext, v = setup(args.kind, args.g)
    sol = solve_hartree(disc, V_ext, v)
    print(f"{args.kind}, g = {args.g}")
    print(f"{'N':>3} {'M':>3} {'dim':>7} {'E0_ed':>16} {'E0_bog(M)':>16} {'delta0':>11} {'dE0 vs prev M':>14}")
    for N in args.N:
        prev = None
        for M in args.M:
            ob = assemble_onebody(sol, disc, V_ext, v, M + 1)
            bog = compute_E(ob)
            t = compute_tensors(ob, disc, V_ext, v)
            basis = build_basis(M, N)
            E0 = ed_lowest(assemble_HN(t, basis), 1).values[0]
            pred = predict_ground_energy(bog, sol, N)
            change = "" if prev is None else f"{E0 - prev:14.3e}"
            print(f"{N:>3} {M:>3} {basis.dim:>7} {E0:16.10f} {pred:16.10f} {abs(E0 - pred):11.3e} {change}")
            prev = E0


if __name__ == "__main__":
    main()
