"""Convergence of the trap spectrum and trace correction in the mode cutoff m and grid size n."""

import argparse

from bogospec.bogoliubov import compute_E, ordering_diagnostics
from bogospec.domain import BOX, ExternalPotentialSpec, GridSpec, InteractionSpec
from bogospec.hartree import solve_hartree
from bogospec.onebody import assemble_onebody


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g", type=float, default=1.0)
    ap.add_argument("--s", type=float, default=0.5)
    ap.add_argument("--L", type=float, default=8.0)
    args = ap.parse_args()
    V_ext, v = ExternalPotentialSpec("harmonic"), InteractionSpec.gaussian(args.g, args.s)

    print("mode cutoff (n = 256)")
    disc = GridSpec(BOX, 256, args.L)
    sol = solve_hartree(disc, V_ext, v)
    print(f"eps0 = {sol.eps0:.10f}  v0000 = {sol.v0000:.10f}  iterations = {sol.iterations}")
    print(f"{'m':>4} {'e_1':>14} {'e_2':>14} {'tr(D+V-E)':>14} {'HS chain':>12}")
    for m in (8, 16, 32, 64, 128):
        ob = assemble_onebody(sol, disc, V_ext, v, m)
        bog = compute_E(ob)
        hs = ordering_diagnostics(ob, bog).hs_norm
        print(f"{m:>4} {bog.e[0]:14.10f} {bog.e[1]:14.10f} {bog.trace_correction:14.10f} {hs:12.6e}")

    print("\ngrid size (m = 32)")
    print(f"{'n':>5} {'eps0':>14} {'e_1':>14} {'tr(D+V-E)':>14}")
    for n in (128, 256, 512):
        disc = GridSpec(BOX, n, args.L)
        sol = solve_hartree(disc, V_ext, v)
        bog = compute_E(assemble_onebody(sol, disc, V_ext, v, 32))
        print(f"{n:>5} {sol.eps0:14.10f} {bog.e[0]:14.10f} {bog.trace_correction:14.10f}")


if __name__ == "__main__":
    main()
