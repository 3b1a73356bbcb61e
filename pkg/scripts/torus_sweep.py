"""ED vs Bogoliubov sweep on the torus, with a 1/N + 1/N^2 fit of delta0."""

import argparse

import numpy as np

from bogospec.bogoliubov import compute_E
from bogospec.domain import TORUS, ExternalPotentialSpec, GridSpec, InteractionSpec
from bogospec.fock import EDConfig, compute_tensors, verify_theorem
from bogospec.hartree import solve_hartree
from bogospec.onebody import assemble_onebody


def run(g: float, M: int, N_list, n: int):
    disc = GridSpec(TORUS, n)
    V_ext, v = ExternalPotentialSpec("none"), InteractionSpec.cosine_torus(g)
    sol = solve_hartree(disc, V_ext, v)
    ob = assemble_onebody(sol, disc, V_ext, v, M + 1)
    bog = compute_E(ob)
    t = compute_tensors(ob, disc, V_ext, v)
    return verify_theorem(sol, ob, bog, t, EDConfig(M=M, N_list=tuple(N_list)))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--g", type=float, nargs="+", default=[1.0, 10.0])
    ap.add_argument("--M", type=int, default=4)
    ap.add_argument("--N", type=int, nargs="+", default=[4, 8, 16, 32])
    ap.add_argument("--n", type=int, default=256)
    args = ap.parse_args()

    for g in args.g:
        rep = run(g, args.M, args.N, args.n)
        print(f"\ng = {g}   ||alpha||_HS = {rep.alpha_hs:.6e}")
        print(f"{'N':>4} {'dim':>7} {'delta0':>12} {'delta0*sqrtN':>13} {'delta0*N':>11} "
              f"{'gap err':>11} {'1-overlap':>11} {'bare':>11} ok")
        for r in rep.rows:
            print(f"{r.N:>4} {r.dim:>7} {r.delta0:12.4e} {r.delta0_sqrtN:13.4e} {r.delta0 * r.N:11.4e} "
                  f"{abs(r.gap1_ed - r.gap1_bog):11.3e} {1 - r.overlap_sq:11.3e} {r.bare_overlap_sq:11.8f} {r.ok}")
        N = np.array([r.N for r in rep.rows], dtype=float)
        d0 = np.array([r.delta0 for r in rep.rows])
        c2, c1 = np.polyfit(1 / N, d0 * N, 1)
        scaled = d0 * np.sqrt(N)
        print(f"fit delta0 ~ {c1:.4e}/N + {c2:.4e}/N^2;  delta0*sqrt(N) spread {scaled.max() / scaled.min():.3f}")


if __name__ == "__main__":
    main()
