"""Grid-doubling table for the finite-volume resolvent of the conditioned BM.

Columns: interior node error, nodal error at a, one-sided difference-quotient
error at a, and the derivative-jump residual, with successive ratios.
"""
import numpy as np

from condproc.experiments import default_config, fd_validate


def main():
    rep = fd_validate(default_config("fd-validate", quick=True))
    rows = {r.name: r.value for r in rep.rows}
    grids = [0.02, 0.01, 0.005, 0.0025]
    print(f"{'dx':>8} {'interior':>12} {'node at a':>12} {'quotient a':>12} {'jump res':>12}")
    for dx in grids:
        print(f"{dx:8g} {rows[f'interior_err_dx{dx:g}']:12.3e} {rows[f'node_err_at_a_dx{dx:g}']:12.3e} "
              f"{rows[f'quotient_err_at_a_dx{dx:g}']:12.3e} {rows[f'jump_residual_dx{dx:g}']:12.3e}")
    print("\nratios (coarse/fine)")
    for a, b in zip(grids, grids[1:]):
        e = [rows[f"{k}_dx{a:g}"] / rows[f"{k}_dx{b:g}"] for k in ("interior_err", "node_err_at_a",
                                                                  "quotient_err_at_a", "jump_residual")]
        print(f"{a:g}->{b:g}: " + "  ".join(f"{v:6.3f}" for v in np.abs(e)))


if __name__ == "__main__":
    main()
