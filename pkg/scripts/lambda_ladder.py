"""Distance between the lambda-conditioned walk kernel and its lambda -> 0 limit.

Prints the cemetery-completed total variation and the half-L1 distance over
states only; the gap between them is the killed mass difference.
"""
import numpy as np

from condproc import ctmc


def main(alpha=1.0, beta=2.0, t=1.0):
    p = ctmc.WalkParams(alpha, beta)
    lim = ctmc.limit_kernel_row(p, 0, t)
    print(f"{'lambda':>8} {'TV':>10} {'half L1':>10} {'mass gap':>10} {'TV/lambda':>10}")
    for lam in (1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001):
        row = ctmc.conditioned_kernel_row(p, lam, 0, t)
        tv = ctmc.total_variation(row.probs, lim.probs)
        l1 = 0.5 * np.abs(row.probs - lim.probs).sum()
        gap = abs(row.probs.sum() - lim.probs.sum())
        print(f"{lam:8g} {tv:10.5f} {l1:10.5f} {gap:10.5f} {tv / lam:10.4f}")


if __name__ == "__main__":
    main()
