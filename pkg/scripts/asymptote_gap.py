"""Gap between exact ergodic capacity and its high-SNR asymptote.

Prints rho*Omega, exact capacity, asymptote and the gap over a log grid and
marks where the gap first falls below 0.01 bps/Hz.

    python3 scripts/asymptote_gap.py
"""
import numpy as np

from efas_mimo.analytic import ergodic_capacity, ergodic_capacity_high_snr


def main() -> None:
    print("rho_omega,capacity,asymptote,gap")
    crossed = None
    for snr in np.logspace(2, 5, 31):
        c, a = ergodic_capacity(snr, 1.0), ergodic_capacity_high_snr(snr, 1.0)
        print(f"{snr:.1f},{c:.6f},{a:.6f},{c - a:.6f}")
        if crossed is None and c - a < 0.01:
            crossed = snr
    lo, hi = 1e3, 2e3
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ergodic_capacity(mid, 1.0) - ergodic_capacity_high_snr(mid, 1.0) < 0.01:
            hi = mid
        else:
            lo = mid
    print(f"# gap < 0.01 bps/Hz for rho*Omega above {hi:.2f}")


if __name__ == "__main__":
    main()
