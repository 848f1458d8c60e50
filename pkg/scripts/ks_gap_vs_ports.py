"""KS distance of the layered channel gain from the exponential law versus
the number of surface ports N = N_s = N_L.

The cascaded surface term is Gaussian only conditionally on the launcher
fading, so at finite N its power is heavier-tailed than exponential. This
script prints how the gap closes as N grows next to the 1 % KS threshold.

    python3 scripts/ks_gap_vs_ports.py [--trials N] [--seed S]
"""
import argparse
import math

import numpy as np

from efas_mimo.channel import Scenario
from efas_mimo.montecarlo import MCSettings, layered_coefficients
from efas_mimo.stats import KS_CRITICAL_1PCT, ks_statistic
from efas_mimo.surface import RelaySpec, SurfaceConfig, SurfaceWaveParams


def gap(n_ports: int, trials: int, seed: int, beta_dl: float) -> float:
    surf = SurfaceConfig(wave=SurfaceWaveParams(gamma=0j), relay=RelaySpec.identity(n_ports))
    scn = Scenario(m_antennas=4, k_users=1, n_s=n_ports, n_l=n_ports, surface=surf,
                   precoding="isotropic", beta_dl=beta_dl)
    omega = float(scn.omega_eq()[0])
    h = layered_coefficients(scn, trials, MCSettings(seed=seed))
    return ks_statistic(np.abs(h) ** 2, lambda x: -np.expm1(-np.clip(x, 0, None) / omega))


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--beta-dl", type=float, default=0.01)
    args = p.parse_args()
    limit = KS_CRITICAL_1PCT / math.sqrt(args.trials)
    print("n_ports,ks_d,threshold,n_times_d")
    for n in (2, 4, 8, 16, 32, 64, 128):
        d = gap(n, args.trials, args.seed, args.beta_dl)
        print(f"{n},{d:.5f},{limit:.5f},{n * d:.3f}")


if __name__ == "__main__":
    main()
