"""Recompute the golden values frozen in tests/oracles.py.

Every value comes from mpmath at 40 significant digits using only
definitions (integrals, series, exact arithmetic); nothing here imports
the package under test.

    python3 scripts/compute_oracles.py
"""
import mpmath as mp

mp.mp.dps = 40


def e1(x):
    return mp.quad(lambda t: mp.exp(-t) / t, [x, x + 1, x + 10, mp.inf])


def lower_p(a, x):
    return mp.quad(lambda t: t ** (a - 1) * mp.exp(-t), [0, min(x, a), x]) / mp.gamma(a)


def capacity(snr):
    # E log2(1 + snr X), X ~ Exp(1)
    return mp.quad(lambda x: mp.log(1 + snr * x) * mp.exp(-x), [0, 1, 10, mp.inf]) / mp.log(2)


def log2_gamma_mean(m, theta):
    pdf = lambda x: x ** (m - 1) * mp.exp(-x / theta) / (mp.gamma(m) * theta ** m)
    mean = m * theta
    return mp.quad(lambda x: mp.log(1 + x) * pdf(x), [0, mean / 2, mean, 2 * mean, 6 * mean, mp.inf]) / mp.log(2)


def propagation(z_sur, freq_ghz):
    mu0 = 4 * mp.pi * mp.mpf("1e-7")
    eps0 = mp.mpf("8.8541878128e-12")
    w = 2 * mp.pi * freq_ghz * mp.mpf(10) ** 9
    g = mp.sqrt(-w * w * mu0 * eps0 - (-1j * w * eps0 * z_sur) ** 2)
    if mp.re(g) < 0 or (mp.re(g) == 0 and mp.im(g) < 0):
        g = -g
    return w * mp.sqrt(mu0 * eps0), g


def main():
    print("E1(1)       ", e1(1))
    print("E1(50)      ", e1(50))
    x = mp.mpf("1e-6")
    print("E1 residual ", e1(x) + mp.euler + mp.log(x) - x)
    for a, x in ((13, 13), (2.5, 1.7), (0.5, 0.3), (40, 35)):
        print(f"P({a},{x})", lower_p(mp.mpf(a), mp.mpf(x)))
    print("lnGamma(13) ", mp.log(mp.factorial(12)))
    for snr in (50.1, 0.1, 1e4):
        print(f"C({snr})", capacity(mp.mpf(snr)))
    for rho, om in ((10, 1.01), (10, 0.01)):
        print(f"Pout({rho},{om})", 1 - mp.exp(-1 / (mp.mpf(rho) * mp.mpf(om))))
    theta = mp.mpf(10) / 4 * mp.mpf("5.01")
    print("ZF exact    ", 4 * log2_gamma_mean(13, theta))
    print("ZF approx   ", 4 * mp.log(1 + 13 * theta) / mp.log(2))
    for z in (100j, 100 + 100j):
        k0, g = propagation(mp.mpc(z), 30)
        print(f"gamma(Z={z})", k0, g)


if __name__ == "__main__":
    main()
