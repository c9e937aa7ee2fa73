"""Regenerate the frozen reference constants used by the test suite.

Everything here is evaluated with mpmath at high working precision and is
independent of the code under ``src/``.  Run once; paste the output into
``tests/goldens.py``.
"""

import mpmath as mp

mp.mp.dps = 200


def erf_maclaurin(z, terms=50):
    z = mp.mpf(z)
    total = mp.mpf(0)
    for n in range(terms):
        total += (-1) ** n * z ** (2 * n + 1) / (mp.factorial(n) * (2 * n + 1))
    return 2 / mp.sqrt(mp.pi) * total


def log_lower_series(s, x, terms=400):
    s, x = mp.mpf(s), mp.mpf(x)
    acc, term = mp.mpf(1), mp.mpf(1)
    for k in range(1, terms):
        term *= x / (s + k)
        acc += term
    return s * mp.log(x) - x - mp.loggamma(s + 1) + mp.log(acc)


def main():
    print("ERF_HALF_SHAPE = {")
    for x in ["0.01", "0.1", "0.25", "0.5", "1", "1.5", "2", "3", "4", "6", "9"]:
        print(f"    {x}: {mp.nstr(erf_maclaurin(mp.sqrt(mp.mpf(x))), 20)},")
    print("}")
    print("LOG_P_33_8_1E_3 =", mp.nstr(log_lower_series("33.8", "1e-3"), 20))
    print("LOG_GAMMA_10 =", mp.nstr(mp.log(mp.factorial(9)), 20))

    phi0 = mp.radians(mp.mpf("13.8"))
    tx = [mp.mpf(0), mp.mpf(0), mp.mpf(3)]
    c = [mp.mpf(5), mp.mpf(15), mp.mpf(0)]
    d = [c[i] - tx[i] for i in range(3)]
    dc = mp.sqrt(sum(v * v for v in d))
    theta_r = mp.acos(d[1] / dc)
    phi_t = mp.atan(c[0] / c[1])
    a = dc * mp.sin(phi0) / mp.sin(phi_t + phi0)
    b = dc * mp.sin(phi0) / mp.cos(theta_r + phi0)
    print("ELLIPSE_DC =", mp.nstr(dc, 20))
    print("ELLIPSE_A =", mp.nstr(a, 20))
    print("ELLIPSE_B =", mp.nstr(b, 20))

    lam_ = mp.mpf(299792458) / mp.mpf("4.25e9")
    print("PREFACTOR_UNIT =", mp.nstr(lam_ ** 4 / (256 * mp.pi ** 3), 20))

    big_l = mp.pi ** 2 / (16 - mp.pi ** 2)
    delta = (16 - mp.pi ** 2) / (2 * mp.pi)
    s = big_l
    ln_asym = s / 2 * mp.log(mp.mpf("1e-6") / delta) + mp.loggamma(s)
    print("LOG10_ASYM_N1 =", mp.nstr(ln_asym / mp.log(10), 20))
    print("SHAPE_PER_ELEMENT =", mp.nstr(big_l, 20))
    print("SCALE =", mp.nstr(delta, 20))


if __name__ == "__main__":
    main()
