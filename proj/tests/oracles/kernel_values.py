"""High-precision reference values frozen into the C++ unit tests.

Run with: python3 tests/oracles/kernel_values.py
"""
from mpmath import mp, mpf, nsum, inf, fabs

mp.dps = 40


def pw(x, h):
    x = fabs(mpf(x))
    return mpf(0) if x == 0 else x ** (2 * mpf(h))


def rho(h, p):
    return (pw(p + 1, h) + pw(p - 1, h) - 2 * pw(p, h)) / 2


def cov(h, s, t):
    return (pw(t, h) + pw(s, h) - pw(mpf(t) - mpf(s), h)) / 2


print("rho_0.1(1)            ", rho(mpf("0.1"), 1))
n, k, l, h = 4, 2, 1, mpf("0.1")
print("eps_delta(0.1,4,2,1)  ", cov(h, mpf(l) / n, mpf(k + 1) / n) - cov(h, mpf(l) / n, mpf(k) / n))
n, k, l, h = 16, 0, 1, mpf("0.3")
tk, tk1, tl, tl1 = [mpf(v) / n for v in (k, k + 1, l, l + 1)]
print("delta_delta(0.3,16,0,1)", cov(h, tk1, tl1) - cov(h, tk1, tl) - cov(h, tk, tl1) + cov(h, tk, tl))

for hh in ("0.3", "0.1"):
    h = mpf(hh)
    s2 = 1 + 2 * nsum(lambda p: rho(h, p) ** 2, [1, inf])
    s3 = 1 + 2 * nsum(lambda p: rho(h, p) ** 3, [1, inf])
    print(f"sum rho^2 H={hh}      ", s2)
    print(f"sum rho^3 H={hh}      ", s3)
    print(f"sigma2 kappa=2 H={hh} ", 2 * s2)
    print(f"sigma2 kappa=3 H={hh} (rank-1 term -> 0)", 6 * s3)
