"""Independent reference values for the regression tests (mpmath, 50 digits).

Run: python3 tools/oracles.py
"""
from mpmath import mp, mpf, mpc, gamma, pi, log, exp, findroot, nsum, inf, cos, sin, quad

mp.dps = 50


def truncated_moment(q, k):
    q = mpf(q)
    if k == 0:
        return pi * (1 + log(q))
    return pi * (q ** -k / (k + 1) + (1 - q ** -k) / k)


def truncated_profile(q, s, terms=6000):
    return sum(mpf(s) ** k / truncated_moment(q, k) for k in range(terms))


def ml_kernel(n, alpha, m, s, terms=None):
    """2m·α^{(2+n)/(2m)}·E_{1/m,(2+n)/(2m)}(α^{1/m}s), summed directly."""
    # the largest term is about exp(|x|^m): carry that many extra digits
    extra = int(abs(complex(s)) ** float(m) * float(alpha) / 2.3) + 30
    with mp.workdps(mp.dps + extra):
        n, alpha, m = mpf(n), mpf(alpha), mpf(m)
        x = alpha ** (1 / m) * mpc(s)
        total = mpc(0)
        k = 0
        while True:
            t = x ** k / gamma((2 * k + 2 + n) / (2 * m))
            total += t
            if k > 10 and abs(t) < mpf(10) ** (-mp.dps) * max(1, abs(total)):
                break
            k += 1
        out = 2 * m * alpha ** ((2 + n) / (2 * m)) * total
    return +out


def ml_moment_quad(n, alpha, m, k):
    n, alpha, m = mpf(n), mpf(alpha), mpf(m)
    return 2 * pi * quad(lambda r: r ** (2 * k + 1 + n) * exp(-alpha * r ** (2 * m)), [0, 1, 10, inf]) / (2 * pi)


def winding(f, R, n):
    """Phase change of f on |s| = R from n equispaced samples."""
    from mpmath import arg
    while True:
        vals = [f(R * exp(2j * pi * j / n)) for j in range(n + 1)]
        steps = [arg(b / a) for a, b in zip(vals, vals[1:])]
        if max(abs(d) for d in steps) < pi / 8:
            return sum(steps) / (2 * pi)
        n *= 2


if __name__ == "__main__":
    print("# Ramadanov sup distance, attained at s = 0.25 (grid radius 0.5)")
    for q in [1, 10, 100, 1000, 10000]:
        s = mpf("0.25")
        lim = s / (pi * (1 - s) ** 2)
        print(q, mp.nstr(truncated_profile(q, s) - lim, 17))
    print("# emergent zeros, w = 0.5: z = s/0.5")
    for q in [100, 1000, 10000]:
        s = findroot(lambda x: truncated_profile(q, x), -1 / (1 + log(q)))
        print(q, mp.nstr(s / mpf("0.5"), 17), mp.nstr(s, 17))
    print("# K for (n, alpha, m) = (0, 1, 1.5) at s")
    for s in [mpc(10, 0), mpc(-50, 0), mpc(0, 30), mpc(-20, 35)]:
        print(s, mp.nstr(ml_kernel(0, 1, 1.5, s), 17))
    print("# K for (n, alpha, m) = (1, 2, 0.75) at s")
    for s in [mpc(3, -4), mpc(-12, 5)]:
        print(s, mp.nstr(ml_kernel(1, 2, 0.75, s), 17))
    print("# profile zeros of (0, 1, 1.5) nearest the origin")
    f = lambda s: ml_kernel(0, 1, 1.5, s)
    for guess in [mpc(1.5, 3.5), mpc(1.5, -3.5)]:
        z = findroot(f, guess)
        print(mp.nstr(z, 17), mp.nstr(abs(f(z)), 3))
    print("# winding counts of (0, 1, 1.5)")
    for R, n in [(4, 64), (8, 128), (16, 256), (32, 512)]:
        print(R, mp.nstr(winding(f, R, n), 8))
    print("# quadrature check of a moment, (n, alpha, m, k) = (1, 0.5, 0.75, 40)")
    n, a, m, k = 1, mpf("0.5"), mpf("0.75"), 40
    x = (2 * k + 2 + n) / (2 * m)
    print(mp.nstr(ml_moment_quad(n, a, m, k) * 2 * pi, 17), mp.nstr(2 * pi * gamma(x) / (2 * m * a ** x) / (2 * pi) * 2 * pi, 17))
