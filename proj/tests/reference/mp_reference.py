"""High-precision reference values frozen into the unit tests.

Run with: python3 tests/reference/mp_reference.py
"""
from mpmath import mp, mpf, mpc, gammainc, exp, pi, matrix, eig, quad, power

mp.dps = 40


def P(a, x):
    return gammainc(a, 0, x, regularized=True)


def g_series(a, x, y, terms=400):
    return sum(P(a + n, x) * y**n for n in range(terms))


def integrand_1d(alphas, lambdas, x, phi, r):
    lmax, lmin = max(lambdas), min(lambdas)
    v = (1 / mpf(lmax) + 1 / mpf(lmin)) / 2
    cs = [1 - 1 / (v * l) for l in lambdas]
    z = exp(-1j * phi) / r
    val = mpc(1)
    for a, c in zip(alphas, cs):
        val *= (1 - c * z) ** (-a)
    return (val * g_series(alphas[0] * 0 + sum(alphas), v * x, r * exp(1j * phi))).real


def cdf_1d(alphas, lambdas, x, r):
    lmax, lmin = max(lambdas), min(lambdas)
    v = (1 / mpf(lmax) + 1 / mpf(lmin)) / 2
    pref = 1
    for a, l in zip(alphas, lambdas):
        pref *= (1 / (v * l)) ** a
    return pref / pi * quad(lambda t: integrand_1d(alphas, lambdas, x, t, r), [0, pi])


def mv_integrand(sigma, alpha, xs, phis, r):
    s = matrix(sigma)
    e, q = eig(s)
    ev = sorted(e[i].real for i in range(len(e)))
    v = (1 / ev[-1] + 1 / ev[0]) / 2
    n = len(xs)
    c = matrix(n, n)
    inv = (v * s) ** -1
    for i in range(n):
        for j in range(n):
            c[i, j] = (1 if i == j else 0) - inv[i, j]
    ys = [r * exp(1j * p) for p in phis]
    m = matrix(n, n)
    for i in range(n):
        for j in range(n):
            m[i, j] = (1 if i == j else 0) - c[i, j] / ys[j]
    det = mp.det(m)
    val = det ** (-alpha)
    for k in range(n):
        val *= g_series(alpha, v * xs[k], ys[k])
    return val


def main():
    print("integrand k=2 alpha=(1,1) lambda=(1,3) x=2 phi=pi/2 r=0.75:",
          mp.nstr(integrand_1d([1, 1], [1, 3], 2, pi / 2, mpf("0.75")), 20))
    print("cdf hypoexp lambda=(1,3) x=2:", mp.nstr(cdf_1d([1, 1], [1, 3], 2, mpf("0.75")), 20),
          "closed", mp.nstr(1 - (3 * exp(-mpf(2) / 3) - exp(-2)) / 2, 20))
    h = matrix([[1 / mpf(i + j + 1) for j in range(3)] for i in range(3)])
    e, _ = eig(h)
    print("hilbert3 eigenvalues:", [mp.nstr(x, 20) for x in sorted(e[i].real for i in range(3))])
    w = mv_integrand([[2, 1], [1, 2]], 1, [2, 3], [pi / 3, -pi / 4], mpf("0.75"))
    print("mv integrand:", mp.nstr(w.real, 20), mp.nstr(w.imag, 20))
    print("P(2, i):", mp.nstr(gammainc(2, 0, 1j, regularized=True), 20))
    print("(1+i)^-0.5:", mp.nstr(power(mpc(1, 1), -0.5), 20))
    print("G_0.5(1.2, 0.6 e^{i pi/3}):", mp.nstr(g_series(mpf("0.5"), mpf("1.2"), mpf("0.6") * exp(1j * pi / 3)), 20))
    print("series cdf alpha=(0.7,1.3,2) lambda=(0.5,1,4) x=6:",
          mp.nstr(cdf_1d([mpf("0.7"), mpf("1.3"), 2], [mpf("0.5"), 1, 4], 6, mpf("0.8")), 20))


if __name__ == "__main__":
    main()
