"""Reference values frozen into the tplab test suites.

Run with mpmath installed:  python3 gen_reference.py
Every value printed here was computed independently of the Rust code and
pasted into the tests as constants.
"""
from mpmath import (mp, mpf, quad, quadosc, besselk, hyperu, whitw, gamma, e1,
                    e, exp, cos, sin, cosh, pi, sqrt, inf, binomial, factorial, nstr)

mp.dps = 30


def p(name, v):
    print(f"{name} = {nstr(v, 20)}")


def fou_cov(a, l, t):
    return (abs(t) / (2 * l)) ** (a - 0.5) * besselk(a - 0.5, l * abs(t)) / (sqrt(pi) * gamma(a))


def fou_var(a, l):
    return gamma(2 * a - 1) / (gamma(a) ** 2 * (2 * l) ** (2 * a - 1))


def tfbm_cov(a, l, t, s):
    c = lambda x: fou_var(a, l) if x == 0 else fou_cov(a, l, x)
    return c(t - s) - c(t) - c(s) + c(0)


def small_time_constant(ab):
    # (4/pi) int_0^inf k^{-2ab} sin^2(k/2) dk, closed form for 1 < 2ab < 3
    pp = mpf(2 * ab)
    return 1 / (gamma(pp) * sin(pi * (pp - 1) / 2))


def bessel_and_confluent():
    p("K_0.25(2) integral", quad(lambda t: exp(-2 * cosh(t)) * cosh(0.25 * t), [0, 4, 8, 12]))
    p("K_0.25(2)", besselk(0.25, 2))
    for nu, x in [(0.1, 0.05), (1.3, 0.01), (4.7, 1e-6), (2.0, 0.5), (5, 700), (0, 1e-6),
                  (3.5, 0.09), (0.7, 0.1), (1.0, 3.0)]:
        p(f"K_{nu}({x})", besselk(nu, x))
    p("U(1,1,1)", hyperu(1, 1, 1))
    p("e E1(1)", e * e1(1))
    p("U(0.75,1.5,0.8)", hyperu(0.75, 1.5, 0.8))
    p("U(0.75,1.5,0.8) integral",
      quad(lambda t: exp(-0.8 * t) * t ** (-0.25) * (1 + t) ** (-0.25), [0, 1, inf]) / gamma(0.75))
    p("W(0,0.5,2)", whitw(0, 0.5, 2))
    p("W(0.1,0.3,1)", whitw(0.1, 0.3, 1))
    p("W(0,0.25,4)", whitw(0, 0.25, 4))


def single_index():
    p("fou_cov(1.25,0.5,1.7)", fou_cov(1.25, 0.5, 1.7))
    p("fou_cov(1.25,0.5,1.7) fourier",
      quadosc(lambda k: (k * k + 0.25) ** (-1.25) * cos(1.7 * k), [0, inf], omega=1.7) / pi)
    p("fou_var(0.75,1)", fou_var(0.75, 1))
    p("tfbm_var(1.25,0.5,0.5)", tfbm_cov(1.25, 0.5, 0.5, 0.5))
    p("tfbm_cov(1.25,0.5,2,0.5)", tfbm_cov(1.25, 0.5, 2, 0.5))
    a, l = 1.25, 0.5
    p("tfbm_increment_cov(1.25,0.5,1,2)", 2 * fou_cov(a, l, 2) - fou_cov(a, l, 3) - fou_cov(a, l, 1))
    p("tfbm_increment_cov fourier",
      quadosc(lambda k: (2 - 2 * cos(k)) * (k * k + 0.25) ** (-1.25) * cos(2 * k), [0, inf], omega=2) / pi)
    p("int_0^inf fou_cov(0.75,1)", quad(lambda x: fou_cov(0.75, 1, x), [0, 1, inf]))
    H = mpf(0.75)
    p("c_t limit H=0.75", gamma(1 - 2 * H) * cos(H * pi) / (H * pi))


def two_index():
    p("twoindex_var(0.9,0.8,1)", gamma(1 / 1.6) * gamma(0.9 - 1 / 1.6) / (2 * pi * 0.8 * gamma(0.9)))
    p("twoindex_var(0.9,0.8,1) integral", quad(lambda k: (k ** 1.6 + 1) ** (-0.9), [0, 1, inf]) / pi)
    for ab in [0.54, 0.75, 1.0, 1.05, 1.25, 1.4]:
        p(f"c({ab})", small_time_constant(ab))
    for a, b in [(0.9, 0.6), (1.5, 0.7)]:
        a, b = mpf(a), mpf(b)
        for tau in [10, 20, 40]:
            cov = quadosc(lambda k: cos(k * tau) / (k ** (2 * b) + 1) ** a, [0, inf], omega=tau) / pi
            lead = (a / pi) * gamma(1 + 2 * b) * sin(b * pi) * mpf(tau) ** (-(1 + 2 * b))
            p(f"twoindex_cov({a},{b},1,{tau})", cov)
            p(f"  leading-term ratio", lead / cov)
    # increment variance at small t, divided by t^{2ab-1}, lambda = 1
    for a, b in [(0.9, 0.6), (1.5, 0.7), (1.25, 0.6)]:
        a, b = mpf(a), mpf(b)
        for eps in [mpf("1e-3"), mpf("1e-2")]:
            pp, u0 = 2 * a * b, mpf(10)
            tail = sum(binomial(-a, j) * eps ** (2 * b * j) * u0 ** (1 - pp - 2 * b * j) / (pp + 2 * b * j - 1)
                       for j in range(40)) / 2
            body = quad(lambda u: sin(u / 2) ** 2 / (u ** (2 * b) + eps ** (2 * b)) ** a, [0, eps, 1, u0])
            osc = quadosc(lambda u: cos(u) / 2 / (u ** (2 * b) + eps ** (2 * b)) ** a, [u0, inf], omega=1)
            iv = 4 / pi * (body + tail - osc)
            p(f"incvar ratio ({a},{b}) lt={eps}", iv / small_time_constant(a * b))


def multifractional_and_noise():
    def cmn(mu, nu, l, tau):
        return exp(-l * tau) * tau ** (mu + nu - 1) * hyperu(nu, mu + nu, 2 * l * tau) / gamma(mu)
    p("C^(1.2,0.9)(lambda=1,tau=2)", cmn(1.2, 0.9, 1, 2))
    p("C^(1.2,0.9) integral", exp(-2) / (gamma(1.2) * gamma(0.9))
      * quad(lambda u: exp(-2 * u) * (2 + u) ** 0.2 * u ** (-0.1), [0, 1, inf]))
    al = lambda t: 0.8 + 0.1 * t / (1 + t)
    t, s, l = mpf(2), mpf("0.5"), 1
    at, as_ = al(t), al(s)
    ap, am, d = (at + as_) / 2, (at - as_) / 2, t - s
    p("mou kummer", exp(-l * d) * d ** (2 * ap - 1) / gamma(at) * hyperu(as_, 2 * ap, 2 * l * d))
    p("mou whittaker", d ** (ap - 1) / (gamma(at) * (2 * l) ** ap) * whitw(am, 0.5 - ap, 2 * l * d))
    p("mou moving-average integral", exp(-l * d) / (gamma(at) * gamma(as_))
      * quad(lambda u: u ** (as_ - 1) * (u + d) ** (at - 1) * exp(-2 * l * u), [0, 1, inf]))


if __name__ == "__main__":
    bessel_and_confluent()
    single_index()
    two_index()
    multifractional_and_noise()
