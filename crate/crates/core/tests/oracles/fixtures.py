"""Extended-precision reference values for the fzwave test suite.

Every constant frozen into the Rust tests under `tests/` comes from this
script. It depends only on mpmath and shares no code with the library.

    python3 fixtures.py
"""

import mpmath as mp


def ml_series(alpha, beta, z, dps):
    """E_{alpha,beta}(z) by brute-force power series at `dps` digits.

    alpha must be 1/m for an integer m so the Gamma recurrence
    Gamma(alpha*(k+m)+beta) = (alpha*k+beta) * Gamma(alpha*k+beta) applies
    on each of the m interleaved chains.
    """
    with mp.workdps(dps):
        alpha = mp.mpf(alpha)
        beta = mp.mpf(beta)
        z = mp.mpf(z) if not isinstance(z, mp.mpc) else z
        m = int(mp.nint(1 / alpha))
        assert abs(m * alpha - 1) < mp.mpf(10) ** (-dps + 5)
        zm = z**m
        total = mp.mpf(0)
        for r in range(m):
            term = z**r / mp.gamma(alpha * r + beta)
            k = r
            small = 0
            while True:
                total += term
                if abs(term) < mp.mpf(10) ** (-dps + 10) * max(1, abs(total)):
                    small += 1
                    if small > 3:
                        break
                else:
                    small = 0
                term = term * zm / (alpha * k + beta)
                k += m
        return total


def digits_for(z, alpha):
    # largest term ~ exp(|z|^(1/alpha)); 60 guard digits on top
    mag = float(abs(z)) ** (1.0 / alpha)
    return int(mag / 2.302585) + 60


def report(name, value, digits=20):
    print(f"{name} = {mp.nstr(value, digits)}")


def psi(s, alpha, tau, theta):
    sa = s**alpha
    return s * s + theta * (1 + sa) / (1 + tau * sa)


def winding(f, corners, n=4000):
    """Winding of f along a closed polygon by dense uniform sampling."""
    total = mp.mpf(0)
    pts = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        for j in range(n):
            pts.append(a + (b - a) * j / n)
    vals = [f(p) for p in pts]
    for v0, v1 in zip(vals, vals[1:] + vals[:1]):
        d = mp.arg(v1 / v0)
        total += d
    return int(mp.nint(total / (2 * mp.pi)))


def bisect_zero(f, re0, re1, im0, im1, depth):
    for level in range(depth):
        if level % 2 == 0:
            mid = (re0 + re1) / 2
            left = [mp.mpc(re0, im0), mp.mpc(mid, im0), mp.mpc(mid, im1), mp.mpc(re0, im1)]
            if winding(f, left, 200) == 1:
                re1 = mid
            else:
                re0 = mid
        else:
            mid = (im0 + im1) / 2
            low = [mp.mpc(re0, im0), mp.mpc(re1, im0), mp.mpc(re1, mid), mp.mpc(re0, mid)]
            if winding(f, low, 200) == 1:
                im1 = mid
            else:
                im0 = mid
    return re0, re1, im0, im1


def s_kernel_laplace(rho, t, alpha, beta, tau):
    theta = mp.mpf(rho) ** (1 + beta) * mp.sin(beta * mp.pi / 2)

    def fhat(s):
        sa = s**alpha
        return s / (s * s + theta * (1 + sa) / (1 + tau * sa))

    return mp.invertlaplace(fhat, t, method="dehoog")


def main():
    mp.mp.dps = 50

    print("# specfun")
    report("E_{1/2}(-1) series", ml_series(mp.mpf(1) / 2, 1, -1, 80), 20)
    report("e*erfc(1)", mp.e * mp.erfc(1), 20)
    z = -mp.mpf(10)
    report("e_alpha(t=1, a=1/4, tau=0.1) = E_{1/4}(-10)",
           ml_series(mp.mpf(1) / 4, 1, z, digits_for(z, 0.25)), 20)
    t = mp.mpf(2)
    a = mp.mpf(1) / 4
    z = -(t**a) / mp.mpf("0.1")
    eaa = ml_series(a, a, z, digits_for(z, 0.25))
    report("e_alpha_prime(t=2, a=1/4, tau=0.1)", -(t ** (a - 1)) / mp.mpf("0.1") * eaa, 20)

    print("# fracops: L applied to f(t)=t, alpha=1/4, tau=0.1")
    tau = mp.mpf("0.1")
    for tv in ["0.25", "0.5", "1"]:
        tt = mp.mpf(tv)
        zz = -(tt**a) / tau
        e2 = ml_series(a, 2, zz, digits_for(zz, 0.25))
        # L t = t + (1/tau - 1) * int_0^t e_alpha = t + (1/tau - 1) t E_{a,2}(z)
        report(f"L[t]({tv})", tt + (1 / tau - 1) * tt * e2, 20)

    print("# fracops: symmetrized derivative of exp(-x^2), beta=1/2")
    beta = mp.mpf(1) / 2
    for xv in ["0", "0.5", "1", "2"]:
        x = mp.mpf(xv)
        g = lambda th: -2 * th * mp.exp(-th * th) / abs(x - th) ** beta
        val = mp.quad(g, [-mp.inf, x - 1, x, x + 1, mp.inf]) / (2 * mp.gamma(1 - beta))
        report(f"E^1/2 gauss({xv})", val, 20)

    print("# charfun")
    zr = lambda s, al, ta: (1 + s**al) / (1 + ta * s**al)
    report("zener_ratio(i, 1/4, 0.1)", zr(mp.mpc(0, 1), a, tau), 20)

    print("# rootfinder: alpha=1/4, tau=0.1, theta=1")
    f = lambda s: psi(s, a, tau, 1)
    with mp.workdps(20):
        box = bisect_zero(f, mp.mpf(-2), mp.mpf(0), mp.mpf("1e-3"), mp.mpf(2), 50)
    print("bisection box:", [mp.nstr(v, 12) for v in box])
    guess = mp.mpc((box[0] + box[1]) / 2, (box[2] + box[3]) / 2)
    root = mp.findroot(f, guess)
    report("s_z", root, 20)

    print("# kernel: S(rho, t) at alpha=1/4 beta=0.45 tau=0.1 (de Hoog inversion)")
    mp.mp.dps = 30
    for rho in ["0.5", "1", "2"]:
        for tv in ["0.5", "1", "2"]:
            v = s_kernel_laplace(mp.mpf(rho), mp.mpf(tv), a, mp.mpf("0.45"), tau)
            report(f"S({rho},{tv})", v, 16)


if __name__ == "__main__":
    main()
