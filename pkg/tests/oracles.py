"""Independent reference computations used to cross-check the library.

Nothing here imports rcdirichlet: each oracle recomputes its quantity from
scratch with plain integers, Fractions or floats.
"""

import cmath
import math
from fractions import Fraction


def sigma(k, n):
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def eisenstein_coeffs(k, N):
    c = {2: -24, 4: 240, 6: -504, 10: -264}[k]
    return [1] + [c * sigma(k - 1, n) for n in range(1, N + 1)]


def convolve(a, b):
    n = min(len(a), len(b))
    return [sum(Fraction(a[i]) * b[k - i] for i in range(k + 1)) for k in range(n)]


def delta_product(N):
    """q * prod_{n>=1} (1 - q^n)^24 through q^N."""
    poly = [0] * (N + 1)
    poly[0] = 1
    for n in range(1, N + 1):
        for _ in range(24):
            for k in range(N, n - 1, -1):
                poly[k] -= poly[k - n]
    return [0] + poly[:N]


def derivative(coeffs, r=1):
    """k^r c_k: the rational part of (d/dz)^r on a q-expansion."""
    return [k**r * c for k, c in enumerate(coeffs)]


def rc_bracket(f, g, mu, nu, w):
    """Rankin-Cohen bracket written out with math.comb on coefficient lists."""
    out = [Fraction(0)] * min(len(f), len(g))
    for r in range(w + 1):
        c = (-1) ** r * math.comb(mu + w - 1, w - r) * math.comb(nu + w - 1, r)
        prod = convolve(derivative(f, r), derivative(g, w - r))
        out = [x + c * y for x, y in zip(out, prod)]
    return out


def qeval(coeffs, z, grade=0, h=1):
    """Float evaluation of (2 pi i/h)^grade sum c_k e^{2 pi i k z / h}."""
    q = cmath.exp(2j * cmath.pi * z / h)
    return (2j * cmath.pi / h) ** grade * sum(complex(c) * q**k for k, c in enumerate(coeffs))
