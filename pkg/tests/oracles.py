"""Independent exact oracles used to freeze expected values."""

from fractions import Fraction


def exact_sum(values):
    return float(sum(Fraction(v) for v in values))


def exact_dot(a, b):
    return float(sum(Fraction(x) * Fraction(y) for x, y in zip(a, b)))


def riemann_poly(coeffs, n, theta, a=0, b=1):
    """sum_k p(a + (k + theta) h) h for the polynomial sum c_i x^i, exactly."""
    a, b, theta = Fraction(a), Fraction(b), Fraction(theta)
    h = (b - a) / n
    total = Fraction(0)
    for k in range(n):
        x = a + (k + theta) * h
        total += sum(Fraction(c) * x**i for i, c in enumerate(coeffs)) * h
    return total


def poly_integral(coeffs, a=0, b=1):
    a, b = Fraction(a), Fraction(b)
    return sum(Fraction(c) * (b ** (i + 1) - a ** (i + 1)) / (i + 1) for i, c in enumerate(coeffs))
