"""Radii on which the SiLU and GELU Hessians are nonincreasing in |x|.

Both Hessians are even, so the radius is the first positive zero of the
third derivative. Prints the values used in src/catalog/mod.rs.

    python3 scripts/hessian_radius.py
"""

from mpmath import diff, erf, exp, findroot, mp, sqrt

mp.dps = 40


def silu(x):
    return x / (1 + exp(-x))


def gelu(x):
    return x * (1 + erf(x / sqrt(2))) / 2


def first_zero(f, guess):
    return findroot(lambda x: diff(f, x, 3), guess)


if __name__ == "__main__":
    for name, f, guess in [("silu", silu, 3.4), ("gelu", gelu, 2.1)]:
        alpha = first_zero(f, guess)
        # no earlier sign change of f''' on (0, alpha)
        steps = 4000
        assert all(diff(f, alpha * i / steps, 3) < 0 for i in range(1, steps))
        print(f"{name}: {mp.nstr(alpha, 20)}  (f64 {float(alpha)!r})")
