"""Stage-by-stage reference values for the 8-level toy image.

Written independently of the C++ code: exact fractions for the split search,
math.tanh for the bin modification, and half-up rounding done on
Fractions wherever the stage is rational. The printed values are frozen
into tests/test_enhancement.cpp.
"""
from fractions import Fraction
import math

COUNTS = {20: 3, 45: 1, 70: 2, 100: 2, 140: 3, 180: 1, 210: 2, 235: 2}
# Row-major 4x4 layout used by the C++ test.
PIXELS = [20, 20, 20, 45,
          70, 70, 100, 100,
          140, 140, 140, 180,
          210, 210, 235, 235]
DELTA = Fraction(3, 5)


def sigma2(lo, hi, k):
    levels = [v for v in COUNTS if lo <= v <= hi]
    n = sum(COUNTS[v] for v in levels)
    c0 = [v for v in levels if v <= k]
    c1 = [v for v in levels if v > k]
    n0 = sum(COUNTS[v] for v in c0)
    n1 = sum(COUNTS[v] for v in c1)
    if n0 == 0 or n1 == 0:
        return Fraction(0)
    w0, w1 = Fraction(n0, n), Fraction(n1, n)
    mu0 = Fraction(sum(v * COUNTS[v] for v in c0), n0)
    mu1 = Fraction(sum(v * COUNTS[v] for v in c1), n1)
    return w0 * w1 * (mu0 - mu1) ** 2


def split(lo, hi):
    best, arg = Fraction(-1), lo
    for k in range(lo, hi):
        s = sigma2(lo, hi, k)
        if s > best:
            best, arg = s, k
    return arg


def half_up(x):
    if isinstance(x, Fraction):
        return math.floor(x + Fraction(1, 2))
    return math.floor(x + 0.5)


def main():
    k2 = split(0, 255)
    k1 = split(0, k2)
    k3 = split(k2 + 1, 255)
    print("partition", k1, k2, k3)
    segments = [(0, k1), (k1 + 1, k2), (k2 + 1, k3), (k3 + 1, 255)]
    mapping = {}
    for lo, hi in segments:
        levels = sorted(v for v in COUNTS if lo <= v <= hi)
        n = sum(COUNTS[v] for v in levels)
        run = 0.0
        cdf = {}
        for v in range(lo, hi + 1):
            run += math.tanh(COUNTS.get(v, 0) / n) if n else 0.0
            cdf[v] = run
        for v in levels:
            mapping[v] = half_up(lo + (hi - lo) * cdf[v] / cdf[hi])
    print("map", [mapping[v] for v in sorted(COUNTS)])
    mapped = [mapping[p] for p in PIXELS]
    lo, hi = min(mapped), max(mapped)
    norm = [half_up(Fraction(255 * (m - lo), hi - lo)) for m in mapped]
    print("normalized", norm)
    fused = [half_up(DELTA * a + (1 - DELTA) * b) for a, b in zip(norm, PIXELS)]
    print("fused", fused)


if __name__ == "__main__":
    main()
