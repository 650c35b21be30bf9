"""Refined sweep distances frozen into the acceptance suite.

Same dense grids as sweep_oracle.py, each argmin polished by a bounded
scalar minimization so the frozen sup-distances carry no grid error.
"""
import sys
import numpy as np
import sympy as sp
from sweep_oracle import stretching_fn, argmin_refined, ds, x1, x2

if __name__ == "__main__":
    for eta in (3, 10):
        tf = stretching_fn(ds(eta), [x1, x2])
        sup, arg = 0, None
        for s in np.linspace(0.5, 2.0, 16):
            h = s / (1 + s)
            a, v, b = argmin_refined(lambda y: tf(s, y)[0], h - 0.1, h + 0.1, 4001)
            if abs(a - h) > sup:
                sup, arg = abs(a - h), s
        print("DS sweep eta", eta, "sup %.12e at x1 %.6f" % (sup, arg), flush=True)

    kap, lam = sp.Rational(1, 2), sp.Integer(1)
    for eps in (sp.Rational(1, 3), sp.Rational(1, 6), sp.Rational(1, 12)):
        tf = stretching_fn([x2 - (x2 + kap) * x1, eps * (-x2 + (x2 + kap - lam) * x1)], [x1, x2])
        e = float(eps)
        sup, arg = 0, None
        for s in np.linspace(0.1, 0.9, 17):
            h0 = s / (s + 0.5)
            h1 = 0.5 * s / (s + 0.5)**4
            h2 = 0.5 * s * (2 * 0.5 - 3 * s - 0.5 * s - 0.25) / (s + 0.5)**7
            htr = h0 + e * h1 + e * e * h2
            a, v, b = argmin_refined(lambda y: tf(y, s)[0], 0.0, 1.0, 2001)
            if b:
                print("boundary", s)
            if abs(a - htr) > sup:
                sup, arg = abs(a - htr), s
        print("MM eps", e, "sup %.12e at x2 %.4f" % (sup, arg), flush=True)
