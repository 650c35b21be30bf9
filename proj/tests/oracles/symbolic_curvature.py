"""Independent symbolic oracle for the f-manifold curvature quantities.

Builds the metric from its component matrix, Christoffel symbols from the
generic Levi-Civita formula (symbolic inverse, no closed forms), Riemann with
R^l_ijk = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik and the
geodesic stretching quotient g(S v, v)/g(v, v), S(v) = R(T, v)T.
Used offline to freeze expected values in the C++ tests.
"""
import sympy as sp


def build(fexpr, xs):
    n = len(xs)
    tau = sp.Symbol("tau")
    coords = list(xs) + [tau]
    f = sp.Matrix(fexpr)
    g = sp.zeros(n + 1, n + 1)
    for i in range(n):
        g[i, i] = 1
        g[i, n] = -f[i]
        g[n, i] = -f[i]
    g[n, n] = 1 + sum(fi**2 for fi in f)
    ginv = sp.simplify(g.inv())
    N = n + 1
    Gam = [[[sp.simplify(sum(ginv[k, l] * (sp.diff(g[j, l], coords[i]) + sp.diff(g[i, l], coords[j]) - sp.diff(g[i, j], coords[l])) for l in range(N)) / 2)
             for j in range(N)] for i in range(N)] for k in range(N)]
    R = [[[[sp.diff(Gam[l][j][k], coords[i]) - sp.diff(Gam[l][i][k], coords[j])
            + sum(Gam[l][i][m] * Gam[m][j][k] - Gam[l][j][m] * Gam[m][i][k] for m in range(N))
            for k in range(N)] for j in range(N)] for i in range(N)] for l in range(N)]
    return dict(f=f, g=g, ginv=ginv, Gam=Gam, R=R, coords=coords, N=N)


def theta(B, point, v):
    N = B["N"]
    subs = dict(zip(B["coords"], point))
    f = B["f"].subs(subs)
    T = list(f) + [1]
    g = B["g"].subs(subs)
    S = [sum(B["R"][l][i][j][k].subs(subs) * T[i] * v[j] * T[k]
             for i in range(N) for j in range(N) for k in range(N)) for l in range(N)]
    num = sum(g[a, b] * S[a] * v[b] for a in range(N) for b in range(N))
    den = sum(g[a, b] * v[a] * v[b] for a in range(N) for b in range(N))
    return sp.nsimplify(sp.simplify(num / den))


if __name__ == "__main__":
    x1, x2 = sp.symbols("x1 x2")
    eta = sp.Integer(3)
    f = [-x1, -eta * x2 + ((eta - 1) * x1 + eta * x1**2) / (1 + x1)**2]
    B = build(f, [x1, x2])
    pt = [sp.Integer(1), sp.Rational(1, 2), 0]
    fv = [fi.subs({x1: pt[0], x2: pt[1]}) for fi in f]
    v1 = [fv[0], fv[1], 0]
    v2 = [fv[1], -fv[0], 0]
    t1 = theta(B, pt, v1)
    t2 = theta(B, pt, v2)
    print("tan", t1, float(t1))
    print("orth", t2, float(t2))
