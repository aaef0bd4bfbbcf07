"""Independent slow reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import sympy


def poly_mul(a: dict, b: dict, qlimit) -> dict:
    out: dict = {}
    for (qa, la), ca in a.items():
        for (qb, lb), cb in b.items():
            q = qa + qb
            if q >= qlimit:
                continue
            key = (q, tuple(x + y for x, y in zip(la, lb)))
            out[key] = out.get(key, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


def series_dict(s) -> dict:
    return {(q, l): c for q, l, c in s.terms()}


def eta_product(qprec) -> dict:
    """``q^{1/24} prod (1 - q^n)`` by repeated multiplication."""
    qprec = Fraction(qprec)
    poly = {0: 1}
    n = 1
    while n + Fraction(1, 24) < qprec:
        new = dict(poly)
        for e, c in poly.items():
            if e + n + Fraction(1, 24) < qprec:
                new[e + n] = new.get(e + n, 0) - c
        poly = {k: v for k, v in new.items() if v}
        n += 1
    return {(Fraction(e) + Fraction(1, 24), ()): c for e, c in poly.items()}


def theta_triple_product(qprec) -> dict:
    """``q^{1/8} zeta^{1/2} prod (1 - q^n)(1 - q^n zeta)(1 - q^{n-1} zeta^{-1})`` on A1 (zeta exponent = dual coordinate)."""
    qprec = Fraction(qprec)
    lim = qprec - Fraction(1, 8)
    poly = {(0, (0,)): 1}
    n = 1
    while n - 1 < lim:
        for factor in ({(0, (0,)): 1, (n, (0,)): -1}, {(0, (0,)): 1, (n, (1,)): -1},
                       {(0, (0,)): 1, (n - 1, (-1,)): -1}):
            poly = poly_mul(poly, factor, lim)
        n += 1
    return {(Fraction(q) + Fraction(1, 8), (Fraction(l[0]) + Fraction(1, 2),)): c for (q, l), c in poly.items()}


def hecke_by_substitution(s, m: int, k: int) -> dict:
    """``phi | T_-(m) = m^{k-1} sum_{ad = m} d^{-k} sum_{b mod d} phi((a tau + b)/d, a z)``.

    Each root-of-unity sum is evaluated exactly in ``Q(zeta_d)``: the terms are
    collected as polynomials in ``x = zeta_d`` and reduced modulo ``Phi_d``.
    """
    x = sympy.Symbol("x")
    out: dict = {}
    for a in range(1, m + 1):
        if m % a:
            continue
        d = m // a
        phi_d = sympy.Poly(sympy.cyclotomic_poly(d, x), x)
        acc: dict = {}
        for n, l, c in s.terms():
            key = (n * a / d, tuple(a * v for v in l))
            vec = acc.setdefault(key, [0] * d)
            for b in range(d):
                e = (n * b) % d
                if e.denominator != 1:
                    raise ValueError("non-integral q exponent")
                vec[int(e)] += c
        scale = Fraction(m) ** (k - 1) / Fraction(d) ** k
        for key, vec in acc.items():
            rem = sympy.Poly(sum(v * x**i for i, v in enumerate(vec)), x).rem(phi_d)
            coeffs = rem.all_coeffs()
            if rem.degree() > 0:
                raise AssertionError(f"root-of-unity sum at {key} is not rational: {rem}")
            value = Fraction(int(coeffs[-1])) if coeffs else Fraction(0)
            if value:
                out[key] = out.get(key, 0) + scale * value
    return {k: v for k, v in out.items() if v}


def brute_census(gram) -> dict:
    """Classes of ``Z^n / G Z^n`` by (norm mod 2, order) from the representatives ``[0, e)^n``, e the exponent."""
    g = sympy.Matrix(gram)
    ginv = g.inv()
    n = g.shape[0]
    exponent = 1
    for v in ginv:
        exponent = math.lcm(exponent, sympy.fraction(sympy.nsimplify(v))[1])
    seen = {}
    for c in itertools.product(range(exponent), repeat=n):
        cv = sympy.Matrix(c)
        coords = ginv * cv
        key = tuple(Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) % 1 for v in coords)
        if key in seen:
            continue
        norm = Fraction(str((cv.T * ginv * cv)[0]))
        order = 1
        for v in key:
            order = math.lcm(order, v.denominator)
        seen[key] = (norm % 2, order)
    census: dict = {}
    for val in seen.values():
        census[val] = census.get(val, 0) + 1
    return census


def brute_dual_vectors(gram, bound) -> list[tuple[int, ...]]:
    """Dual coordinates ``c`` with ``c^T G^{-1} c <= bound``, from the box ``|c_i| <= sqrt(bound G_ii)``."""
    g = sympy.Matrix(gram)
    ginv = g.inv()
    n = g.shape[0]
    box = [int(math.isqrt(int(Fraction(bound) * gram[i][i]))) + 1 for i in range(n)]
    out = []
    for c in itertools.product(*(range(-b, b + 1) for b in box)):
        cv = sympy.Matrix(c)
        if Fraction(str((cv.T * ginv * cv)[0])) <= bound:
            out.append(tuple(c))
    return sorted(out)
