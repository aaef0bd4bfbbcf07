"""Index-raising Hecke operator ``T_-(m)`` on coefficient tables.

``f_m(n, l) = sum over a | (n, l, m) of a^{k-1} f(n m / a^2, l / a)``, where
``a | l`` means ``l / a`` is still in the dual lattice.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .qseries import QDEN, FourierSeries

__all__ = ["apply_T_minus", "divisors"]


def divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


def apply_T_minus(s: FourierSeries, m: int, k) -> FourierSeries:
    """``s | T_-(m)`` in weight ``k``; the result is known for ``n < s.qprec / m``."""
    if int(m) != m or m <= 0:
        raise ValueError(f"m must be a positive integer, got {m}")
    m = int(m)
    k = Fraction(k)
    if s.zden != 1 or (s.exps[:, 0] % QDEN).any():
        raise ValueError("T_-(m) needs integral q- and zeta-exponents")
    qprec = s.qprec / m
    index_form = tuple(tuple(m * x for x in row) for row in s.index_form)
    meta = dict(weight=k, index_form=index_form)
    if s.is_zero():
        return FourierSeries.zero(s.lattice, qprec, **meta)
    big_n = s.exps[:, 0] // QDEN
    parts_e, parts_c = [], []
    # scatter: stored (N, L') feeds (n, a L') with n = N a^2 / m whenever a | n
    for a in divisors(m):
        num = big_n * a * a
        keep = (num % m == 0)
        n = num // m
        keep &= (n % a == 0)
        if not keep.any():
            continue
        e = np.column_stack([n[keep], a * s.exps[keep, 1:]])
        e[:, 0] *= QDEN
        weight_factor = a ** (k - 1)
        c = s.coeffs[keep]
        if weight_factor != 1:
            wf = int(weight_factor) if weight_factor.denominator == 1 else weight_factor
            c = c.astype(object) * wf
        parts_e.append(e)
        parts_c.append(c)
    if not parts_e:
        return FourierSeries.zero(s.lattice, qprec, **meta)
    coeffs = np.concatenate([p.astype(object) for p in parts_c]) if any(
        p.dtype == object for p in parts_c) else np.concatenate(parts_c)
    return FourierSeries(s.lattice, np.vstack(parts_e), coeffs, qprec, **meta)
