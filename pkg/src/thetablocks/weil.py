"""Weil representation of a discriminant form, theta decomposition, and invariance certificates.

Roots of unity are handled exactly: an entry ``e(a/N)`` is the integer ``a mod N``
and sums of them are integer vectors in the group ring ``Z[x]/(x^N - 1)``,
compared after reduction modulo the cyclotomic polynomial ``Phi_N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np
import sympy

from .blocks import hyperbolic_norm_numerators
from .lattice import GramLattice
from .qseries import QDEN, FourierSeries

__all__ = [
    "WeilRep",
    "weil_matrices",
    "VVComponents",
    "theta_decompose",
    "reconstruct",
    "InvarianceReport",
    "orbit_invariance_report",
    "od_class_invariance",
    "OrbitInvarianceError",
]


class OrbitInvarianceError(ValueError):
    pass


@lru_cache(maxsize=None)
def _cyclotomic(n: int) -> np.ndarray:
    x = sympy.Symbol("x")
    return np.array([int(c) for c in sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()[::-1]], dtype=np.int64)


def _reduce_mod_phi(vecs: np.ndarray, n: int) -> np.ndarray:
    """Reduce group-ring vectors (last axis of length ``n``) modulo ``Phi_n``."""
    phi = _cyclotomic(n)
    deg = len(phi) - 1
    out = np.array(vecs, dtype=np.int64)  # entries are bounded by |D| times small cyclotomic coefficients
    for d in range(n - 1, deg - 1, -1):
        c = out[..., d].copy()
        if not c.any():
            continue
        for i, p in enumerate(phi):
            if p:
                out[..., d - deg + i] -= c * p
    return out[..., :deg]


def _histogram(exps: np.ndarray, n: int) -> np.ndarray:
    """Group-ring element ``sum x^e`` for each row of ``exps`` (values already mod ``n``)."""
    rows = exps.reshape(-1, exps.shape[-1])
    offs = (np.arange(len(rows)) * n)[:, None]
    h = np.bincount((rows + offs).ravel(), minlength=len(rows) * n).reshape(len(rows), n)
    return h.reshape(*exps.shape[:-1], n)


@dataclass
class WeilRep:
    """``rho(T) e_g = e(-q(g)) e_g`` and ``rho(S) e_g = e(sign/8) |D|^{-1/2} sum_b e((g, b)) e_b``.

    ``t_exponents[g]`` and ``s_exponents[g, b]`` are integers mod ``conductor``.
    """

    lattice: GramLattice
    classes: list[tuple[int, ...]]  # coset keys
    reps: list[tuple[int, ...]]  # minimal-norm representatives (dual coordinates)
    conductor: int
    t_exponents: np.ndarray
    s_exponents: np.ndarray
    sign: int

    @property
    def dim(self) -> int:
        return len(self.classes)

    @property
    def s_phase(self) -> Fraction:
        return Fraction(self.sign % 8, 8)

    @property
    def s_scale_squared(self) -> Fraction:
        return Fraction(1, self.dim)

    def rho_T(self) -> list[Fraction]:
        return [Fraction(int(a), self.conductor) for a in self.t_exponents]

    def rho_S_entry(self, i: int, j: int) -> tuple[Fraction, Fraction]:
        """``(exponent a, scale^2)`` of the entry ``e(a) |D|^{-1/2}``."""
        return (Fraction(int(self.s_exponents[i, j]), self.conductor) + self.s_phase) % 1, self.s_scale_squared

    @cached_property
    def _neg_index(self) -> np.ndarray:
        pos = {c: i for i, c in enumerate(self.classes)}
        neg = [self.lattice.coset_key(tuple(-x for x in r)) for r in self.reps]
        return np.array([pos[k] for k in neg])

    def _gauss_sum(self, sgn: int) -> np.ndarray:
        return _histogram((sgn * self.t_exponents % self.conductor)[None, :], self.conductor)[0]

    def check_symmetric(self) -> bool:
        return bool((self.s_exponents == self.s_exponents.T).all())

    def check_milgram(self) -> bool:
        """``(sum_g e(q(g)))^2 = |D| e(sign/4)``: fixes the sign convention used for ``S``."""
        n = self.conductor
        g = self._gauss_sum(-1)  # t_exponents carry -q(g)
        sq = np.zeros(n, dtype=object)
        for a in np.flatnonzero(g):
            sq += np.roll(g, a) * int(g[a])
        target = np.zeros(n, dtype=object)
        target[(self.sign * n // 4) % n] = self.dim
        return not _reduce_mod_phi(sq - target, n).any()

    def check_S_squared(self) -> bool:
        """``S^2 e_g = e(sign/4) e_{-g}``, i.e. ``sum_b e((g + d, b)) = |D| [d = -g]``."""
        n = self.conductor
        keys = {c: i for i, c in enumerate(self.classes)}
        # the unscaled S0^2 entry at (g, d) is sum_b x^{(g + d, b)}: row g + d of S0, summed
        sums = _histogram(self.s_exponents, n)  # row s: sum_b x^{(s, b)}
        zero = keys[tuple(0 for _ in self.lattice._coset_map)]
        target = np.zeros((self.dim, n), dtype=object)
        target[zero, 0] = self.dim
        ok = not _reduce_mod_phi(sums - target, n).any()
        # the pairing (g, b) must be additive in g so that row g + d is the product of rows
        return ok and self._pairing_is_bilinear()

    def _pairing_is_bilinear(self) -> bool:
        n = self.conductor
        factors = np.array([d for _, d in self.lattice._coset_map], dtype=np.int64)
        keys = np.array(self.classes, dtype=np.int64).reshape(self.dim, len(factors))
        radix = np.cumprod(np.concatenate([[1], factors[:0:-1]]))[::-1] if len(factors) else np.zeros(0, np.int64)
        where = np.empty(self.dim, dtype=np.int64)
        where[keys @ radix] = np.arange(self.dim)
        for i in range(self.dim):
            s = where[((keys[i] + keys) % factors) @ radix]
            if ((self.s_exponents[i] + self.s_exponents - self.s_exponents[s]) % n).any():
                return False
        return True

    def check_ST_cubed(self) -> bool:
        """``(ST)^3 = S^2`` in the form ``S0 T S0 = G T^{-1} S0 T^{-1}``.

        ``S0`` is the unnormalized character matrix and ``G = sum_g e(-q(g))``;
        Milgram's formula ``G = |D|^{1/2} e(-sign/8)`` turns one into the other.
        """
        n = self.conductor
        s0, t = self.s_exponents, self.t_exponents
        gauss = self._gauss_sum(1)  # sum_g x^{-q(g)}
        bad = False
        for i in range(self.dim):
            # left: sum_b x^{(g,b) - q(b) + (b,d)}
            left = _histogram(((s0[i][:, None] + t[:, None] + s0) % n).T, n)
            shift = (-t[i] + s0[i] - t) % n  # right: G * x^{q(g) + (g,d) + q(d)}
            right = gauss[(np.arange(n)[None, :] - shift[:, None]) % n]
            if _reduce_mod_phi(left - right, n).any():
                bad = True
                break
        return not bad

    def verify(self) -> dict[str, bool]:
        return {
            "S symmetric": self.check_symmetric(),
            "Milgram": self.check_milgram(),
            "S^2 = Z": self.check_S_squared(),
            "(ST)^3 = S^2": self.check_ST_cubed(),
        }


def weil_matrices(lattice: GramLattice) -> WeilRep:
    """Exact ``rho(T)``, ``rho(S)`` on ``C[D(L)]`` with conductor ``lcm(level, 8)``."""
    reps_map = lattice.minimal_coset_reps if lattice.rank else {(): ((), Fraction(0))}
    classes = sorted(reps_map)
    reps = [reps_map[c][0] for c in classes]
    level = lattice.level
    n = math.lcm(level, 8)
    if lattice.rank:
        ginv = np.array([[int(x * level) for x in row] for row in lattice.dual_gram], dtype=np.int64)
        c = np.array(reps, dtype=np.int64).reshape(len(reps), lattice.rank)
        pair = c @ ginv @ c.T  # level * (g, b)
    else:
        pair = np.zeros((1, 1), dtype=np.int64)
    scale = n // level
    s_exp = (pair * scale) % n
    q2 = np.diagonal(pair) * scale  # 2 n q(g)
    t_exp = (-(q2 // 2)) % n
    return WeilRep(lattice, classes, reps, n, t_exp.astype(np.int64), s_exp.astype(np.int64), lattice.rank % 8)


# -- theta decomposition -----------------------------------------------------------

@dataclass
class VVComponents:
    """``F_g`` for each class ``g`` of ``D(L)``: a map exponent -> coefficient, known below ``precision[g]``."""

    lattice: GramLattice
    components: dict[tuple[int, ...], dict[Fraction, object]]
    precision: dict[tuple[int, ...], Fraction]
    qprec: Fraction
    weight: Fraction | None = None

    def F(self, gamma: tuple[int, ...]) -> list[tuple[Fraction, object]]:
        return sorted(self.components.get(gamma, {}).items())

    def support_classes(self) -> list[tuple[int, ...]]:
        return sorted(g for g, comp in self.components.items() if any(comp.values()))


def _term_keys(phi: FourierSeries):
    """Coset key, hyperbolic norm ``2n - (l,l)`` and coefficient of every stored term."""
    if phi.index != 1:
        raise ValueError("theta decomposition needs lattice index 1")
    if phi.zden != 1:
        raise ValueError("half-integral zeta exponents")
    lat = phi.lattice
    num, den = hyperbolic_norm_numerators(phi, 1)
    cmap = lat._coset_map
    if cmap:
        u = np.array([row for row, _ in cmap], dtype=np.int64)
        d = np.array([f for _, f in cmap], dtype=np.int64)
        keys = (phi.exps[:, 1:] @ u.T) % d
    else:
        keys = np.zeros((len(phi), 0), dtype=np.int64)
    return keys, num, den


def theta_decompose(phi: FourierSeries) -> VVComponents:
    """Write an index-1 form as ``sum_g F_g Theta_g``; raises on an orbit-invariance violation."""
    lat = phi.lattice
    keys, num, den = _term_keys(phi)
    reps = lat.minimal_coset_reps if lat.rank else {(): ((), Fraction(0))}
    comps: dict[tuple[int, ...], dict[Fraction, object]] = {g: {} for g in reps}
    seen: dict[tuple, tuple] = {}
    for key, hnum, row, c in zip(keys.tolist(), num.tolist(), phi.exps.tolist(), phi.coeffs.tolist()):
        g = tuple(key)
        e = Fraction(hnum, 2 * den)
        old = comps[g].get(e)
        if old is not None and old != c:
            raise OrbitInvarianceError(
                f"f at {seen[(g, e)]} is {old} but f at {(Fraction(row[0], QDEN), tuple(row[1:]))} is {c}")
        comps[g][e] = c
        seen[(g, e)] = (Fraction(row[0], QDEN), tuple(row[1:]))
    precision = {g: phi.qprec - nm / 2 for g, (_, nm) in reps.items()}
    return VVComponents(lat, comps, precision, phi.qprec, phi.weight)


def reconstruct(vv: VVComponents, qprec=None) -> FourierSeries:
    """``sum_g F_g(tau) Theta_g(tau, z)`` truncated below ``qprec``."""
    lat = vv.lattice
    qprec = Fraction(vv.qprec if qprec is None else qprec)
    lowest = min((e for comp in vv.components.values() for e in comp), default=Fraction(0))
    terms: dict = {}
    if any(vv.components.values()):
        bound = 2 * (qprec - lowest)
        for l in lat.dual_vectors_up_to(bound):
            g = lat.coset_key(l)
            half = lat.norm(l) / 2
            for e, c in vv.components.get(g, {}).items():
                if e + half < qprec:
                    terms[(e + half, l)] = c
    return FourierSeries.from_terms(lat, terms, qprec, weight=vv.weight, index_form=lat.gram)


# -- invariance reports ---------------------------------------------------------------

@dataclass
class InvarianceReport:
    kind: str
    passed: bool
    classes: list[dict] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)
    signs: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "status": "pass" if self.passed else "fail",
                "classes": self.classes, "violations": self.violations, "signs": self.signs}


def orbit_invariance_report(phi: FourierSeries) -> InvarianceReport:
    """Check that ``f(n, l)`` depends only on ``(2n - (l,l), l + L)`` on the known range.

    Stored values are grouped by orbit; every lattice vector of an orbit
    inside the known range is then checked against the group value, so a
    missing (zero) coefficient is caught as well.
    """
    lat = phi.lattice
    keys, num, den = _term_keys(phi)
    groups: dict[tuple, object] = {}
    violations = []
    for key, hnum, row, c in zip(keys.tolist(), num.tolist(), phi.exps.tolist(), phi.coeffs.tolist()):
        k = (tuple(key), Fraction(hnum, den))
        if k in groups and groups[k] != c:
            violations.append({"class": list(k[0]), "hyperbolic_norm": str(k[1]),
                               "values": [str(groups[k]), str(c)], "at": [str(Fraction(row[0], QDEN)), row[1:]]})
        groups.setdefault(k, c)
    if groups:
        lowest = min(h for _, h in groups)
        stored = {tuple(row): c for row, c in zip(phi.exps.tolist(), phi.coeffs.tolist())}
        vecs = lat.dual_vectors_array(2 * phi.qprec - lowest)
        vkeys = [tuple(k) for k in lat.coset_keys(vecs).tolist()]
        vnorm = lat.norm_numerators(vecs)
        nden = lat.norm_denominator
        by_class: dict[tuple, list] = {}
        for i, g in enumerate(vkeys):
            by_class.setdefault(g, []).append(i)
        for (g, h), c in sorted(groups.items()):
            idx = np.array(by_class.get(g, []), dtype=np.int64)
            if not len(idx):
                continue
            # 24 n = 12 h + 12 (l,l)
            q24 = [Fraction(12 * h) + Fraction(12 * int(v), nden) for v in vnorm[idx]]
            for i, qn in zip(idx.tolist(), q24):
                if qn >= QDEN * phi.qprec:
                    continue
                got = stored.get((int(qn), *vecs[i].tolist()), 0) if qn.denominator == 1 else None
                if got != c:
                    violations.append({"class": list(g), "hyperbolic_norm": str(h), "values": [str(c), str(got)],
                                       "at": [str(qn / QDEN), vecs[i].tolist()]})
            if len(violations) > 50:
                break
    return InvarianceReport("orbit", not violations, [{"orbits": len(groups)}], violations)


def _squarefree(n: int) -> bool:
    return all(e == 1 for e in sympy.factorint(n).values())


def od_class_invariance(phi: FourierSeries) -> InvarianceReport:
    """Class-level shadow of ``O(D(L))``-invariance up to an order-2 character.

    ``|f(n, l)|`` must depend only on ``(2n - (l,l), order of l in D(L), (l,l) mod 2)``;
    signs across the classes are reported, not judged.
    """
    lat = phi.lattice
    if not _squarefree(lat.level):
        raise ValueError(f"level {lat.level} is not squarefree; class-level transitivity is unavailable")
    vv = theta_decompose(phi)
    reps = lat.minimal_coset_reps
    buckets: dict[tuple, dict] = {}
    for g, (rep, nm) in reps.items():
        inv = lat.coset_invariants(rep)
        buckets.setdefault((inv.order, inv.norm_mod2), {})[g] = nm
    classes, violations, signs = [], [], {}
    for (order, norm), members in sorted(buckets.items()):
        exps = sorted({e for g in members for e in vv.components[g]})
        values: dict[str, list] = {}
        status = "pass"
        for e in exps:
            vals = []
            for g in members:
                if e >= vv.precision[g]:
                    continue  # not known for this class
                vals.append((g, vv.components[g].get(e, 0)))
            absvals = {abs(v) for _, v in vals}
            sgn = sorted({(v > 0) - (v < 0) for _, v in vals})
            values[str(2 * e)] = sorted({str(v) for _, v in vals})
            signs[f"order {order}, norm {norm}, hyperbolic {2 * e}"] = sgn
            if len(absvals) > 1:
                status = "fail"
                violations.append({"order": order, "norm": str(norm), "hyperbolic_norm": str(2 * e),
                                   "values": sorted(str(v) for v in absvals)})
        classes.append({"order": order, "norm": str(norm), "value_by_hyperbolic_norm": values, "status": status})
    return InvarianceReport("od-class", not violations, classes, violations, signs)
