"""Even positive-definite lattices and their discriminant forms.

A lattice is given by its Gram matrix in a fixed basis ``alpha_1..alpha_n``.
Dual vectors are written in L-coordinates (rational) but most routines work
with *dual coordinates* ``c_i = (v, alpha_i)``, which are integers exactly when
``v`` lies in the dual lattice.  In dual coordinates the norm is
``c^T G^{-1} c`` and ``L`` itself is ``G Z^n``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Sequence

__all__ = [
    "GramLattice",
    "DualVector",
    "DiscriminantGroup",
    "CosetClass",
    "NAMED_GRAMS",
    "named_lattice",
    "load_lattice",
    "smith_normal_form",
    "mat_inverse",
    "mat_det",
    "check_embedding",
]


Matrix = tuple[tuple[Fraction, ...], ...]


def _as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0])))
        for i in range(len(a))
    )


def mat_transpose(a: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(a[i][j]) for i in range(len(a))) for j in range(len(a[0])))


def mat_det(a: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-valued Gaussian elimination."""
    m = [list(map(Fraction, row)) for row in a]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


def mat_inverse(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(row[n:]) for row in m)


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return ``(S, U, V)`` with ``U A V = S`` diagonal, ``S[i][i] | S[i+1][i+1]``.

    ``U`` and ``V`` are unimodular integer matrices.  Only square nonsingular
    input is needed here, but rectangular input works as well.
    """
    s = [[int(x) for x in row] for row in a]
    nr, nc = len(s), (len(s[0]) if s else 0)
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        s[dst] = [x + f * y for x, y in zip(s[dst], s[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        for row in s:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    for t in range(min(nr, nc)):
        while True:
            nonzero = [(abs(s[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if s[i][j]]
            if not nonzero:
                break
            _, pi, pj = min(nonzero)
            swap_rows(t, pi)
            swap_cols(t, pj)
            clean = True
            for i in range(t + 1, nr):
                q = s[i][t] // s[t][t]
                if q:
                    add_row(i, t, -q)
                if s[i][t]:
                    clean = False
            for j in range(t + 1, nc):
                q = s[t][j] // s[t][t]
                if q:
                    add_col(j, t, -q)
                if s[t][j]:
                    clean = False
            if not clean:
                continue
            # divisibility: pivot must divide the remaining block
            bad = next(
                ((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc) if s[i][j] % s[t][t]), None
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
    return s, u, v


@dataclass(frozen=True)
class DualVector:
    """An element of ``L (x) Q`` stored in L-coordinates."""

    lattice: "GramLattice" = field(repr=False, compare=False)
    coords: tuple[Fraction, ...]

    @classmethod
    def from_dual(cls, lattice: "GramLattice", dual: Sequence) -> "DualVector":
        inv = lattice.dual_gram
        coords = tuple(sum((inv[i][j] * Fraction(dual[j]) for j in range(lattice.rank)), Fraction(0))
                       for i in range(lattice.rank))
        return cls(lattice, coords)

    @cached_property
    def dual(self) -> tuple[Fraction, ...]:
        """Pairings ``(v, alpha_i)``; integral iff the vector lies in the dual lattice."""
        g = self.lattice.gram
        return tuple(sum((g[i][j] * self.coords[j] for j in range(len(g))), Fraction(0)) for i in range(len(g)))

    @property
    def in_dual(self) -> bool:
        return all(x.denominator == 1 for x in self.dual)

    @property
    def norm(self) -> Fraction:
        return sum((a * b for a, b in zip(self.coords, self.dual)), Fraction(0))

    def __neg__(self) -> "DualVector":
        return DualVector(self.lattice, tuple(-x for x in self.coords))

    def int_dual(self) -> tuple[int, ...]:
        if not self.in_dual:
            raise ValueError(f"{self.coords} is not in the dual lattice")
        return tuple(int(x) for x in self.dual)


@dataclass(frozen=True)
class DiscriminantGroup:
    invariant_factors: tuple[int, ...]
    generator_lifts: tuple[tuple[int, ...], ...]  # dual coordinates
    order: int


@dataclass(frozen=True)
class CosetClass:
    representative: tuple[int, ...]  # dual coordinates
    order: int
    norm_mod2: Fraction


def _mod2(x: Fraction) -> Fraction:
    return x - 2 * math.floor(x / 2)


@dataclass(frozen=True)
class GramLattice:
    gram: tuple[tuple[int, ...], ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValueError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Gram matrix must be symmetric")
        if any(g[i][i] % 2 for i in range(n)):
            raise ValueError("lattice must be even (even diagonal)")
        for k in range(1, n + 1):
            if mat_det([row[:k] for row in g[:k]]) <= 0:
                raise ValueError("Gram matrix must be positive definite")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def __repr__(self):
        return f"GramLattice({self.name or list(map(list, self.gram))})"

    def to_json(self):
        return self.name if self.name in NAMED_GRAMS else [list(r) for r in self.gram]

    @cached_property
    def dual_gram(self) -> Matrix:
        """``G^{-1}``; row ``i`` is the dual basis vector ``w_i`` in L-coordinates."""
        if self.rank == 0:
            return ()
        return mat_inverse(self.gram)

    @cached_property
    def determinant(self) -> int:
        return int(mat_det(self.gram)) if self.rank else 1

    @cached_property
    def level(self) -> int:
        n = 1
        q = self.dual_gram
        for i in range(self.rank):
            n = math.lcm(n, (q[i][i] / 2).denominator)
            for j in range(i + 1, self.rank):
                n = math.lcm(n, q[i][j].denominator)
        return n

    def norm(self, dual: Sequence[int]) -> Fraction:
        """Norm of the dual vector with dual coordinates ``dual``."""
        q = self.dual_gram
        r = range(self.rank)
        return sum((q[i][j] * dual[i] * dual[j] for i in r for j in r if dual[i] and dual[j]), Fraction(0))

    def pairing(self, a: Sequence[int], b: Sequence[int]) -> Fraction:
        q = self.dual_gram
        r = range(self.rank)
        return sum((q[i][j] * a[i] * b[j] for i in r for j in r if a[i] and b[j]), Fraction(0))

    def dual_vector(self, dual: Sequence) -> DualVector:
        return DualVector.from_dual(self, dual)

    def vector(self, coords: Sequence) -> DualVector:
        return DualVector(self, tuple(Fraction(x) for x in coords))

    # -- discriminant group -------------------------------------------------

    @cached_property
    def _snf(self):
        return smith_normal_form(self.gram)

    @cached_property
    def discriminant_group(self) -> DiscriminantGroup:
        s, u, _ = self._snf
        uinv = mat_inverse(u)
        factors, lifts = [], []
        for i in range(self.rank):
            d = s[i][i]
            if d > 1:
                factors.append(d)
                lifts.append(tuple(int(uinv[k][i]) for k in range(self.rank)))
        return DiscriminantGroup(tuple(factors), tuple(lifts), math.prod(factors))

    @cached_property
    def _coset_map(self):
        s, u, _ = self._snf
        rows = [(tuple(u[i]), s[i][i]) for i in range(self.rank) if s[i][i] > 1]
        return rows

    def coset_key(self, dual: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of ``dual + L`` in ``D(L) = (+) Z/d_i``."""
        return tuple(sum(a * b for a, b in zip(row, dual)) % d for row, d in self._coset_map)

    def order(self, dual: Sequence[int]) -> int:
        o = 1
        for k, (_, d) in zip(self.coset_key(dual), self._coset_map):
            o = math.lcm(o, d // math.gcd(k, d))
        return o

    def coset_invariants(self, v: DualVector | Sequence[int]) -> CosetClass:
        if isinstance(v, DualVector):
            dual = v.int_dual()
        else:
            dual = tuple(v)
            if any(Fraction(x).denominator != 1 for x in dual):
                raise ValueError(f"{dual} is not in the dual lattice")
            dual = tuple(int(x) for x in dual)
        return CosetClass(dual, self.order(dual), _mod2(self.norm(dual)))

    def classes(self) -> Iterator[tuple[int, ...]]:
        """One dual-coordinate representative per class of ``D(L)``."""
        disc = self.discriminant_group
        for ks in product(*(range(d) for d in disc.invariant_factors)):
            yield tuple(sum(k * g[i] for k, g in zip(ks, disc.generator_lifts)) for i in range(self.rank))

    def coset_census(self, norm_mod2, ord: int) -> int:
        target = _mod2(Fraction(norm_mod2))
        return sum(1 for c in self.classes() if self.order(c) == ord and _mod2(self.norm(c)) == target)

    def census_table(self) -> dict[tuple[Fraction, int], int]:
        table: dict[tuple[Fraction, int], int] = {}
        for c in self.classes():
            key = (_mod2(self.norm(c)), self.order(c))
            table[key] = table.get(key, 0) + 1
        return dict(sorted(table.items(), key=lambda kv: (kv[0][1], kv[0][0])))

    # -- enumeration --------------------------------------------------------

    @cached_property
    def _ldl(self):
        # Q = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2, Q = G^{-1}
        n = self.rank
        q = [list(row) for row in self.dual_gram]
        d = [Fraction(0)] * n
        mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            d[i] = q[i][i]
            for j in range(i + 1, n):
                mu[i][j] = q[i][j] / d[i]
            for j in range(i + 1, n):
                for k in range(i + 1, n):
                    q[j][k] -= d[i] * mu[i][j] * mu[i][k]
        return d, mu

    @cached_property
    def norm_denominator(self) -> int:
        den = 1
        for row in self.dual_gram:
            for x in row:
                den = math.lcm(den, x.denominator)
        return den

    @cached_property
    def _scaled_dual_gram(self):
        import numpy as np

        return np.array([[int(x * self.norm_denominator) for x in row] for row in self.dual_gram],
                        dtype=np.int64).reshape(self.rank, self.rank)

    def norm_numerators(self, duals):
        """Integer array ``norm_denominator * (c, c)`` for rows ``c`` of dual coordinates."""
        import numpy as np

        c = np.asarray(duals, dtype=np.int64).reshape(-1, self.rank)
        return np.einsum("ij,jk,ik->i", c, self._scaled_dual_gram, c)

    def coset_keys(self, duals):
        """Row-wise ``coset_key`` for an integer array of dual coordinates."""
        import numpy as np

        c = np.asarray(duals, dtype=np.int64).reshape(-1, self.rank)
        if not self._coset_map:
            return np.zeros((len(c), 0), dtype=np.int64)
        u = np.array([row for row, _ in self._coset_map], dtype=np.int64)
        d = np.array([f for _, f in self._coset_map], dtype=np.int64)
        return (c @ u.T) % d

    def dual_vectors_array(self, bound):
        """Dual coordinates with norm ``<= bound`` as a lexicographically sorted int array.

        Fincke-Pohst pruning runs in floating point with a safety margin; the
        final membership test is exact integer arithmetic.
        """
        import numpy as np

        bound = Fraction(bound)
        n = self.rank
        if n == 0:
            return np.zeros((1 if bound >= 0 else 0, 0), dtype=np.int64)
        d, mu = self._ldl
        df = [float(x) for x in d]
        muf = [[float(x) for x in row] for row in mu]
        slack = 1e-9 * (1 + float(bound))
        blocks: list[tuple[int, int, tuple[int, ...]]] = []
        x = [0] * n

        def rec(i: int, rem: float):
            s = sum(muf[i][j] * x[j] for j in range(i + 1, n))
            r = math.sqrt(max(rem, 0.0) / df[i]) + 1e-7
            lo, hi = math.ceil(-s - r), math.floor(-s + r)
            if i == 0:
                if lo <= hi:
                    blocks.append((lo, hi, tuple(x[1:])))
                return
            for xi in range(lo, hi + 1):
                x[i] = xi
                rec(i - 1, rem - df[i] * (xi + s) ** 2)
            x[i] = 0

        rec(n - 1, float(bound) + slack)
        total = sum(hi - lo + 1 for lo, hi, _ in blocks)
        out = np.empty((total, n), dtype=np.int64)
        pos = 0
        for lo, hi, rest in blocks:
            k = hi - lo + 1
            out[pos:pos + k, 0] = np.arange(lo, hi + 1)
            out[pos:pos + k, 1:] = rest
            pos += k
        keep = self.norm_numerators(out) * bound.denominator <= bound.numerator * self.norm_denominator
        out = out[keep]
        return out[np.lexsort(out.T[::-1])]

    def dual_vectors_up_to(self, bound) -> list[tuple[int, ...]]:
        """All dual coordinate vectors with norm ``<= bound``, sorted."""
        return [tuple(row) for row in self.dual_vectors_array(bound).tolist()]

    def enumerate_dual_by_norm_order(self, norm, ord: int) -> list[DualVector]:
        norm = Fraction(norm)
        found = [c for c in self.dual_vectors_up_to(norm) if self.norm(c) == norm and self.order(c) == ord]
        return [self.dual_vector(c) for c in found]

    @cached_property
    def minimal_coset_reps(self) -> dict[tuple[int, ...], tuple[tuple[int, ...], Fraction]]:
        """For each class of ``D(L)``: a representative of minimal norm and that norm."""
        import numpy as np

        total = self.discriminant_group.order
        bound = Fraction(1)
        while True:
            vecs = self.dual_vectors_array(bound)
            keys = [tuple(k) for k in self.coset_keys(vecs).tolist()]
            norms = self.norm_numerators(vecs)
            reps: dict[tuple[int, ...], tuple[tuple[int, ...], Fraction]] = {}
            # smallest norm first; ties go to the lexicographically first vector
            for i in np.lexsort((np.arange(len(vecs)), norms)).tolist():
                if keys[i] not in reps:
                    reps[keys[i]] = (tuple(vecs[i].tolist()), Fraction(int(norms[i]), self.norm_denominator))
            if len(reps) == total:
                return dict(sorted(reps.items()))
            bound *= 2

    @cached_property
    def max_minimal_norm(self) -> Fraction:
        return max(nm for _, nm in self.minimal_coset_reps.values())


def _cartan_A(n: int) -> list[list[int]]:
    return [[2 if i == j else -1 if abs(i - j) == 1 else 0 for j in range(n)] for i in range(n)]


def _block_diag(*blocks) -> list[list[int]]:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return out


NAMED_GRAMS: dict[str, list[list[int]]] = {
    "L4": [[4, 2, 2, 2], [2, 6, 1, 1], [2, 1, 6, 1], [2, 1, 1, 6]],
    "L6": [
        [4, 2, 0, 0, -2, 0],
        [2, 4, 0, 0, -1, 0],
        [0, 0, 2, -1, 0, 0],
        [0, 0, -1, 2, 0, 0],
        [-2, -1, 0, 0, 2, 1],
        [0, 0, 0, 0, 1, 4],
    ],
    "A1": [[2]],
    "A2": _cartan_A(2),
    "A4": _cartan_A(4),
    "A4dual5": [[int(5 * x) for x in row] for row in mat_inverse(_cartan_A(4))],
    "3A2": _block_diag(_cartan_A(2), _cartan_A(2), _cartan_A(2)),
}


def named_lattice(name: str) -> GramLattice:
    try:
        return GramLattice(NAMED_GRAMS[name], name=name)
    except KeyError:
        raise ValueError(f"unknown lattice {name!r}; known: {', '.join(NAMED_GRAMS)}") from None


def load_lattice(spec) -> GramLattice:
    """Resolve a name, a JSON string/file path, or a nested list into a lattice."""
    if isinstance(spec, GramLattice):
        return spec
    if isinstance(spec, str):
        if spec in NAMED_GRAMS:
            return named_lattice(spec)
        text = spec
        if not spec.lstrip().startswith("["):
            with open(spec) as fh:
                text = fh.read()
        spec = json.loads(text)
    for name, g in NAMED_GRAMS.items():
        if [list(r) for r in spec] == g:
            return GramLattice(g, name=name)
    return GramLattice(spec)


RANK0 = GramLattice((), name="Q")


def check_embedding(target_gram, vectors: Sequence[DualVector | Sequence], lattice: GramLattice) -> bool:
    """True iff ``vectors`` (L-coordinates) have Gram ``target_gram`` and span a lattice containing ``L``."""
    target = _as_matrix(target_gram)
    if len(vectors) != len(target):
        raise ValueError(f"expected {len(target)} vectors, got {len(vectors)}")
    cols = [v.coords if isinstance(v, DualVector) else tuple(map(Fraction, v)) for v in vectors]
    if any(len(c) != lattice.rank for c in cols):
        raise ValueError("vector length does not match lattice rank")
    vmat = mat_transpose(cols)  # columns are the vectors
    gram = mat_mul(mat_mul(mat_transpose(vmat), lattice.gram), vmat)
    if gram != target:
        return False
    if len(cols) != lattice.rank or mat_det(vmat) == 0:
        return False
    return all(x.denominator == 1 for row in mat_inverse(vmat) for x in row)
