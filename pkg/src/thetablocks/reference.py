"""Published lattice data the verification campaigns compare against.

Vectors are given in dual coordinates ``(l, alpha_i)``, i.e. as integer
combinations of the dual basis; embedding bases are in lattice coordinates.
"""

from fractions import Fraction as F

# (norm, order in D(L)) -> vectors up to sign, for the reflective q^0 classes of Psi
REFLECTIVE_TYPES = {
    "L4": {
        (F(1), 2): [(2, 1, 1, 1)],
        (F(2, 5), 5): [(0, 1, 1, 0), (0, 1, -1, 0), (0, 1, 0, 1), (0, 1, 0, -1), (0, 0, 1, 1), (0, 0, 1, -1)],
        (F(1, 5), 10): [(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)],
    },
    "L6": {
        (F(1), 2): [(2, 1, 0, 0, -1, 0), (0, 0, 0, 0, 1, 1)],
        (F(2, 3), 3): [(0, 0, 1, 0, 0, 0), (0, 0, 0, 1, 0, 0), (0, 0, 1, -1, 0, 0),
                       (0, 1, 0, 0, 0, -1), (0, 1, 0, 0, 0, 1)],
        (F(1, 3), 6): [(0, 1, 0, 0, 0, 0), (0, 0, 0, 0, 0, 1)],
    },
}

# number of classes of D(L4) per (norm mod 2, order) as published
PUBLISHED_CENSUS_L4 = {(F(1), 2): 1, (F(2, 5), 5): 20, (F(1, 5), 10): 31}

PUBLISHED_LATTICE_DATA = {"L4": {"determinant": 500, "level": 10}, "L6": {"determinant": 108, "level": 6}}

_h = F(1, 2)

# bases of the overlattice, written in the basis of L; each must have the target Gram
EMBEDDINGS = {
    "L4": ("A4dual5", [
        [(-_h, _h, _h, _h), (0, 1, 0, 0), (_h, _h, _h, -_h), (1, 0, 0, 0)],
        [(0, _h, -_h, _h), (0, 1, 0, 0), (0, _h, _h, _h), (1, 0, 0, 0)],
    ]),
    "L6": ("3A2", [
        [(0, _h, 0, 0, 0, _h), (-1, 0, 0, 0, -1, 0), (0, 0, 1, 0, 0, 0), (0, 0, 0, 1, 0, 0),
         (0, 0, 0, 0, 1, 0), (0, _h, 0, 0, 0, -_h)],
        [(-_h, _h, 0, 0, 0, _h), (0, 0, 0, 0, -1, 0), (0, 0, 1, 0, 0, 0), (0, 0, 0, 1, 0, 0),
         (1, 0, 0, 0, 1, 0), (-_h, _h, 0, 0, 0, -_h)],
    ]),
}

# the two displayed final identities: lhs = first - second
IDENTITY_67 = (
    (3, 1, 1, 1),
    "eta^-6 th(1)^3 th(2)^2 th(3)^2 th(4) th(5) th(8)",
    "eta^-6 th(1)^2 th(2)^2 th(3)^2 th(4)^2 th(5) th(7)",
    "eta^-6 th(1)^3 th(2) th(3) th(4)^2 th(5)^2 th(6)",
)
IDENTITY_49 = (
    (1, 2, 1, 3, 1, 1),
    "eta^-3 th(1)^4 th(2) th(3) th(4)^2 th(7)",
    "eta^-3 th(1)^3 th(2)^3 th(3) th(5) th(7)",
    "eta^-3 th(1)^5 th(2)^2 th(6) th(7)",
)
