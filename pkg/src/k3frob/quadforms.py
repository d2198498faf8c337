"""Rational quadratic forms: congruence diagonalization, the complete local
invariant set (rank, signature, discriminant class, Hasse invariants), exact
equivalence testing, and twisting.

Equivalence over Q is decided purely at the level of invariants; no isometry
matrix is ever searched for.  The Hasse invariant convention is
eps_v(<a_1..a_r>) = prod_{i<j} (a_i, a_j)_v.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import _linalg
from .numbers import (
    DomainError,
    Place,
    Rational,
    REAL_PLACE,
    hilbert_symbol,
    is_norm_of,
    rational_from_str,
    rational_to_str,
    relevant_places,
    squarefree_part,
)


class DegenerateFormError(DomainError):
    """Raised when a nondegenerate form is required; carries the radical dimension."""

    def __init__(self, radical_dim: int):
        self.radical_dim = radical_dim
        super().__init__(f"form is degenerate with radical of dimension {radical_dim}")


@dataclass(frozen=True)
class QuadraticForm:
    """A quadratic form given by a symmetric Gram matrix over Q."""

    gram: tuple[tuple[Rational, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", rows)
        if not _linalg.is_symmetric([list(r) for r in rows]):
            raise DomainError("Gram matrix must be symmetric")

    @property
    def rank(self) -> int:
        return len(self.gram)

    def matrix(self) -> _linalg.Matrix:
        return [list(row) for row in self.gram]

    def det(self) -> Rational:
        return _linalg.det(self.matrix())

    def is_nondegenerate(self) -> bool:
        return self.rank == 0 or self.det() != 0

    def to_json(self) -> str:
        return json.dumps({"gram": [[rational_to_str(x) for x in row] for row in self.gram]})

    @staticmethod
    def from_json(text: str) -> "QuadraticForm":
        data = json.loads(text)
        return QuadraticForm(
            tuple(tuple(rational_from_str(x) for x in row) for row in data["gram"])
        )


def diagonal_form(entries: Sequence[Rational]) -> QuadraticForm:
    """The diagonal form <a_1, ..., a_r>."""
    n = len(entries)
    return QuadraticForm(
        tuple(
            tuple(Fraction(entries[i]) if i == j else Fraction(0) for j in range(n))
            for i in range(n)
        )
    )


def hyperbolic_plane() -> QuadraticForm:
    return QuadraticForm(((Fraction(0), Fraction(1)), (Fraction(1), Fraction(0))))


@dataclass(frozen=True)
class DiagonalForm:
    """A congruence diagonalization: C^T G C = diag(entries), exactly."""

    entries: tuple[Rational, ...]
    congruence: tuple[tuple[Rational, ...], ...]

    def check_against(self, form: QuadraticForm) -> bool:
        c = [list(row) for row in self.congruence]
        d = _linalg.mat_mul(_linalg.mat_mul(_linalg.transpose(c), form.matrix()), c)
        n = len(self.entries)
        return all(
            d[i][j] == (self.entries[i] if i == j else 0) for i in range(n) for j in range(n)
        )


def diagonalize(form: QuadraticForm) -> DiagonalForm:
    """Symmetric congruence elimination with an exact witness matrix.

    When a diagonal pivot vanishes but an off-diagonal entry in its row is
    nonzero, the row/column addition trick first creates a usable pivot.
    """
    n = form.rank
    g = form.matrix()
    c = _linalg.identity(n)

    def add_col(dst: int, src: int, f: Fraction) -> None:
        # col_dst += f * col_src, symmetrically on rows; same op on C's columns
        for r in range(n):
            g[r][dst] += f * g[r][src]
        for r in range(n):
            g[dst][r] += f * g[src][r]
        for r in range(n):
            c[r][dst] += f * c[r][src]

    def swap_cols(i: int, j: int) -> None:
        for r in range(n):
            g[r][i], g[r][j] = g[r][j], g[r][i]
        g[i], g[j] = g[j], g[i]
        for r in range(n):
            c[r][i], c[r][j] = c[r][j], c[r][i]

    for i in range(n):
        if g[i][i] == 0:
            pivot = next((j for j in range(i + 1, n) if g[j][j] != 0), None)
            if pivot is not None:
                swap_cols(i, pivot)
            else:
                partner = next((j for j in range(i + 1, n) if g[i][j] != 0), None)
                if partner is None:
                    raise DegenerateFormError(radical_dim=n - i)
                add_col(i, partner, Fraction(1))
        inv = Fraction(1) / g[i][i]
        for j in range(i + 1, n):
            if g[i][j] != 0:
                add_col(j, i, -g[i][j] * inv)

    entries = tuple(g[i][i] for i in range(n))
    if any(e == 0 for e in entries):
        raise DegenerateFormError(radical_dim=sum(1 for e in entries if e == 0))
    return DiagonalForm(entries, tuple(tuple(row) for row in c))


@dataclass(frozen=True)
class FormInvariants:
    """Complete invariants of a nondegenerate rational quadratic form."""

    rank: int
    signature: tuple[int, int]
    disc_class: int
    hasse: tuple[tuple[Place, int], ...]

    def hasse_at(self, v: Place) -> int:
        for place, value in self.hasse:
            if place == v:
                return value
        return 1

    def hasse_dict(self) -> dict[Place, int]:
        return dict(self.hasse)

    def same_as(self, other: "FormInvariants") -> bool:
        if (self.rank, self.signature, self.disc_class) != (
            other.rank,
            other.signature,
            other.disc_class,
        ):
            return False
        places = {v for v, _ in self.hasse} | {v for v, _ in other.hasse}
        return all(self.hasse_at(v) == other.hasse_at(v) for v in places)

    def to_jsonable(self) -> dict:
        return {
            "rank": self.rank,
            "signature": list(self.signature),
            "disc": self.disc_class,
            "hasse": {str(v): e for v, e in self.hasse},
        }


def hasse_invariant(entries: Sequence[Rational], v: Place) -> int:
    result = 1
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            result *= hilbert_symbol(entries[i], entries[j], v)
    return result


def invariants(form: QuadraticForm) -> FormInvariants:
    diag = diagonalize(form)  # raises DegenerateFormError when singular
    entries = diag.entries
    pos = sum(1 for e in entries if e > 0)
    neg = len(entries) - pos
    disc = Fraction(1)
    for e in entries:
        disc *= e
    places = relevant_places(*entries)
    hasse = tuple((v, hasse_invariant(entries, v)) for v in places)
    return FormInvariants(
        rank=len(entries),
        signature=(pos, neg),
        disc_class=squarefree_part(disc),
        hasse=hasse,
    )


def is_equivalent(q1: QuadraticForm, q2: QuadraticForm) -> bool:
    """Equivalence of nondegenerate forms over Q: equal rank, signature,
    discriminant class, and Hasse invariants at every place."""
    return invariants(q1).same_as(invariants(q2))


def twist(form: QuadraticForm, m: Rational) -> QuadraticForm:
    """The form with its Gram matrix scaled by the nonzero rational m."""
    m = Fraction(m)
    if m == 0:
        raise DomainError("twist by zero is not a quadratic form")
    return QuadraticForm(tuple(tuple(m * x for x in row) for row in form.gram))


def hasse_epsilon_twist(form: QuadraticForm, m: Rational, v: Place) -> int:
    """Closed-form Hasse invariant of the twisted form:

        eps_v(Q(m)) = eps_v(Q) * (disc(Q)^(r-1) * (-1)^(r(r-1)/2), m)_v.
    """
    m = Fraction(m)
    if m == 0:
        raise DomainError("twist by zero is not a quadratic form")
    diag = diagonalize(form)
    r = len(diag.entries)
    disc = Fraction(1)
    for e in diag.entries:
        disc *= e
    correction_arg = disc ** (r - 1) * Fraction(-1) ** (r * (r - 1) // 2)
    return hasse_invariant(diag.entries, v) * hilbert_symbol(correction_arg, m, v)


class TwistClass(enum.Enum):
    """Which positive twists of an even-rank form are isometric to it."""

    ALL_POSITIVE_M = "all-positive-m"
    NORMS_OF_QI = "norms-of-Q(i)"
    NOT_APPLICABLE = "not-applicable"


def twist_class(form: QuadraticForm) -> TwistClass:
    """Classify an even-rank nondegenerate form by (disc class, rank mod 4):

    - disc 1 with rank = 0 mod 4, or disc -1 with rank = 2 mod 4: Q(m) is
      isometric to Q for every rational m > 0;
    - disc 1 with rank = 2 mod 4, or disc -1 with rank = 0 mod 4: Q(m) is
      isometric to Q exactly for m in the norm group of Q(i), i.e. sums of
      two squares;
    - any other discriminant class: neither rule applies.
    """
    inv = invariants(form)
    if inv.rank % 2:
        raise DomainError("twist classification requires even rank")
    r4 = inv.rank % 4
    if inv.disc_class == 1:
        return TwistClass.ALL_POSITIVE_M if r4 == 0 else TwistClass.NORMS_OF_QI
    if inv.disc_class == -1:
        return TwistClass.ALL_POSITIVE_M if r4 == 2 else TwistClass.NORMS_OF_QI
    return TwistClass.NOT_APPLICABLE


def twist_is_equivalent_predicted(form: QuadraticForm, m: Rational) -> bool:
    """Predicted verdict of is_equivalent(Q, Q(m)) for m > 0 from the twist class."""
    m = Fraction(m)
    if m <= 0:
        raise DomainError("prediction applies to positive twists")
    cls = twist_class(form)
    if cls is TwistClass.ALL_POSITIVE_M:
        return True
    if cls is TwistClass.NORMS_OF_QI:
        return is_norm_of(m, Fraction(1))
    raise DomainError("no prediction for this discriminant class")


def direct_sum(*forms: QuadraticForm) -> QuadraticForm:
    """Block-diagonal sum; rank and signature add, discriminants multiply."""
    total = sum(f.rank for f in forms)
    rows = [[Fraction(0)] * total for _ in range(total)]
    offset = 0
    for f in forms:
        for i in range(f.rank):
            for j in range(f.rank):
                rows[offset + i][offset + j] = f.gram[i][j]
        offset += f.rank
    return QuadraticForm(tuple(tuple(row) for row in rows))


def congruent_by(form: QuadraticForm, c: _linalg.Matrix) -> QuadraticForm:
    """C^T G C for an (invertible) rational matrix C."""
    g = _linalg.mat_mul(_linalg.mat_mul(_linalg.transpose(c), form.matrix()), c)
    return QuadraticForm(tuple(tuple(row) for row in g))
