"""Finite-dimensional graded Frobenius-algebra models of cohomology rings.

A model is a super-commutative graded algebra over Q with a counit supported
in top degree whose induced pairing is nondegenerate.  The comultiplication is
the pairing-dual of the multiplication, correspondences are plain linear maps,
and transposes are pairing-adjoints.  Everything is exact (Fraction) and all
tensor identities are checked by exhaustive evaluation on basis tuples.

Vectors are sparse ``{basis index: Fraction}`` dicts; structure constants are
sparse ``{(i, j): vector}`` with zero products omitted.  All structural maps
here have even degree, so no Koszul signs arise when tensoring them; the only
signs live inside the multiplication tables themselves (e.g. exterior models).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import _linalg
from .numbers import DomainError, Rational, rational_from_str, rational_to_str
from .quadforms import QuadraticForm, direct_sum, invariants

Vector = dict[int, Fraction]
Tensor2 = dict[tuple[int, int], Fraction]
Tensor3 = dict[tuple[int, int, int], Fraction]


# ---------------------------------------------------------------------------
# sparse vector / tensor helpers

def vec_add_into(acc: Vector, v: Vector, c: Fraction = Fraction(1)) -> None:
    if c == 0:
        return
    for i, x in v.items():
        s = acc.get(i, Fraction(0)) + c * x
        if s == 0:
            acc.pop(i, None)
        else:
            acc[i] = s


def vec_scale(v: Vector, c: Fraction) -> Vector:
    return {} if c == 0 else {i: c * x for i, x in v.items()}


def vec_eq(u: Vector, v: Vector) -> bool:
    return u == v


def vec_dense(v: Vector, dim: int) -> list[Fraction]:
    out = [Fraction(0)] * dim
    for i, x in v.items():
        out[i] = x
    return out


def tensor_add_into(acc: dict, key: tuple, c: Fraction) -> None:
    if c == 0:
        return
    s = acc.get(key, Fraction(0)) + c
    if s == 0:
        acc.pop(key, None)
    else:
        acc[key] = s


class GradedFrobeniusAlgebra:
    """A graded algebra with unit, counit, and the induced Frobenius pairing."""

    def __init__(
        self,
        degrees: Sequence[int],
        mult: dict[tuple[int, int], Vector],
        unit: Vector,
        counit: Sequence[Rational],
        frobenius_degree: int,
        label: str = "",
        toy: bool = False,
        ns_dim: Optional[int] = None,
    ):
        self.degrees = tuple(int(d) for d in degrees)
        self.dim = len(self.degrees)
        self.mult = {
            key: {i: Fraction(x) for i, x in vec.items() if x != 0}
            for key, vec in mult.items()
            if any(x != 0 for x in vec.values())
        }
        self.unit = {i: Fraction(x) for i, x in unit.items() if x != 0}
        self.counit = tuple(Fraction(x) for x in counit)
        self.frobenius_degree = int(frobenius_degree)
        self.label = label
        self.toy = toy
        self.ns_dim = ns_dim  # size of the algebraic degree-2 block, if recorded
        self.top_degree = max(self.degrees) if self.degrees else 0
        self._pairing: Optional[_linalg.Matrix] = None
        self._pairing_inv: Optional[_linalg.Matrix] = None
        self._delta_cache: dict[int, Tensor2] = {}

    # -- basic algebra operations ------------------------------------------

    def mul_basis(self, i: int, j: int) -> Vector:
        return self.mult.get((i, j), {})

    def mul(self, u: Vector, v: Vector) -> Vector:
        out: Vector = {}
        for i, x in u.items():
            for j, y in v.items():
                prod = self.mult.get((i, j))
                if prod:
                    vec_add_into(out, prod, x * y)
        return out

    def eps(self, v: Vector) -> Fraction:
        return sum((x * self.counit[i] for i, x in v.items()), Fraction(0))

    def pairing_value(self, u: Vector, v: Vector) -> Fraction:
        return self.eps(self.mul(u, v))

    # -- derived structure ---------------------------------------------------

    def pairing(self) -> _linalg.Matrix:
        """Gram matrix of the Frobenius pairing beta(x, y) = eps(x*y)."""
        if self._pairing is None:
            b = _linalg.zeros(self.dim, self.dim)
            for (i, j), prod in self.mult.items():
                val = sum((x * self.counit[k] for k, x in prod.items()), Fraction(0))
                b[i][j] = val
            self._pairing = b
        return self._pairing

    def pairing_inverse(self) -> _linalg.Matrix:
        if self._pairing_inv is None:
            try:
                self._pairing_inv = _linalg.inverse(self.pairing())
            except ZeroDivisionError:
                raise DomainError("Frobenius pairing is degenerate") from None
        return self._pairing_inv

    def copairing(self) -> Tensor2:
        """The pairing-dual diagonal class in M (x) M."""
        g = self.pairing_inverse()
        out: Tensor2 = {}
        for i in range(self.dim):
            for j in range(self.dim):
                if g[i][j] != 0:
                    out[(i, j)] = g[i][j]
        return out

    def point_class(self) -> Vector:
        """The top-degree class normalized against the counit (eps = 1)."""
        top = [i for i in range(self.dim) if self.degrees[i] == self.top_degree]
        if len(top) != 1:
            raise DomainError("model has no distinguished point class (top degree not a line)")
        i = top[0]
        if self.counit[i] == 0:
            raise DomainError("counit vanishes on the top-degree line")
        return {i: Fraction(1) / self.counit[i]}

    def delta_basis(self, i: int) -> Tensor2:
        """Comultiplication of a basis vector: the pairing-dual of mult,
        delta(x) = sum_{k,j} ginv[k][j] (x * e_k) (x) e_j."""
        if i not in self._delta_cache:
            g = self.pairing_inverse()
            out: Tensor2 = {}
            for k in range(self.dim):
                prod = self.mult.get((i, k))
                if not prod:
                    continue
                grow = g[k]
                for j in range(self.dim):
                    gj = grow[j]
                    if gj == 0:
                        continue
                    for a, x in prod.items():
                        tensor_add_into(out, (a, j), x * gj)
            self._delta_cache[i] = out
        return self._delta_cache[i]

    def delta(self, v: Vector) -> Tensor2:
        out: Tensor2 = {}
        for i, x in v.items():
            for key, c in self.delta_basis(i).items():
                tensor_add_into(out, key, x * c)
        return out

    def iterated_delta(self, v: Vector, parts: int) -> dict[tuple[int, ...], Fraction]:
        """delta applied (parts - 1) times: M -> M^(x parts), splitting the
        last tensor slot each time; coassociativity makes the order immaterial."""
        out: dict[tuple[int, ...], Fraction] = {(i,): x for i, x in v.items()}
        for _ in range(parts - 1):
            nxt: dict[tuple[int, ...], Fraction] = {}
            for key, c in out.items():
                last = key[-1]
                for (a, b), d in self.delta_basis(last).items():
                    tensor_add_into(nxt, key[:-1] + (a, b), c * d)
            out = nxt
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** d for d in self.degrees)

    def small_diagonal_tensor(self) -> Tensor3:
        """Class of the small diagonal in M^(x3): (delta (x) id) applied to the
        copairing.  Contracting it with beta on all three slots against
        u (x) v (x) w returns eps(u v w)."""
        out: Tensor3 = {}
        for (i, j), c in self.copairing().items():
            for (a, b), d in self.delta_basis(i).items():
                tensor_add_into(out, (a, b, j), c * d)
        return out

    # -- serialization ---------------------------------------------------------

    def to_jsonable(self) -> dict:
        mult_triples = []
        for (i, j), prod in sorted(self.mult.items()):
            for k, x in sorted(prod.items()):
                mult_triples.append([i, j, k, rational_to_str(x)])
        return {
            "degrees": list(self.degrees),
            "mult": mult_triples,
            "pairing": [[rational_to_str(x) for x in row] for row in self.pairing()],
            "frobenius_degree": self.frobenius_degree,
        }

    @staticmethod
    def from_jsonable(data: dict) -> "GradedFrobeniusAlgebra":
        degrees = [int(d) for d in data["degrees"]]
        mult: dict[tuple[int, int], Vector] = {}
        for i, j, k, val in data["mult"]:
            mult.setdefault((int(i), int(j)), {})[int(k)] = rational_from_str(val)
        unit_candidates = [i for i, d in enumerate(degrees) if d == 0]
        if len(unit_candidates) != 1:
            raise DomainError("model descriptor must have a one-dimensional degree-0 part")
        unit = {unit_candidates[0]: Fraction(1)}
        pairing = [[rational_from_str(x) for x in row] for row in data["pairing"]]
        counit = pairing[unit_candidates[0]]
        return GradedFrobeniusAlgebra(
            degrees, mult, unit, counit, int(data["frobenius_degree"])
        )

    def __repr__(self) -> str:
        kind = "toy " if self.toy else ""
        return f"<{kind}model {self.label or '?'} dim={self.dim} top={self.top_degree}>"


# ---------------------------------------------------------------------------
# model builders

def build_k3_model(
    ns_form: QuadraticForm, tr_form: QuadraticForm, label: str = "k3"
) -> GradedFrobeniusAlgebra:
    """Cohomology model of a K3-type surface from an algebraic/transcendental
    splitting of the degree-2 intersection form.

    Basis: unit in degree 0, one vector per row of the combined form in degree
    2, and a point class in degree 4 with counit 1.  Degree-2 classes multiply
    into the point class through the form.  A genuine K3 model has rank 22 and
    signature (3, 19); other shapes are allowed but flagged as toys.
    """
    form = direct_sum(ns_form, tr_form)
    inv = invariants(form)  # raises on degenerate input
    toy = not (form.rank == 22 and inv.signature == (3, 19))
    r = form.rank
    dim = r + 2
    pt = r + 1
    degrees = [0] + [2] * r + [4]
    mult: dict[tuple[int, int], Vector] = {}
    for i in range(dim):
        mult[(0, i)] = {i: Fraction(1)}
        if i != 0:
            mult[(i, 0)] = {i: Fraction(1)}
    for a in range(r):
        for b in range(r):
            val = form.gram[a][b]
            if val != 0:
                mult[(1 + a, 1 + b)] = {pt: val}
    counit = [Fraction(0)] * dim
    counit[pt] = Fraction(1)
    return GradedFrobeniusAlgebra(
        degrees,
        mult,
        unit={0: Fraction(1)},
        counit=counit,
        frobenius_degree=2,
        label=label,
        toy=toy,
        ns_dim=ns_form.rank,
    )


def default_k3_model() -> GradedFrobeniusAlgebra:
    """The 24-dimensional model built from the Fermat-quartic splitting."""
    from .k3families import catalog

    ns = catalog("FermatNS").rational_form()
    tr = catalog("FermatT").rational_form()
    return build_k3_model(ns, tr, label="k3-default")


def trivial_model() -> GradedFrobeniusAlgebra:
    """The one-dimensional algebra Q in degree 0."""
    return GradedFrobeniusAlgebra(
        degrees=[0],
        mult={(0, 0): {0: Fraction(1)}},
        unit={0: Fraction(1)},
        counit=[Fraction(1)],
        frobenius_degree=0,
        label="point",
    )


def build_exterior_model(g: int) -> GradedFrobeniusAlgebra:
    """Exterior algebra on 2g degree-1 generators with Koszul signs; models
    the cohomology of a g-dimensional complex torus.  Dimension 4^g, counit
    the top-wedge coefficient."""
    if g < 1:
        raise DomainError("g must be at least 1")
    n = 2 * g
    subsets = sorted(
        (tuple(s) for k in range(n + 1) for s in itertools.combinations(range(n), k)),
        key=lambda s: (len(s), s),
    )
    index = {s: i for i, s in enumerate(subsets)}
    degrees = [len(s) for s in subsets]
    mult: dict[tuple[int, int], Vector] = {}
    for s in subsets:
        for t in subsets:
            if set(s) & set(t):
                continue
            merged = s + t
            sign = 1
            arr = list(merged)
            for i in range(len(arr)):
                for j in range(i + 1, len(arr)):
                    if arr[i] > arr[j]:
                        sign = -sign
            mult[(index[s], index[t])] = {index[tuple(sorted(merged))]: Fraction(sign)}
    counit = [Fraction(0)] * len(subsets)
    counit[index[tuple(range(n))]] = Fraction(1)
    return GradedFrobeniusAlgebra(
        degrees,
        mult,
        unit={index[()]: Fraction(1)},
        counit=counit,
        frobenius_degree=2 * g,
        label=f"exterior-g{g}",
    )


# ---------------------------------------------------------------------------
# axiom checking

@dataclass(frozen=True)
class AxiomReport:
    ok: bool
    failed_axiom: Optional[str] = None
    witness: Optional[tuple] = None

    def to_jsonable(self) -> dict:
        return {
            "ok": self.ok,
            "failed_axiom": self.failed_axiom,
            "witness": list(self.witness) if self.witness else None,
        }


def check_frobenius_axioms(a: GradedFrobeniusAlgebra) -> AxiomReport:
    """Exhaustively verify unit, grading, super-commutativity, associativity,
    pairing nondegeneracy, and the Frobenius compatibility of mult with its
    pairing-dual comultiplication.  Reports the first violated axiom with a
    witness tuple of basis indices."""
    dim = a.dim
    for i in range(dim):
        e = {i: Fraction(1)}
        if a.mul(a.unit, e) != e or a.mul(e, a.unit) != e:
            return AxiomReport(False, "unit", (i,))
    for (i, j), prod in a.mult.items():
        want = a.degrees[i] + a.degrees[j]
        if any(a.degrees[k] != want for k in prod):
            return AxiomReport(False, "grading", (i, j))
    for i in range(dim):
        for j in range(i, dim):
            sign = -1 if (a.degrees[i] % 2 and a.degrees[j] % 2) else 1
            lhs = a.mul_basis(i, j)
            rhs = vec_scale(a.mul_basis(j, i), Fraction(sign))
            if lhs != rhs:
                return AxiomReport(False, "super-commutativity", (i, j))
    for i in range(dim):
        for j in range(dim):
            ij = a.mul_basis(i, j)
            for k in range(dim):
                left = a.mul(ij, {k: Fraction(1)})
                right = a.mul({i: Fraction(1)}, a.mul_basis(j, k))
                if left != right:
                    return AxiomReport(False, "associativity", (i, j, k))
    try:
        a.pairing_inverse()
    except DomainError:
        return AxiomReport(False, "pairing-nondegeneracy", None)
    # Frobenius condition: (id (x) mu)(delta (x) id) = delta mu = (mu (x) id)(id (x) delta)
    for i in range(dim):
        for j in range(dim):
            middle = a.delta(a.mul_basis(i, j))
            left: Tensor2 = {}
            for (p, q), c in a.delta_basis(i).items():
                prod = a.mul_basis(q, j)
                for t, x in prod.items():
                    tensor_add_into(left, (p, t), c * x)
            if left != middle:
                return AxiomReport(False, "frobenius-condition", (i, j, "left"))
            right: Tensor2 = {}
            for (p, q), c in a.delta_basis(j).items():
                prod = a.mul_basis(i, p)
                for t, x in prod.items():
                    tensor_add_into(right, (t, q), c * x)
            if right != middle:
                return AxiomReport(False, "frobenius-condition", (i, j, "right"))
    return AxiomReport(True)


def check_coalgebra_laws(a: GradedFrobeniusAlgebra) -> bool:
    """Counit law and coassociativity of the derived comultiplication."""
    for i in range(a.dim):
        e = {i: Fraction(1)}
        d = a.delta_basis(i)
        left: Vector = {}
        right: Vector = {}
        for (p, q), c in d.items():
            vec_add_into(left, {q: c * a.counit[p]})
            vec_add_into(right, {p: c * a.counit[q]})
        if left != e or right != e:
            return False
        one_sided: dict[tuple[int, int, int], Fraction] = {}
        other: dict[tuple[int, int, int], Fraction] = {}
        for (p, q), c in d.items():
            for (x, y), cc in a.delta_basis(p).items():
                tensor_add_into(one_sided, (x, y, q), c * cc)
            for (x, y), cc in a.delta_basis(q).items():
                tensor_add_into(other, (p, x, y), c * cc)
        if one_sided != other:
            return False
    return True


# ---------------------------------------------------------------------------
# maps between models and their classification

@dataclass
class AlgebraMap:
    """A linear map between two models, as a dense matrix on basis vectors
    (columns indexed by the source basis)."""

    source: GradedFrobeniusAlgebra
    target: GradedFrobeniusAlgebra
    matrix: _linalg.Matrix

    def __post_init__(self) -> None:
        self.matrix = [[Fraction(x) for x in row] for row in self.matrix]
        if len(self.matrix) != self.target.dim or any(
            len(row) != self.source.dim for row in self.matrix
        ):
            raise DomainError(
                f"matrix shape {len(self.matrix)}x{len(self.matrix[0]) if self.matrix else 0}"
                f" does not map dim {self.source.dim} into dim {self.target.dim}"
            )

    def apply(self, v: Vector) -> Vector:
        out: Vector = {}
        for j, x in v.items():
            for i in range(self.target.dim):
                m = self.matrix[i][j]
                if m != 0:
                    s = out.get(i, Fraction(0)) + m * x
                    if s == 0:
                        out.pop(i, None)
                    else:
                        out[i] = s
        return out

    def column(self, j: int) -> Vector:
        return {i: self.matrix[i][j] for i in range(self.target.dim) if self.matrix[i][j] != 0}

    def is_degree_preserving(self) -> bool:
        return all(
            self.matrix[i][j] == 0
            for i in range(self.target.dim)
            for j in range(self.source.dim)
            if self.target.degrees[i] != self.source.degrees[j]
        )

    def adjoint_matrix(self) -> _linalg.Matrix:
        """The pairing-adjoint ("transpose correspondence"):
        beta_X(adj(y), x) = beta_Y(y, Gamma(x))."""
        bx_inv = self.source.pairing_inverse()
        by = self.target.pairing()
        return _linalg.transpose(_linalg.mat_mul(_linalg.mat_mul(by, self.matrix), bx_inv))


def identity_map(a: GradedFrobeniusAlgebra) -> AlgebraMap:
    return AlgebraMap(a, a, _linalg.identity(a.dim))


@dataclass(frozen=True)
class MapClassification:
    nonzero: bool
    degree_preserving: bool
    unit_preserved: bool
    algebra_hom: bool
    invertible: bool
    degree_c: Optional[Rational]
    orthogonal: bool
    frobenius_iso: bool
    diagonal_preserved: bool
    small_diagonal_preserved: bool

    @property
    def algebra_iso(self) -> bool:
        return self.algebra_hom and self.invertible

    @property
    def crit_orthogonal_iso(self) -> bool:
        """Algebra isomorphism that is orthogonal (inverse = adjoint)."""
        return self.algebra_iso and self.orthogonal

    @property
    def crit_degree_one(self) -> bool:
        """Algebra isomorphism of degree 1."""
        return self.algebra_iso and self.degree_c == 1

    @property
    def crit_diagonals(self) -> bool:
        """Isomorphism pushing both the diagonal and the small diagonal forward."""
        return self.invertible and self.diagonal_preserved and self.small_diagonal_preserved

    @property
    def criteria_agree(self) -> bool:
        """Pairwise agreement of the three isomorphism criteria.

        The equivalence is a theorem for degree-preserving maps (the analogue
        of weight-0 correspondences); degree-mixing algebra maps, e.g. the
        unipotent x -> x + (divisor functional)(x) * point, can satisfy the
        degree-one criterion without being orthogonal.
        """
        return (
            self.crit_orthogonal_iso
            == self.crit_degree_one
            == self.crit_diagonals
            == self.frobenius_iso
        )

    def to_jsonable(self) -> dict:
        return {
            "nonzero": self.nonzero,
            "degree_preserving": self.degree_preserving,
            "unit_preserved": self.unit_preserved,
            "algebra_hom": self.algebra_hom,
            "invertible": self.invertible,
            "degree_c": rational_to_str(self.degree_c) if self.degree_c is not None else None,
            "orthogonal": self.orthogonal,
            "frobenius_iso": self.frobenius_iso,
            "diagonal_preserved": self.diagonal_preserved,
            "small_diagonal_preserved": self.small_diagonal_preserved,
            "criteria_agree": self.criteria_agree,
        }


def classify_map(gamma: AlgebraMap) -> MapClassification:
    """Full classification of a correspondence between two models.

    degree_c is the scale on the point class (the coefficient c with adjoint
    pullback of the fundamental class equal to c times the fundamental class);
    orthogonality means the pairing-adjoint is a two-sided inverse; the
    diagonal conditions compare pushforwards of the dual diagonal and small
    diagonal classes, contracted through the pairings.
    """
    x, y = gamma.source, gamma.target
    r = gamma.matrix
    nonzero = any(any(v != 0 for v in row) for row in r)
    unit_preserved = gamma.apply(x.unit) == y.unit
    algebra_hom = True
    for i in range(x.dim):
        ci = gamma.column(i)
        for j in range(x.dim):
            lhs = gamma.apply(x.mul_basis(i, j))
            rhs = y.mul(ci, gamma.column(j))
            if lhs != rhs:
                algebra_hom = False
                break
        if not algebra_hom:
            break
    invertible = x.dim == y.dim and _linalg.det(r) != 0
    try:
        degree_c: Optional[Fraction] = y.eps(gamma.apply(x.point_class()))
    except DomainError:
        degree_c = None
    w = gamma.adjoint_matrix()
    orthogonal = (
        invertible
        and _linalg.mat_eq(_linalg.mat_mul(w, r), _linalg.identity(x.dim))
        and _linalg.mat_eq(_linalg.mat_mul(r, w), _linalg.identity(y.dim))
    )
    # (Gamma (x) Gamma) pushes the dual diagonal to the target dual diagonal
    # iff R Bx^{-1} R^T = By^{-1}.
    diagonal_preserved = invertible and _linalg.mat_eq(
        _linalg.mat_mul(_linalg.mat_mul(r, x.pairing_inverse()), _linalg.transpose(r)),
        y.pairing_inverse(),
    )
    small_diagonal_preserved = invertible and _small_diagonal_preserved(gamma, w)
    frobenius_iso = algebra_hom and invertible and degree_c == 1
    return MapClassification(
        nonzero=nonzero,
        degree_preserving=gamma.is_degree_preserving(),
        unit_preserved=unit_preserved,
        algebra_hom=algebra_hom,
        invertible=invertible,
        degree_c=degree_c,
        orthogonal=orthogonal,
        frobenius_iso=frobenius_iso,
        diagonal_preserved=diagonal_preserved,
        small_diagonal_preserved=small_diagonal_preserved,
    )


def _small_diagonal_preserved(gamma: AlgebraMap, w: _linalg.Matrix) -> bool:
    """(Gamma^(x3)) pushforward of the small diagonal equals the target's,
    tested through the (nondegenerate) pairings: for all basis triples of the
    target, eps_X(adj(e_a) adj(e_b) adj(e_c)) must equal eps_Y(e_a e_b e_c)."""
    x, y = gamma.source, gamma.target
    cols = [{i: w[i][j] for i in range(x.dim) if w[i][j] != 0} for j in range(y.dim)]
    bx = x.pairing()
    # u[c] = Bx . adj(e_c), so that eps_X(p * adj(e_c)) = p . u[c]
    u = [_linalg.mat_vec(bx, vec_dense(c, x.dim)) for c in cols]
    for a in range(y.dim):
        for b in range(y.dim):
            v_ab = x.mul(cols[a], cols[b])
            e_ab = y.mul_basis(a, b)
            for c in range(y.dim):
                lhs = sum((val * u[c][i] for i, val in v_ab.items()), Fraction(0))
                rhs = y.eps(y.mul(e_ab, {c: Fraction(1)}))
                if lhs != rhs:
                    return False
    return True


# ---------------------------------------------------------------------------
# Beauville-Voisin small-diagonal identity

def bv_small_diagonal_identity(a: GradedFrobeniusAlgebra) -> bool:
    """Check that the small diagonal decomposes through the point class:

        [small diag] = [diag](x)o + (slots 1<->3) + (slots 2<->3)
                       - o(x)o(x)1 - o(x)1(x)o - 1(x)o(x)o.
    """
    o = a.point_class()
    gamma = a.copairing()
    lhs = a.small_diagonal_tensor()
    rhs: Tensor3 = {}
    for (i, j), c in gamma.items():
        for k, ok in o.items():
            tensor_add_into(rhs, (i, j, k), c * ok)  # diagonal in slots (1,2)
            tensor_add_into(rhs, (i, k, j), c * ok)  # diagonal in slots (1,3)
            tensor_add_into(rhs, (k, i, j), c * ok)  # diagonal in slots (2,3)
    for i, oi in o.items():
        for j, oj in o.items():
            for k, uk in a.unit.items():
                tensor_add_into(rhs, (i, j, k), -oi * oj * uk)
                tensor_add_into(rhs, (i, k, j), -oi * oj * uk)
                tensor_add_into(rhs, (k, i, j), -oi * oj * uk)
    return lhs == rhs


def diagonal_pushforward_point(a: GradedFrobeniusAlgebra) -> Vector:
    """Multiplication applied to the dual diagonal: the Euler class, which for
    a surface model equals (Euler characteristic) times the point class."""
    out: Vector = {}
    for (i, j), c in a.copairing().items():
        prod = a.mul_basis(i, j)
        if prod:
            vec_add_into(out, prod, c)
    return out


# ---------------------------------------------------------------------------
# refined projectors

@dataclass(frozen=True)
class CKProjectors:
    pi0: _linalg.Matrix
    pi2alg: _linalg.Matrix
    pi2tr: _linalg.Matrix
    pi4: _linalg.Matrix

    def all(self) -> list[_linalg.Matrix]:
        return [self.pi0, self.pi2alg, self.pi2tr, self.pi4]


def ck_projectors(
    a: GradedFrobeniusAlgebra,
    ns_basis: Sequence[Vector],
    o: Optional[Vector] = None,
) -> CKProjectors:
    """Weight projectors of a surface model refined by an orthogonal basis of
    the algebraic part of degree 2.

    pi0 sends x to beta(x, o) * unit, pi4 sends x to eps(x) * o, and the
    algebraic degree-2 projector is the sum of beta(x, E_i)/beta(E_i, E_i) E_i
    over the given orthogonal non-isotropic divisor classes; the transcendental
    projector is the rest of degree 2.
    """
    if o is None:
        o = a.point_class()
    dim = a.dim
    for idx, e in enumerate(ns_basis):
        if any(a.degrees[i] != 2 for i in e):
            raise DomainError(f"basis vector #{idx} is not of degree 2")
        if a.pairing_value(e, e) == 0:
            raise DomainError(f"basis vector #{idx} is isotropic")
        for jdx in range(idx):
            if a.pairing_value(ns_basis[jdx], e) != 0:
                raise DomainError(f"basis vectors #{jdx} and #{idx} are not orthogonal")

    b = a.pairing()

    def rank_one(img: Vector, dual_of: Vector, scale: Fraction) -> _linalg.Matrix:
        # x -> scale * beta(x, dual_of) * img;  matrix: img_i * (B dual_of)_j
        bd = _linalg.mat_vec(b, vec_dense(dual_of, dim))
        m = _linalg.zeros(dim, dim)
        for i, xi in img.items():
            for j in range(dim):
                if bd[j] != 0:
                    m[i][j] = scale * xi * bd[j]
        return m

    pi0 = rank_one(a.unit, o, Fraction(1))
    pi4 = rank_one(o, a.unit, Fraction(1))
    pi2alg = _linalg.zeros(dim, dim)
    for e in ns_basis:
        block = rank_one(e, e, Fraction(1) / a.pairing_value(e, e))
        for i in range(dim):
            for j in range(dim):
                pi2alg[i][j] += block[i][j]
    pi2 = _linalg.zeros(dim, dim)
    for i in range(dim):
        if a.degrees[i] == 2:
            pi2[i][i] = Fraction(1)
    pi2tr = [[pi2[i][j] - pi2alg[i][j] for j in range(dim)] for i in range(dim)]
    return CKProjectors(pi0, pi2alg, pi2tr, pi4)


def verify_ck_projectors(a: GradedFrobeniusAlgebra, p: CKProjectors) -> dict:
    """Idempotence, mutual orthogonality, completeness, pairing-transpose
    symmetry of the degree-2 projectors, and annihilation of the point class
    by the transcendental projector."""
    mats = p.all()
    ident = _linalg.identity(a.dim)
    idempotent = all(_linalg.mat_eq(_linalg.mat_mul(m, m), m) for m in mats)
    orthogonal = all(
        not any(any(v != 0 for v in row) for row in _linalg.mat_mul(mats[i], mats[j]))
        for i in range(4)
        for j in range(4)
        if i != j
    )
    total = _linalg.zeros(a.dim, a.dim)
    for m in mats:
        for i in range(a.dim):
            for j in range(a.dim):
                total[i][j] += m[i][j]
    complete = _linalg.mat_eq(total, ident)

    b, binv = a.pairing(), a.pairing_inverse()

    def self_adjoint(m: _linalg.Matrix) -> bool:
        return _linalg.mat_eq(_linalg.transpose(_linalg.mat_mul(_linalg.mat_mul(b, m), binv)), m)

    o = vec_dense(a.point_class(), a.dim)
    tr_kills_point = all(v == 0 for v in _linalg.mat_vec(p.pi2tr, o))
    return {
        "idempotent": idempotent,
        "mutually_orthogonal": orthogonal,
        "complete": complete,
        "alg_self_adjoint": self_adjoint(p.pi2alg),
        "tr_self_adjoint": self_adjoint(p.pi2tr),
        "tr_annihilates_point": tr_kills_point,
    }


# ---------------------------------------------------------------------------
# assembling an isomorphism from block isometries

def assemble_gamma(
    source: GradedFrobeniusAlgebra,
    target: GradedFrobeniusAlgebra,
    ns_block: _linalg.Matrix,
    tr_block: _linalg.Matrix,
) -> AlgebraMap:
    """Block correspondence from isometries of the algebraic and transcendental
    degree-2 summands: unit to unit, point class to point class, M on the
    algebraic block and T on the transcendental block.  Both blocks must be
    genuine isometries of the respective forms (a twisted isometry is refused).
    """
    if source.ns_dim is None or target.ns_dim is None:
        raise DomainError("both models must record their algebraic/transcendental split")
    r_s, r_t = source.ns_dim, target.ns_dim
    if r_s != r_t:
        raise DomainError("algebraic blocks have different ranks")
    n_s = source.dim - 2 - r_s
    ns_block = [[Fraction(v) for v in row] for row in ns_block]
    tr_block = [[Fraction(v) for v in row] for row in tr_block]

    def gram_block(model: GradedFrobeniusAlgebra, start: int, size: int) -> _linalg.Matrix:
        bmat = model.pairing()
        return [[bmat[1 + start + i][1 + start + j] for j in range(size)] for i in range(size)]

    g_ns_s, g_ns_t = gram_block(source, 0, r_s), gram_block(target, 0, r_s)
    g_tr_s, g_tr_t = gram_block(source, r_s, n_s), gram_block(target, r_s, n_s)
    if not _linalg.mat_eq(
        _linalg.mat_mul(_linalg.mat_mul(_linalg.transpose(ns_block), g_ns_t), ns_block), g_ns_s
    ):
        raise DomainError("algebraic block is not an isometry of the forms")
    if not _linalg.mat_eq(
        _linalg.mat_mul(_linalg.mat_mul(_linalg.transpose(tr_block), g_tr_t), tr_block), g_tr_s
    ):
        raise DomainError("transcendental block is not an isometry of the forms")

    dim = source.dim
    m = _linalg.zeros(dim, dim)
    m[0][0] = Fraction(1)
    m[dim - 1][dim - 1] = Fraction(1)
    for i in range(r_s):
        for j in range(r_s):
            m[1 + i][1 + j] = ns_block[i][j]
    for i in range(n_s):
        for j in range(n_s):
            m[1 + r_s + i][1 + r_s + j] = tr_block[i][j]
    return AlgebraMap(source, target, m)


# ---------------------------------------------------------------------------
# abelian (exterior-power) side

@dataclass(frozen=True)
class AbelianGammaReport:
    degree: int
    scalar: Rational
    adjoint_law_ok: bool
    algebra_hom: bool
    frobenius_iso: bool

    def to_jsonable(self) -> dict:
        return {
            "degree": self.degree,
            "scalar": rational_to_str(self.scalar),
            "adjoint_law_ok": self.adjoint_law_ok,
            "algebra_hom": self.algebra_hom,
            "frobenius_iso": self.frobenius_iso,
        }


def exterior_power_map(
    model: GradedFrobeniusAlgebra, g: int, f1: Sequence[Sequence[int]], lam: Rational
) -> AlgebraMap:
    """The map acting on degree k as the k-th exterior power of f1 / lam."""
    n = 2 * g
    a = _linalg.as_fraction_matrix(f1)
    subsets = sorted(
        (tuple(s) for k in range(n + 1) for s in itertools.combinations(range(n), k)),
        key=lambda s: (len(s), s),
    )
    index = {s: i for i, s in enumerate(subsets)}
    lam = Fraction(lam)
    m = _linalg.zeros(len(subsets), len(subsets))
    for t in subsets:
        k = len(t)
        scale = lam ** (-k)
        for s in itertools.combinations(range(n), k):
            minor = _linalg.minor_det(a, list(s), list(t)) if k else Fraction(1)
            if minor != 0:
                m[index[s]][index[t]] = scale * minor
    return AlgebraMap(model, model, m)


def av_gamma_check(g: int, lam: Rational, f1: Sequence[Sequence[int]]) -> AbelianGammaReport:
    """Verify, on the exterior model, that the exterior-power map gamma of
    f1/lam satisfies adj(gamma) . gamma = (det f1 / lam^{2g}) id, and that it
    is a Frobenius isomorphism exactly when lam^{2g} = det f1 (equivalently,
    when the isogeny degree |det f1| is matched by the 2g-th power of lam with
    the correct sign)."""
    lam = Fraction(lam)
    if lam == 0:
        raise DomainError("lam must be nonzero")
    a = _linalg.as_fraction_matrix(f1)
    d = _linalg.det(a)
    if d == 0:
        raise DomainError("f1 must be nonsingular")
    model = build_exterior_model(g)
    gamma = exterior_power_map(model, g, f1, lam)
    w = gamma.adjoint_matrix()
    scalar = d / lam ** (2 * g)
    expected = [[scalar if i == j else Fraction(0) for j in range(model.dim)] for i in range(model.dim)]
    adjoint_law_ok = _linalg.mat_eq(_linalg.mat_mul(w, gamma.matrix), expected)
    cls = classify_map(gamma)
    frob = cls.frobenius_iso
    if frob != (scalar == 1):
        raise AssertionError("classification disagrees with the adjoint scalar")
    return AbelianGammaReport(
        degree=abs(int(d)) if d.denominator == 1 else 0,
        scalar=scalar,
        adjoint_law_ok=adjoint_law_ok,
        algebra_hom=cls.algebra_hom,
        frobenius_iso=frob,
    )


def av_frobenius_possible(deg: int, g: int) -> bool:
    """True iff deg is the 2g-th power of a positive integer, the exact
    condition for an isogeny of that degree to induce a Frobenius-compatible
    isomorphism of the cohomology algebras."""
    if deg < 1:
        raise DomainError("degree must be a positive integer")
    e = 2 * g
    r = round(deg ** (1.0 / e))
    return any(c > 0 and c**e == deg for c in (r - 1, r, r + 1))


# ---------------------------------------------------------------------------
# Calabi-Yau scaling kernel

def cy_scaling_solvable(d: int, s: Rational, fld: str, frobenius: bool) -> bool:
    """Solvability of the scaling system b^2 = a^d s (with the extra Frobenius
    normalization a^d s = 1) for graded algebra maps between cohomologies of
    odd-Picard-rank Calabi-Yau d-folds whose degree ratio is s.

    Over the reals everything is solvable.  Over the rationals, a (non
    Frobenius) algebra isomorphism exists iff d is odd or s is a square, while
    the Frobenius condition forces s to be a d-th power of a rational.
    """
    if d < 3:
        raise DomainError("dimension must be at least 3")
    s = Fraction(s)
    if s <= 0:
        raise DomainError("degree ratio must be positive")
    if fld not in ("rationals", "reals"):
        raise DomainError("field must be 'rationals' or 'reals'")
    if fld == "reals":
        return True
    if not frobenius:
        from .numbers import is_rational_square

        return d % 2 == 1 or is_rational_square(s)
    from .numbers import is_rational_dth_power

    return is_rational_dth_power(s, d)
