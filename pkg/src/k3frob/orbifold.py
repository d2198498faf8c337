"""Symmetric-group sector combinatorics and the discrete-torsion orbifold
star product on sums of tensor powers of a surface cohomology model, with an
independent generating-function oracle for the invariant dimensions.

A sector element lives over a permutation g and takes values in A^(x O(g)),
one tensor slot per orbit of g (slots sorted by minimal element).  The product
of sectors g and h restricts both factors to the joint orbits of (g, h),
multiplies slotwise together with the discrete-torsion sign and the
obstruction class, and pushes forward to the orbits of gh by iterated
comultiplication.  The obstruction factor at a defect-one joint orbit is the
Euler class of the coefficient algebra, which for a K3-type model is 24 times
the point class.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .frobenius import (
    GradedFrobeniusAlgebra,
    Vector,
    diagonal_pushforward_point,
    vec_add_into,
)
from .numbers import DomainError

DEFAULT_SEED = 20260810


# ---------------------------------------------------------------------------
# permutations (0-based)

@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        imgs = tuple(int(i) for i in self.images)
        object.__setattr__(self, "images", imgs)
        if sorted(imgs) != list(range(len(imgs))):
            raise DomainError(f"{imgs} is not a permutation")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self * other)(i) = self(other(i))."""
        if self.n != other.n:
            raise DomainError("size mismatch")
        return Permutation(tuple(self.images[other.images[i]] for i in range(self.n)))

    __mul__ = compose

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def conjugated_by(self, k: "Permutation") -> "Permutation":
        """k self k^{-1}."""
        return k.compose(self).compose(k.inverse())

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n)))

    @staticmethod
    def transposition(n: int, i: int, j: int) -> "Permutation":
        imgs = list(range(n))
        imgs[i], imgs[j] = j, i
        return Permutation(tuple(imgs))

    @staticmethod
    def from_cycles(n: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        imgs = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + type(cyc)([cyc[0]])):
                imgs[a] = b
        return Permutation(tuple(imgs))

    def cycle_string(self) -> str:
        parts = []
        for orb in orbits(self):
            if len(orb) > 1:
                cyc, cur = [orb[0]], self.images[orb[0]]
                while cur != orb[0]:
                    cyc.append(cur)
                    cur = self.images[cur]
                parts.append("(" + " ".join(str(c) for c in cyc) + ")")
        return "".join(parts) or "e"


def all_permutations(n: int) -> Iterable[Permutation]:
    for imgs in itertools.permutations(range(n)):
        yield Permutation(imgs)


OrbitPartition = tuple[tuple[int, ...], ...]


def orbits(g: Permutation) -> OrbitPartition:
    """Cycle partition of {0..n-1}, blocks sorted by minimal element."""
    seen = [False] * g.n
    blocks = []
    for start in range(g.n):
        if seen[start]:
            continue
        cur, block = start, []
        while not seen[cur]:
            seen[cur] = True
            block.append(cur)
            cur = g.images[cur]
        blocks.append(tuple(sorted(block)))
    return tuple(blocks)


def joint_orbits(g: Permutation, h: Permutation) -> OrbitPartition:
    """Orbits of the subgroup generated by g and h (connected components of
    the union of both functional graphs)."""
    if g.n != h.n:
        raise DomainError("size mismatch")
    parent = list(range(g.n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    for i in range(g.n):
        union(i, g.images[i])
        union(i, h.images[i])
    groups: dict[int, list[int]] = {}
    for i in range(g.n):
        groups.setdefault(find(i), []).append(i)
    return tuple(sorted((tuple(sorted(b)) for b in groups.values()), key=lambda b: b[0]))


def _orbits_within(g: Permutation, block: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Orbits of g contained in a g-stable block, sorted by minimal element."""
    members = set(block)
    return sorted((orb for orb in orbits(g) if orb[0] in members), key=lambda o: o[0])


def graph_defect(g: Permutation, h: Permutation, t: Sequence[int]) -> int:
    """d(g,h)(t) = (2 + |t| - |t/g| - |t/h| - |t/gh|) / 2 for a joint orbit t."""
    t = tuple(sorted(int(i) for i in t))
    if t not in joint_orbits(g, h):
        raise DomainError(f"{t} is not an orbit of the subgroup generated by g and h")
    gh = g.compose(h)
    num = 2 + len(t) - len(_orbits_within(g, t)) - len(_orbits_within(h, t)) - len(
        _orbits_within(gh, t)
    )
    if num % 2:
        raise AssertionError(f"graph defect is not an integer at {t}")
    return num // 2


def epsilon_sign(g: Permutation, h: Permutation) -> int:
    """Discrete-torsion sign (-1)^{(n - |O(g)| - |O(h)| + |O(gh)|)/2}."""
    if g.n != h.n:
        raise DomainError("size mismatch")
    exponent = g.n - len(orbits(g)) - len(orbits(h)) + len(orbits(g.compose(h)))
    if exponent % 2:
        raise AssertionError("discrete-torsion exponent is not an integer")
    return -1 if (exponent // 2) % 2 else 1


# ---------------------------------------------------------------------------
# sector elements

SparseTensor = dict[tuple[int, ...], Fraction]


@dataclass
class SectorElement:
    """An element of the g-sector: a tensor over the orbits of g with values
    in the coefficient algebra, plus the degree shift 2 age(g) carried by the
    sector itself."""

    algebra: GradedFrobeniusAlgebra
    g: Permutation
    value: SparseTensor

    def __post_init__(self) -> None:
        arity = len(orbits(self.g))
        clean: SparseTensor = {}
        for key, c in self.value.items():
            if len(key) != arity:
                raise DomainError(f"tensor arity {len(key)} does not match {arity} orbits")
            c = Fraction(c)
            if c != 0:
                clean[tuple(key)] = c
        self.value = clean

    @property
    def n(self) -> int:
        return self.g.n

    @property
    def shift(self) -> int:
        return 2 * (self.n - len(orbits(self.g)))

    def is_zero(self) -> bool:
        return not self.value

    def total_degrees(self) -> set[int]:
        degs = self.algebra.degrees
        return {sum(degs[i] for i in key) + self.shift for key in self.value}

    def scaled(self, c: Fraction) -> "SectorElement":
        return SectorElement(self.algebra, self.g, {k: c * v for k, v in self.value.items()})

    def add(self, other: "SectorElement") -> "SectorElement":
        if other.g != self.g or other.algebra is not self.algebra:
            raise DomainError("can only add elements of the same sector")
        out = dict(self.value)
        for k, v in other.value.items():
            s = out.get(k, Fraction(0)) + v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return SectorElement(self.algebra, self.g, out)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SectorElement)
            and self.g == other.g
            and self.algebra is other.algebra
            and self.value == other.value
        )


def sector_from_vectors(
    algebra: GradedFrobeniusAlgebra, g: Permutation, factors: Sequence[Vector]
) -> SectorElement:
    """Outer product of one algebra vector per orbit slot."""
    if len(factors) != len(orbits(g)):
        raise DomainError("one factor per orbit required")
    value: SparseTensor = {(): Fraction(1)}
    for vec in factors:
        nxt: SparseTensor = {}
        for key, c in value.items():
            for i, x in vec.items():
                nxt[key + (i,)] = nxt.get(key + (i,), Fraction(0)) + c * x
        value = {k: v for k, v in nxt.items() if v != 0}
    return SectorElement(algebra, g, value)


def sector_unit(algebra: GradedFrobeniusAlgebra, g: Permutation) -> SectorElement:
    return sector_from_vectors(algebra, g, [algebra.unit] * len(orbits(g)))


def orbifold_unit(algebra: GradedFrobeniusAlgebra, n: int) -> SectorElement:
    """The unit of the whole orbifold ring: the unit tensor of the identity sector."""
    return sector_unit(algebra, Permutation.identity(n))


def obstruction_class(
    g: Permutation, h: Permutation, algebra: GradedFrobeniusAlgebra
) -> Optional[list[Vector]]:
    """The obstruction cycle on the joint orbits: None (zero) if some joint
    orbit has graph defect at least 2, otherwise one factor per joint orbit:
    the unit at defect 0 and the Euler class (24 times the point class on a
    K3-type model) at defect 1."""
    factors: list[Vector] = []
    euler: Optional[Vector] = None
    for t in joint_orbits(g, h):
        d = graph_defect(g, h, t)
        if d >= 2:
            return None
        if d == 0:
            factors.append(algebra.unit)
        else:
            if euler is None:
                euler = diagonal_pushforward_point(algebra)
            factors.append(euler)
    return factors


def star_product(x: SectorElement, y: SectorElement) -> SectorElement:
    """The orbifold product with discrete torsion.

    Restrict both factors to the joint orbits (multiplying the slots of each
    factor that merge), multiply slotwise, multiply by the discrete-torsion
    sign and the obstruction class, then push forward to the orbits of the
    product permutation by iterated comultiplication.
    """
    if x.n != y.n:
        raise DomainError("sector elements live over different symmetric groups")
    if x.algebra is not y.algebra:
        raise DomainError("sector elements have different coefficient algebras")
    a = x.algebra
    g, h = x.g, y.g
    gh = g.compose(h)
    if x.is_zero() or y.is_zero():
        return SectorElement(a, gh, {})

    joint = joint_orbits(g, h)
    obstruction = obstruction_class(g, h, a)
    if obstruction is None:
        return SectorElement(a, gh, {})
    sign = Fraction(epsilon_sign(g, h))

    rx = _restrict(x, joint)
    ry = _restrict(y, joint)

    merged: SparseTensor = {}
    for kx, cx in rx.items():
        for ky, cy in ry.items():
            slot_vecs = [a.mul_basis(i, j) for i, j in zip(kx, ky)]
            if any(not v for v in slot_vecs):
                continue
            for s, obs in enumerate(obstruction):
                if obs != a.unit:
                    slot_vecs[s] = a.mul(slot_vecs[s], obs)
            _accumulate_outer(merged, slot_vecs, sign * cx * cy)

    # push forward: split each joint orbit into the gh-orbits it contains
    gh_orbits = orbits(gh)
    slot_targets = []  # per joint slot: indices into gh_orbits
    position = {orb[0]: idx for idx, orb in enumerate(gh_orbits)}
    for t in joint:
        inside = _orbits_within(gh, t)
        slot_targets.append([position[orb[0]] for orb in inside])

    out: SparseTensor = {}
    arity = len(gh_orbits)
    for key, c in merged.items():
        partial: list[tuple[list[int], Fraction]] = [([0] * arity, c)]
        dead = False
        for s, targets in enumerate(slot_targets):
            split = a.iterated_delta({key[s]: Fraction(1)}, len(targets))
            if not split:
                dead = True
                break
            nxt: list[tuple[list[int], Fraction]] = []
            for assign, cc in partial:
                for skey, sc in split.items():
                    na = assign[:]
                    for tgt, val in zip(targets, skey):
                        na[tgt] = val
                    nxt.append((na, cc * sc))
            partial = nxt
        if dead:
            continue
        for assign, cc in partial:
            k = tuple(assign)
            s2 = out.get(k, Fraction(0)) + cc
            if s2 == 0:
                out.pop(k, None)
            else:
                out[k] = s2
    return SectorElement(a, gh, out)


def _restrict(x: SectorElement, joint: OrbitPartition) -> SparseTensor:
    """A^(x O(g)) -> A^(x O(g,h)): multiply the slots of each joint orbit."""
    a = x.algebra
    own = orbits(x.g)
    slot_of = {orb[0]: idx for idx, orb in enumerate(own)}
    groups = [[slot_of[orb[0]] for orb in _orbits_within(x.g, t)] for t in joint]
    out: SparseTensor = {}
    for key, c in x.value.items():
        slot_vecs: list[Vector] = []
        for members in groups:
            vec: Vector = {key[members[0]]: Fraction(1)}
            for s in members[1:]:
                vec = a.mul(vec, {key[s]: Fraction(1)})
                if not vec:
                    break
            slot_vecs.append(vec)
        if any(not v for v in slot_vecs):
            continue
        _accumulate_outer(out, slot_vecs, c)
    return out


def _accumulate_outer(acc: SparseTensor, slot_vecs: list[Vector], coeff: Fraction) -> None:
    keys = [()]
    coeffs = [coeff]
    for vec in slot_vecs:
        nkeys, ncoeffs = [], []
        for k, c in zip(keys, coeffs):
            for i, v in vec.items():
                nkeys.append(k + (i,))
                ncoeffs.append(c * v)
        keys, coeffs = nkeys, ncoeffs
    for k, c in zip(keys, coeffs):
        s = acc.get(k, Fraction(0)) + c
        if s == 0:
            acc.pop(k, None)
        else:
            acc[k] = s


def conjugation_action(k: Permutation, x: SectorElement) -> SectorElement:
    """Relabel the sector by k: the result lives over k g k^{-1}, with tensor
    slots transported along k's action on the orbits."""
    if k.n != x.n:
        raise DomainError("size mismatch")
    g2 = x.g.conjugated_by(k)
    own = orbits(x.g)
    new_orbits = orbits(g2)
    position = {orb[0]: idx for idx, orb in enumerate(new_orbits)}
    slot_map = [position[min(k(i) for i in orb)] for orb in own]
    value: SparseTensor = {}
    arity = len(new_orbits)
    for key, c in x.value.items():
        nk = [0] * arity
        for s, basis_idx in enumerate(key):
            nk[slot_map[s]] = basis_idx
        value[tuple(nk)] = value.get(tuple(nk), Fraction(0)) + c
    return SectorElement(x.algebra, g2, {kk: vv for kk, vv in value.items() if vv != 0})


# ---------------------------------------------------------------------------
# invariant dimensions and the generating-function oracle

_MONOMIAL_BUDGET = 200_000


def sn_invariant_dimension(
    n: int, algebra: GradedFrobeniusAlgebra, graded: bool = False
) -> int | dict[int, int]:
    """Dimension of the conjugation-invariant subspace of the orbifold sum,
    by orbit counting on the monomial basis (sector, slot assignment); with
    ``graded`` the count is broken down by total degree including the age
    shift 2(n - |O(g)|) of each sector."""
    perms = list(all_permutations(n))
    total_monomials = sum(algebra.dim ** len(orbits(g)) for g in perms)
    if total_monomials > _MONOMIAL_BUDGET:
        raise DomainError(
            f"{total_monomials} monomials exceed the budget {_MONOMIAL_BUDGET} (reduce n)"
        )
    # Precompute, per sector g and group element k, the relabeled sector and
    # the slot transport map.
    actions: dict[tuple[int, int], tuple[int, list[int]]] = {}
    perm_index = {g.images: i for i, g in enumerate(perms)}
    orbit_lists = [orbits(g) for g in perms]
    for gi, g in enumerate(perms):
        for ki, k in enumerate(perms):
            g2 = g.conjugated_by(k)
            new_pos = {orb[0]: idx for idx, orb in enumerate(orbits(g2))}
            slot_map = [new_pos[min(k(i) for i in orb)] for orb in orbit_lists[gi]]
            actions[(gi, ki)] = (perm_index[g2.images], slot_map)

    degs = algebra.degrees
    counts: dict[int, int] = {}
    total = 0
    for gi, g in enumerate(perms):
        slots = len(orbit_lists[gi])
        shift = 2 * (n - slots)
        for assignment in itertools.product(range(algebra.dim), repeat=slots):
            rep = (gi, assignment)
            canonical = rep
            for ki in range(len(perms)):
                g2i, slot_map = actions[(gi, ki)]
                relabeled = [0] * slots
                for s, b in enumerate(assignment):
                    relabeled[slot_map[s]] = b
                cand = (g2i, tuple(relabeled))
                if cand < canonical:
                    canonical = cand
            if canonical == rep:
                total += 1
                if graded:
                    deg = shift + sum(degs[b] for b in assignment)
                    counts[deg] = counts.get(deg, 0) + 1
    return counts if graded else total


def goettsche_oracle(n: int) -> dict[int, int]:
    """Graded Betti numbers of the Hilbert scheme of n points on a K3 surface
    from the standard generating function

        prod_{m>=1} (1 - t^{2m-2} q^m)^{-1} (1 - t^{2m} q^m)^{-22}
                    (1 - t^{2m+2} q^m)^{-1},

    expanded with exact integer arithmetic; returns degree -> Betti number."""
    if not 1 <= n <= 5:
        raise DomainError("oracle supports 1 <= n <= 5")
    series: list[dict[int, int]] = [{0: 1}] + [{} for _ in range(n)]
    for m in range(1, n + 1):
        for t_exp, mult in ((2 * m - 2, 1), (2 * m, 22), (2 * m + 2, 1)):
            factor: list[dict[int, int]] = [dict() for _ in range(n + 1)]
            for j in range(0, n // m + 1):
                factor[m * j][t_exp * j] = math.comb(mult - 1 + j, j)
            series = _series_mul(series, factor, n)
    return dict(sorted(series[n].items()))


def _series_mul(
    a: list[dict[int, int]], b: list[dict[int, int]], n: int
) -> list[dict[int, int]]:
    out: list[dict[int, int]] = [dict() for _ in range(n + 1)]
    for i in range(n + 1):
        if not a[i]:
            continue
        for j in range(n + 1 - i):
            if not b[j]:
                continue
            tgt = out[i + j]
            for ta, ca in a[i].items():
                for tb, cb in b[j].items():
                    key = ta + tb
                    tgt[key] = tgt.get(key, 0) + ca * cb
    return out


# ---------------------------------------------------------------------------
# randomized suites (deterministic under a fixed seed)

def random_sector_element(
    algebra: GradedFrobeniusAlgebra,
    n: int,
    rng: random.Random,
    terms: int = 2,
    coeff_bound: int = 3,
) -> SectorElement:
    g = Permutation(tuple(rng.sample(range(n), n)))
    slots = len(orbits(g))
    value: SparseTensor = {}
    for _ in range(terms):
        key = tuple(rng.randrange(algebra.dim) for _ in range(slots))
        c = Fraction(rng.randint(-coeff_bound, coeff_bound))
        if c != 0:
            value[key] = value.get(key, Fraction(0)) + c
    return SectorElement(algebra, g, {k: v for k, v in value.items() if v != 0})


@dataclass(frozen=True)
class AssociativityReport:
    n: int
    trials: int
    failures: int
    seed: int

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_jsonable(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "failures": self.failures,
            "seed": self.seed,
            "ok": self.ok,
        }


def associativity_trials(
    algebra: GradedFrobeniusAlgebra,
    n: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    terms: int = 1,
) -> AssociativityReport:
    """Randomized exact check that (x * y) * z = x * (y * z) in the orbifold ring."""
    rng = random.Random(seed)
    failures = 0
    for _ in range(trials):
        x = random_sector_element(algebra, n, rng, terms=terms)
        y = random_sector_element(algebra, n, rng, terms=terms)
        z = random_sector_element(algebra, n, rng, terms=terms)
        if star_product(star_product(x, y), z) != star_product(x, star_product(y, z)):
            failures += 1
    return AssociativityReport(n=n, trials=trials, failures=failures, seed=seed)
