"""Subspaces of PG(d, q) in canonical reduced row echelon form."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .field import FieldSpec, gf

MAX_D = 6
DIGITS = "0123456789"
EMPTY_ENCODING = "-"


class GeometryError(ValueError):
    """Bad input to a geometric operation (mismatched spaces, bad ranges)."""


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of an n-dimensional GF(q) vector space."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def rref(rows: Iterable[Sequence[int]], F: FieldSpec) -> list[list[int]]:
    """Reduced row echelon form over F with zero rows dropped."""
    M = [list(r) for r in rows]
    if not M:
        return []
    add, mul, neg, inv = F.add_table, F.mul_table, F.neg_table, F.inv_table
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        s = inv[M[r][c]]
        M[r] = [int(mul[s, x]) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = neg[M[i][c]]
                M[i] = [int(add[x, mul[f, y]]) for x, y in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return [row for row in M[:r] if any(row)]


@dataclass(frozen=True)
class Subspace:
    """A projective subspace of PG(d, q), stored by its canonical basis.

    ``rows`` is the RREF basis (pivots 1, increasing pivot columns), so equal
    subspaces have identical ``rows`` and hash/compare equal.
    """

    d: int
    q: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def field(self) -> FieldSpec:
        return gf(self.q)

    @property
    def proj_dim(self) -> int:
        return len(self.rows) - 1

    def encode(self) -> str:
        if not self.rows:
            return EMPTY_ENCODING
        return ";".join("".join(DIGITS[x] for x in row) for row in self.rows)

    def __str__(self):
        return self.encode()

    def __lt__(self, other: "Subspace") -> bool:
        return (len(self.rows), self.rows) < (len(other.rows), other.rows)

    def _same_space(self, other: "Subspace"):
        if (self.d, self.q) != (other.d, other.q):
            raise GeometryError(
                f"subspaces live in different spaces: PG({self.d},{self.q}) vs PG({other.d},{other.q})"
            )

    def span(self, other: "Subspace") -> "Subspace":
        self._same_space(other)
        return canonicalize(self.rows + other.rows, self.d, self.q)

    def meet(self, other: "Subspace") -> "Subspace":
        self._same_space(other)
        return self.perp().span(other.perp()).perp()

    def contains(self, other: "Subspace") -> bool:
        self._same_space(other)
        return self.span(other).proj_dim == self.proj_dim

    def perp(self) -> "Subspace":
        """Orthogonal complement under the standard dot product (the duality map)."""
        F = self.field
        n = self.d + 1
        if not self.rows:
            return full_space(self.d, self.q)
        pivots = [next(j for j, x in enumerate(row) if x) for row in self.rows]
        free = [j for j in range(n) if j not in pivots]
        basis = []
        for j in free:
            v = [0] * n
            v[j] = 1
            for row, pc in zip(self.rows, pivots):
                v[pc] = int(F.neg_table[row[j]])
            basis.append(v)
        return canonicalize(basis, self.d, self.q)

    def points(self) -> list["Subspace"]:
        """All points of the subspace, in canonical order."""
        F = self.field
        k = len(self.rows)
        pts = set()
        for coeffs in product(range(self.q), repeat=k):
            if any(coeffs):
                v = [0] * (self.d + 1)
                for c, row in zip(coeffs, self.rows):
                    if c:
                        v = [int(F.add_table[a, F.mul_table[c, b]]) for a, b in zip(v, row)]
                pts.add(canonicalize([v], self.d, self.q))
        return sorted(pts)


def canonicalize(rows: Iterable[Sequence[int]], d: int, q: int) -> Subspace:
    """Canonical Subspace spanned by ``rows`` (vectors of length d+1)."""
    rows = [tuple(r) for r in rows]
    for r in rows:
        if len(r) != d + 1:
            raise GeometryError(f"vector {r} does not have length {d + 1}")
        if any(not 0 <= x < q for x in r):
            raise GeometryError(f"vector {r} has entries outside GF({q})")
    return Subspace(d, q, tuple(tuple(r) for r in rref(rows, gf(q))))


def full_space(d: int, q: int) -> Subspace:
    return Subspace(d, q, tuple(tuple(int(i == j) for j in range(d + 1)) for i in range(d + 1)))


def empty_space(d: int, q: int) -> Subspace:
    return Subspace(d, q, ())


def decode(text: str, d: int, q: int) -> Subspace:
    """Parse the ``"100;010"`` text form back into a canonical Subspace."""
    text = text.strip()
    if text in (EMPTY_ENCODING, ""):
        return empty_space(d, q)
    rows = []
    for chunk in text.split(";"):
        chunk = chunk.replace(",", "")
        try:
            rows.append([DIGITS.index(ch) for ch in chunk])
        except ValueError:
            raise GeometryError(f"bad digit in subspace encoding {text!r}") from None
    return canonicalize(rows, d, q)


def span(A: Subspace, B: Subspace) -> Subspace:
    return A.span(B)


def meet(A: Subspace, B: Subspace) -> Subspace:
    return A.meet(B)


def contains(A: Subspace, B: Subspace) -> bool:
    """True iff B is a subspace of A."""
    return A.contains(B)


def _rref_matrices(n: int, m: int, F: FieldSpec) -> np.ndarray:
    """All m x n RREF matrices of rank m over F, sorted lexicographically on
    their row-major entries."""
    q = F.q
    if m == 0:
        return np.zeros((1, 0, n), dtype=np.int64)
    blocks = []
    for pivots in combinations(range(n), m):
        free = [(r, c) for r in range(m) for c in range(pivots[r] + 1, n) if c not in pivots]
        combos = list(product(range(q), repeat=len(free)))
        fills = np.array(combos, dtype=np.int64).reshape(len(combos), len(free))
        mats = np.zeros((len(fills), m, n), dtype=np.int64)
        for r, c in enumerate(pivots):
            mats[:, r, c] = 1
        for k, (r, c) in enumerate(free):
            mats[:, r, c] = fills[:, k]
        blocks.append(mats)
    mats = np.concatenate(blocks)
    flat = mats.reshape(len(mats), -1)
    order = np.lexsort(flat.T[::-1])
    return mats[order]


class ProjectiveSpace:
    """PG(d, q) with cached subspace tables.

    Subspaces of each projective dimension k are numbered in lexicographic
    order of their canonical encoding.  ``point_masks(k)`` gives the point
    incidence of every k-subspace as a boolean matrix, which the fast
    predicates in ``flags`` and ``kneser`` are built on.
    """

    def __init__(self, d: int, q: int):
        if not 1 <= d <= MAX_D:
            raise GeometryError(f"projective dimension d={d} outside 1..{MAX_D}")
        self.d = d
        self.q = q
        self.field = gf(q)
        self._bases: dict[int, np.ndarray] = {}
        self._masks: dict[int, np.ndarray] = {}
        self._subspaces: dict[int, list[Subspace]] = {}
        self._index: dict[int, dict[Subspace, int]] = {}

    def __repr__(self):
        return f"PG({self.d},{self.q})"

    def __eq__(self, other):
        return isinstance(other, ProjectiveSpace) and (self.d, self.q) == (other.d, other.q)

    def __hash__(self):
        return hash(("PG", self.d, self.q))

    def _check_k(self, k: int):
        if not -1 <= k <= self.d:
            raise GeometryError(f"dimension k={k} outside -1..{self.d}")

    def count(self, k: int) -> int:
        return gaussian_binomial(self.d + 1, k + 1, self.q)

    @property
    def num_points(self) -> int:
        return self.count(0)

    def bases(self, k: int) -> np.ndarray:
        """Array (count(k), k+1, d+1) of canonical bases."""
        self._check_k(k)
        if k not in self._bases:
            self._bases[k] = _rref_matrices(self.d + 1, k + 1, self.field)
        return self._bases[k]

    def subspaces(self, k: int) -> list[Subspace]:
        if k not in self._subspaces:
            self._subspaces[k] = [
                Subspace(self.d, self.q, tuple(tuple(int(x) for x in row) for row in B))
                for B in self.bases(k)
            ]
        return self._subspaces[k]

    def index_of(self, S: Subspace) -> int:
        k = S.proj_dim
        if k not in self._index:
            self._index[k] = {s: i for i, s in enumerate(self.subspaces(k))}
        return self._index[k][S]

    @cached_property
    def _point_lookup(self) -> np.ndarray:
        # base-q code of a normalized vector -> point id
        pts = self.bases(0)[:, 0, :]
        table = np.full(self.q ** (self.d + 1), -1, dtype=np.int64)
        table[self._codes(pts)] = np.arange(len(pts))
        return table

    def _codes(self, vecs: np.ndarray) -> np.ndarray:
        weights = self.q ** np.arange(self.d, -1, -1, dtype=np.int64)
        return vecs @ weights

    def point_ids(self, k: int) -> np.ndarray:
        """Array (count(k), points per k-space) of the point ids of each k-subspace."""
        F = self.field
        B = self.bases(k)
        m = k + 1
        coeffs = np.array(
            [c for c in product(range(self.q), repeat=m) if any(c) and c[next(i for i, x in enumerate(c) if x)] == 1],
            dtype=np.int64,
        )
        # combination sum_r c_r * B_r with table arithmetic; the leading
        # coefficient is 1, so each combination is already normalized
        vecs = np.zeros((len(B), len(coeffs), self.d + 1), dtype=np.int64)
        for r in range(m):
            vecs = F.add_table[vecs, F.mul_table[coeffs[None, :, r, None], B[:, None, r, :]]]
        ids = self._point_lookup[self._codes(vecs)]
        ids.sort(axis=1)
        return ids

    def point_masks(self, k: int) -> np.ndarray:
        """Boolean incidence matrix (count(k), num_points)."""
        if k not in self._masks:
            if k == -1:
                mask = np.zeros((1, self.num_points), dtype=bool)
            else:
                ids = self.point_ids(k)
                mask = np.zeros((len(ids), self.num_points), dtype=bool)
                np.put_along_axis(mask, ids, True, axis=1)
            mask.setflags(write=False)
            self._masks[k] = mask
        return self._masks[k]

    def intersection_sizes(self, j: int, k: int) -> np.ndarray:
        """Number of common points of every j-subspace with every k-subspace."""
        a = self.point_masks(j).astype(np.float32)
        b = self.point_masks(k).astype(np.float32)
        return np.rint(a @ b.T).astype(np.int64)

    def meets(self, j: int, k: int) -> np.ndarray:
        return self.intersection_sizes(j, k) > 0

    def incidence(self, j: int, k: int) -> np.ndarray:
        """``inc[a, b]`` is True iff j-subspace a lies inside k-subspace b."""
        return self.intersection_sizes(j, k) == gaussian_binomial(j + 1, 1, self.q)

    def meet_dims(self, j: int, k: int) -> np.ndarray:
        """Projective dimension of the meet of every j-subspace with every k-subspace."""
        sizes = self.intersection_sizes(j, k)
        lookup = {gaussian_binomial(t + 1, 1, self.q): t for t in range(-1, self.d + 1)}
        lookup[0] = -1
        out = np.empty_like(sizes)
        for size, t in lookup.items():
            out[sizes == size] = t
        return out


def enumerate_subspaces(space: ProjectiveSpace, k: int) -> list[Subspace]:
    """All k-subspaces of the space in canonical-encoding order."""
    return list(space.subspaces(k))


def dual(S: Subspace) -> Subspace:
    return S.perp()
