"""Polynomial generator matrices and the block layouts built from them.

A generator matrix ``G(z) = G_0 + G_1 z + ... + G_mu z^mu`` is stored as an
integer array of shape ``(mu + 1, k, n)`` holding element codes.  Every
condition the criteria and the planner produce is a :class:`BlockMatrixSpec`,
a grid whose cells name a coefficient block (or zero); instantiating a spec
against a concrete code gives the matrix whose full-size minors get checked.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gf import GF, as_field_matrix

# -- parameters ---------------------------------------------------------------


class ParamError(ValueError):
    pass


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    delta: int
    mu: int
    t: int
    L: int
    S: int

    @property
    def divides(self) -> bool:
        return self.delta % self.k == 0

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "delta": self.delta}


def derive_params(n: int, k: int, delta: int) -> CodeParams:
    if k < 1 or n <= k:
        raise ParamError(f"need n > k >= 1, got n={n}, k={k}")
    if delta < 0:
        raise ParamError("degree must be non-negative")
    mu = -(-delta // k)
    t = delta + k - k * mu
    L = delta // k + delta // (n - k)
    S = (n - k) * (delta // k + 1) + delta + 1
    return CodeParams(n, k, delta, mu, t, L, S)


# -- polynomial generator matrices -----------------------------------------------


class PolyMatrix:
    """A k x n polynomial matrix over ``field`` given by its coefficient blocks."""

    def __init__(self, field: GF, coeffs, delta: int | None = None):
        arr = np.array(coeffs, dtype=np.int64)
        if arr.ndim != 3:
            raise ParamError("coefficients must be a list of k x n matrices")
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise ParamError(f"entries must be element codes of {field}")
        arr.setflags(write=False)
        self.field = field
        self.coeffs = arr
        self.mu = len(arr) - 1
        self.k, self.n = arr.shape[1], arr.shape[2]
        self._delta = delta

    @property
    def delta(self) -> int:
        if self._delta is None:
            self._delta = sum(self.row_degrees)
        return self._delta

    @property
    def params(self) -> CodeParams:
        return derive_params(self.n, self.k, self.delta)

    def block(self, i: int) -> np.ndarray:
        if 0 <= i <= self.mu:
            return self.coeffs[i]
        return np.zeros((self.k, self.n), dtype=np.int64)

    def tilde(self) -> np.ndarray:
        """First t rows of G_mu (all of G_mu when k divides delta)."""
        return self.coeffs[self.mu][: self.params.t]

    @property
    def row_degrees(self) -> tuple[int, ...]:
        out = []
        for i in range(self.k):
            nz = [d for d in range(self.mu + 1) if self.coeffs[d, i].any()]
            out.append(max(nz) if nz else -1)
        return tuple(out)

    def entry_poly(self, i: int, j: int) -> list[int]:
        return [int(c) for c in self.coeffs[:, i, j]]

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and self.field == other.field
            and self.coeffs.shape == other.coeffs.shape
            and bool((self.coeffs == other.coeffs).all())
            and self.delta == other.delta
        )

    def __repr__(self):
        return f"PolyMatrix({self.field}, k={self.k}, n={self.n}, mu={self.mu})"

    # file format

    def to_dict(self) -> dict:
        return {
            "field": self.field.to_dict(),
            "params": {"n": self.n, "k": self.k, "delta": self.delta},
            "coefficients": self.coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PolyMatrix":
        F = GF.from_dict(d["field"])
        pr = d["params"]
        coeffs = [as_field_matrix(F, g) for g in d["coefficients"]]
        G = cls(F, coeffs, pr["delta"])
        if (G.n, G.k) != (pr["n"], pr["k"]):
            raise ParamError(f"coefficient shape {G.k}x{G.n} disagrees with params {pr}")
        return G


def load_code(path) -> PolyMatrix:
    with open(path) as fh:
        return PolyMatrix.from_dict(json.load(fh))


def dump_code(G: PolyMatrix, path) -> None:
    with open(path, "w") as fh:
        json.dump(G.to_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")


# -- polynomial algebra over the field ---------------------------------------------


def _poly_mul(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return out


def _poly_add(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return [F.add(x, y) for x, y in zip(a, b)]


def _poly_deg(a: Sequence[int]) -> int:
    for d in range(len(a) - 1, -1, -1):
        if a[d]:
            return d
    return -1


def _perm_sign(perm: Sequence[int]) -> int:
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def poly_det(F: GF, M: list[list[list[int]]]) -> list[int]:
    """Determinant of a square matrix of polynomials (Leibniz expansion)."""
    r = len(M)
    total: list[int] = []
    for perm in itertools.permutations(range(r)):
        term = [1]
        for i, j in enumerate(perm):
            term = _poly_mul(F, term, M[i][j])
            if not term or not any(term):
                break
        else:
            if _perm_sign(perm) < 0:
                term = [F.neg(c) for c in term]
            total = _poly_add(F, total, term)
    return total


def rank(F: GF, M) -> int:
    A = [list(map(int, row)) for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    rk = 0
    for c in range(cols):
        piv = next((i for i in range(rk, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[rk], A[piv] = A[piv], A[rk]
        inv = F.inv(A[rk][c])
        for i in range(rows):
            if i != rk and A[i][c]:
                f = F.mul(A[i][c], inv)
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[rk])]
        rk += 1
    return rk


@dataclass
class StructuralReport:
    row_degrees: tuple[int, ...]
    is_row_reduced: bool
    has_generic_row_degrees: bool
    degree: int
    g0_full_rank: bool

    def to_dict(self) -> dict:
        return {
            "row_degrees": list(self.row_degrees),
            "is_row_reduced": self.is_row_reduced,
            "has_generic_row_degrees": self.has_generic_row_degrees,
            "degree": self.degree,
            "g0_full_rank": self.g0_full_rank,
        }


def minor_degree(G: PolyMatrix) -> int:
    """Maximum degree of the full-size minors of G(z), computed exactly."""
    F = G.field
    best = -1
    for cols in itertools.combinations(range(G.n), G.k):
        M = [[G.entry_poly(i, j) for j in cols] for i in range(G.k)]
        best = max(best, _poly_deg(poly_det(F, M)))
    return best


def leading_row_matrix(G: PolyMatrix) -> np.ndarray:
    degs = G.row_degrees
    return np.array([G.coeffs[max(d, 0), i] for i, d in enumerate(degs)], dtype=np.int64)


def is_generic(row_degrees: Sequence[int], k: int, delta: int) -> bool:
    mu = -(-delta // k)
    t = delta + k - k * mu
    want = [mu] * t + [delta // k] * (k - t)
    return list(row_degrees) == want


def structural_checks(G: PolyMatrix) -> StructuralReport:
    degs = G.row_degrees
    reduced = min(degs) >= 0 and rank(G.field, leading_row_matrix(G)) == G.k
    degree = minor_degree(G)
    return StructuralReport(
        row_degrees=degs,
        is_row_reduced=reduced,
        has_generic_row_degrees=is_generic(degs, G.k, degree) if degree >= 0 else False,
        degree=degree,
        g0_full_rank=rank(G.field, G.coeffs[0]) == G.k,
    )


# -- encoding and the reverse code ------------------------------------------------


def encode(G: PolyMatrix, u) -> np.ndarray:
    """Codeword coefficients v_0..v_{mu+l} for message coefficients u_0..u_l.

    ``u`` has shape (l + 1, k); the result has shape (mu + l + 1, n).
    """
    F = G.field
    U = np.array(u, dtype=np.int64).reshape(-1, G.k)
    if U.size and (U.min() < 0 or U.max() >= F.q):
        raise ParamError("message entries must be element codes of the code's field")
    deg_u = len(U) - 1
    V = np.zeros((G.mu + deg_u + 1, G.n), dtype=np.int64)
    for a in range(deg_u + 1):
        for b in range(G.mu + 1):
            V[a + b] = F.add_arr(V[a + b], F.matmul(U[a][None, :], G.coeffs[b])[0])
    return V


def trim_codeword(V: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(V.any(axis=1))
    return V[: nz[-1] + 1] if len(nz) else V[:0]


def weight(V) -> int:
    return int(np.count_nonzero(V))


def reverse_code(G: PolyMatrix) -> PolyMatrix:
    """Generator of the reverse code: row i becomes z^nu_i g_i(1/z)."""
    degs = G.row_degrees
    out = np.zeros_like(G.coeffs)
    for i, nu in enumerate(degs):
        for d in range(nu + 1):
            out[d, i] = G.coeffs[nu - d, i]
    return PolyMatrix(G.field, out, G._delta)


# -- symbolic block layouts ---------------------------------------------------------

ZERO = None
TILDE = "~"


@dataclass(frozen=True)
class BlockMatrixSpec:
    """A grid of coefficient-block cells.

    Each cell is ``None`` (zero block), an int ``i`` (G_i) or ``"~"`` (the
    first t rows of G_mu).  A grid row containing ``"~"`` has height t and may
    not contain full blocks.
    """

    grid: tuple[tuple, ...]

    def __post_init__(self):
        if not self.grid or not self.grid[0]:
            raise ParamError("empty block layout")
        w = len(self.grid[0])
        for row in self.grid:
            if len(row) != w:
                raise ParamError("block layout rows must have equal length")
            kinds = {("t" if c == TILDE else "k") for c in row if c is not ZERO}
            if not kinds:
                raise ParamError("block layout row with only zero cells")
            if len(kinds) > 1:
                raise ParamError("grid row mixes t-row and k-row blocks")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.grid), len(self.grid[0])

    def row_kind(self, r: int) -> str:
        return "t" if TILDE in self.grid[r] else "k"

    def dims(self, k: int, t: int, n: int) -> tuple[int, int]:
        rows = sum(t if self.row_kind(r) == "t" else k for r in range(self.shape[0]))
        return rows, n * self.shape[1]

    def blocks(self) -> set:
        return {c for row in self.grid for c in row if c is not ZERO}

    @property
    def name(self) -> str:
        return spec_name(self)

    def __str__(self):
        return self.name


def _cell_name(c) -> str:
    if c is ZERO:
        return "0"
    if c == TILDE:
        return "~G"
    return f"G{c}"


def spec_name(spec: BlockMatrixSpec) -> str:
    g = spec.grid
    R, C = spec.shape
    if R == 1 and C == 1:
        return "~Gmu" if g[0][0] == TILDE else f"G{g[0][0]}"
    if R == C and all(isinstance(c, int) or c is ZERO for row in g for c in row):
        if all(g[r][c] == (c - r if c >= r else None) for r in range(R) for c in range(C)):
            return f"G_{R - 1}^c"
        top = g[0][0]
        if all(g[r][c] == (top - (c - r) if c >= r else None) for r in range(R) for c in range(C)):
            return f"Gbar_{R - 1}^c"
    if R == 1:
        return "[" + " ".join(_cell_name(c) for c in g[0]) + "]"
    if C == 1:
        return "(" + ";".join(_cell_name(row[0]) for row in g) + ")"
    return "[" + "; ".join(" ".join(_cell_name(c) for c in row) for row in g) + "]"


def display_name(spec: BlockMatrixSpec, mu: int) -> str:
    """Name with the tilde block spelled out as ~G<mu>."""
    return spec_name(spec).replace("~Gmu", f"~G{mu}").replace("~G;", f"~G{mu};").replace(
        "~G)", f"~G{mu})"
    ).replace("~G ", f"~G{mu} ").replace("~G]", f"~G{mu}]")


# constructors for the layouts used throughout


def sliding(j: int) -> BlockMatrixSpec:
    """G_j^c: block upper-triangular Toeplitz window of G_0..G_j."""
    return BlockMatrixSpec(tuple(tuple(c - r if c >= r else None for c in range(j + 1)) for r in range(j + 1)))


def reverse_sliding(j: int, mu: int) -> BlockMatrixSpec:
    """Gbar_j^c built from G_mu, G_mu-1, ..., G_mu-j."""
    return BlockMatrixSpec(
        tuple(tuple(mu - (c - r) if c >= r else None for c in range(j + 1)) for r in range(j + 1))
    )


def window(l: int, top: int, width: int) -> BlockMatrixSpec:
    """(l+1) x width block-Hankel window with G_top at the top-left.

    Row r, column c holds G_{top - r + c}; the bottom-left block is G_{top-l}.
    """
    return BlockMatrixSpec(tuple(tuple(top - r + c for c in range(width)) for r in range(l + 1)))


def row(*blocks) -> BlockMatrixSpec:
    return BlockMatrixSpec((tuple(blocks),))


def column(*blocks) -> BlockMatrixSpec:
    return BlockMatrixSpec(tuple((b,) for b in blocks))


def single(b) -> BlockMatrixSpec:
    return BlockMatrixSpec(((b,),))


def tilde_stack(mu: int, low: int) -> BlockMatrixSpec:
    """(~G_mu; G_mu-1; ...; G_low)."""
    return column(TILDE, *range(mu - 1, low - 1, -1))


def instantiate(spec: BlockMatrixSpec, G: PolyMatrix, pad: bool = False):
    """Concrete matrix of ``spec`` over G's coefficients, plus its structural support.

    The support marks every position inside a non-zero cell, whatever the
    value there; only zero cells of the layout are structurally zero.  Blocks
    beyond mu are zero matrices and require ``pad=True``.
    """
    k, n, t = G.k, G.n, G.params.t
    rows, supp_rows = [], []
    for r, grid_row in enumerate(spec.grid):
        height = t if spec.row_kind(r) == "t" else k
        parts, supp = [], []
        for c in grid_row:
            if c is ZERO:
                parts.append(np.zeros((height, n), dtype=np.int64))
                supp.append(np.zeros((height, n), dtype=bool))
            elif c == TILDE:
                parts.append(G.tilde())
                supp.append(np.ones((height, n), dtype=bool))
            else:
                if c > G.mu and not pad:
                    raise ParamError(f"block G_{c} exceeds mu={G.mu}")
                if c < 0:
                    raise ParamError(f"negative block index {c}")
                parts.append(G.block(c))
                supp.append(np.ones((height, n), dtype=bool))
        rows.append(np.hstack(parts))
        supp_rows.append(np.hstack(supp))
    return np.vstack(rows), np.vstack(supp_rows)


# -- implication between layouts ----------------------------------------------------


def _has_full_row_matching(spec: BlockMatrixSpec, k: int, t: int, n: int) -> bool:
    from .minorlab import has_row_matching

    rows, cols = spec.dims(k, t, n)
    return rows <= cols and has_row_matching(layout_support(spec, k, t, n))


def layout_support(spec: BlockMatrixSpec, k: int, t: int, n: int) -> np.ndarray:
    """Structural support of a layout: True inside every non-zero cell."""
    supp_rows = []
    for r, grid_row in enumerate(spec.grid):
        height = t if spec.row_kind(r) == "t" else k
        supp_rows.append(np.hstack([np.full((height, n), c is not ZERO) for c in grid_row]))
    return np.vstack(supp_rows)


def _sub(spec: BlockMatrixSpec, r0, r1, c0, c1):
    g = tuple(row[c0:c1] for row in spec.grid[r0:r1])
    if not g or not g[0] or any(all(c is ZERO for c in row) for row in g):
        return None
    try:
        return BlockMatrixSpec(g)
    except ParamError:
        return None


def diagonal_parts(spec: BlockMatrixSpec, k: int, t: int, n: int) -> set:
    """Layouts whose conditions follow from ``spec``'s by block triangularity.

    If the layout splits as [[A, X], [0, C]] with C (resp. A) admitting a
    structurally non-vanishing full-size minor, every non-trivially-zero
    full-size minor of A (resp. C) times such a minor is one of ``spec``'s.
    """
    out, todo = set(), [spec]
    while todo:
        s = todo.pop()
        R, C = s.shape
        for r in range(1, R):
            for c in range(1, C):
                if all(s.grid[i][j] is ZERO for i in range(r, R) for j in range(c)):
                    A, B = _sub(s, 0, r, 0, c), _sub(s, r, R, c, C)
                    if A is None or B is None:
                        continue
                    if _has_full_row_matching(B, k, t, n) and A not in out:
                        out.add(A)
                        todo.append(A)
                    if _has_full_row_matching(A, k, t, n) and B not in out:
                        out.add(B)
                        todo.append(B)
    return out


def implies(big: BlockMatrixSpec, small: BlockMatrixSpec, k: int, t: int, n: int) -> bool:
    """True when the full-size-minor condition of ``big`` entails ``small``'s."""
    if big == small:
        return True
    cands = {big} | diagonal_parts(big, k, t, n)
    for c in cands:
        if c == small:
            return True
        # a single grid row: any subset of its block columns has a subset of its minors
        if c.shape[0] == 1 and small.shape[0] == 1 and c.row_kind(0) == small.row_kind(0):
            pool = list(c.grid[0])
            ok = True
            for cell in small.grid[0]:
                if cell in pool:
                    pool.remove(cell)
                else:
                    ok = False
                    break
            if ok:
                return True
    return False


def spec_sort_key(spec: BlockMatrixSpec):
    """Deterministic order: by grid encoding."""
    return json.dumps([[("z" if c is ZERO else ("t" if c == TILDE else c)) for c in row] for row in spec.grid])


def spec_to_json(spec: BlockMatrixSpec) -> list:
    return [[c if c is not ZERO else None for c in row] for row in spec.grid]


def spec_from_json(data) -> BlockMatrixSpec:
    return BlockMatrixSpec(tuple(tuple(c for c in row) for row in data))


def dedupe(items: Iterable, k: int, t: int, n: int, key=lambda x: x):
    """Drop items implied by another item; first occurrence wins among equals."""
    items = list(items)
    keep = []
    for i, a in enumerate(items):
        sa = key(a)
        if any(key(b) == sa for b in keep):
            continue
        dominated = False
        for j, b in enumerate(items):
            sb = key(b)
            if sb == sa:
                continue
            if implies(sb, sa, k, t, n) and not (j > i and implies(sa, sb, k, t, n)):
                dominated = True
                break
        if not dominated:
            keep.append(a)
    return keep


@dataclass(frozen=True)
class ConditionItem:
    spec: BlockMatrixSpec
    source: str = ""


@dataclass(frozen=True)
class ConditionSet:
    """Layouts whose non-trivially-zero full-size minors must all be nonzero."""

    items: tuple[ConditionItem, ...] = ()

    def __post_init__(self):
        specs = [i.spec for i in self.items]
        if len(set(specs)) != len(specs):
            raise ParamError("duplicate layout in condition set")

    @property
    def specs(self) -> list[BlockMatrixSpec]:
        return [i.spec for i in self.items]

    def names(self, mu: int) -> list[str]:
        return [display_name(s, mu) for s in self.specs]

    def to_list(self, mu: int) -> list[dict]:
        return [
            {"item": display_name(i.spec, mu), "grid": spec_to_json(i.spec), "source": i.source}
            for i in self.items
        ]
