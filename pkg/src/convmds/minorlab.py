"""Minor machinery: trivially-zero detection and exact minor checks.

A minor is trivially zero when its support pattern admits no perfect
matching between rows and columns (every term of the Leibniz expansion then
contains a structural zero).  Determinants are only ever needed as
zero/nonzero decisions, so the batched eliminator below skips sign tracking.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .gf import GF

CHUNK = 1 << 15


class ShapeError(ValueError):
    pass


# -- matchings ----------------------------------------------------------------


def _max_matching(adj: list[list[int]], n_right: int) -> int:
    match_right = [-1] * n_right

    def augment(u, seen):
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                if match_right[v] < 0 or augment(match_right[v], seen):
                    match_right[v] = u
                    return True
        return False

    size = 0
    for u in range(len(adj)):
        if augment(u, [False] * n_right):
            size += 1
    return size


def has_row_matching(pattern) -> bool:
    """True when every row can be matched to a distinct column in its support."""
    P = np.asarray(pattern, dtype=bool)
    if P.ndim != 2:
        raise ShapeError("pattern must be a matrix")
    r, s = P.shape
    if r > s:
        return False
    adj = [list(np.flatnonzero(P[i])) for i in range(r)]
    return _max_matching(adj, s) == r


def is_trivially_zero(pattern) -> bool:
    P = np.asarray(pattern, dtype=bool)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ShapeError("trivially-zero test needs a square pattern")
    return not has_row_matching(P)


# -- determinants -------------------------------------------------------------


def det(F: GF, M) -> int:
    """Exact determinant by Gaussian elimination over F."""
    A = [list(map(int, row)) for row in M]
    r = len(A)
    if any(len(row) != r for row in A):
        raise ShapeError("determinant of a non-square matrix")
    d = 1
    for c in range(r):
        piv = next((i for i in range(c, r) if A[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            d = F.neg(d)
        d = F.mul(d, A[c][c])
        inv = F.inv(A[c][c])
        for i in range(c + 1, r):
            if A[i][c]:
                f = F.mul(A[i][c], inv)
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[c])]
    return d


def _inv_table(F: GF) -> np.ndarray | None:
    if F.m == 1 or F._tables:
        cache = getattr(F, "_inv_arr", None)
        if cache is None:
            cache = np.zeros(F.q, dtype=np.int64)
            for a in range(1, F.q):
                cache[a] = F.inv(a)
            F._inv_arr = cache
        return cache
    return None


def batch_nonsingular(F: GF, mats: np.ndarray) -> np.ndarray:
    """Boolean mask: which of the stacked square matrices have nonzero determinant."""
    A = np.array(mats, dtype=np.int64)
    N, r, _ = A.shape
    ok = np.ones(N, dtype=bool)
    if N == 0:
        return ok
    inv = _inv_table(F)
    if inv is None:
        return np.array([det(F, m) != 0 for m in A], dtype=bool)
    idx = np.arange(N)
    for c in range(r):
        sub = A[:, c:, c] != 0
        has = sub.any(axis=1)
        ok &= has
        piv = c + sub.argmax(axis=1)
        rows_c = A[idx, c].copy()
        A[idx, c] = A[idx, piv]
        A[idx, piv] = rows_c
        if c == r - 1:
            break
        pinv = inv[A[:, c, c]]
        below = A[:, c + 1 :, c]
        if F.m == 1:
            f = below * pinv[:, None] % F.p
            A[:, c + 1 :, :] = (A[:, c + 1 :, :] - f[:, :, None] * A[:, c, None, :]) % F.p
        else:
            f = F.mul_arr(below, pinv[:, None])
            prod = F.mul_arr(f[:, :, None], A[:, c, None, :])
            if F.p == 2:
                A[:, c + 1 :, :] = np.bitwise_xor(A[:, c + 1 :, :], prod)
            else:
                neg = F.mul_arr(prod, np.full_like(prod, F.neg(1)))
                A[:, c + 1 :, :] = F.add_arr(A[:, c + 1 :, :], neg)
    return ok


# -- full-size minors ------------------------------------------------------------


@dataclass
class MinorCheck:
    passed: bool
    witness: list[int] | None = None
    checked: int = 0
    skipped_trivial: int = 0

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "witness": self.witness,
            "checked": self.checked,
            "skipped_trivial": self.skipped_trivial,
        }


def _column_classes(P: np.ndarray):
    keys = {}
    cls = np.empty(P.shape[1], dtype=np.int64)
    reps = []
    for j in range(P.shape[1]):
        key = P[:, j].tobytes()
        if key not in keys:
            keys[key] = len(reps)
            reps.append(P[:, j])
        cls[j] = keys[key]
    return cls, np.array(reps).T.reshape(P.shape[0], len(reps))


def _count_ntz(reps: np.ndarray, counts: tuple[int, ...]) -> bool:
    cols = np.repeat(np.arange(len(counts)), counts)
    return has_row_matching(reps[:, cols])


def _combination_chunks(s: int, r: int):
    it = itertools.combinations(range(s), r)
    while True:
        block = list(itertools.islice(it, CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.int64).reshape(len(block), r)


def ntz_selections(pattern) -> np.ndarray:
    """All r-column selections of an r x s pattern that are not trivially zero."""
    P = np.asarray(pattern, dtype=bool)
    r, s = P.shape
    cls, reps = _column_classes(P)
    cache: dict[tuple, bool] = {}
    out = []
    for sel in _combination_chunks(s, r):
        keep = np.empty(len(sel), dtype=bool)
        for i, key in enumerate(map(tuple, np.sort(cls[sel], axis=1).tolist())):
            if key not in cache:
                cache[key] = has_row_matching(reps[:, list(key)])
            keep[i] = cache[key]
        out.append(sel[keep])
    return np.vstack(out) if out else np.zeros((0, r), dtype=np.int64)


def check_fullsize_minors(M, F: GF, pattern=None, early_exit: bool = True) -> MinorCheck:
    """Every non-trivially-zero r x r column selection must have nonzero determinant.

    ``pattern`` is the support used for the trivially-zero test; by default
    the literal nonzero positions of ``M``.
    """
    M = np.asarray(M, dtype=np.int64)
    if M.ndim != 2:
        raise ShapeError("expected a matrix")
    r, s = M.shape
    if r > s:
        raise ShapeError(f"full-size minors need rows <= columns, got {r}x{s}")
    if r == 0:
        return MinorCheck(True)
    P = (M != 0) if pattern is None else np.asarray(pattern, dtype=bool)
    if P.shape != M.shape:
        raise ShapeError("pattern shape differs from matrix shape")

    cls, reps = _column_classes(P)
    n_cls = reps.shape[1]
    radix = r + 1
    ntz_cache: dict[int, bool] = {}
    result = MinorCheck(True)
    for sel in _combination_chunks(s, r):
        counts = np.zeros((len(sel), n_cls), dtype=np.int64)
        np.add.at(counts, (np.arange(len(sel))[:, None], cls[sel]), 1)
        codes = counts @ (radix ** np.arange(n_cls, dtype=np.int64))
        uniq, inverse = np.unique(codes, return_inverse=True)
        flags = np.empty(len(uniq), dtype=bool)
        for i, code in enumerate(uniq.tolist()):
            if code not in ntz_cache:
                cnt = tuple(int(c) for c in counts[np.flatnonzero(codes == code)[0]])
                ntz_cache[code] = _count_ntz(reps, cnt)
            flags[i] = ntz_cache[code]
        live = flags[inverse.reshape(-1)]
        result.skipped_trivial += int((~live).sum())
        sel = sel[live]
        if not len(sel):
            continue
        sub = M[:, sel].transpose(1, 0, 2)
        good = batch_nonsingular(F, sub)
        result.checked += len(sel)
        if not good.all():
            bad = np.flatnonzero(~good)
            if result.passed:
                result.passed = False
                result.witness = sel[bad[0]].tolist()
            if early_exit:
                return result
    return result


def count_fullsize_minors(rows: int, cols: int) -> int:
    return comb(cols, rows) if rows <= cols else 0


@dataclass
class SuperregularCheck:
    passed: bool
    witness: dict | None = None
    checked: int = 0

    def to_dict(self) -> dict:
        return {"pass": self.passed, "witness": self.witness, "checked": self.checked}


def is_superregular(M, F: GF, pattern=None) -> SuperregularCheck:
    """All non-trivially-zero square minors, of every size, are nonzero."""
    M = np.asarray(M, dtype=np.int64)
    r, s = M.shape
    P = (M != 0) if pattern is None else np.asarray(pattern, dtype=bool)
    out = SuperregularCheck(True)
    for size in range(1, min(r, s) + 1):
        for rows in itertools.combinations(range(r), size):
            sub = M[list(rows)]
            chk = check_fullsize_minors(sub, F, P[list(rows)])
            out.checked += chk.checked
            if not chk.passed:
                out.passed = False
                out.witness = {"rows": list(rows), "cols": chk.witness}
                return out
    return out


# -- condition sets ------------------------------------------------------------------


@dataclass
class ItemResult:
    name: str
    source: str
    shape: tuple[int, int]
    minors: int
    check: MinorCheck | None
    skipped: bool = False

    @property
    def passed(self) -> bool:
        return self.check is not None and self.check.passed

    def to_dict(self) -> dict:
        d = {
            "item": self.name,
            "source": self.source,
            "shape": list(self.shape),
            "minors": self.minors,
            "status": "skipped" if self.skipped else ("pass" if self.passed else "fail"),
        }
        if self.check is not None:
            d["check"] = self.check.to_dict()
        return d


@dataclass
class ConditionReport:
    passed: bool
    items: list[ItemResult] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"pass": self.passed, "items": [i.to_dict() for i in self.items]}


def check_condition_set(C, G, early_exit: bool = True) -> ConditionReport:
    """Check every item of a ConditionSet against code G, cheapest item first.

    Each item is checked with its layout's structural support, so a zero
    entry inside a coefficient block counts as a violated minor.
    """
    from .polymat import display_name, instantiate

    p = G.params
    prepared = []
    for item in C.items:
        rows, cols = item.spec.dims(G.k, p.t, G.n)
        if rows > cols:
            raise ShapeError(f"item {item.spec.name} has more rows than columns")
        prepared.append((count_fullsize_minors(rows, cols), item, (rows, cols)))
    prepared.sort(key=lambda x: x[0])
    report = ConditionReport(True)
    for minors, item, shape in prepared:
        name = display_name(item.spec, G.mu)
        if early_exit and not report.passed:
            report.items.append(ItemResult(name, item.source, shape, minors, None, skipped=True))
            continue
        M, supp = instantiate(item.spec, G, pad=True)
        chk = check_fullsize_minors(M, G.field, supp, early_exit=early_exit)
        report.items.append(ItemResult(name, item.source, shape, minors, chk))
        if not chk.passed:
            report.passed = False
    return report
