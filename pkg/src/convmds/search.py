"""Producing codes: the explicit alpha^(2^i) construction and seeded search.

Candidates are indexed; candidate i depends only on (seed, i), so a run can
be split across processes by index range and merged in index order.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .criteria import CriteriaError, certify, main2_conditions, main_conditions, prior_stack
from .distance import BudgetExceeded, free_distance_trellis
from .gf import GF, prime_factors
from .minorlab import batch_nonsingular, ntz_selections
from .polymat import PolyMatrix, derive_params, layout_support
from .planner import plan

BLOCK = 256  # candidates drawn per generator call


class SearchError(ValueError):
    pass


# -- explicit construction ------------------------------------------------------------


def required_field_degree(n: int, k: int, delta: int) -> int:
    """Least N with N > max(mu, 1) * 2^((mu+1)n + t - 1)."""
    p = derive_params(n, k, delta)
    return max(p.mu, 1) * 2 ** ((p.mu + 1) * n + p.t - 1) + 1


@dataclass
class Construction:
    N: int
    code: PolyMatrix | None
    note: str = ""

    def to_dict(self) -> dict:
        d = {"N": self.N, "built": self.code is not None, "note": self.note}
        if self.code is not None:
            d["code"] = self.code.to_dict()
        return d


def construct_general(n: int, k: int, delta: int, max_N: int = 20) -> Construction:
    """G_i[r][c] = alpha^(2^(i n + r + c)) over GF(2^N); the top block keeps t rows."""
    p = derive_params(n, k, delta)
    N = required_field_degree(n, k, delta)
    if N > max_N:
        return Construction(N, None, f"GF(2^{N}) exceeds the field budget 2^{max_N}")
    F = GF(2, N)
    a = F.primitive
    coeffs = np.zeros((p.mu + 1, k, n), dtype=np.int64)
    for i in range(p.mu + 1):
        rows = p.t if i == p.mu else k
        for r in range(rows):
            for c in range(n):
                coeffs[i, r, c] = F.pow(a, 2 ** (i * n + r + c))
    return Construction(N, PolyMatrix(F, coeffs, delta))


# -- candidate generation ----------------------------------------------------------------


def field_for(q: int) -> GF:
    for p in prime_factors(q):
        m, x = 0, q
        while x % p == 0:
            x //= p
            m += 1
        if x == 1:
            return GF(p, m)
    raise SearchError(f"{q} is not a prime power")


def free_positions(n: int, k: int, delta: int) -> np.ndarray:
    """Mask of coefficient entries that are not forced to zero by the row degrees."""
    p = derive_params(n, k, delta)
    mask = np.ones((p.mu + 1, k, n), dtype=bool)
    mask[p.mu, p.t :, :] = False
    return mask


def candidate_block(q: int, shape, mask: np.ndarray, seed: int, block: int, mode: str) -> np.ndarray:
    """Candidates block*BLOCK .. block*BLOCK + BLOCK - 1 as an int array."""
    count = int(mask.sum())
    if mode == "random":
        rng = np.random.default_rng([seed, block])
        vals = rng.integers(0, q, size=(BLOCK, count))
    else:
        big = q**count >= 2**62
        x = np.arange(block * BLOCK, (block + 1) * BLOCK, dtype=object if big else np.int64)
        vals = np.empty((BLOCK, count), dtype=np.int64)
        for j in range(count):
            vals[:, j] = (x % q).astype(np.int64)
            x = x // q
    out = np.zeros((BLOCK,) + tuple(shape), dtype=np.int64)
    out[:, mask] = vals
    return out


# -- compiled conditions -------------------------------------------------------------------


@dataclass
class Compiled:
    """A condition item reduced to index arrays, for fast repeated checks."""

    name: str
    rows_idx: np.ndarray  # (R,) source row in the stacked coefficient array, -1 for zero
    cols_idx: np.ndarray
    block_idx: np.ndarray  # (R, C) coefficient block per entry, -1 for zero
    selections: np.ndarray

    @property
    def cost(self) -> int:
        return len(self.selections)


def _compile(spec, k: int, t: int, n: int, mu: int, name: str) -> Compiled:
    supp = layout_support(spec, k, t, n)
    R, C = supp.shape
    block_idx = np.full((R, C), -1, dtype=np.int64)
    row_src = np.zeros(R, dtype=np.int64)
    r0 = 0
    for gr, grid_row in enumerate(spec.grid):
        h = t if spec.row_kind(gr) == "t" else k
        for gc, cell in enumerate(grid_row):
            if cell is None:
                continue
            b = mu if cell == "~" else cell
            if b > mu:
                continue
            block_idx[r0 : r0 + h, gc * n : (gc + 1) * n] = b
        row_src[r0 : r0 + h] = np.arange(h)
        r0 += h
    col_src = np.tile(np.arange(n), C // n)
    return Compiled(name, row_src, col_src, block_idx, ntz_selections(supp))


def compiled_conditions(specs, k, t, n, mu) -> list[Compiled]:
    out = [_compile(s, k, t, n, mu, s.name) for s in specs]
    return sorted(out, key=lambda c: c.cost)


def _materialize(c: Compiled, coeffs: np.ndarray) -> np.ndarray:
    """Matrices for a batch of candidates: (B, R, C)."""
    bi = np.where(c.block_idx < 0, 0, c.block_idx)
    M = coeffs[:, bi, c.rows_idx[:, None], c.cols_idx[None, :]]
    M[:, c.block_idx < 0] = 0
    return M


def passes(F: GF, conds: list[Compiled], coeffs: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Mask of candidates passing every condition; also per-condition failure counts."""
    alive = np.ones(len(coeffs), dtype=bool)
    fails = []
    for c in conds:
        idx = np.flatnonzero(alive)
        if not len(idx):
            fails.append(0)
            continue
        M = _materialize(c, coeffs[idx])
        r = M.shape[1]
        ok = np.ones(len(idx), dtype=bool)
        sel = c.selections
        step = max(1, 65536 // max(1, len(idx)))
        for s0 in range(0, len(sel), step):
            live = np.flatnonzero(ok)
            if not len(live):
                break
            s = sel[s0 : s0 + step]
            sub = M[live][:, :, s]  # (L, r, S, r)
            sub = sub.transpose(0, 2, 1, 3).reshape(-1, r, r)
            good = batch_nonsingular(F, sub).reshape(len(live), len(s)).all(axis=1)
            ok[live] = good
        fails.append(int((~ok).sum()))
        alive[idx[~ok]] = False
    return alive, fails


def superregular_conditions(mu: int, k: int, t: int, n: int) -> list[Compiled]:
    """Every row subset of the prior-work stack, as full-size-minor checks."""
    import itertools

    spec = prior_stack(mu)
    base = _compile(spec, k, t, n, mu, "stack")
    R = len(base.rows_idx)
    out = []
    for size in range(1, min(R, n) + 1):
        for rows in itertools.combinations(range(R), size):
            rows = list(rows)
            supp = np.ones((size, n), dtype=bool)
            out.append(
                Compiled(
                    f"stack rows {rows}",
                    base.rows_idx[rows],
                    base.cols_idx,
                    base.block_idx[rows],
                    ntz_selections(supp),
                )
            )
    return sorted(out, key=lambda c: c.cost)


# -- search --------------------------------------------------------------------------------


@dataclass
class SearchConfig:
    n: int
    k: int
    delta: int
    q: int
    seed: int = 0
    budget: int = 100_000
    mode: str = "random"  # or "exhaustive"
    source: str = "planner"  # "planner", "theorem" or "prior"
    max_hits: int = 1
    trellis_states: int = 200_000
    workers: int = 1
    nu: int | None = None

    def space_size(self) -> int:
        return self.q ** int(free_positions(self.n, self.k, self.delta).sum())


@dataclass
class Hit:
    index: int
    code: PolyMatrix
    criteria_verdict: str
    free_distance: int | None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "code": self.code.to_dict(),
            "criteria_verdict": self.criteria_verdict,
            "free_distance": self.free_distance,
        }


@dataclass
class SearchResult:
    config: SearchConfig
    hits: list[Hit]
    tried: int
    exhausted: bool
    failures: dict[str, int] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def label(self) -> str:
        if self.hits:
            return "hit"
        return "certificate" if self.exhausted else "budget"

    def stats(self) -> dict:
        c = self.config
        return {
            "params": {"n": c.n, "k": c.k, "delta": c.delta},
            "q": c.q,
            "seed": c.seed,
            "mode": c.mode,
            "source": c.source,
            "budget": c.budget,
            "tried": self.tried,
            "exhausted": self.exhausted,
            "hits": len(self.hits),
            "label": self.label,
            "failures_per_condition": self.failures,
            "wall_seconds": round(self.seconds, 3),
        }


@lru_cache(maxsize=64)
def _conditions_for(n, k, delta, source, q):
    p = derive_params(n, k, delta)
    if source == "planner":
        specs = plan(n, k, delta).conditions.specs
    elif source == "theorem":
        C = (main_conditions if p.divides else main2_conditions)(n, k, delta)[0]
        specs = C.specs
    elif source == "prior":
        specs = []
        if p.delta >= p.k:
            from .polymat import row, single, TILDE

            specs = [row(*range(p.mu + 1))] if p.divides else [row(*range(p.mu)), single(TILDE)]
        conds = compiled_conditions(specs, k, p.t, n, p.mu) + superregular_conditions(p.mu, k, p.t, n)
        return conds
    else:
        raise SearchError(f"unknown condition source {source!r}")
    return compiled_conditions(specs, k, p.t, n, p.mu)


def _scan_blocks(cfg: SearchConfig, blocks: range) -> tuple[list[tuple[int, np.ndarray]], int, dict]:
    """Worker body: candidates passing the compiled conditions in the given blocks."""
    F = field_for(cfg.q)
    p = derive_params(cfg.n, cfg.k, cfg.delta)
    mask = free_positions(cfg.n, cfg.k, cfg.delta)
    conds = _conditions_for(cfg.n, cfg.k, cfg.delta, cfg.source, cfg.q)
    limit = min(cfg.budget, cfg.space_size()) if cfg.mode == "exhaustive" else cfg.budget
    found, tried = [], 0
    fails = {c.name: 0 for c in conds}
    for b in blocks:
        start = b * BLOCK
        if start >= limit:
            break
        cand = candidate_block(cfg.q, (p.mu + 1, cfg.k, cfg.n), mask, cfg.seed, b, cfg.mode)
        cand = cand[: limit - start]
        # generic row degrees need every top-degree row nonzero
        ok = cand[:, p.mu, : p.t, :].any(axis=2).all(axis=1) if p.mu > 0 else np.ones(len(cand), bool)
        alive, fl = passes(F, conds, cand[ok]) if ok.any() else (np.zeros(0, bool), [0] * len(conds))
        for c, f in zip(conds, fl):
            fails[c.name] += f
        tried += len(cand)
        for i in np.flatnonzero(ok)[alive]:
            found.append((start + int(i), cand[i]))
        if len(found) >= cfg.max_hits:
            break
    return found, tried, fails


def search_codes(cfg: SearchConfig, inject: list | None = None) -> SearchResult:
    """Seeded search for codes passing the configured condition set.

    ``inject`` is an optional list of coefficient arrays checked before the
    generated stream (with negative indices).
    """
    t0 = time.perf_counter()
    if cfg.mode not in ("random", "exhaustive"):
        raise SearchError(f"unknown mode {cfg.mode!r}")
    if cfg.mode == "exhaustive" and cfg.space_size() > cfg.budget:
        raise SearchError(f"exhaustive search over {cfg.space_size()} candidates exceeds budget {cfg.budget}")
    F = field_for(cfg.q)
    hits: list[Hit] = []
    tried = 0
    fails: dict[str, int] = {}

    raw: list[tuple[int, np.ndarray]] = []
    if inject:
        conds = _conditions_for(cfg.n, cfg.k, cfg.delta, cfg.source, cfg.q)
        arr = np.array(inject, dtype=np.int64)
        alive, _ = passes(F, conds, arr)
        raw += [(-1 - i, arr[i]) for i in np.flatnonzero(alive)]
        tried += len(arr)

    limit = min(cfg.budget, cfg.space_size()) if cfg.mode == "exhaustive" else cfg.budget
    n_blocks = -(-limit // BLOCK)
    if cfg.workers > 1:
        per = -(-n_blocks // cfg.workers)
        ranges = [range(w * per, min(n_blocks, (w + 1) * per)) for w in range(cfg.workers)]
        with ProcessPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(_scan_blocks, [cfg] * len(ranges), ranges))
    else:
        results = [_scan_blocks(cfg, range(n_blocks))]
    for found, n_tried, fl in results:
        raw += found
        tried += n_tried
        for name, f in fl.items():
            fails[name] = fails.get(name, 0) + f
    raw.sort(key=lambda x: x[0])

    for idx, coeffs in raw:
        if len(hits) >= cfg.max_hits:
            break
        G = PolyMatrix(F, coeffs, cfg.delta)
        try:
            if cfg.source == "prior":
                from .criteria import check_prior_work

                verdict = check_prior_work(G, cfg.nu).verdict
            else:
                verdict = certify(G, planned=cfg.source == "planner").verdict
        except CriteriaError:
            continue
        if verdict != "certified-MDS" and cfg.source != "prior":
            continue
        try:
            d = free_distance_trellis(G, cfg.trellis_states)
        except BudgetExceeded:
            d = None
        hits.append(Hit(idx, G, verdict, d))

    exhausted = cfg.mode == "exhaustive" and tried - len(inject or []) >= cfg.space_size() and not hits
    return SearchResult(cfg, hits, tried, exhausted, fails, time.perf_counter() - t0)


def minimal_field_scan(
    n: int, k: int, delta: int, q_list, budget: int = 100_000, seed: int = 0, source: str = "planner"
) -> dict[int, SearchResult]:
    """Search each field size; exhaustive when the space fits the budget."""
    out = {}
    for q in q_list:
        mode = "random"
        cfg = SearchConfig(n, k, delta, q, seed, budget, mode, source)
        if cfg.space_size() <= budget:
            cfg.mode = "exhaustive"
        out[q] = search_codes(cfg)
    return out
