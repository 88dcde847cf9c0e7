"""Relaxed condition sets: split the block matrix as far as the weight budget allows.

For every message degree l the codeword's coefficient blocks are covered by
pieces (sliding windows anchored at either end, Hankel windows, block
columns).  Each piece guarantees some weight once its full-size minors are
nonzero; a plan keeps splitting pieces while the total still reaches the
Singleton bound.  The union of all pieces over all l, minus implied ones, is
the condition set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .criteria import CriteriaError, b_bounds, main_conditions
from .polymat import (
    ParamError,
    BlockMatrixSpec,
    ConditionItem,
    ConditionSet,
    TILDE,
    column,
    dedupe,
    derive_params,
    display_name,
    reverse_sliding,
    single,
    sliding,
    tilde_stack,
    window,
)


class PlanError(ValueError):
    pass


class AuditError(AssertionError):
    pass


def cdiv(a: int, b: int) -> int:
    return -(-a // b)


# -- pieces ------------------------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    """A layout placed in the codeword's block matrix.

    ``rows`` gives, per grid row, the message block it multiplies as
    (base, offset): base "0" means u_offset, base "l" means u_(l - offset).
    ``anchor`` is "start"/"end" for sliding windows sitting at the first/last
    coefficient blocks, else "inner".
    """

    spec: BlockMatrixSpec
    anchor: str
    rows: tuple[tuple[str, int], ...]

    def row_index(self, r: int, l: int) -> int:
        base, off = self.rows[r]
        return off if base == "0" else l - off


def fwd_window(j: int) -> Piece:
    return Piece(sliding(j), "start", tuple(("0", r) for r in range(j + 1)))


def rev_window(j: int, mu: int) -> Piece:
    return Piece(reverse_sliding(j, mu), "end", tuple(("l", r) for r in range(j + 1)))


def fwd_column(top: int) -> Piece:
    """(G_top; ...; G_0) under u_0..u_top."""
    return Piece(column(*range(top, -1, -1)), "inner", tuple(("0", r) for r in range(top + 1)))


def rev_column(f: int, mu: int) -> Piece:
    """(G_mu-f; ...; G_mu) under u_l..u_(l-f)."""
    return Piece(column(*range(mu - f, mu + 1)), "inner", tuple(("l", r) for r in range(f + 1)))


def hankel(l: int, top: int, width: int) -> Piece:
    """Rows u_0..u_l over columns with G_top at the top-left."""
    return Piece(window(l, top, width), "inner", tuple(("0", r) for r in range(l + 1)))


def stack(j: int, mu: int) -> Piece:
    """(~G_mu; G_mu-1; ...; G_mu-j) over the column l + mu - j."""
    spec = tilde_stack(mu, mu - j) if j else single(TILDE)
    return Piece(spec, "inner", tuple(("l", j - r) for r in range(j + 1)))


@dataclass
class ClassPlan:
    label: str
    l: int | None  # None: every l >= E
    pieces: list[Piece]
    table: dict = field(default_factory=dict)

    def to_dict(self, mu: int) -> dict:
        return {
            "class": self.label,
            "pieces": [display_name(p.spec, mu) for p in self.pieces],
            **self.table,
        }


@dataclass
class PlanReport:
    n: int
    k: int
    delta: int
    branch: str
    intermediates: dict
    classes: list[ClassPlan]
    conditions: ConditionSet
    bounds_satisfied: bool
    notes: list[str] = field(default_factory=list)

    @property
    def params(self):
        return derive_params(self.n, self.k, self.delta)

    def names(self) -> list[str]:
        return self.conditions.names(self.params.mu)

    def to_dict(self) -> dict:
        mu = self.params.mu
        return {
            "params": {"n": self.n, "k": self.k, "delta": self.delta},
            "branch": self.branch,
            "intermediates": self.intermediates,
            "bounds_satisfied": self.bounds_satisfied,
            "classes": [c.to_dict(mu) for c in self.classes],
            "conditions": self.conditions.to_list(mu),
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _collect(classes: list[ClassPlan], n: int, k: int, t: int, mu: int) -> tuple[ConditionSet, list[str]]:
    notes = []
    order: list[BlockMatrixSpec] = []
    sources: dict[BlockMatrixSpec, list[str]] = {}
    for c in classes:
        for p in c.pieces:
            rows, cols = p.spec.dims(k, t, n)
            if rows > cols:
                notes.append(f"{c.label}: {display_name(p.spec, mu)} has more rows than columns, no condition")
                continue
            if p.spec not in sources:
                order.append(p.spec)
                sources[p.spec] = []
            if c.label not in sources[p.spec]:
                sources[p.spec].append(c.label)
    kept = dedupe(order, k, t, n)
    return ConditionSet(tuple(ConditionItem(s, "; ".join(sources[s])) for s in kept)), notes


# -- k | delta ------------------------------------------------------------------------


def plan_k_divides(n: int, k: int, delta: int, strict: bool = False) -> PlanReport:
    if delta % k:
        raise PlanError("k must divide delta")
    p = derive_params(n, k, delta)
    mu, S = p.mu, p.S
    notes: list[str] = []
    try:
        _, bounds, _ = main_conditions(n, k, delta)
    except CriteriaError as exc:
        raise PlanError(str(exc)) from exc
    ok = all(b.passed for b in bounds)
    if not ok:
        if strict:
            raise PlanError(f"({n},{k},{delta}) does not meet the criterion's bound on n")
        notes.append("parameters do not meet the criterion's bound on n; plan computed anyway")

    if delta == 0:
        cls = [ClassPlan("l>=0", None, [hankel(0, 0, 1)])]
        C, extra = _collect(cls, n, k, k, mu)
        return PlanReport(n, k, delta, "k|delta", {"S": S}, cls, C, ok, notes + extra)

    W = cdiv(S - 2, n - k)
    E = cdiv(W, 2) - 1
    F = W // 2 - 1
    R = W * (n - k) - (S - 2)
    inter = {"S": S, "W": W, "E": E, "F": F, "R": R}
    if not 0 <= R <= n - k - 1:
        notes.append(f"R={R} lies outside [0, n-k-1]")

    # l >= E: forward window at the start, reverse window at the end
    budget = R
    rev_split = F > 0 and F * k - 1 > 0 and budget >= F * k - 1 and n >= (F + 1) * k
    if rev_split:
        budget -= F * k - 1
    fwd_split = E > 0 and E * k - 1 > 0 and budget >= E * k - 1 and n >= (E + 1) * k
    inter["reverse_split"] = rev_split
    inter["forward_split"] = fwd_split
    head = [fwd_window(E - 1), fwd_column(E)] if fwd_split else [fwd_window(E)]
    tail = [rev_column(F, mu), rev_window(F - 1, mu)] if rev_split else [rev_window(F, mu)]
    classes = [ClassPlan(f"l>={E}", None, head + tail)]
    if mu <= 1 and F == E - 1 >= 0:
        notes.append(f"l=F=E-1={F} with mu={mu}: pieces follow the weight formulas, the case description is ambiguous here")

    per_l = []
    for l in range(E - 1, -1, -1):
        if l == 0:
            classes.append(ClassPlan("l=0", 0, [hankel(0, 0, mu + 1)]))
            continue
        A = n * l - 3 * k * l + 2
        row = {"l": l, "A": A, "x": 0, "y": 0, "step": "start"}
        pieces = [fwd_window(l - 1), hankel(l, l, mu - l + 1), rev_window(l - 1, mu)]
        special_mu2 = mu == 2 and l == 1 == F == E - 1
        if special_mu2:
            row["step"] = "start (kept for mu=2, l=F=E-1)"
        elif A >= k:
            left = A
            if A >= 2 * k:
                left = A - 2 * k
                middle_w = mu - l - 1
                rev = [rev_window(l, mu)]
                row["step"] = "forward and reverse windows grown"
                if l == F == E - 1 and mu >= 3 and rev_split and left >= F * k - 1:
                    rev = [rev_column(F, mu), rev_window(F - 1, mu)]
                    left -= F * k - 1
                    row["step"] += ", reverse window split"
                loss = (l + 1) * k - 1
                x = max(0, min(mu - l - 2, left // loss))
                middle = _split_middle(l, middle_w, x)
                y = 0
                if middle_w > 0 and x == mu - l - 2:
                    per_col = n - (l + 1) * k + 1
                    y = max(0, min(mu - l - 1, (left - (mu - l - 2) * loss) // per_col))
                    middle = middle[: len(middle) - y] if y else middle
                row["x"], row["y"] = x, y
                pieces = [fwd_window(l)] + middle + rev
            else:
                row["step"] = "forward window grown"
                pieces = [fwd_window(l), hankel(l, l + 1, mu - l), rev_window(l - 1, mu)]
        classes.append(ClassPlan(f"l={l}", l, pieces, {k_: v for k_, v in row.items() if k_ != "l"}))
        per_l.append(row)
    inter["per_l"] = per_l
    C, extra = _collect(classes, n, k, k, mu)
    return PlanReport(n, k, delta, "k|delta", inter, classes, C, ok, notes + extra)


def _split_middle(l: int, width: int, x: int) -> list[Piece]:
    """Middle Hankel window over columns l+1..l+width, cut x times.

    Single block columns are peeled off the right end; the deletion step
    removes pieces from the right as well.
    """
    if width <= 0:
        return []
    pieces = []
    right = l + width  # last absolute column index
    for _ in range(x):
        pieces.insert(0, hankel(l, right, 1))
        right -= 1
        width -= 1
    return [hankel(l, l + 1, width)] + pieces


# -- k does not divide delta -----------------------------------------------------------


def plan_k_ndivides(n: int, k: int, delta: int, strict: bool = False) -> PlanReport:
    if delta % k == 0:
        raise PlanError("k must not divide delta")
    p = derive_params(n, k, delta)
    mu, t, S = p.mu, p.t, p.S
    notes: list[str] = []
    bb = b_bounds(n, k, delta)
    ok = n >= bb.B
    if not ok:
        if strict:
            raise PlanError(f"({n},{k},{delta}) violates n >= B = {bb.B}")
        notes.append(f"n={n} is below B={bb.B}; plan computed anyway")

    D = (n - t) // k

    def tail_weight(terms: int) -> int:
        return sum(n - (i - 1) * k - t + 1 for i in range(1, terms + 1))

    E = 0
    while (n - k) * (E + 1) + 1 + tail_weight(min(E + 1, D + 1)) < S:
        E += 1
    if D >= E:
        F = 0
        while (n - k) * (E + 1) + 1 + tail_weight(F + 1) < S:
            F += 1
    else:
        F = D
    surplus = (n - k) * (E + 1) + 1 + tail_weight(F + 1) - S
    fwd_split = E > 0 and surplus >= E * k - 1 and n >= (E + 1) * k
    inter = {"S": S, "D": D, "E": E, "F": F, "surplus": surplus, "forward_split": fwd_split, "B": str(bb.B)}
    head = [fwd_window(E - 1), fwd_column(E)] if fwd_split else [fwd_window(E)]
    classes = [ClassPlan(f"l>={E}", None, head + [stack(j, mu) for j in range(F, -1, -1)])]

    per_l = []
    for l in range(E - 1, -1, -1):
        c = (2 * l + 1 + (l + 1) * l // 2 - mu) * k
        A1 = (l + 1) * n - c + l + 2 - t * (l + 1) - delta
        A2 = l * n - c + l + 1 + t - delta
        top = min(D, l)
        stacks = [stack(j, mu) for j in range(top, -1, -1)]
        row = {"l": l, "A1": A1, "A2": A2, "x": 0, "y": 0, "C1": None, "C2": None, "step": "start"}
        first = [fwd_window(l - 1)] if l > 0 else []
        pieces = first + [hankel(l, l, mu - l)] + stacks
        if A1 >= k and A2 >= t:
            row["step"] = "forward window grown"
            loss1, loss2 = (l + 1) * k - 1, l * k + t - 1
            cand = [mu - l - 2, (A1 - k) // loss1]
            if loss2 > 0:
                cand.append((A2 - t) // loss2)
            x = max(0, min(cand))
            middle_w = mu - l - 1
            middle = _split_middle(l, middle_w, x)
            y = 0
            left1 = A1 - k - x * loss1
            if middle_w > 0 and x == mu - l - 2:
                C1 = (A1 - k - (mu - l - 2) * loss1) // (n - (l + 1) * k + 1)
                C2 = (A2 - t - (mu - l - 2) * loss2) // (n - l * k - t + 1)
                y = max(0, min(mu - l - 1, C1, C2))
                row["C1"], row["C2"] = C1, C2
                middle = middle[: len(middle) - y] if y else middle
                left1 = A1 - k - (mu - l - 2) * loss1 - y * (n - (l + 1) * k + 1)
            row["x"], row["y"] = x, y
            if F < top:
                # drop the deepest stacks while the remaining weight allows
                dropped = 0
                for j in range(top, F, -1):
                    w = n - j * k - t + 1
                    if left1 >= w:
                        left1 -= w
                        stacks = [s for s in stacks if s != stack(j, mu)]
                        dropped += 1
                    else:
                        break
                row["stacks_dropped"] = dropped
            pieces = [fwd_window(l)] + middle + stacks
        classes.append(ClassPlan(f"l={l}", l, pieces, {k_: v for k_, v in row.items() if k_ != "l"}))
        per_l.append(row)
    inter["per_l"] = per_l
    C, extra = _collect(classes, n, k, t, mu)
    return PlanReport(n, k, delta, "k!|delta", inter, classes, C, ok, notes + extra)


def plan(n: int, k: int, delta: int, strict: bool = False) -> PlanReport:
    if n <= k or k < 1:
        raise PlanError("need n > k >= 1")
    build = plan_k_divides if delta % k == 0 else plan_k_ndivides
    try:
        return build(n, k, delta, strict)
    except ParamError as exc:
        # only reachable outside the criteria's parameter range
        raise PlanError(f"({n},{k},{delta}): no valid splitting ({exc})") from exc


# -- weight audit -------------------------------------------------------------------------


@dataclass
class AuditRow:
    l: int
    subcase: str
    total: int
    parts: list[tuple[str, int]]

    def to_dict(self) -> dict:
        return {"l": self.l, "subcase": self.subcase, "total": self.total, "parts": [list(p) for p in self.parts]}


@dataclass
class Audit:
    S: int
    rows: list[AuditRow]

    @property
    def passed(self) -> bool:
        return all(r.total >= self.S for r in self.rows)

    @property
    def failures(self) -> list[AuditRow]:
        return [r for r in self.rows if r.total < self.S]

    def to_dict(self) -> dict:
        return {"S": self.S, "pass": self.passed, "rows": [r.to_dict() for r in self.rows]}


def _piece_weight(piece: Piece, l: int, n: int, k: int, t: int, top_zero: bool) -> int:
    """Guaranteed weight of one piece for a message of degree l.

    ``top_zero`` is the subcase where the first t entries of u_l vanish, so
    u_l meets tilde cells with nothing and full cells with k - t entries.
    """
    spec = piece.spec
    R, C = spec.shape
    cols = C * n
    if piece.anchor in ("start", "end") and not (top_zero and piece.anchor == "end" and t < k):
        return (n - k) * R + 1
    rows, live = 0, False
    for r in range(R):
        u = piece.row_index(r, l)
        if u < 0 or u > l:
            continue
        tilde = spec.row_kind(r) == "t"
        h = t if tilde else k
        if top_zero and u == l:
            h = 0 if tilde else k - t
        if h and u in (0, l):
            live = True
        rows += h
    if not live:
        return 0
    return max(0, cols - rows + 1)


def required_weight_audit(report: PlanReport, params=None, strict: bool = False) -> Audit:
    """Re-add the guaranteed weight of every class's pieces and compare with S."""
    p = params or report.params
    n, k, t, mu, S = p.n, p.k, p.t, p.mu, p.S
    generic = report.classes[0]
    start = 0 if generic.l is None and generic.label == "l>=0" else report.intermediates.get("E", 0)
    rows = []
    subcases = [("all", False)] if t == k else [("u_l top != 0", False), ("u_l top = 0", True)]
    concrete = {c.l: c for c in report.classes if c.l is not None}
    for l in range(0, start + mu + 3):
        cls = concrete.get(l, generic if l >= start else None)
        if cls is None:
            continue
        used = set()
        for name, top_zero in subcases:
            parts, total = [], 0
            for piece in cls.pieces:
                cols = _piece_columns(piece, l, mu)
                if cols & used and name == subcases[0][0]:
                    raise AuditError(f"pieces overlap in class {cls.label} at l={l}")
                used |= cols
                w = _piece_weight(piece, l, n, k, t, top_zero)
                parts.append((display_name(piece.spec, mu), w))
                total += w
            used = set()
            rows.append(AuditRow(l, name, total, parts))
    audit = Audit(S, rows)
    if strict and not audit.passed:
        bad = audit.failures[0]
        raise AuditError(f"l={bad.l} ({bad.subcase}): guaranteed weight {bad.total} < S={S}")
    return audit


def _piece_columns(piece: Piece, l: int, mu: int) -> set[int]:
    """Absolute coefficient-block columns a placed piece covers."""
    spec = piece.spec
    R, C = spec.shape
    # column c of the layout sits at block index (cell index + message index) of any non-zero cell
    out = set()
    for c in range(C):
        for r in range(R):
            cell = spec.grid[r][c]
            if cell is None:
                continue
            if piece.anchor == "end":
                # reverse windows are stored reversed: layout column c is block mu + l - c
                out.add(mu + l - c)
            else:
                out.add((mu if cell == TILDE else cell) + piece.row_index(r, l))
            break
    return out
