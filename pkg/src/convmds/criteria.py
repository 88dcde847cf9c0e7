"""Sufficient minor-based criteria for MDS convolutional codes.

``check_main`` handles k | delta, ``check_main2`` handles k not dividing
delta; ``check_prior_work`` is the superregular-stack criterion kept for
field-size comparisons.  All parameter bounds are exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .minorlab import ConditionReport, check_condition_set, check_fullsize_minors, is_superregular
from .polymat import (
    ConditionItem,
    ConditionSet,
    PolyMatrix,
    instantiate,
    reverse_sliding,
    row,
    single,
    sliding,
    structural_checks,
    TILDE,
    tilde_stack,
    window,
)


class CriteriaError(ValueError):
    pass


@dataclass
class BoundCheck:
    name: str
    required: Fraction
    actual: int
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.actual >= self.required

    def to_dict(self) -> dict:
        d = {"name": self.name, "required": str(self.required), "n": self.actual, "pass": self.passed}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class CriteriaReport:
    theorem: str
    bounds: list[BoundCheck]
    conditions: ConditionSet
    minors: ConditionReport | None
    mu: int
    notes: list[str] = field(default_factory=list)
    superregular: object = None

    @property
    def bounds_pass(self) -> bool:
        return all(b.passed for b in self.bounds)

    @property
    def minors_pass(self) -> bool:
        return self.minors is not None and self.minors.passed

    @property
    def verdict(self) -> str:
        if not self.bounds_pass:
            return "bounds-fail"
        if not self.minors_pass:
            return "minors-fail"
        return "certified-MDS"

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "verdict": self.verdict,
            "bounds": [b.to_dict() for b in self.bounds],
            "conditions": self.conditions.to_list(self.mu),
            "minors": self.minors.to_dict() if self.minors else None,
            "notes": self.notes,
        } | ({"superregular": self.superregular.to_dict()} if self.superregular else {})


def validate_input(G: PolyMatrix) -> None:
    """Reject encoders the criteria say nothing about."""
    rep = structural_checks(G)
    p = G.params
    if rep.degree != p.delta:
        raise CriteriaError(f"declared degree {p.delta} but full-size minors have degree {rep.degree}")
    if not rep.is_row_reduced:
        raise CriteriaError("generator matrix is not row reduced")
    if not rep.has_generic_row_degrees:
        raise CriteriaError(f"row degrees {rep.row_degrees} are not generic for delta={p.delta}")
    if G.mu != p.mu:
        raise CriteriaError(f"coefficient count {G.mu + 1} does not match mu={p.mu}")


# -- condition sets straight from the theorems ----------------------------------------


def main_conditions(n: int, k: int, delta: int) -> tuple[ConditionSet, list[BoundCheck], list[str]]:
    if delta % k:
        raise CriteriaError("main criterion needs k | delta")
    if n <= k:
        raise CriteriaError("need n > k")
    mu = delta // k
    notes: list[str] = []
    bounds: list[BoundCheck] = []
    items: list[ConditionItem] = []
    if mu == 0:
        items.append(ConditionItem(single(0), "mu=0"))
    elif mu <= 2:
        items += [
            ConditionItem(sliding(mu), "forward window"),
            ConditionItem(reverse_sliding(mu - 1, mu), "reverse window"),
            ConditionItem(row(*range(mu + 1)), "row [G0..Gmu]"),
        ]
        req = Fraction(2 * k - 1) if mu == 1 else Fraction(3 * k - 2)
        bounds.append(BoundCheck(f"n >= {'2k-1' if mu == 1 else '3k-2'}", req, n))
    else:
        if (k, delta) == (2, 6):
            bounds.append(BoundCheck("n >= 5 (k=2, delta=6)", Fraction(5), n, "the weight count alone gives n >= 9/2"))
        elif (k, delta) == (1, 3):
            bounds.append(BoundCheck("n >= 2 (k=1, delta=3)", Fraction(2), n))
        else:
            req = 3 * k - Fraction(2 * k, delta - 2 * k)
            bounds.append(BoundCheck("n >= 3k - 2k/(delta-2k)", req, n))
        items.append(ConditionItem(sliding(mu - 1), "forward window"))
        items.append(ConditionItem(reverse_sliding(mu - 1, mu), "reverse window"))
        cap = min(Fraction(mu - 1), Fraction(n * (mu + 1) - k + 1, n + k))
        l = 0
        while l < cap:
            items.append(ConditionItem(window(l, l, mu - l + 1), f"window l={l}"))
            l += 1
    return ConditionSet(tuple(_unique(items))), bounds, notes


@dataclass(frozen=True)
class BBounds:
    B1: Fraction
    B2: Fraction
    B3: Fraction
    B4: Fraction
    B5: Fraction

    @property
    def B(self) -> Fraction:
        return max(self.B1, self.B2, self.B3, self.B4, self.B5)

    def to_dict(self) -> dict:
        return {f"B{i}": str(v) for i, v in enumerate((self.B1, self.B2, self.B3, self.B4, self.B5), 1)} | {
            "B": str(self.B)
        }


def b_bounds(n: int, k: int, delta: int) -> BBounds:
    F = Fraction
    mu = -(-delta // k)
    t = delta + k - k * mu
    b1 = t - 1 + F(mu - 1, 2) * k + F(delta, mu) if mu >= 2 else F(0)
    b2 = -1 + F(mu, 2) * k + F(delta, mu - 1) if mu >= 2 else F(0)
    b3 = (2 - F(mu, 2)) * k + delta - 1 - F(mu * k + k - delta + 1, mu - 1) if mu >= 3 else F(0)
    b4 = -1 + (2 + F(mu - 1, 2)) * k - F(1, mu - 2) if mu >= 3 else F(0)
    b5 = F(2 * (delta + k * (1 - mu)) - 1)
    return BBounds(b1, b2, b3, b4, b5)


def main2_conditions(n: int, k: int, delta: int) -> tuple[ConditionSet, list[BoundCheck], list[str]]:
    if delta % k == 0:
        raise CriteriaError("main2 criterion needs k not dividing delta")
    if n <= k:
        raise CriteriaError("need n > k")
    mu = -(-delta // k)
    bb = b_bounds(n, k, delta)
    bounds = [BoundCheck("n >= B = max(B1..B5)", bb.B, n, ", ".join(f"{a}={b}" for a, b in bb.to_dict().items()))]
    items = [ConditionItem(sliding(mu - 1), "forward window")]
    for l in range(mu - 1):
        items.append(ConditionItem(window(l, l, mu - l), f"window l={l}"))
    for i in range(mu - 1, 0, -1):
        if n >= k * (mu - i + 1):
            items.append(ConditionItem(tilde_stack(mu, i), f"stack down to G{i}"))
    items.append(ConditionItem(single(TILDE), "tilde block"))
    return ConditionSet(tuple(_unique(items))), bounds, []


def _unique(items):
    seen, out = set(), []
    for it in items:
        if it.spec not in seen:
            seen.add(it.spec)
            out.append(it)
    return out


# -- checks on concrete codes -----------------------------------------------------------


def _planned_set(G: PolyMatrix) -> ConditionSet:
    from .planner import plan

    return plan(G.n, G.k, G.delta).conditions


def check_main(G: PolyMatrix, planned: bool = False, early_exit: bool = True) -> CriteriaReport:
    p = G.params
    if p.delta % p.k:
        raise CriteriaError("main criterion needs k | delta")
    validate_input(G)
    C, bounds, notes = main_conditions(p.n, p.k, p.delta)
    if planned:
        C = _planned_set(G)
        notes.append("conditions from the relaxation planner")
    return CriteriaReport("main", bounds, C, check_condition_set(C, G, early_exit), p.mu, notes)


def check_main2(G: PolyMatrix, planned: bool = False, early_exit: bool = True) -> CriteriaReport:
    p = G.params
    if p.delta % p.k == 0:
        raise CriteriaError("main2 criterion needs k not dividing delta")
    validate_input(G)
    C, bounds, notes = main2_conditions(p.n, p.k, p.delta)
    if planned:
        C = _planned_set(G)
        notes.append("conditions from the relaxation planner")
    return CriteriaReport("main2", bounds, C, check_condition_set(C, G, early_exit), p.mu, notes)


def certify(G: PolyMatrix, theorem: str = "auto", planned: bool = False, early_exit: bool = True) -> CriteriaReport:
    if theorem == "auto":
        theorem = "main" if G.delta % G.k == 0 else "main2"
    if theorem == "main":
        return check_main(G, planned, early_exit)
    if theorem == "main2":
        return check_main2(G, planned, early_exit)
    raise CriteriaError(f"unknown theorem {theorem!r}")


def check_gl06(G: PolyMatrix, j: int) -> bool:
    """Minor test for optimality of the j-th column distance (G_0 full rank)."""
    p = G.params
    if j > p.L:
        raise CriteriaError(f"j={j} exceeds L={p.L}")
    M, supp = instantiate(sliding(j), G, pad=True)
    return check_fullsize_minors(M, G.field, supp).passed


# -- prior-work comparison ------------------------------------------------------------------


def prior_stack(mu: int):
    return tilde_stack(mu, 0) if mu > 0 else single(0)


def check_prior_work(G: PolyMatrix, nu: int | None = None) -> CriteriaReport:
    """Superregular (tilde G_mu; G_mu-1; ...; G_0) plus the stated row conditions and n-bound.

    ``nu`` enters the bound n >= 2 delta + k - nu for delta >= k; it defaults
    to the smallest row degree.
    """
    p = G.params
    validate_input(G)
    notes = []
    bounds = []
    items = []
    if p.delta < p.k:
        bounds.append(BoundCheck("n >= delta+k-1", Fraction(p.delta + p.k - 1), p.n, "hypothesis delta < k"))
    else:
        if nu is None:
            nu = min(G.row_degrees)
            notes.append(f"nu defaulted to the smallest row degree ({nu})")
        bounds.append(BoundCheck("n >= 2delta+k-nu", Fraction(2 * p.delta + p.k - nu), p.n, f"hypothesis delta >= k, nu={nu}"))
        if p.divides:
            items.append(ConditionItem(row(*range(p.mu + 1)), "row [G0..Gmu]"))
        else:
            items.append(ConditionItem(row(*range(p.mu)), "row [G0..Gmu-1]"))
            items.append(ConditionItem(single(TILDE), "tilde block"))
    C = ConditionSet(tuple(items))
    minors = check_condition_set(C, G) if items else ConditionReport(True)
    M, supp = instantiate(prior_stack(p.mu), G)
    sr = is_superregular(M, G.field, supp)
    notes.append(f"stack superregular: {sr.passed}" + ("" if sr.passed else f" (witness {sr.witness})"))
    minors.passed = minors.passed and sr.passed
    return CriteriaReport("prior-work", bounds, C, minors, p.mu, notes, sr)
