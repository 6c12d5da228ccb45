"""Rule engine deciding (X, Y)-flattenability of a graph between lp spaces.

Rules are tried in a fixed order and the first one that settles the
question wins.  Every rule is a published theorem about flattenability;
nothing is extrapolated, so anything the rules do not cover is reported
as unknown together with the reason each rule failed to apply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import Graph, is_forest, pattern_graph
from .minors import DEFAULT_BUDGET, MinorBudgetExceeded, has_minor
from .spaces import INF, SpaceDescriptor

FLATTENABLE = "flattenable"
NOT_FLATTENABLE = "not_flattenable"
UNKNOWN = "unknown"

RULES = {
    "R1": "every graph flattens when dim Y = 1 (all lines are isometric)",
    "R2": "dim X = 1, dim Y >= 2: flattenable iff the graph is a forest",
    "R3": "Y embeds isometrically in X: every graph flattens",
    "R4": "(l2^d, l2) for d = 1, 2, 3 excludes K3 / K4 / {K5, K222}",
    "R5": "X isometric to linf^2, Y infinite-dimensional: excludes {W4, K4eK4}",
    "R6": "X a plane not isometric to linf^2, dim Y >= 3: excludes K4",
    "R7": "X strictly convex, Y not strictly convex (both dim >= 2): excludes K4",
    "R8": "X = l2^2: all graphs if Y is a line or l2^2, otherwise excludes K4",
    "R9": "dimension sufficiency for (lp^d, lp): d >= C(n,2) for p < inf, d >= n-2 for p = inf, n >= 4",
    "R10": "clique-minor lower bounds for (lp^d, lp)",
    "R11": "propagation: (X,lp) to (X,lq) for p <= q <= 2; (X,linf) to any Y; "
           "non-flattenability from (X,l2) to infinite-dimensional Y",
}

_FAMILIES = {1: ("K3",), 2: ("K4",), 3: ("K5", "K222")}


@dataclass
class Verdict:
    status: str
    rule: str | None = None
    witness: dict | None = None
    trail: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if self.status not in (FLATTENABLE, NOT_FLATTENABLE, UNKNOWN):
            raise ValueError(f"bad status {self.status!r}")
        if self.status != UNKNOWN and self.rule is None:
            raise ValueError("a decided verdict needs the rule that decided it")

    def to_json(self) -> dict:
        return {"status": self.status, "rule": self.rule, "witness": self.witness, "trail": self.trail}

    @classmethod
    def from_json(cls, data: dict) -> "Verdict":
        return cls(data["status"], data.get("rule"), data.get("witness"), list(data.get("trail", [])))


class _Skip(Exception):
    """A rule does not apply; the message says why."""


def _minor_witness(g: Graph, name: str, model) -> dict:
    out = {"kind": "minor", "pattern": name, "branch_sets": model.to_json()}
    if name in ("W4", "K4eK4"):
        out["certificate"] = name
    return out


def _exclusion(g: Graph, names, budget: int):
    """(status, witness, detail) for 'flattenable iff g avoids every pattern in names'."""
    for name in names:
        found, model = has_minor(g, pattern_graph(name), budget)
        if found:
            return NOT_FLATTENABLE, _minor_witness(g, name, model), f"{name} minor found"
    return FLATTENABLE, None, "no " + " / ".join(names) + " minor"


def _ps_of(x: SpaceDescriptor) -> set[float]:
    """Exponents q with X isometric to lq^dim(X)."""
    if x.dim == 1:
        return {1.0, 2.0, INF}
    if x.is_isometric_linf2:
        return {1.0, INF}
    return {x.p}


def _embeds(y: SpaceDescriptor, x: SpaceDescriptor) -> bool:
    if y.dim == 1:
        return True
    if y.p == x.p and y.dim <= x.dim:
        return True
    return y.is_isometric_linf2 and x.p in (1.0, INF) and x.dim >= 2


def _rule_r1(g, x, y, budget):
    if y.dim != 1:
        raise _Skip(f"dim Y = {y.dim}")
    return FLATTENABLE, None, "dim Y = 1"


def _rule_r2(g, x, y, budget):
    if x.dim != 1:
        raise _Skip(f"dim X = {x.dim}")
    if is_forest(g):
        return FLATTENABLE, None, "graph is a forest"
    _, model = has_minor(g, pattern_graph("K3"), budget)
    return NOT_FLATTENABLE, _minor_witness(g, "K3", model), "graph has a cycle"


def _rule_r3(g, x, y, budget):
    if not _embeds(y, x):
        raise _Skip(f"{y} does not embed isometrically in {x}")
    return FLATTENABLE, None, f"{y} embeds isometrically in {x}"


def _rule_r4(g, x, y, budget):
    if not (x.p == 2 and x.dim in _FAMILIES):
        raise _Skip("X is not l2^d with d <= 3")
    if not (y.p == 2 and y.dim == INF):
        raise _Skip("Y is not l2")
    return _exclusion(g, _FAMILIES[int(x.dim)], budget)


def _rule_r5(g, x, y, budget):
    if not x.is_isometric_linf2:
        raise _Skip("X is not isometric to linf^2")
    if y.dim != INF:
        raise _Skip("Y is finite-dimensional")
    return _exclusion(g, ("W4", "K4eK4"), budget)


def _rule_r6(g, x, y, budget):
    if not (x.dim == 2 and 1 < x.p < INF):
        raise _Skip("X is not a strictly convex plane")
    if y.dim < 3:
        raise _Skip(f"dim Y = {y.dim} < 3")
    return _exclusion(g, ("K4",), budget)


def _rule_r7(g, x, y, budget):
    if not (x.is_strictly_convex and x.dim >= 2):
        raise _Skip("X is not strictly convex of dimension >= 2")
    if y.is_strictly_convex or y.dim < 2:
        raise _Skip("Y is strictly convex")
    return _exclusion(g, ("K4",), budget)


def _rule_r8(g, x, y, budget):
    if not x.is_isometric_l22:
        raise _Skip("X is not l2^2")
    if y.dim == 1 or y.is_isometric_l22:
        return FLATTENABLE, None, "Y is a line or l2^2"
    return _exclusion(g, ("K4",), budget)


def _same_p_target(x: SpaceDescriptor, y: SpaceDescriptor) -> float:
    if not x.finite:
        raise _Skip("X is infinite-dimensional")
    if y.p not in _ps_of(x):
        raise _Skip(f"Y is not an l{y.p:g} space matching X")
    return y.p


def _rule_r9(g, x, y, budget):
    p = _same_p_target(x, y)
    d, n = int(x.dim), g.n
    if p < INF:
        need = max(1, math.comb(n, 2))
        if d >= need:
            return FLATTENABLE, {"kind": "bound", "n": n, "dim": d, "sufficient": need}, f"d = {d} >= C({n},2)"
        raise _Skip(f"d = {d} < C({n},2) = {need}")
    if n >= 4 and d >= n - 2:
        return FLATTENABLE, {"kind": "bound", "n": n, "dim": d, "sufficient": n - 2}, f"d = {d} >= n - 2"
    raise _Skip(f"p = inf needs n >= 4 and d >= n - 2 (n = {n}, d = {d})")


def clique_threshold(m: int, p: float) -> int | None:
    """K_m is not (lp^d, lp)-flattenable for any d below the returned value."""
    bounds = []
    if p == 1 and m >= 4:
        bounds.append(math.comb(m - 2, 2))
    if 1 < p < 2 and m >= 3:
        bounds.append(math.comb(m - 1, 2))
    if p == INF:
        bounds.append((2 * m) // 3)
        if 4 <= m <= 7:
            bounds.append(m - 2)
    good = [b for b in bounds if b > 1]
    return max(good) if good else None


def _rule_r10(g, x, y, budget):
    p = _same_p_target(x, y)
    if y.dim != INF:
        raise _Skip("Y is finite-dimensional")
    d = int(x.dim)
    m_min = next((m for m in range(2, g.n + 1) if (clique_threshold(m, p) or 0) > d), None)
    if m_min is None:
        raise _Skip(f"no clique lower bound exceeds d = {d} for graphs on {g.n} vertices")
    found, model = has_minor(g, pattern_graph("K", m_min), budget)
    if not found:
        raise _Skip(f"no K{m_min} minor")
    witness = _minor_witness(g, f"K{m_min}", model)
    witness.update(kind="bound", bound=clique_threshold(m_min, p), dim=d)
    return NOT_FLATTENABLE, witness, f"K{m_min} minor and d = {d} < {clique_threshold(m_min, p)}"


_DIRECT = [("R1", _rule_r1), ("R2", _rule_r2), ("R3", _rule_r3), ("R4", _rule_r4), ("R5", _rule_r5),
           ("R6", _rule_r6), ("R7", _rule_r7), ("R8", _rule_r8), ("R9", _rule_r9), ("R10", _rule_r10)]


def _direct(g: Graph, x: SpaceDescriptor, y: SpaceDescriptor, budget: int) -> Verdict:
    trail = []
    for rid, rule in _DIRECT:
        try:
            status, witness, detail = rule(g, x, y, budget)
        except _Skip as why:
            trail.append({"rule": rid, "outcome": "skipped", "detail": str(why)})
            continue
        except MinorBudgetExceeded as exc:
            trail.append({"rule": rid, "outcome": "inconclusive", "detail": str(exc)})
            continue
        trail.append({"rule": rid, "outcome": "applied", "detail": detail})
        return Verdict(status, rid, witness, trail)
    return Verdict(UNKNOWN, None, None, trail)


def _propagate(g: Graph, x: SpaceDescriptor, y: SpaceDescriptor, budget: int, trail: list) -> Verdict | None:
    def via(sub_y: SpaceDescriptor, want: str, detail: str):
        sub = _direct(g, x, sub_y, budget)
        if sub.status == want:
            trail.append({"rule": "R11", "outcome": "applied",
                          "detail": f"{detail}: ({x}, {sub_y}) decided by {sub.rule}"})
            witness = {"kind": "propagation", "from": str(sub_y), "rule": sub.rule, "inner": sub.witness}
            return Verdict(want, "R11", witness, trail)
        trail.append({"rule": "R11", "outcome": "skipped",
                      "detail": f"{detail}: ({x}, {sub_y}) is {sub.status}"})
        return None

    if y.dim == INF and y.p <= 2:
        for p0 in sorted({1.0} | {q for q in _ps_of(x) if q < y.p}):
            if p0 < y.p:
                v = via(SpaceDescriptor(p0, INF), FLATTENABLE, f"from l{p0:g} up to l{y.p:g}")
                if v:
                    return v
    linf = SpaceDescriptor(INF, INF)
    if y != linf:
        v = via(linf, FLATTENABLE, "from linf to any Y")
        if v:
            return v
    l2 = SpaceDescriptor(2, INF)
    if x.finite and y.dim == INF and y != l2:
        v = via(l2, NOT_FLATTENABLE, "l2 is the weakest infinite-dimensional target")
        if v:
            return v
    return None


def decide(g: Graph, x: SpaceDescriptor, y: SpaceDescriptor, budget: int = DEFAULT_BUDGET) -> Verdict:
    """Flattenability verdict for ``g`` from ``y`` into ``x``, with its rule trail."""
    verdict = _direct(g, x, y, budget)
    if verdict.status != UNKNOWN:
        return verdict
    trail = verdict.trail
    found = _propagate(g, x, y, budget, trail)
    if found:
        return found
    if not any(t["rule"] == "R11" for t in trail):
        trail.append({"rule": "R11", "outcome": "skipped", "detail": "no propagation source applies"})
    return Verdict(UNKNOWN, None, None, trail)


def explain(v: Verdict) -> str:
    lines = []
    if v.status == UNKNOWN:
        lines.append("unknown: no rule settles this case")
    else:
        lines.append(f"{v.status} by {v.rule}: {RULES[v.rule]}")
    w = v.witness or {}
    if "pattern" in w:
        lines.append(f"witness: {w['pattern']} minor with branch sets {w['branch_sets']}")
        if "certificate" in w:
            lines.append(f"  length certificate: {w['certificate']}")
    if w.get("kind") == "bound":
        lines.append(f"witness: dimension bound {({k: w[k] for k in w if k not in ('branch_sets',)})}")
    if w.get("kind") == "propagation":
        lines.append(f"witness: propagated from Y = {w['from']} (decided by {w['rule']})")
    lines.append("trail:")
    for step in v.trail:
        rid = step["rule"]
        lines.append(f"  {rid} [{step['outcome']}] {step['detail']}  ({RULES.get(rid, '')})")
    return "\n".join(lines)


def kn_dim_table(n: int, p: float) -> tuple[int, int | None]:
    """(sufficient dimension, insufficient-below threshold) for K_n in (lp^d, lp)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if p < INF:
        sufficient = max(1, math.comb(n, 2))
    elif n >= 4:
        sufficient = n - 2
    elif n == 3:
        sufficient = 2  # K3 avoids W4 and K4eK4
    else:
        sufficient = 1
    return sufficient, clique_threshold(n, p)
