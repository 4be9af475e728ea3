"""Finite causal sites: two-relation region structures and their axioms.

A causal site is a finite set of regions carrying a containment partial
order (``subset``) and a strict precedence relation (``prec``), linked
by compatibility axioms; see ``check_axioms`` for the complete list.
Relations are stored as dense boolean matrices, which makes every axiom
a decidable exhaustive check.

Empty-region conventions (the axioms constrain precedence only on
nonempty regions): precedence facts that mention the empty region are
ignored by every check, and the empty region counts as a valid cutting
B_A that "precedes" anything vacuously.  This keeps the cutting axiom
total: when nothing of B precedes A, the cutting of A by B is the empty
region.

The cascade generator builds the branching structure of a region that
splits into p parts per generation.  The regions are all contiguous
spans of the final generation's cells (tree blocks plus their interval
closure) ordered by strict left-to-right precedence; the closure is
required because precedence pasts must be closed under unions, which
bare tree nodes are not.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

AXIOM_IDS = ("1a", "1b", "1c", "2", "3", "4a", "4b", "5a", "5b", "5c", "6", "7")

# above this many regions the cubic-tensor checks fall back to loops
_TENSOR_LIMIT = 520


class SiteStructureError(ValueError):
    """A site file or a required structural element is malformed/missing."""


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple     # region ids instantiating the failed clause

    def as_json(self) -> dict:
        return {"axiom": self.axiom, "witness": list(self.witness)}


@dataclass(frozen=True)
class AxiomReport:
    violations: tuple

    @property
    def passed(self) -> bool:
        return not self.violations

    def as_json(self) -> dict:
        return {"passed": self.passed,
                "violations": [v.as_json() for v in self.violations]}


@dataclass
class Site:
    """Finite region structure with containment and precedence matrices.

    subset[i, j] means region i is contained in region j; prec[i, j]
    means region i precedes region j.  Matrices are taken literally (no
    implicit closure); ``check_axioms`` decides whether they form a
    causal site.
    """

    regions: tuple
    empty: str
    subset: np.ndarray
    prec: np.ndarray
    union_table: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if len(set(self.regions)) != len(self.regions):
            raise SiteStructureError("region ids must be unique")
        if self.empty not in self.regions:
            raise SiteStructureError(f"empty region {self.empty!r} not among regions")
        n = len(self.regions)
        self.subset = np.asarray(self.subset, dtype=bool)
        self.prec = np.asarray(self.prec, dtype=bool)
        if self.subset.shape != (n, n) or self.prec.shape != (n, n):
            raise SiteStructureError("relation matrices must be square over the regions")
        self._index = {r: i for i, r in enumerate(self.regions)}

    def index(self, region: str) -> int:
        try:
            return self._index[region]
        except KeyError:
            raise SiteStructureError(f"unknown region {region!r}") from None

    @property
    def n_regions(self) -> int:
        return len(self.regions)

    @property
    def empty_index(self) -> int:
        return self._index[self.empty]

    def nonempty_mask(self) -> np.ndarray:
        mask = np.ones(self.n_regions, dtype=bool)
        mask[self.empty_index] = False
        return mask

    def effective_prec(self) -> np.ndarray:
        """Precedence with empty-region facts blanked out."""
        p = self.prec.copy()
        e = self.empty_index
        p[e, :] = False
        p[:, e] = False
        return p


def site_from_relations(regions, subset_pairs, prec_pairs, empty) -> Site:
    """Assemble a Site from explicit fact lists (taken literally)."""
    regions = tuple(regions)
    index = {r: i for i, r in enumerate(regions)}
    n = len(regions)
    sub = np.zeros((n, n), dtype=bool)
    prc = np.zeros((n, n), dtype=bool)
    for a, b in subset_pairs:
        if a not in index or b not in index:
            raise SiteStructureError(f"subset pair ({a!r}, {b!r}) names unknown regions")
        sub[index[a], index[b]] = True
    for a, b in prec_pairs:
        if a not in index or b not in index:
            raise SiteStructureError(f"prec pair ({a!r}, {b!r}) names unknown regions")
        prc[index[a], index[b]] = True
    return Site(regions=regions, empty=empty, subset=sub, prec=prc)


def site_to_json(site: Site) -> dict:
    """Exchange form: explicit sorted fact lists."""
    sub = [[site.regions[a], site.regions[b]] for a, b in np.argwhere(site.subset)]
    prc = [[site.regions[a], site.regions[b]] for a, b in np.argwhere(site.prec)]
    return {
        "regions": list(site.regions),
        "empty": site.empty,
        "subset": sorted(sub),
        "prec": sorted(prc),
    }


def site_from_json(data) -> Site:
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    try:
        regions = data["regions"]
        empty = data["empty"]
        subset = data["subset"]
        prec = data["prec"]
    except (KeyError, TypeError) as exc:
        raise SiteStructureError(f"site object lacks required key: {exc}") from None
    return site_from_relations(regions, subset, prec, empty)


# ---------------------------------------------------------------------------
# basic operations
# ---------------------------------------------------------------------------

def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.float64) @ b.astype(np.float64)) > 0.5


def union(site: Site, a: str, b: str) -> str:
    """Least upper bound of a and b under containment."""
    s = site.subset
    ia, ib = site.index(a), site.index(b)
    ubs = np.flatnonzero(s[ia, :] & s[ib, :])
    if len(ubs) == 0:
        raise SiteStructureError(f"regions {a!r} and {b!r} have no upper bound")
    up_count = s.sum(axis=1)
    m = ubs[np.argmax(up_count[ubs])]
    if not s[m, ubs].all():
        raise SiteStructureError(f"regions {a!r} and {b!r} have no least upper bound")
    return site.regions[m]


def cutting(site: Site, a: str, b: str) -> str:
    """The cutting B_A: the largest part of b that precedes a.

    Returns the empty region when nothing of b precedes a.  Assumes the
    site satisfies the order axioms; raises if the candidate set has no
    maximum (an axiom-6 failure).
    """
    ia, ib = site.index(a), site.index(b)
    p = site.effective_prec()
    cand = np.flatnonzero(p[:, ia] & site.subset[:, ib])
    if len(cand) == 0:
        return site.empty
    sub_count = site.subset.sum(axis=0)
    m = cand[np.argmax(sub_count[cand])]
    if not site.subset[cand, m].all():
        raise SiteStructureError(
            f"cutting of {a!r} by {b!r} does not exist (axiom 6 fails, witness ({a!r}, {b!r}))")
    return site.regions[m]


def is_causal_path(site: Site, sequence) -> bool:
    """True iff the sequence is nonempty, avoids the empty region, and
    each member strictly precedes the next."""
    seq = [site.index(r) for r in sequence]
    if not seq:
        return False
    e = site.empty_index
    if any(i == e for i in seq):
        return False
    p = site.effective_prec()
    return all(p[seq[k], seq[k + 1]] for k in range(len(seq) - 1))


def _complete_idx(subset: np.ndarray, prec: np.ndarray, e: int,
                  ib: int, ia: int, ic: int) -> bool:
    """Completeness of region ib for the pair ia < ic (index form).

    A counterexample is a causal path from ia to ic none of whose
    members is contained in ib and none of whose gaps admits inserting a
    region contained in ib.  Because precedence is transitive, a single
    insertion per gap suffices, so counterexamples are exactly paths in
    the graph restricted to regions outside ib with the insertable gap
    edges removed; completeness is the absence of such a path.
    """
    if subset[ia, ib] or subset[ic, ib]:
        return True
    ne = np.ones(len(subset), dtype=bool)
    ne[e] = False
    inside = subset[:, ib] & ne     # candidate insertions
    blocked = _bool_matmul(prec[:, inside], prec[inside, :]) if inside.any() \
        else np.zeros_like(prec)
    ok_node = ~subset[:, ib] & ne
    edges = prec & ~blocked & ok_node[:, None] & ok_node[None, :]
    # BFS from ia
    frontier = np.zeros(len(subset), dtype=bool)
    frontier[ia] = True
    seen = frontier.copy()
    while frontier.any():
        nxt = edges[frontier, :].any(axis=0) & ~seen
        if nxt[ic]:
            return False
        seen |= nxt
        frontier = nxt
    return True


def is_complete(site: Site, b: str, a: str, c: str) -> bool:
    """True iff every causal path from a to c refines through b.

    Requires a < b < c; refinements are supersequences of the path that
    keep its members and remain causal paths from a to c.
    """
    ia, ib, ic = site.index(a), site.index(b), site.index(c)
    p = site.effective_prec()
    if not (p[ia, ib] and p[ib, ic]):
        raise ValueError(f"precondition {a!r} < {b!r} < {c!r} does not hold")
    return _complete_idx(site.subset, p, site.empty_index, ib, ia, ic)


# ---------------------------------------------------------------------------
# the axiom checker
# ---------------------------------------------------------------------------

def _first_middle(left_row: np.ndarray, right_col: np.ndarray) -> int:
    return int(np.flatnonzero(left_row & right_col)[0])


def check_axioms(site: Site) -> AxiomReport:
    """Exhaustively verify all causal-site axioms; report every failure.

    1(a-c) containment is a partial order; 2 the empty region is its
    minimum; 3 every pair has a least upper bound (union); 4(a-b)
    precedence is a strict partial order on nonempty regions; 5(a) parts
    inherit precedence of the whole, (b) what precedes a whole precedes
    its parts, (c) pasts are closed under unions; 6 every cutting
    exists; 7 every strictly mediated pair admits a complete region.
    Each violation carries the witness regions of the failed instance.
    """
    viol: list[Violation] = []
    names = site.regions
    s = site.subset
    p = site.effective_prec()
    n = site.n_regions
    e = site.empty_index
    ne = site.nonempty_mask()

    def rep(axiom, *idx):
        viol.append(Violation(axiom, tuple(names[i] for i in idx)))

    # 1a transitivity
    m = _bool_matmul(s, s) & ~s
    for a, c in np.argwhere(m):
        rep("1a", a, _first_middle(s[a, :], s[:, c]), c)
    # 1b reflexivity
    for a in np.flatnonzero(~np.diag(s)):
        rep("1b", a)
    # 1c antisymmetry
    anti = s & s.T & ~np.eye(n, dtype=bool)
    for a, b in np.argwhere(anti):
        if a < b:
            rep("1c", a, b)
    # 2 empty-region minimality
    for a in np.flatnonzero(~s[e, :]):
        rep("2", a)

    # 3 unions (also builds the union table reused by 5c)
    union_table = _check_unions(site, viol)
    site.union_table = union_table

    # 4a strict-order transitivity on nonempty regions
    m = _bool_matmul(p, p) & ~p
    m &= ne[:, None] & ne[None, :]
    for a, c in np.argwhere(m):
        rep("4a", a, _first_middle(p[a, :], p[:, c]), c)
    # 4b irreflexivity
    for a in np.flatnonzero(np.diag(p) & ne):
        rep("4b", a)

    # 5a: A in B and B < C  =>  A < C
    s_ne = s & ne[:, None] & ne[None, :]
    m = _bool_matmul(s_ne, p) & ~p & ne[:, None]
    for a, c in np.argwhere(m):
        rep("5a", a, _first_middle(s_ne[a, :], p[:, c]), c)
    # 5b: A in B and C < B  =>  C < A
    m = _bool_matmul(p, s_ne.T) & ~p & ne[:, None] & ne[None, :]
    for c, a in np.argwhere(m):
        b = _first_middle(p[c, :], s_ne[a, :])
        rep("5b", a, b, c)
    # 5c: pasts closed under unions
    _check_past_unions(site, union_table, viol)

    # 6 cuttings
    _check_cuttings(site, viol)

    # 7 complete mediators
    _check_complete_regions(site, viol)

    return AxiomReport(tuple(viol))


def _check_unions(site: Site, viol: list) -> np.ndarray:
    """Verify axiom 3 for every pair; return the table of least upper bounds."""
    s = site.subset
    n = site.n_regions
    names = site.regions
    up_count = s.sum(axis=1)
    table = np.full((n, n), -1, dtype=np.int64)

    def exact_pair(a, b):
        ubs = np.flatnonzero(s[a, :] & s[b, :])
        for m in ubs:
            if s[m, ubs].all():
                return int(m)
        return -1

    if n <= _TENSOR_LIMIT:
        st = s.T
        ub = st[:, :, None] & st[:, None, :]          # ub[d, a, b]
        scores = ub * (up_count.astype(np.int16)[:, None, None] + 1)
        best = np.argmax(scores, axis=0)              # candidate lub per (a, b)
        del scores
        has_ub = ub.any(axis=0)
        # coverage: the lub must be below every upper bound
        below = s[best]                                # below[a, b, u] = s[best[a,b], u]
        covered = (~ub.transpose(1, 2, 0) | below).all(axis=2)
        good = has_ub & covered
        table[good] = best[good]
        suspects = np.argwhere(~good)
    else:
        suspects = np.argwhere(np.ones((n, n), dtype=bool))

    for a, b in suspects:
        m = exact_pair(a, b)
        if m >= 0:
            table[a, b] = m
        else:
            viol.append(Violation("3", (names[a], names[b])))
    return table


def _check_past_unions(site: Site, table: np.ndarray, viol: list) -> None:
    """Axiom 5c: A < C and B < C imply (A u B) < C."""
    p = site.effective_prec()
    names = site.regions
    n = site.n_regions
    valid = table >= 0
    if n <= _TENSOR_LIMIT:
        joined = p[np.clip(table, 0, None)]            # joined[a, b, c] = p[table[a,b], c]
        bad = (p[:, None, :] & p[None, :, :] & ~joined) & valid[:, :, None]
        for a, b, c in np.argwhere(bad):
            viol.append(Violation("5c", (names[a], names[b], names[c])))
        return
    for c in range(n):
        past = np.flatnonzero(p[:, c])
        for a in past:
            for b in past:
                u = table[a, b]
                if u >= 0 and not p[u, c]:
                    viol.append(Violation("5c", (names[a], names[b], names[c])))


def _check_cuttings(site: Site, viol: list) -> None:
    """Axiom 6: for all nonempty A and any B a maximal cutting exists."""
    s = site.subset
    p = site.effective_prec()
    n = site.n_regions
    e = site.empty_index
    ne = site.nonempty_mask()
    names = site.regions
    sub_count = s.sum(axis=0)

    def exact_pair(a, b):
        cand = np.flatnonzero(p[:, a] & s[:, b])
        if len(cand) == 0:
            return bool(s[e, b])               # empty region must qualify
        for m in cand:
            if s[cand, m].all():
                return True
        return False

    if n <= _TENSOR_LIMIT:
        t = p[:, :, None] & s[:, None, :]              # t[d, a, b]
        has_cand = t.any(axis=0)
        scores = t * (sub_count.astype(np.int16)[:, None, None] + 1)
        best = np.argmax(scores, axis=0)
        del scores
        contained = s.T[best]                          # contained[a, b, d] = s[d, best[a,b]]
        covered = (~t.transpose(1, 2, 0) | contained).all(axis=2)
        ok = np.where(has_cand, covered, s[e, :][None, :])
        ok |= ~ne[:, None]                             # axiom ranges over nonempty A
        suspects = np.argwhere(~ok)
    else:
        suspects = [(a, b) for a in np.flatnonzero(ne) for b in range(n)]

    for a, b in suspects:
        if not exact_pair(a, b):
            viol.append(Violation("6", (names[a], names[b])))


def _check_complete_regions(site: Site, viol: list) -> None:
    """Axiom 7: every A < C with a strict mediator has a complete region."""
    s = site.subset
    p = site.effective_prec()
    e = site.empty_index
    names = site.regions
    sub_count = s.sum(axis=0)
    mediated = p & _bool_matmul(p, p)
    for a, c in np.argwhere(mediated):
        inter = np.flatnonzero(p[a, :] & p[:, c])
        top = inter[np.argmax(sub_count[inter])]
        if s[inter, top].all():
            # every interior region of every path sits inside `top`,
            # and any mediator can be inserted into a direct path,
            # so `top` is complete for (a, c)
            continue
        if any(_complete_idx(s, p, e, b, a, c) for b in inter):
            continue
        viol.append(Violation("7", (names[a], names[c])))


# ---------------------------------------------------------------------------
# cascade generator
# ---------------------------------------------------------------------------

def cascade_site(p: int, depth: int) -> Site:
    """Branching-cascade site: p-way splits for ``depth`` generations.

    The final generation has p^(depth-1) cells; regions are all
    contiguous cell spans (the p-ary tree blocks named U0, U00, U01, ...
    plus the remaining spans S<lo>-<hi> that close the family under
    unions) and one empty region.  Containment is span inclusion;
    precedence is strict left-to-right disjointness, which propagates
    the sibling order U0i < U0j (i < j) to all their parts, as the
    compatibility axioms require.
    """
    if p < 2:
        raise ValueError(f"branching factor must be >= 2, got {p}")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    n_cells = p ** (depth - 1)

    # name the tree-aligned spans U0, U00, ... (child digit appended per level)
    aligned = {}

    def descend(name, lo, width):
        aligned[(lo, lo + width - 1)] = name
        if width == 1:
            return
        child = width // p
        for k in range(p):
            descend(name + str(k), lo + k * child, child)

    descend("U0", 0, n_cells)

    spans = [(lo, hi) for lo in range(n_cells) for hi in range(lo, n_cells)]
    spans.sort()
    names = ["phi"] + [aligned.get(sp, f"S{sp[0]}-{sp[1]}") for sp in spans]
    n = len(names)
    sub = np.zeros((n, n), dtype=bool)
    prc = np.zeros((n, n), dtype=bool)
    sub[0, :] = True
    lo = np.array([sp[0] for sp in spans])
    hi = np.array([sp[1] for sp in spans])
    sub[1:, 1:] = (lo[None, :] <= lo[:, None]) & (hi[:, None] <= hi[None, :])
    prc[1:, 1:] = hi[:, None] < lo[None, :]
    return Site(regions=tuple(names), empty="phi", subset=sub, prec=prc)
