"""Combinatorial geometry of a discrete Loewner hull.

The hull of D(m) is a union of m curved branches.  Branch k (0-based) is the
image under D(k) of the vertical slit of r(S(k)); it attaches at

    b_k = D(k)(S(k)),

the boundary value of the previous chain at the new driver value.  If b_k is
real the branch starts a new tree rooted at b_k (unless an existing root
already sits there); otherwise it grows off an earlier branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .halfplane_maps import SlitChain, eval_chain, eval_slit_time, slit_height

__all__ = [
    "Branch",
    "Tree",
    "HullForest",
    "StepClass",
    "classify_step",
    "build_forest",
    "forest_stats",
    "branch_trace",
]

EPS_ROOT = 1e-9
ROOT_MERGE_TOL = 1e-9


@dataclass
class Branch:
    parent: int | None  # index of the branch it grows from; None for a tree root
    attach: complex
    tip: complex
    tree: int


@dataclass
class Tree:
    root: float
    branches: list = field(default_factory=list)


@dataclass
class HullForest:
    n: int
    trees: list
    branches: list

    @property
    def m(self) -> int:
        return len(self.branches)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "trees": [{"root": t.root, "branches": list(t.branches)} for t in self.trees],
            "branches": [
                {"parent": b.parent, "tree": b.tree,
                 "attach": [b.attach.real, b.attach.imag],
                 "tip": [b.tip.real, b.tip.imag]}
                for b in self.branches
            ],
        }


@dataclass(frozen=True)
class StepClass:
    kind: str  # "root" or "branch"
    point: complex
    parent: int | None = None


def _trace_attach(c: SlitChain, m: int, eps_root: float):
    """Follow the driver value S(m) back through r(S(m-1)), ..., r(S(0)).

    Returns the attach point and the index of the first slit whose map lifts
    the point off the real axis (the parent branch), or None.
    """
    tau = 1.0 / c.n
    w = complex(c.drivers[m], 0.0)
    parent = None
    for k in range(m - 1, -1, -1):
        w = complex(eval_slit_time(c.drivers[k], tau, w))
        if parent is None and w.imag > eps_root:
            parent = k
    return w, parent


def classify_step(c: SlitChain, m: int, eps_root: float = EPS_ROOT) -> StepClass:
    """Decide whether slit ``m`` starts a new tree or branches off the hull.

    The attach point is the boundary value of D(m) = r(S(0)) o ... o r(S(m-1))
    at S(m).
    """
    if m < 1 or m >= c.m:
        raise ValueError("need 1 <= m < number of drivers")
    b, parent = _trace_attach(c, m, eps_root)
    if b.imag > eps_root:
        return StepClass("branch", b, parent)
    return StepClass("root", complex(b.real, 0.0), None)


def build_forest(c: SlitChain, eps_root: float = EPS_ROOT,
                 merge_tol: float = ROOT_MERGE_TOL) -> HullForest:
    """Classify every slit of the chain and assemble trees.

    New roots within ``merge_tol`` of an existing root join that tree.
    Branch tips are D(k)(S(k) + 2i/sqrt(n)) at creation time.
    """
    m = c.m
    h = slit_height(c.n)
    tau = 1.0 / c.n
    # push every base point S(k) and tip S(k) + ih through r(S(k-1)), ..., r(S(0))
    attach = c.drivers.astype(complex)
    tips = c.drivers + 1j * h
    parent = np.full(m, -1)
    for j in range(m - 2, -1, -1):
        sel = slice(j + 1, m)
        attach[sel] = eval_slit_time(c.drivers[j], tau, attach[sel])
        tips[sel] = eval_slit_time(c.drivers[j], tau, tips[sel])
        lifted = (parent[sel] < 0) & (attach[sel].imag > eps_root)
        parent[sel] = np.where(lifted, j, parent[sel])

    trees: list[Tree] = []
    branches: list[Branch] = []
    for k in range(m):
        b, tip = complex(attach[k]), complex(tips[k])
        if k > 0 and b.imag > eps_root:
            p = int(parent[k])
            tree = branches[p].tree
            branches.append(Branch(p, b, tip, tree))
            trees[tree].branches.append(k)
            continue
        x = b.real
        for ti, t in enumerate(trees):
            if abs(t.root - x) <= merge_tol:
                break
        else:
            trees.append(Tree(x, []))
            ti = len(trees) - 1
        trees[ti].branches.append(k)
        branches.append(Branch(None, complex(x, 0.0), tip, ti))
    return HullForest(c.n, trees, branches)


def forest_stats(f: HullForest) -> dict:
    """Tree count, sorted roots, gaps between neighbouring roots, heights."""
    roots = np.sort([t.root for t in f.trees])
    return {
        "tree_count": len(f.trees),
        "root_positions": roots.tolist(),
        "root_gaps": np.diff(roots).tolist(),
        "branch_heights": [b.attach.imag for b in f.branches],
        "tip_heights": [b.tip.imag for b in f.branches],
    }


def branch_trace(c: SlitChain, k: int, points: int = 64) -> np.ndarray:
    """Sample branch ``k`` of the hull as a polyline from its base to its tip."""
    y = np.linspace(0.0, slit_height(c.n), points)
    z = c.drivers[k] + 1j * y
    return np.asarray(eval_chain(c.head(k), z), dtype=complex)
