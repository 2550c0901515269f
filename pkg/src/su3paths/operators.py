"""Creation, annihilation, cup and cap operators on graded path spaces,
and verification of the relations they satisfy.

All operators are materialized as dense blocks per (grading, position);
there is no global matrix.  Conventions (1-based positions, path
v_0 .. v_n, word w_1 .. w_n):

* annihilation C_i (1 <= i <= n-1) contracts a like-tagged pair at
  positions (i, i+1) through the triangle it closes, weight
  T/sqrt(mu(v_{i-1}) mu(v_{i+1})) for sigma-sigma and the conjugate cell
  for the mirrored pair; every other tag pattern gives the zero block.
* creation C+_i (1 <= i <= n) expands the single step at position i into
  the like-tagged pair through every completing triangle; weights are
  chosen so that the matrix is exactly the conjugate transpose of the
  matching annihilation.
* cup (1 <= i <= n-1) contracts a mixed-tag return v_{i-1} b v_{i-1},
  weight sqrt(mu(b)/mu(v_{i-1})) (the collapsed cell over mu); cap
  inserts returns through every neighbor, one operator per insertion
  order since the two orders land in different codomain words.

U_i = C+_i C_i is an endomorphism of each graded block.  verify_tl
sweeps all gradings up to a word length and reports max residuals for:
the quadratic relation U^2 = [2] U, commutation at distance, the
two-sided triangle identity, the quartic relation, the F-lemma
F_i F_{i+1} F_i = K F_i, and the cup-cap identities.  The triangle
identities are evaluated at positions where every operator involved
acts on a constant-tag run; on other patterns the operators involved
are not all triangle moves and the identities do not apply (see
tests for an explicit mixed-word counterexample).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping, Optional, Tuple

import numpy as np

from .cells import CellSystem, OrientedTriangle
from .graphs import GraphSpec, spectral_data
from .paths import (
    EdgeTag,
    ElementaryPath,
    GradingMismatch,
    PathGrading,
    PathVector,
    _basis_index,
    enumerate_paths,
)

ANNIHILATION = "ANNIHILATION"
CREATION = "CREATION"
CUP = "CUP"
CAP = "CAP"
U = "U"
F = "F"
COMPOSITE = "COMPOSITE"

_ADJOINT_KIND = {
    ANNIHILATION: CREATION,
    CREATION: ANNIHILATION,
    CUP: CAP,
    CAP: CUP,
    U: U,
    F: F,
    COMPOSITE: COMPOSITE,
}


@dataclass(frozen=True, eq=False)
class LinearOperator:
    """Matrix between two graded path spaces.

    Rows are indexed by the codomain basis, columns by the domain basis,
    both in enumeration order.  Matrices are immutable once built.
    """

    domain: PathGrading
    codomain: PathGrading
    matrix: np.ndarray
    kind: str
    position: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    def apply(self, vec: PathVector) -> PathVector:
        if vec.grading != self.domain:
            raise GradingMismatch(f"operator domain {self.domain}, vector {vec.grading}")
        return PathVector(self.codomain, self.matrix @ vec.coefficients)

    def adjoint(self) -> "LinearOperator":
        return LinearOperator(
            domain=self.codomain,
            codomain=self.domain,
            matrix=self.matrix.conj().T,
            kind=_ADJOINT_KIND[self.kind],
            position=self.position,
        )

    def compose(self, other: "LinearOperator") -> "LinearOperator":
        """self after other (matrix product self.matrix @ other.matrix)."""
        if other.codomain != self.domain:
            raise GradingMismatch(
                f"cannot compose: inner gradings {other.codomain} != {self.domain}"
            )
        return LinearOperator(
            domain=other.domain,
            codomain=self.codomain,
            matrix=self.matrix @ other.matrix,
            kind=COMPOSITE,
            position=self.position,
        )

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        return self.compose(other)


# ----------------------------------------------------------------------
# word surgery


def collapsed_grading(grading: PathGrading, i: int) -> PathGrading:
    """Word with the pair at positions (i, i+1) replaced by the opposite of
    its first tag (for a like pair this is the triangle-collapse word)."""
    w = grading.word
    return PathGrading(grading.start, grading.end, w[: i - 1] + (w[i - 1].opposite,) + w[i + 1 :])


def expanded_grading(grading: PathGrading, i: int) -> PathGrading:
    w = grading.word
    t = w[i - 1].opposite
    return PathGrading(grading.start, grading.end, w[: i - 1] + (t, t) + w[i:])


def cup_grading(grading: PathGrading, i: int) -> PathGrading:
    w = grading.word
    return PathGrading(grading.start, grading.end, w[: i - 1] + w[i + 1 :])


def cap_grading(grading: PathGrading, i: int, first_tag: EdgeTag) -> PathGrading:
    w = grading.word
    first_tag = EdgeTag(first_tag)
    return PathGrading(
        grading.start, grading.end, w[: i - 1] + (first_tag, first_tag.opposite) + w[i - 1 :]
    )


def _check_slot(i: int, lo: int, hi: int, what: str):
    if not (lo <= i <= hi):
        raise ValueError(f"{what} position {i} out of range [{lo}, {hi}]")


# ----------------------------------------------------------------------
# operator builders (cached; matrices are immutable)


@lru_cache(maxsize=None)
def annihilation(g: GraphSpec, cells: CellSystem, grading: PathGrading, i: int) -> LinearOperator:
    """C_i: contract the pair at positions (i, i+1).

    sigma-sigma pairs contract through the triangle v_{i-1} v_i v_{i+1}
    (when its closing arrow exists) with weight T/sqrt(mu mu); the
    mirrored pair uses the conjugate cell; mixed pairs give the zero
    block.
    """
    n = grading.length
    _check_slot(i, 1, n - 1, "annihilation")
    codomain = collapsed_grading(grading, i)
    dom = enumerate_paths(g, grading)
    idx = _basis_index(g, codomain)
    mu = spectral_data(g).mu
    values = cells.values
    m = np.zeros((len(idx), len(dom)), dtype=complex)
    t1, t2 = grading.word[i - 1], grading.word[i]
    if t1 == t2:
        for col, p in enumerate(dom):
            a, mid, c = p.vertices[i - 1], p.vertices[i], p.vertices[i + 1]
            if t1 is EdgeTag.SIGMA:
                val = values.get(OrientedTriangle((a, mid, c)))
            else:
                val = values.get(OrientedTriangle((a, c, mid)))
                val = None if val is None else np.conj(val)
            if val is None or val == 0:
                continue
            q = ElementaryPath(p.vertices[:i] + p.vertices[i + 1 :], codomain.word)
            m[idx[q], col] += val / np.sqrt(mu[a] * mu[c])
    return LinearOperator(grading, codomain, m, ANNIHILATION, i)


@lru_cache(maxsize=None)
def creation(g: GraphSpec, cells: CellSystem, grading: PathGrading, i: int) -> LinearOperator:
    """C+_i: expand the step at position i into a like pair through every
    completing triangle.  Conjugate transpose of the matching
    annihilation by construction."""
    n = grading.length
    _check_slot(i, 1, n, "creation")
    codomain = expanded_grading(grading, i)
    dom = enumerate_paths(g, grading)
    idx = _basis_index(g, codomain)
    mu = spectral_data(g).mu
    values = cells.values
    m = np.zeros((len(idx), len(dom)), dtype=complex)
    t = grading.word[i - 1]
    pair = codomain.word[i - 1]
    for col, p in enumerate(dom):
        a, c = p.vertices[i - 1], p.vertices[i]
        scale = np.sqrt(mu[a] * mu[c])
        if t is EdgeTag.SIGMA_BAR:
            # new pair is sigma-sigma through m: arrows a->m, m->c
            for mid in g.out_neighbors(a):
                if not g.has_edge(mid, c):
                    continue
                val = values.get(OrientedTriangle((a, mid, c)))
                if val is None or val == 0:
                    continue
                q = ElementaryPath(
                    p.vertices[:i] + (mid,) + p.vertices[i:],
                    p.word[: i - 1] + (pair, pair) + p.word[i:],
                )
                m[idx[q], col] += np.conj(val) / scale
        else:
            # new pair is barred: arrows m->a, c->m
            for mid in g.in_neighbors(a):
                if not g.has_edge(c, mid):
                    continue
                val = values.get(OrientedTriangle((a, c, mid)))
                if val is None or val == 0:
                    continue
                q = ElementaryPath(
                    p.vertices[:i] + (mid,) + p.vertices[i:],
                    p.word[: i - 1] + (pair, pair) + p.word[i:],
                )
                m[idx[q], col] += val / scale
    return LinearOperator(grading, codomain, m, CREATION, i)


@lru_cache(maxsize=None)
def cup(g: GraphSpec, cells: CellSystem, grading: PathGrading, i: int) -> LinearOperator:
    """Contract a mixed-tag return v_{i-1} b v_{i-1} at positions (i, i+1),
    weight sqrt(mu(b)/mu(v_{i-1})).  Like-tag pairs give the zero block."""
    n = grading.length
    _check_slot(i, 1, n - 1, "cup")
    codomain = cup_grading(grading, i)
    dom = enumerate_paths(g, grading)
    idx = _basis_index(g, codomain)
    mu = spectral_data(g).mu
    m = np.zeros((len(idx), len(dom)), dtype=complex)
    t1, t2 = grading.word[i - 1], grading.word[i]
    if t1 != t2:
        for col, p in enumerate(dom):
            if p.vertices[i - 1] != p.vertices[i + 1]:
                continue
            q = ElementaryPath(p.vertices[: i] + p.vertices[i + 2 :], codomain.word)
            m[idx[q], col] += np.sqrt(mu[p.vertices[i]] / mu[p.vertices[i - 1]])
    return LinearOperator(grading, codomain, m, CUP, i)


@lru_cache(maxsize=None)
def cap_oriented(
    g: GraphSpec, cells: CellSystem, grading: PathGrading, i: int, first_tag: EdgeTag
) -> LinearOperator:
    """Insert a return v_{i-1} b v_{i-1} before position i, one term per
    neighbor b, weight sqrt(mu(b)/mu(v_{i-1})); first_tag fixes the
    insertion order and hence the codomain word."""
    n = grading.length
    _check_slot(i, 1, n + 1, "cap")
    first_tag = EdgeTag(first_tag)
    codomain = cap_grading(grading, i, first_tag)
    dom = enumerate_paths(g, grading)
    idx = _basis_index(g, codomain)
    mu = spectral_data(g).mu
    m = np.zeros((len(idx), len(dom)), dtype=complex)
    for col, p in enumerate(dom):
        a = p.vertices[i - 1]
        nbrs = g.out_neighbors(a) if first_tag is EdgeTag.SIGMA else g.in_neighbors(a)
        for b in nbrs:
            q = ElementaryPath(p.vertices[:i] + (b, a) + p.vertices[i:], codomain.word)
            m[idx[q], col] += np.sqrt(mu[b] / mu[a])
    return LinearOperator(grading, codomain, m, CAP, i)


def cap(
    g: GraphSpec, cells: CellSystem, grading: PathGrading, i: int
) -> Tuple[LinearOperator, LinearOperator]:
    """Both insertion orders of the return pair; the two orders have
    different codomain words, hence two operators."""
    return (
        cap_oriented(g, cells, grading, i, EdgeTag.SIGMA),
        cap_oriented(g, cells, grading, i, EdgeTag.SIGMA_BAR),
    )


@lru_cache(maxsize=None)
def tl_u(g: GraphSpec, cells: CellSystem, grading: PathGrading, i: int) -> LinearOperator:
    """U_i = C+_i C_i: contract the pair at (i, i+1) and re-expand.
    Zero block on mixed-tag patterns."""
    n = grading.length
    _check_slot(i, 1, n - 1, "tl_u")
    if grading.word[i - 1] != grading.word[i]:
        dim = len(enumerate_paths(g, grading))
        return LinearOperator(grading, grading, np.zeros((dim, dim), complex), U, i)
    ann = annihilation(g, cells, grading, i)
    cre = creation(g, cells, ann.codomain, i)
    return LinearOperator(grading, grading, cre.matrix @ ann.matrix, U, i)


@lru_cache(maxsize=None)
def tl_f(g: GraphSpec, cells: CellSystem, grading: PathGrading, i: int) -> LinearOperator:
    """F_i = U_i U_{i+1} U_i - U_i (closed-triangle replacement)."""
    n = grading.length
    _check_slot(i, 1, n - 2, "tl_f")
    ui = tl_u(g, cells, grading, i).matrix
    uj = tl_u(g, cells, grading, i + 1).matrix
    return LinearOperator(grading, grading, ui @ uj @ ui - ui, F, i)


# ----------------------------------------------------------------------
# path-level conveniences


def apply_annihilation(g, cells, p: ElementaryPath, i: int) -> PathVector:
    return annihilation(g, cells, p.grading, i).apply(PathVector.from_path(g, p))


def apply_creation(g, cells, p: ElementaryPath, i: int) -> PathVector:
    return creation(g, cells, p.grading, i).apply(PathVector.from_path(g, p))


def apply_cup(g, cells, p: ElementaryPath, i: int) -> PathVector:
    return cup(g, cells, p.grading, i).apply(PathVector.from_path(g, p))


def apply_cap(g, cells, p: ElementaryPath, i: int, first_tag: EdgeTag) -> PathVector:
    return cap_oriented(g, cells, p.grading, i, first_tag).apply(PathVector.from_path(g, p))


# ----------------------------------------------------------------------
# relation verification


def _mnorm(x: np.ndarray) -> float:
    return float(np.abs(x).max()) if x.size else 0.0


@dataclass(frozen=True)
class TLReport:
    """Max residual per relation over all gradings up to max_len."""

    graph: str
    max_len: int
    lemma_constant: float
    residual_items: Tuple[Tuple[str, float], ...]
    worst_items: Tuple[Tuple[str, str], ...]
    lemma_fit: Optional[float]
    checks: int

    @property
    def residuals(self) -> Mapping[str, float]:
        return MappingProxyType(dict(self.residual_items))

    @property
    def worst(self) -> Mapping[str, str]:
        return MappingProxyType(dict(self.worst_items))

    def passed(self, tol: float = 1e-8) -> bool:
        return all(v < tol for _, v in self.residual_items)

    def summary(self) -> Mapping[str, float]:
        out = dict(self.residual_items)
        out["max_len"] = float(self.max_len)
        out["checks"] = float(self.checks)
        out["lemma_constant"] = float(self.lemma_constant)
        if self.lemma_fit is not None:
            out["lemma_fit"] = float(self.lemma_fit)
        return out


def verify_tl(
    g: GraphSpec,
    cells: CellSystem,
    max_len: int = 4,
    lemma_constant: Optional[float] = None,
) -> TLReport:
    """Sweep every grading with |word| <= max_len and report max residuals.

    h1:     U_i^2 = [2] U_i, plus the collapse-block identity
            C_i C+_i = [2] 1 (so an all-zero cell system is flagged with
            residual [2] instead of passing vacuously).
    h2:     U_i U_j = U_j U_i for |i - j| > 1 (all tag patterns).
    h3:     U_i U_{i+1} U_i - U_i = U_{i+1} U_i U_{i+1} - U_{i+1} on
            constant-tag runs of length 3.
    h4:     the quartic relation on constant-tag runs of length 4.
    lemma:  F_i F_{i+1} F_i = K F_i on the same runs; K defaults to
            [2]^2, the square of the loop parameter (equal to beta^2 on
            the smallest graph, where the two candidates coincide), and
            the best-fit K is reported alongside.
    f_square: F_i^2 = [2] beta F_i on runs of length 3.
    cupcap: cup_i cap_i = beta 1 per insertion order, C_i C+_i = [2] 1,
            and (C_i C+_i)^2 = 1 + cup cap on every grading.
    sum_rule: the per-arrow cell normalization.
    """
    from .cells import max_sum_rule_residual
    from .paths import iter_gradings, path_space_dim

    sd = spectral_data(g)
    delta, beta = sd.delta, sd.beta
    kconst = float(delta**2 if lemma_constant is None else lemma_constant)

    keys = ("h1", "h2", "h3", "h4", "lemma", "f_square", "cupcap", "sum_rule")
    res = {k: 0.0 for k in keys}
    worst = {k: "" for k in keys}
    checks = 0
    fit_num = 0.0
    fit_den = 0.0

    def bump(key: str, value: float, where: str):
        nonlocal checks
        checks += 1
        if value > res[key]:
            res[key] = value
            worst[key] = where

    bump("sum_rule", max_sum_rule_residual(g, cells), "arrows")

    for grading in iter_gradings(g, max_len):
        dim = path_space_dim(g, grading)
        if dim == 0:
            continue
        n = grading.length
        w = grading.word
        here = str(grading)
        us = {i: tl_u(g, cells, grading, i).matrix for i in range(1, n)}
        eye = np.eye(dim)

        for i in range(1, n):
            ui = us[i]
            bump("h1", _mnorm(ui @ ui - delta * ui), f"{here} i={i}")
            for j in range(i + 2, n):
                bump("h2", _mnorm(ui @ us[j] - us[j] @ ui), f"{here} i={i} j={j}")

        for i in range(1, n - 1):
            if not (w[i - 1] == w[i] == w[i + 1]):
                continue
            ui, uj = us[i], us[i + 1]
            fi = ui @ uj @ ui - ui
            bump("h3", _mnorm(fi - (uj @ ui @ uj - uj)), f"{here} i={i}")
            bump("f_square", _mnorm(fi @ fi - delta * beta * fi), f"{here} i={i}")

        for i in range(1, n - 2):
            if not (w[i - 1] == w[i] == w[i + 1] == w[i + 2]):
                continue
            ui, uj, uk = us[i], us[i + 1], us[i + 2]
            left = ui - uk @ uj @ ui + uj
            right = uj @ uk @ uj - uj
            bump("h4", _mnorm(left @ right), f"{here} i={i}")
            fi = ui @ uj @ ui - ui
            fj = uj @ uk @ uj - uj
            bump("lemma", _mnorm(fi @ fj @ fi - kconst * fi), f"{here} i={i}")
            fit_num += float(np.vdot(fi, fi @ fj @ fi).real)
            fit_den += float(np.vdot(fi, fi).real)

        for i in range(1, n + 2):
            comps = {}
            for tag in (EdgeTag.SIGMA, EdgeTag.SIGMA_BAR):
                cp = cap_oriented(g, cells, grading, i, tag)
                cu = cup(g, cells, cp.codomain, i)
                comps[tag] = cu.matrix @ cp.matrix
                bump("cupcap", _mnorm(comps[tag] - beta * eye), f"{here} i={i} cap {tag.value}")
            if i <= n:
                cre = creation(g, cells, grading, i)
                ann = annihilation(g, cells, cre.codomain, i)
                gram = ann.matrix @ cre.matrix
                bump("h1", _mnorm(gram - delta * eye), f"{here} i={i} collapse block")
                gram2 = gram @ gram
                for tag in (EdgeTag.SIGMA, EdgeTag.SIGMA_BAR):
                    bump(
                        "cupcap",
                        _mnorm(gram2 - (eye + comps[tag])),
                        f"{here} i={i} square vs cap {tag.value}",
                    )

    fit = fit_num / fit_den if fit_den > 1e-12 else None
    return TLReport(
        graph=g.name,
        max_len=max_len,
        lemma_constant=kconst,
        residual_items=tuple(sorted(res.items())),
        worst_items=tuple(sorted(worst.items())),
        lemma_fit=fit,
        checks=checks,
    )


def verify_adjointness(g: GraphSpec, cells: CellSystem, max_len: int = 4) -> float:
    """Max deviation of creation from annihilation^H and of cap from
    cup^H over all gradings with |word| <= max_len."""
    from .paths import iter_gradings, path_space_dim

    worst = 0.0
    for grading in iter_gradings(g, max_len - 1):
        if path_space_dim(g, grading) == 0:
            continue
        n = grading.length
        for i in range(1, n + 1):
            cre = creation(g, cells, grading, i)
            ann = annihilation(g, cells, cre.codomain, i)
            worst = max(worst, _mnorm(cre.matrix - ann.matrix.conj().T))
    for grading in iter_gradings(g, max_len - 2):
        if path_space_dim(g, grading) == 0:
            continue
        n = grading.length
        for i in range(1, n + 2):
            for tag in (EdgeTag.SIGMA, EdgeTag.SIGMA_BAR):
                cp = cap_oriented(g, cells, grading, i, tag)
                cu = cup(g, cells, cp.codomain, i)
                worst = max(worst, _mnorm(cp.matrix - cu.matrix.conj().T))
    return worst
