"""Elementary paths and word-graded path spaces.

A path on a graph is a vertex walk where each step is tagged either
SIGMA ("s": the step follows a sigma arrow) or SIGMA_BAR ("b": the step
runs against one).  The exact tag sequence is the *word* of the path;
the coarser type (alpha, beta) counts s- and b-steps.  Spaces are graded
by (start vertex, end vertex, word): the grading is the unit on which
operators act, and elementary paths in lexicographic vertex order are
its orthonormal basis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from .graphs import GraphSpec, adjacency_matrix

#: refuse to materialize gradings with more basis paths than this
MAX_PATH_SPACE = 10**6


class PathSpaceTooLarge(RuntimeError):
    """Grading dimension exceeds the materialization cap."""


class GradingMismatch(ValueError):
    """Two vectors from different gradings were combined."""


class EdgeTag(str, enum.Enum):
    SIGMA = "s"
    SIGMA_BAR = "b"

    @property
    def opposite(self) -> "EdgeTag":
        return EdgeTag.SIGMA_BAR if self is EdgeTag.SIGMA else EdgeTag.SIGMA


Word = Tuple[EdgeTag, ...]


def parse_word(text: str) -> Word:
    """Parse a word spelled with characters 's' (sigma) and 'b' (sigma-bar)."""
    try:
        return tuple(EdgeTag(c) for c in text)
    except ValueError:
        raise ValueError(f"word {text!r} must consist of characters 's' and 'b'") from None


def word_str(word: Sequence[EdgeTag]) -> str:
    return "".join(t.value for t in word)


def word_type(word: Sequence[EdgeTag]) -> Tuple[int, int]:
    """(alpha, beta) = (#sigma, #sigma-bar)."""
    a = sum(1 for t in word if t is EdgeTag.SIGMA)
    return a, len(word) - a


@dataclass(frozen=True)
class ElementaryPath:
    """A tagged vertex walk.  vertices has one more entry than word."""

    vertices: Tuple[str, ...]
    word: Word

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "word", tuple(EdgeTag(t) for t in self.word))
        if len(self.vertices) != len(self.word) + 1:
            raise ValueError("vertex count must be word length + 1")

    @property
    def start(self) -> str:
        return self.vertices[0]

    @property
    def end(self) -> str:
        return self.vertices[-1]

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def grading(self) -> "PathGrading":
        return PathGrading(self.start, self.end, self.word)

    def type(self) -> Tuple[int, int]:
        return word_type(self.word)

    def __str__(self) -> str:
        return "(" + " ".join(self.vertices) + ")"


def step_is_valid(g: GraphSpec, u: str, v: str, tag: EdgeTag) -> bool:
    """SIGMA step u->v needs arrow u->v; SIGMA_BAR step u->v needs arrow v->u."""
    return g.has_edge(u, v) if tag is EdgeTag.SIGMA else g.has_edge(v, u)


def is_valid_path(g: GraphSpec, p: ElementaryPath) -> bool:
    return all(
        step_is_valid(g, p.vertices[i], p.vertices[i + 1], p.word[i]) for i in range(p.length)
    )


def make_path(g: GraphSpec, vertices: Sequence[str], word) -> ElementaryPath:
    """Build and validate an elementary path; word may be a string."""
    if isinstance(word, str):
        word = parse_word(word)
    p = ElementaryPath(tuple(vertices), tuple(word))
    for v in p.vertices:
        g.index(v)  # raises for unknown ids
    if not is_valid_path(g, p):
        raise ValueError(f"{p} does not realize word {word_str(p.word)!r} on {g.name!r}")
    return p


def concatenate(p: ElementaryPath, q: ElementaryPath) -> Optional[ElementaryPath]:
    """Concatenation product: joined path if end(p) == start(q), else None (zero)."""
    if p.end != q.start:
        return None
    return ElementaryPath(p.vertices + q.vertices[1:], p.word + q.word)


@dataclass(frozen=True)
class PathGrading:
    """One graded component: start and end vertices plus the exact word."""

    start: str
    end: str
    word: Word

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(EdgeTag(t) for t in self.word))

    @property
    def length(self) -> int:
        return len(self.word)

    def type(self) -> Tuple[int, int]:
        return word_type(self.word)

    def __str__(self) -> str:
        return f"{self.start}->{self.end}:{word_str(self.word) or '()'}"


def path_space_dim(g: GraphSpec, grading: PathGrading) -> int:
    """Dimension of the grading without enumeration.

    Entry (start, end) of the ordered product of step matrices (adjacency
    for SIGMA, its transpose for SIGMA_BAR).  Exact integer arithmetic.
    """
    a = adjacency_matrix(g).astype(object)
    at = a.T
    n = len(g.vertices)
    m = np.eye(n, dtype=object)
    for tag in grading.word:
        m = m @ (a if tag is EdgeTag.SIGMA else at)
    return int(m[g.index(grading.start), g.index(grading.end)])


@lru_cache(maxsize=None)
def enumerate_paths(g: GraphSpec, grading: PathGrading) -> Tuple[ElementaryPath, ...]:
    """All elementary paths realizing the grading, in lexicographic order
    of their vertex sequences.  Deterministic; cached per grading.

    Raises PathSpaceTooLarge when the dimension exceeds MAX_PATH_SPACE.
    """
    g.index(grading.start), g.index(grading.end)
    dim = path_space_dim(g, grading)
    if dim > MAX_PATH_SPACE:
        raise PathSpaceTooLarge(f"{grading} has {dim} basis paths (cap {MAX_PATH_SPACE})")
    out = []

    def walk(prefix):
        i = len(prefix) - 1
        if i == len(grading.word):
            if prefix[-1] == grading.end:
                out.append(ElementaryPath(tuple(prefix), grading.word))
            return
        tag = grading.word[i]
        nxt = g.out_neighbors(prefix[-1]) if tag is EdgeTag.SIGMA else g.in_neighbors(prefix[-1])
        for v in nxt:  # neighbor maps are pre-sorted -> lexicographic output
            prefix.append(v)
            walk(prefix)
            prefix.pop()

    walk([grading.start])
    assert len(out) == dim, f"enumeration/matrix count mismatch on {grading}"
    return tuple(out)


@lru_cache(maxsize=None)
def _basis_index(g: GraphSpec, grading: PathGrading):
    return {p: i for i, p in enumerate(enumerate_paths(g, grading))}


class PathVector:
    """Complex linear combination over the elementary-path basis of one grading."""

    __slots__ = ("grading", "coefficients")

    def __init__(self, grading: PathGrading, coefficients: np.ndarray):
        self.grading = grading
        self.coefficients = np.asarray(coefficients, dtype=complex)

    @classmethod
    def zero(cls, g: GraphSpec, grading: PathGrading) -> "PathVector":
        return cls(grading, np.zeros(len(enumerate_paths(g, grading)), dtype=complex))

    @classmethod
    def from_path(cls, g: GraphSpec, p: ElementaryPath, coeff: complex = 1.0) -> "PathVector":
        vec = cls.zero(g, p.grading)
        vec.coefficients[_basis_index(g, p.grading)[p]] = coeff
        return vec

    @classmethod
    def from_terms(cls, g: GraphSpec, terms) -> "PathVector":
        """terms: iterable of (coefficient, ElementaryPath), one shared grading."""
        terms = list(terms)
        if not terms:
            raise ValueError("from_terms needs at least one term")
        vec = cls.zero(g, terms[0][1].grading)
        for c, p in terms:
            if p.grading != vec.grading:
                raise GradingMismatch(f"{p.grading} != {vec.grading}")
            vec.coefficients[_basis_index(g, vec.grading)[p]] += c
        return vec

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def support(self, tol: float = 1e-12):
        """(coefficient, index) pairs of entries with magnitude above tol."""
        return [(c, i) for i, c in enumerate(self.coefficients) if abs(c) > tol]

    def copy(self) -> "PathVector":
        return PathVector(self.grading, self.coefficients.copy())

    def __add__(self, other: "PathVector") -> "PathVector":
        if self.grading != other.grading:
            raise GradingMismatch(f"{self.grading} != {other.grading}")
        return PathVector(self.grading, self.coefficients + other.coefficients)

    def __rmul__(self, scalar: complex) -> "PathVector":
        return PathVector(self.grading, scalar * self.coefficients)

    def __repr__(self) -> str:
        return f"PathVector({self.grading}, dim={len(self.coefficients)})"


def inner_product(u: PathVector, v: PathVector) -> complex:
    """Hermitian inner product <u, v> = sum conj(u_e) v_e; elementary paths
    are orthonormal.  The two vectors must share a grading."""
    if u.grading != v.grading:
        raise GradingMismatch(f"{u.grading} != {v.grading}")
    return complex(np.vdot(u.coefficients, v.coefficients))


def iter_gradings(g: GraphSpec, max_len: int) -> Iterator[PathGrading]:
    """All gradings with 0 <= |word| <= max_len, deterministic order."""
    ids = g.vertex_ids()
    for n in range(max_len + 1):
        for bits in range(2**n):
            word = tuple(
                EdgeTag.SIGMA if (bits >> k) & 1 == 0 else EdgeTag.SIGMA_BAR for k in range(n)
            )
            for a in ids:
                for b in ids:
                    yield PathGrading(a, b, word)
