"""
Четыре шаблона покрытия связных множеств нулей и левая часть оценки для них.

Pattern 2 comes in two shapes (line and L); both have 3 vertices, 8 boundary
edges and the same subset profile, so they share id 2.
"""
from collections import Counter
from itertools import combinations
from typing import Dict, List, Tuple
import math

from lattice.parameters import critical_h
from lattice.sos_model import edge_boundary
from utils.data_models import Parameters, PatternGraph
from utils.errors import DomainError

PATTERNS: List[PatternGraph] = [
    PatternGraph(id=1, name="domino", vertices=[(0, 0), (0, 1)], internal_edges=[(0, 1)]),
    PatternGraph(
        id=2, name="triomino-line", vertices=[(0, 0), (0, 1), (0, 2)], internal_edges=[(0, 1), (1, 2)]
    ),
    PatternGraph(
        id=2, name="triomino-L", vertices=[(0, 0), (0, 1), (1, 1)], internal_edges=[(0, 1), (1, 2)]
    ),
    PatternGraph(
        id=3,
        name="T",
        vertices=[(0, 0), (0, 1), (0, 2), (1, 1)],
        internal_edges=[(0, 1), (1, 2), (1, 3)],
    ),
    PatternGraph(
        id=4,
        name="plus",
        vertices=[(0, 1), (1, 0), (1, 1), (1, 2), (2, 1)],
        internal_edges=[(2, 0), (2, 1), (2, 3), (2, 4)],
    ),
]


def get_pattern(pattern_id: int, name: str = "") -> PatternGraph:
    for pattern in PATTERNS:
        if pattern.id == pattern_id and (not name or pattern.name == name):
            return pattern
    raise DomainError(f"unknown pattern {pattern_id} {name}".strip())


def subset_terms(pattern: PatternGraph) -> List[Tuple[int, int]]:
    """(|𝒩(B)|, |q₂₊(B)|) для каждого подмножества B ⊆ V"""
    adjacency: Dict[int, set] = {i: set() for i in range(pattern.size)}
    for a, b in pattern.internal_edges:
        adjacency[a].add(b)
        adjacency[b].add(a)

    terms = []
    for size in range(pattern.size + 1):
        for subset in combinations(range(pattern.size), size):
            chosen = set(subset)
            boundary = edge_boundary(pattern.vertices[i] for i in chosen)
            paired = sum(1 for i in chosen if adjacency[i] & chosen)
            terms.append((boundary, paired))
    return terms


def subset_profile(pattern: PatternGraph) -> Counter:
    return Counter(subset_terms(pattern))


def pattern_lhs(pattern: PatternGraph, params: Parameters) -> float:
    """
    e^{−h_w|V|} Σ_{B⊆V} exp(−β|𝒩(B)| + h_w|q₂₊(B)|)

    Raises:
        DomainError: если params.h не равно h_w(β)
    """
    h_w = critical_h(params.beta)
    if not math.isclose(params.h, h_w, rel_tol=1e-12, abs_tol=0.0):
        raise DomainError(f"pattern_lhs is defined at h = h_w = {h_w}, got h = {params.h}")
    size = pattern.size
    return math.fsum(
        math.exp(-params.beta * boundary + h_w * (paired - size))
        for boundary, paired in subset_terms(pattern)
    )


def lemma_bound(beta: float) -> float:
    """1 + e^{−6β}/2"""
    return 1.0 + 0.5 * math.exp(-6.0 * beta)


def closed_form(pattern_id: int, beta: float) -> float:
    """Exact value of pattern_lhs for the two- and three-vertex patterns"""
    h = critical_h(beta)
    if pattern_id == 1:
        return math.exp(-2 * h) * (1 + 2 * math.exp(-4 * beta) + math.exp(-6 * beta + 2 * h))
    if pattern_id == 2:
        return math.exp(-3 * h) * (
            1
            + 3 * math.exp(-4 * beta)
            + math.exp(-8 * beta)
            + 2 * math.exp(-6 * beta + 2 * h)
            + math.exp(-8 * beta + 3 * h)
        )
    raise DomainError(f"no closed form recorded for pattern {pattern_id}")


def small_subset_bound(pattern_id: int, beta: float) -> float:
    """Lower bound from connected subsets of size at most two (patterns 3 and 4)"""
    h = critical_h(beta)
    if pattern_id == 3:
        return math.exp(-4 * h) * (1 + 4 * math.exp(-4 * beta) + 3 * math.exp(-6 * beta + 2 * h))
    if pattern_id == 4:
        return math.exp(-5 * h) * (1 + 5 * math.exp(-4 * beta) + 4 * math.exp(-6 * beta + 2 * h))
    raise DomainError(f"no subset bound recorded for pattern {pattern_id}")
