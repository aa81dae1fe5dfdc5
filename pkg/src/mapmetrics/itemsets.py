"""Frequent element-combination mining over per-map element-type sets.

Transactions are sets of ElementKind (a map with two legends contributes
"legend" once). The item universe is the closed ten-kind taxonomy, so the
level-wise Apriori search never sees open-world items and a full 2^10
enumeration always remains a feasible cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import InvalidThresholdError, ZeroDenominatorError
from .geometry import ElementKind

_KIND_ORDER = {kind: i for i, kind in enumerate(ElementKind)}


@dataclass(frozen=True)
class FrequentItemset:
    """An element-kind set with its support over the transaction list."""

    items: frozenset[ElementKind]
    support: float
    support_count: int

    def sorted_items(self) -> tuple[ElementKind, ...]:
        return tuple(sorted(self.items, key=_KIND_ORDER.get))


def _sort_key(itemset: FrequentItemset):
    return (
        len(itemset.items),
        -itemset.support,
        tuple(_KIND_ORDER[k] for k in itemset.sorted_items()),
    )


def apriori(transactions, min_support: float) -> list[FrequentItemset]:
    """All itemsets with support >= min_support, by level-wise search.

    Candidates of size k join frequent (k-1)-itemsets sharing a prefix and
    are pruned unless every (k-1)-subset is frequent (support is
    anti-monotone). Output is sorted by size ascending, support descending,
    then items in taxonomy order.
    """
    if not 0.0 < min_support <= 1.0:
        raise InvalidThresholdError(f"min_support must be in (0, 1], got {min_support}")
    transactions = [frozenset(t) for t in transactions]
    if not transactions:
        raise ValueError("transactions must be nonempty")
    n = len(transactions)

    def count(itemset: frozenset) -> int:
        return sum(1 for t in transactions if itemset <= t)

    results: list[FrequentItemset] = []
    singles = sorted({item for t in transactions for item in t}, key=_KIND_ORDER.get)
    frequent = []
    for item in singles:
        c = count(frozenset((item,)))
        if c / n >= min_support:
            frequent.append((item,))
            results.append(FrequentItemset(frozenset((item,)), c / n, c))

    while frequent:
        level = {frozenset(t) for t in frequent}
        candidates = set()
        for a, b in combinations(frequent, 2):
            if a[:-1] == b[:-1]:
                merged = tuple(sorted(set(a) | set(b), key=_KIND_ORDER.get))
                if all(frozenset(sub) in level
                       for sub in combinations(merged, len(merged) - 1)):
                    candidates.add(merged)
        frequent = []
        for cand in sorted(candidates, key=lambda c: tuple(_KIND_ORDER[k] for k in c)):
            c = count(frozenset(cand))
            if c / n >= min_support:
                frequent.append(cand)
                results.append(FrequentItemset(frozenset(cand), c / n, c))

    return sorted(results, key=_sort_key)


def top_itemsets(itemsets: list[FrequentItemset], size: int,
                 limit: int) -> list[FrequentItemset]:
    """The highest-support itemsets of exactly the given size."""
    if size < 1:
        raise ValueError("size must be >= 1")
    if limit < 0:
        raise ValueError("limit must be >= 0")
    of_size = [i for i in itemsets if len(i.items) == size]
    return sorted(of_size, key=_sort_key)[:limit]


def conditional_rate(itemsets: list[FrequentItemset], numerator, denominator) -> float:
    """support(numerator) / support(denominator) over a mined itemset list.

    The empty set has support 1 by convention. A numerator missing from
    the list counts as support 0 (it was below the mining threshold); a
    missing or zero-support denominator raises ZeroDenominatorError.
    """
    numerator = frozenset(numerator)
    denominator = frozenset(denominator)
    if not denominator <= numerator:
        raise ValueError("denominator must be a subset of the numerator")
    supports = {i.items: i.support for i in itemsets}
    num = supports.get(numerator, 0.0)
    if not denominator:
        return num
    den = supports.get(denominator, 0.0)
    if den == 0.0:
        raise ZeroDenominatorError(f"denominator {sorted(k.value for k in denominator)} has zero support")
    return num / den
