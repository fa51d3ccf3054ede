"""Module reuse statistics over a corpus of modular XML documents."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .docmodel import DocumentTree


@dataclass(frozen=True)
class ReuseStats:
    total_instances: int
    unique_modules: int

    @property
    def reuse_ratio(self) -> Fraction:
        """Share of module instances that repeat an already used module."""
        if self.total_instances == 0:
            return Fraction(0)
        return Fraction(self.total_instances - self.unique_modules, self.total_instances)


def count_module_ids(trees: Iterable[DocumentTree], id_attribute: str = "id") -> Counter:
    if not id_attribute:
        raise ValueError("id attribute name must not be empty")
    counts: Counter = Counter()
    for tree in trees:
        for element in tree.iter():
            value = element.attributes.get(id_attribute)
            if value is not None:
                counts[value] += 1
    return counts


def compute_reuse_stats(trees: Iterable[DocumentTree], id_attribute: str = "id") -> ReuseStats:
    counts = count_module_ids(trees, id_attribute)
    return ReuseStats(sum(counts.values()), len(counts))
