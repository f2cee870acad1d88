"""Small-range function distributions: r base draws assigned by uniform indices."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

from .errors import DomainError
from .states import Rng


@dataclass(frozen=True)
class SmallRangeTable:
    """Function table x -> samples[index[x]] over a finite domain."""

    r: int
    index: dict
    samples: tuple

    def __post_init__(self):
        if len(self.samples) != self.r:
            raise DomainError("table must store exactly r base samples")
        if any(not 0 <= i < self.r for i in self.index.values()):
            raise DomainError("index map entry outside [0, r)")

    def evaluate(self, x) -> object:
        return self.samples[self.index[x]]


def sr_sample(
    r: int,
    domain: Sequence[Hashable],
    base: Callable[[Rng], object],
    rng: Rng,
) -> SmallRangeTable:
    """Draw r i.i.d. base samples and a uniform index for every domain point."""
    if r < 1:
        raise DomainError("need r >= 1")
    if len(domain) < 1:
        raise DomainError("domain must be non-empty")
    base_rng = rng.derive(0)
    samples = tuple(base(base_rng) for _ in range(r))
    idx_rng = rng.derive(1)
    indices = idx_rng.np.integers(0, r, size=len(domain))
    return SmallRangeTable(r, {x: int(i) for x, i in zip(domain, indices)}, samples)


def sr_statistics(table: SmallRangeTable) -> dict:
    """Occupancy statistics of the index assignment."""
    buckets = Counter(table.index.values())
    sizes = [buckets.get(i, 0) for i in range(table.r)]
    return {
        "r": table.r,
        "domain_size": len(table.index),
        "distinct_images": sum(1 for s in sizes if s > 0),
        "max_bucket": max(sizes),
        "bucket_sizes": sizes,
        "collision_histogram": dict(sorted(Counter(sizes).items())),
    }
