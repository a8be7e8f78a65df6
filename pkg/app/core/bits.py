"""Bitset helpers. Vertex v is bit (1 << v) of a Python int row."""
from typing import Iterable, Iterator, List


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits(mask: int) -> List[int]:
    return list(iter_bits(mask))


def mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def popcount(mask: int) -> int:
    return mask.bit_count()


def full_mask(n: int) -> int:
    return (1 << n) - 1


def below(v: int) -> int:
    """Mask of all vertices with id smaller than v."""
    return (1 << v) - 1


def above(v: int, n: int) -> int:
    """Mask of all vertices with id in (v, n)."""
    return full_mask(n) ^ ((1 << (v + 1)) - 1)
