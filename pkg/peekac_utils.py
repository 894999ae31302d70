"""
Shared helpers: the error hierarchy, bitmask arithmetic and list parsing.
"""
import random
from typing import Iterator, List, Optional


class PeekacError(Exception):
    """Base class for every error raised by the library modules."""


class SignatureError(PeekacError):
    pass


class StructureError(PeekacError):
    pass


class ParseError(PeekacError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CapExceeded(PeekacError):
    """A configured size cap would be exceeded by a construction."""


class SearchBudgetExceeded(PeekacError):
    """A search ran out of budget; the answer is unknown, not negative."""


class UnknownTemplateError(PeekacError):
    pass


def bit(index: int) -> int:
    return 1 << index


def full_mask(size: int) -> int:
    return (1 << size) - 1


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    index = 0
    while mask:
        if mask & 1:
            yield index
        mask >>= 1
        index += 1


def make_rng(seed: Optional[int]) -> random.Random:
    return random.Random(seed)


def normalize_list(raw: Optional[str]) -> List[str]:
    if not raw:
        return []
    seen = []
    for part in raw.split(","):
        val = part.strip()
        if not val:
            continue
        if val not in seen:
            seen.append(val)
    return seen


def normalize_int_list(raw: Optional[str]) -> List[int]:
    values = []
    for item in normalize_list(raw):
        try:
            values.append(int(item))
        except ValueError:
            raise ParseError(f"expected an integer, got {item!r}")
    return values


def yn(flag: bool) -> str:
    return "y" if flag else "n"
