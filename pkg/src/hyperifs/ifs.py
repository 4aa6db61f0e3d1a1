"""Generators, words of the composition semigroup, and orbits.

Composition order convention, fixed globally: a Word's letter at
position 0 is applied LAST.  The orbit-style notation in which the
first symbol acts first is served by ``fiberwise_orbit``, which walks
the letters from the end of the tuple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import geom
from .geom import Point


class CapabilityError(RuntimeError):
    """An inverse was requested from a generator that has none."""


class BudgetError(RuntimeError):
    """An enumeration or search exceeded its configured budget."""


@dataclass(frozen=True)
class Word:
    """Finite composition sequence; letters are (generator index, inverted)."""

    letters: tuple = ()

    def __len__(self):
        return len(self.letters)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def serialize(self) -> list:
        """Signed 1-based integers: +i for generator i-1, -i for its inverse."""
        return [-(i + 1) if inv else (i + 1) for i, inv in self.letters]

    @staticmethod
    def deserialize(data: Sequence[int]) -> "Word":
        letters = []
        for v in data:
            if v == 0:
                raise ValueError("0 is not a valid serialized letter")
            letters.append((abs(v) - 1, v < 0))
        return Word(tuple(letters))

    @staticmethod
    def from_indices(indices: Sequence[int]) -> "Word":
        """Non-inverted word from plain generator indices."""
        return Word(tuple((i, False) for i in indices))

    @staticmethod
    def power(index: int, n: int, inverted: bool = False) -> "Word":
        return Word(((index, inverted),) * n)


@dataclass
class Generator:
    """One map of the system, acting on raw coordinate arrays.

    forward/inverse accept an (n, d) array and return an (n, d) array in
    the canonical chart.  Structural metadata feeds the fast paths: a
    circle rotation_domain (lo, hi arc) on which the map is exactly
    R_{rotation_amount}, an isometry flag, an optional Lipschitz bound,
    and an optional conjugation triple (h, h_inv, translation) when the
    map is h ∘ R_t ∘ h^{-1} on the torus.
    """

    name: str
    forward: Callable[[np.ndarray], np.ndarray]
    inverse: Optional[Callable[[np.ndarray], np.ndarray]] = None
    is_isometry: bool = False
    rotation_domain: Optional[tuple] = None
    rotation_amount: Optional[float] = None
    lipschitz: Optional[float] = None
    conjugation: Optional[tuple] = None


@dataclass
class IfsSystem:
    """Finite generator list over one manifold; immutable after build."""

    manifold: str
    generators: list
    metadata: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.generators)

    def has_inverses(self) -> bool:
        return all(g.inverse is not None for g in self.generators)

    def all_isometries(self) -> bool:
        return all(g.is_isometry for g in self.generators)

    def apply_letter(self, letter, pts: np.ndarray) -> np.ndarray:
        idx, inv = letter
        gen = self.generators[idx]
        if inv:
            if gen.inverse is None:
                raise CapabilityError(f"generator {gen.name} has no inverse")
            return gen.inverse(pts)
        return gen.forward(pts)


def apply_word_coords(sys: IfsSystem, w: Word, pts: np.ndarray) -> np.ndarray:
    """Apply a word to an (n, d) coordinate array, right-to-left."""
    out = np.atleast_2d(np.asarray(pts, dtype=float))
    for letter in reversed(w.letters):
        out = sys.apply_letter(letter, out)
    return out


def apply_word(sys: IfsSystem, w: Word, p: Point) -> Point:
    if p.manifold != sys.manifold:
        raise geom.GeomError("point not on the system's manifold")
    out = apply_word_coords(sys, w, p.array()[None, :])
    return geom.point(sys.manifold, out[0])


def fiberwise_orbit(sys: IfsSystem, omega: Word, x: Point) -> list:
    """Prefix evaluations along omega: the first-acting symbol is the
    LAST letter of the word, matching the global composition order."""
    if len(omega) < 1:
        raise ValueError("need |omega| >= 1")
    pts = x.array()[None, :]
    orbit = []
    for letter in reversed(omega.letters):
        pts = sys.apply_letter(letter, pts)
        orbit.append(geom.point(sys.manifold, pts[0]))
    return orbit


def enumerate_words(k: int, max_len: int, with_inverses: bool = False,
                    max_count: int = 10**7):
    """All words of length <= max_len in length-lexicographic order.

    Count is sum_{i<=max_len} (k*(1+with_inverses))^i; raises BudgetError
    if that exceeds max_count.
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    alphabet = [(i, False) for i in range(k)]
    if with_inverses:
        alphabet += [(i, True) for i in range(k)]
    a = len(alphabet)
    total = sum(a**i for i in range(max_len + 1))
    if total > max_count:
        raise BudgetError(f"{total} words exceeds budget {max_count}")
    yield Word()
    for length in range(1, max_len + 1):
        for combo in itertools.product(alphabet, repeat=length):
            yield Word(combo)


def word_count(k: int, max_len: int, with_inverses: bool = False) -> int:
    a = k * (2 if with_inverses else 1)
    return sum(a**i for i in range(max_len + 1))
