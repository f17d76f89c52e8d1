"""Coefficient rings: the integers and the integers modulo q.

Elements are plain Python ints kept in canonical form, so ring equality
is integer equality and a zero coefficient is always the literal ``0``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass


@dataclass(frozen=True)
class Ring:
    """ZZ when ``q`` is None, otherwise ZZ/qZZ with residues in [0, q)."""

    q: int | None = None

    def __post_init__(self) -> None:
        if self.q is not None and self.q < 2:
            raise ValueError(f"ring modulus must be >= 2, got {self.q}")

    @property
    def kind(self) -> str:
        return "Integers" if self.q is None else "IntegersModQ"

    def canon(self, a: int) -> int:
        return a if self.q is None else a % self.q

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1

    def add(self, a: int, b: int) -> int:
        return self.canon(a + b)

    def sub(self, a: int, b: int) -> int:
        return self.canon(a - b)

    def mul(self, a: int, b: int) -> int:
        return self.canon(a * b)

    def neg(self, a: int) -> int:
        return self.canon(-a)

    def eq(self, a: int, b: int) -> bool:
        return self.canon(a) == self.canon(b)

    def random_nonzero(self, rng: random.Random, coeff_range: int = 100) -> int:
        """Uniform nonzero element; ZZ samples from [-coeff_range, coeff_range]."""
        if self.q is None:
            c = rng.randint(1, coeff_range)
            return c if rng.random() < 0.5 else -c
        return rng.randint(1, self.q - 1)

    @classmethod
    def parse(cls, text: str) -> Ring:
        """Parse ``int`` or ``zmod:<q>``."""
        text = text.strip()
        if text == "int":
            return cls()
        if text.startswith("zmod:"):
            try:
                q = int(text[5:])
            except ValueError:
                raise ValueError(f"bad ring modulus in {text!r}") from None
            return cls(q)
        raise ValueError(f"unknown ring {text!r} (expected 'int' or 'zmod:<q>')")

    def __str__(self) -> str:
        return "int" if self.q is None else f"zmod:{self.q}"


ZZ = Ring()


def zmod(q: int) -> Ring:
    return Ring(q)
