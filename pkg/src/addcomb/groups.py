"""Finite abelian groups, dense functions and partial maps.

Every supported group is a product of cyclic factors.  An element is stored as
its integer index in a mixed-radix encoding whose least significant digit is the
first coordinate, so ``F_2^3`` enumerates as 000, 100, 010, 110, ...  Vectorised
arithmetic works directly on numpy index arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

MAX_CARDINALITY = 1 << 24
BOUND_TOL = 1e-12


class CardinalityError(ValueError):
    """Raised when a group is too large for dense enumeration."""


class GroupMismatchError(ValueError):
    pass


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class GroupSpec:
    """A finite abelian group descriptor.

    Use the constructors :meth:`vector`, :meth:`cyclic` and :meth:`product`
    rather than building instances by hand.
    """

    kind: str
    p: int = 0
    n: int = 0
    N: int = 0
    factors: tuple["GroupSpec", ...] = ()

    @classmethod
    def vector(cls, p: int, n: int) -> "GroupSpec":
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if n < 0:
            raise ValueError("dimension must be nonnegative")
        return cls("vector", p=p, n=n)

    @classmethod
    def cyclic(cls, N: int) -> "GroupSpec":
        if N < 1:
            raise ValueError("modulus must be at least 1")
        return cls("cyclic", N=N)

    @classmethod
    def product(cls, factors: Sequence["GroupSpec"]) -> "GroupSpec":
        return cls("product", factors=tuple(factors))

    # -- structure -------------------------------------------------------
    @cached_property
    def radices(self) -> tuple[int, ...]:
        """Cyclic factor orders, least significant first."""
        if self.kind == "vector":
            return (self.p,) * self.n
        if self.kind == "cyclic":
            return (self.N,)
        out: tuple[int, ...] = ()
        for f in self.factors:
            out += f.radices
        return out

    @cached_property
    def cardinality(self) -> int:
        return math.prod(self.radices)

    @property
    def is_f2(self) -> bool:
        return self.kind == "vector" and self.p == 2

    @cached_property
    def _weights(self) -> np.ndarray:
        w = np.ones(len(self.radices), dtype=np.int64)
        for i in range(1, len(self.radices)):
            w[i] = w[i - 1] * self.radices[i - 1]
        return w

    def check_dense(self) -> None:
        if self.cardinality > MAX_CARDINALITY:
            raise CardinalityError(
                f"|G| = {self.cardinality} exceeds the dense cap 2^24"
            )

    # -- encoding --------------------------------------------------------
    def digits(self, idx):
        """Mixed-radix digits of an index (or array of indices); last axis = coordinates."""
        idx = np.asarray(idx, dtype=np.int64)
        r = np.asarray(self.radices, dtype=np.int64)
        if len(r) == 0:
            return np.zeros(idx.shape + (0,), dtype=np.int64)
        return (idx[..., None] // self._weights) % r

    def from_digits(self, digs):
        digs = np.asarray(digs, dtype=np.int64)
        r = np.asarray(self.radices, dtype=np.int64)
        if len(r) == 0:
            return np.zeros(digs.shape[:-1], dtype=np.int64)
        return ((digs % r) * self._weights).sum(axis=-1)

    def enumerate(self) -> list["GroupElem"]:
        self.check_dense()
        return [GroupElem(self, i) for i in range(self.cardinality)]

    # -- arithmetic on indices --------------------------------------------
    def add(self, a, b):
        if self.is_f2:
            return np.bitwise_xor(a, b)
        if self.kind == "cyclic":
            return (np.asarray(a, dtype=np.int64) + b) % self.N
        return self.from_digits(self.digits(a) + self.digits(b))

    def neg(self, a):
        if self.is_f2:
            return a
        if self.kind == "cyclic":
            return (-np.asarray(a, dtype=np.int64)) % self.N
        return self.from_digits(-self.digits(a))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def scale(self, k: int, a):
        return self.from_digits(k * self.digits(a))

    @cached_property
    def add_table(self) -> np.ndarray:
        """|G| x |G| table of sums (only for small groups)."""
        if self.cardinality > 1 << 13:
            raise CardinalityError("add table only built for |G| <= 2^13")
        idx = np.arange(self.cardinality, dtype=np.int64)
        return np.ascontiguousarray(self.add(idx[:, None], idx[None, :]))

    def contains(self, idx) -> bool:
        idx = np.asarray(idx)
        return bool(np.all((idx >= 0) & (idx < self.cardinality)))

    # -- serialisation ---------------------------------------------------
    def to_json(self) -> dict:
        if self.kind == "vector":
            return {"type": "vector", "p": self.p, "n": self.n}
        if self.kind == "cyclic":
            return {"type": "cyclic", "N": self.N}
        return {"type": "product", "factors": [f.to_json() for f in self.factors]}

    @classmethod
    def from_json(cls, obj: dict) -> "GroupSpec":
        t = obj["type"]
        if t == "vector":
            return cls.vector(int(obj["p"]), int(obj["n"]))
        if t == "cyclic":
            return cls.cyclic(int(obj["N"]))
        if t == "product":
            return cls.product([cls.from_json(f) for f in obj["factors"]])
        raise ValueError(f"unknown group type {t!r}")

    def __repr__(self) -> str:
        if self.kind == "vector":
            return f"F_{self.p}^{self.n}"
        if self.kind == "cyclic":
            return f"Z/{self.N}Z"
        return " x ".join(repr(f) for f in self.factors)


@dataclass(frozen=True)
class GroupElem:
    group: GroupSpec
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.group.cardinality:
            raise ValueError(f"index {self.index} outside {self.group!r}")

    @property
    def digits(self) -> tuple[int, ...]:
        return tuple(int(d) for d in self.group.digits(self.index))

    @classmethod
    def from_digits(cls, group: GroupSpec, digs: Sequence[int]) -> "GroupElem":
        return cls(group, int(group.from_digits(list(digs))))

    def __add__(self, other: "GroupElem") -> "GroupElem":
        return group_add(self, other)

    def __neg__(self) -> "GroupElem":
        return group_neg(self)

    def __sub__(self, other: "GroupElem") -> "GroupElem":
        return group_add(self, group_neg(other))


def group_add(a: GroupElem, b: GroupElem) -> GroupElem:
    if a.group != b.group:
        raise GroupMismatchError(f"{a.group!r} vs {b.group!r}")
    return GroupElem(a.group, int(a.group.add(a.index, b.index)))


def group_neg(a: GroupElem) -> GroupElem:
    return GroupElem(a.group, int(a.group.neg(a.index)))


def enumerate_group(group: GroupSpec) -> list[GroupElem]:
    return group.enumerate()


@dataclass(frozen=True, eq=False)
class DenseFn:
    """A complex-valued table over a finite abelian group, in index order."""

    group: GroupSpec
    values: np.ndarray
    bounded: bool = False

    def __post_init__(self):
        self.group.check_dense()
        vals = np.array(self.values, dtype=np.complex128).reshape(-1)
        if vals.shape[0] != self.group.cardinality:
            raise ValueError(
                f"table has length {vals.shape[0]}, expected {self.group.cardinality}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.bounded and self.sup_norm() > 1 + BOUND_TOL:
            raise ValueError("function flagged 1-bounded has |f| > 1")

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max()) if self.values.size else 0.0

    def mean(self) -> complex:
        return complex(self.values.mean())

    def l2_sq(self) -> float:
        return float(np.mean(np.abs(self.values) ** 2))

    def conj(self) -> "DenseFn":
        return DenseFn(self.group, self.values.conj(), self.bounded)

    def translate(self, a: int) -> "DenseFn":
        """x -> f(x + a)."""
        idx = np.arange(self.group.cardinality)
        return DenseFn(self.group, self.values[self.group.add(idx, a)], self.bounded)

    def __mul__(self, other: "DenseFn") -> "DenseFn":
        if other.group != self.group:
            raise GroupMismatchError("product of functions on different groups")
        return DenseFn(self.group, self.values * other.values,
                       self.bounded and other.bounded)

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DenseFn":
        group = GroupSpec.from_json(obj["group"])
        vals = np.array([complex(re, im) for re, im in obj["values"]])
        return cls(group, vals)


def indicator(S: Iterable[int], group: GroupSpec) -> DenseFn:
    S = np.fromiter((int(s) for s in S), dtype=np.int64)
    if S.size and not group.contains(S):
        raise ValueError("element outside group")
    vals = np.zeros(group.cardinality)
    vals[S] = 1.0
    return DenseFn(group, vals, bounded=True)


def indicator_mean(S: Iterable[int], group: GroupSpec) -> Fraction:
    """Exact mean of 1_S."""
    return Fraction(len(set(int(s) for s in S)), group.cardinality)


@dataclass(frozen=True, eq=False)
class PartialMap:
    """A map phi : S -> H defined on a subset S of a finite group G."""

    domain: GroupSpec
    codomain: GroupSpec
    table: dict = field(default_factory=dict)

    def __post_init__(self):
        tab = {int(k): int(v) for k, v in dict(self.table).items()}
        for k, v in tab.items():
            if not 0 <= k < self.domain.cardinality:
                raise ValueError(f"support element {k} outside {self.domain!r}")
            if not 0 <= v < self.codomain.cardinality:
                raise ValueError(f"image {v} outside {self.codomain!r}")
        object.__setattr__(self, "table", tab)

    @property
    def support(self) -> list[int]:
        return sorted(self.table)

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.table), self.domain.cardinality)

    def __call__(self, x: int) -> int:
        return self.table[int(x)]

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        keys = np.array(self.support, dtype=np.int64)
        vals = np.array([self.table[k] for k in self.support], dtype=np.int64)
        return keys, vals

    def inverse(self) -> "PartialMap":
        inv = {}
        for k, v in self.table.items():
            if v in inv:
                raise ValueError("map is not injective")
            inv[v] = k
        return PartialMap(self.codomain, self.domain, inv)

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "codomain": self.codomain.to_json(),
            "pairs": [[k, self.table[k]] for k in self.support],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PartialMap":
        return cls(GroupSpec.from_json(obj["domain"]),
                   GroupSpec.from_json(obj["codomain"]),
                   {int(k): int(v) for k, v in obj["pairs"]})


@dataclass(frozen=True)
class Params:
    K: float = 2.0
    sigma: float = 0.5
    epsilon: float = 0.1
    tau: float = 0.5
    C_exponent: float = 3.0

    def __post_init__(self):
        if not self.K >= 1:
            raise ValueError("K must be >= 1")
        if not 0 < self.sigma <= 1:
            raise ValueError("sigma must lie in (0, 1]")
        if not 0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 1/2)")
        if not 0 < self.tau <= 1:
            raise ValueError("tau must lie in (0, 1]")
        if not self.C_exponent > 0:
            raise ValueError("C_exponent must be positive")


def set_to_json(S: Iterable[int], group: GroupSpec) -> dict:
    return {"group": group.to_json(), "indices": sorted(int(s) for s in S)}


def set_from_json(obj: dict) -> tuple[GroupSpec, list[int]]:
    group = GroupSpec.from_json(obj["group"])
    idx = [int(i) for i in obj["indices"]]
    if idx and not group.contains(idx):
        raise ValueError("set element outside group")
    return group, idx
