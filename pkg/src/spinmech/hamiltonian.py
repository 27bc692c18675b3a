"""Finite-range pair interactions on a one-dimensional spin chain.

The interaction is stored as a table of pair energies indexed by site
distance d in 1..n and by the ordered pair of symbol indices; the external
field couples linearly to the spin values. Energies use k_B = 1 units, so
temperature only ever enters through beta downstream.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidChainError, NumericDomainError
from .lattice import BlockSpace


@dataclass(frozen=True)
class Hamiltonian:
    """Pairwise interaction of range n plus an external field.

    couplings[d-1, a, b] is the energy of a symbol-a spin and a symbol-b
    spin sitting d sites apart; the table must be symmetric in (a, b).
    Distances beyond n carry zero energy and are never stored.
    """

    blocks: BlockSpace
    field: float
    couplings: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.couplings, dtype=float)
        theta = self.blocks.alphabet.size
        expected = (self.blocks.n, theta, theta)
        if table.shape != expected:
            raise NumericDomainError(
                f"couplings shape {table.shape} != {expected}"
            )
        if not np.array_equal(table, table.transpose(0, 2, 1)):
            raise NumericDomainError("pair couplings must be symmetric in the spins")
        if not (np.all(np.isfinite(table)) and np.isfinite(self.field)):
            raise NumericDomainError("couplings and field must be finite")
        object.__setattr__(self, "couplings", table)
        object.__setattr__(self, "field", float(self.field))

    @classmethod
    def pair_product(
        cls, blocks: BlockSpace, field: float, j_by_distance: Sequence[float]
    ) -> "Hamiltonian":
        """Product-form couplings: pair energy at distance d is -J_d * s * s'."""
        if len(j_by_distance) != blocks.n:
            raise NumericDomainError(
                f"need {blocks.n} couplings, got {len(j_by_distance)}"
            )
        vals = np.asarray(blocks.alphabet.values, dtype=float)
        table = np.stack(
            [-float(j) * np.outer(vals, vals) for j in j_by_distance], axis=0
        )
        return cls(blocks, field, table)

    @cached_property
    def intra_energies(self) -> np.ndarray:
        """Vector over blocks of within-block energies (field + inner pairs)."""
        space = self.blocks
        digits = space.digit_table
        x = -self.field * space.value_table.sum(axis=1)
        for i in range(space.n - 1):
            for k in range(i + 1, space.n):
                x = x + self.couplings[k - i - 1, digits[:, i], digits[:, k]]
        return x

    @cached_property
    def cross_energies(self) -> np.ndarray:
        """Matrix over ordered block pairs of between-block energies.

        Entry (p, q) couples the spins of block p to those of the block q
        immediately to its right; the matrix is not symmetric in general.
        """
        space = self.blocks
        digits = space.digit_table
        y = np.zeros((space.size, space.size))
        for i in range(space.n):
            for k in range(i + 1):
                d = space.n - i + k
                y = y + self.couplings[d - 1, digits[:, i][:, None], digits[:, k][None, :]]
        return y

    def intra_block_energy(self, block: int) -> float:
        """Energy of the spins inside one block, including the field term."""
        self.blocks._check(block)
        return float(self.intra_energies[block])

    def cross_block_energy(self, block: int, right_block: int) -> float:
        """Interaction energy between a block and the block to its right."""
        self.blocks._check(block)
        self.blocks._check(right_block)
        return float(self.cross_energies[block, right_block])

    def chain_energy_blockwise(self, spins: Sequence[int], boundary: str = "open") -> float:
        """Chain energy assembled from block terms; length must be a multiple of n.

        Open chains sum intra terms plus consecutive cross terms; periodic
        chains add the wrap-around cross term from the last block to the first.
        """
        _check_boundary(boundary)
        n = self.blocks.n
        length = len(spins)
        if length == 0 or length % n != 0:
            raise InvalidChainError(
                f"chain length {length} is not a positive multiple of n={n}"
            )
        blocks = [
            self.blocks.encode(spins[i : i + n]) for i in range(0, length, n)
        ]
        energy = float(np.sum(self.intra_energies[blocks]))
        for a, b in zip(blocks, blocks[1:]):
            energy += self.cross_energies[a, b]
        if boundary == "periodic":
            energy += self.cross_energies[blocks[-1], blocks[0]]
        return energy

    def chain_energy_direct(self, spins: Sequence[int], boundary: str = "open") -> float:
        """Chain energy summed pair by pair over all sites; any length >= 1.

        Serves as the independent check of the blockwise decomposition.
        Periodic chains wrap pair distances modulo the length.
        """
        _check_boundary(boundary)
        length = len(spins)
        if length < 1:
            raise InvalidChainError("need at least one spin")
        vals = np.asarray(self.blocks.alphabet.values, dtype=float)
        idx = [int(s) for s in spins]
        energy = -self.field * float(np.sum(vals[idx]))
        n = self.blocks.n
        for i in range(length):
            for d in range(1, n + 1):
                j = i + d
                if boundary == "periodic":
                    j %= length
                elif j >= length:
                    continue
                energy += self.couplings[d - 1, idx[i], idx[j]]
        return energy


def _check_boundary(boundary: str) -> None:
    if boundary not in ("open", "periodic"):
        raise InvalidChainError(f"boundary must be open or periodic, got {boundary!r}")
