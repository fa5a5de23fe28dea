"""
Incréments browniens communs à la simulation de référence et aux schémas.

Chaque trajectoire a son propre flux PCG64 issu de SeedSequence(seed).spawn(M) :
un ensemble de trajectoires est reproductible et indépendant de l'ordre de
parcours. Les incréments fins sont générés par blocs de temps pour ne jamais
matérialiser la matrice M × N_fine complète.
"""

from dataclasses import dataclass
from typing import Iterator, List

import numpy as np

from ..errors import InvalidParamsError, NonDivisorAggregationError

DEFAULT_CHUNK_STEPS = 8192


@dataclass(frozen=True)
class BrownianBundle:
    """
    M trajectoires browniennes sur la grille fine de [0, T].

    Attributes:
        seed: Graine maîtresse (entier 64 bits)
        M: Nombre de trajectoires
        N_fine: Nombre de pas fins
        T: Horizon
        chunk_steps: Taille cible des blocs de génération
    """

    seed: int
    M: int
    N_fine: int
    T: float = 1.0
    chunk_steps: int = DEFAULT_CHUNK_STEPS

    def __post_init__(self):
        if self.M < 1:
            raise InvalidParamsError(f"M doit être >= 1, reçu: {self.M}")
        if self.N_fine < 1:
            raise InvalidParamsError(f"N_fine doit être >= 1, reçu: {self.N_fine}")
        if not self.T > 0:
            raise InvalidParamsError(f"T doit être > 0, reçu: {self.T}")

    @property
    def fine_dt(self) -> float:
        return self.T / self.N_fine

    def generators(self) -> List[np.random.Generator]:
        """Un générateur neuf par trajectoire (à chaque appel)"""
        children = np.random.SeedSequence(self.seed).spawn(self.M)
        return [np.random.Generator(np.random.PCG64(child)) for child in children]

    def block_size(self, N: int) -> int:
        """
        Nombre de pas fins par pas grossier.

        Raises:
            NonDivisorAggregationError: si N ne divise pas N_fine
        """
        if N < 1 or self.N_fine % N != 0:
            raise NonDivisorAggregationError(
                f"N={N} ne divise pas N_fine={self.N_fine}"
            )
        return self.N_fine // N

    def iter_fine_chunks(self, chunk_steps: int = None) -> Iterator[np.ndarray]:
        """
        Incréments fins par blocs consécutifs de forme (M, c).

        La concaténation des blocs ne dépend pas de chunk_steps.
        """
        chunk = max(1, int(chunk_steps or self.chunk_steps))
        scale = np.sqrt(self.fine_dt)
        rngs = self.generators()
        start = 0
        while start < self.N_fine:
            width = min(chunk, self.N_fine - start)
            block = np.empty((self.M, width))
            for m, rng in enumerate(rngs):
                block[m] = rng.standard_normal(width)
            yield scale * block
            start += width

    def fine_increments(self) -> np.ndarray:
        """Matrice (M, N_fine) complète (réservé aux petites tailles)"""
        return np.concatenate(list(self.iter_fine_chunks()), axis=1)

    def path_increments(self, m: int) -> np.ndarray:
        """Incréments fins de la trajectoire m"""
        if not 0 <= m < self.M:
            raise InvalidParamsError(f"Trajectoire {m} hors de [0, {self.M})")
        children = np.random.SeedSequence(self.seed).spawn(self.M)
        rng = np.random.Generator(np.random.PCG64(children[m]))
        scale = np.sqrt(self.fine_dt)
        out = np.empty(self.N_fine)
        start = 0
        while start < self.N_fine:
            width = min(self.chunk_steps, self.N_fine - start)
            out[start:start + width] = scale * rng.standard_normal(width)
            start += width
        return out

    def aggregate(self, N: int) -> np.ndarray:
        """
        Incréments grossiers (M, N) : somme des incréments fins de chaque pas.

        Raises:
            NonDivisorAggregationError: si N ne divise pas N_fine
        """
        block = self.block_size(N)
        if block == 1:
            return self.fine_increments()
        chunk = block * max(1, self.chunk_steps // block)
        parts = [
            fine.reshape(self.M, -1, block).sum(axis=2)
            for fine in self.iter_fine_chunks(chunk)
        ]
        return np.concatenate(parts, axis=1)


def make_brownian(seed: int, M: int, N_fine: int, T: float = 1.0) -> BrownianBundle:
    """
    Exemple:
        >>> bundle = make_brownian(42, M=1024, N_fine=100_000)
        >>> dW = bundle.aggregate(100)
    """
    return BrownianBundle(seed=int(seed), M=int(M), N_fine=int(N_fine), T=float(T))
