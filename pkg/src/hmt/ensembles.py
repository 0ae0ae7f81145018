"""Seeded samplers for the structured random matrix ensembles.

All samplers are deterministic functions of (ensemble, n, distribution,
seed): entry streams come from the counter-based generator in hmt.rng and
are consumed in a fixed documented order, so identical inputs reproduce
bit-identical matrices.  The Markov ensemble's Q-decomposition over the
overlap graph of vertex pairs is included as an exact structural oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError
from .rng import TAG_ENSEMBLE, generator, mix, standard_normals

ENSEMBLES = ("hankel", "toeplitz", "markov", "wigner", "wigner_plus_diag")

_SQRT6 = np.sqrt(6.0)


@dataclass(frozen=True)
class EntryDistribution:
    """Entry law for the i.i.d. stream; tag plus exact mean and variance."""

    tag: str
    mean: Fraction = Fraction(0)
    variance: Fraction = Fraction(1)

    def draw(self, gen, count: int) -> np.ndarray:
        """Fixed-consumption sampling: one uniform per draw (two for triangular)."""
        if self.tag == "rademacher":
            u = gen.random(count)
            return np.where(u < 0.5, 1.0, -1.0)
        if self.tag == "gaussian":
            return standard_normals(gen, count)
        if self.tag == "triangular":
            # U - U' has variance 1/6; sqrt(6) standardizes it
            u = gen.random((2, count))
            return (u[0] - u[1]) * _SQRT6
        if self.tag == "shifted_gaussian":
            return standard_normals(gen, count) + float(self.mean)
        raise InvalidArgumentError(f"unknown distribution tag {self.tag!r}")


def rademacher() -> EntryDistribution:
    return EntryDistribution("rademacher")


def gaussian() -> EntryDistribution:
    return EntryDistribution("gaussian")


def triangular() -> EntryDistribution:
    return EntryDistribution("triangular")


def shifted_gaussian(mean) -> EntryDistribution:
    return EntryDistribution("shifted_gaussian", mean=Fraction(mean))


def distribution_from_tag(tag: str, mean=0) -> EntryDistribution:
    factory = {
        "rademacher": rademacher,
        "gaussian": gaussian,
        "triangular": triangular,
    }
    if tag in factory:
        return factory[tag]()
    if tag == "shifted_gaussian":
        return shifted_gaussian(mean)
    raise InvalidArgumentError(f"unknown distribution tag {tag!r}")


@dataclass(frozen=True)
class EnsembleSample:
    """A sampled symmetric matrix with full provenance."""

    matrix: np.ndarray
    ensemble: str
    n: int
    dist: EntryDistribution
    seed: int


def sample_matrix(ensemble: str, n: int, dist: EntryDistribution, seed: int) -> EnsembleSample:
    """Draw one symmetric n x n matrix of the given ensemble.

    Stream layouts: hankel consumes entries X_1..X_{2n-1} in index order
    (constant along anti-diagonals); toeplitz consumes X_0..X_{n-1}
    (constant along diagonals); markov and wigner consume the strict upper
    triangle row-major; wigner_plus_diag appends n diagonal normals and one
    scalar normal after the triangle.
    """
    if ensemble not in ENSEMBLES:
        raise InvalidArgumentError(f"unknown ensemble {ensemble!r}; expected one of {ENSEMBLES}")
    if n < 1:
        raise InvalidArgumentError(f"matrix size must be >= 1, got {n}")
    gen = generator(mix(TAG_ENSEMBLE, seed))

    if ensemble == "hankel":
        stream = dist.draw(gen, 2 * n - 1)
        idx = np.add.outer(np.arange(n), np.arange(n))
        matrix = stream[idx]
    elif ensemble == "toeplitz":
        stream = dist.draw(gen, n)
        idx = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
        matrix = stream[idx]
    else:
        upper = dist.draw(gen, n * (n - 1) // 2)
        matrix = np.zeros((n, n))
        iu = np.triu_indices(n, k=1)
        matrix[iu] = upper
        matrix = matrix + matrix.T
        if ensemble == "markov":
            # diagonal = negated off-diagonal row sum: rows sum to zero
            np.fill_diagonal(matrix, 0.0)
            matrix[np.diag_indices(n)] = -matrix.sum(axis=1)
        elif ensemble == "wigner_plus_diag":
            diag = standard_normals(gen, n)
            xi = float(standard_normals(gen, 1)[0])
            matrix[np.diag_indices(n)] = np.sqrt(n) * diag + xi
    return EnsembleSample(matrix=matrix, ensemble=ensemble, n=n, dist=dist, seed=seed)


def _check_pair(a, n: int) -> tuple[int, int]:
    pair = tuple(sorted(set(a)))
    if len(pair) != 2 or not all(isinstance(v, int) and 1 <= v <= n for v in pair):
        raise InvalidArgumentError(f"vertex pair must be two distinct indices in 1..{n}, got {a!r}")
    return pair  # (minus, plus)


def markov_q(a, b, n: int) -> tuple[np.ndarray, int]:
    """The matrix Q_{a,b} of the Markov decomposition and its trace t_{a,b}.

    Q has -1 at (a+, b+) and (a-, b-), +1 at (a+, b-) and (a-, b+); the
    trace is -2 when a = b, -1 when the pairs share a like endpoint,
    +1 when they share opposite endpoints, 0 when disjoint.
    """
    am, ap = _check_pair(a, n)
    bm, bp = _check_pair(b, n)
    q = np.zeros((n, n), dtype=np.int64)
    q[ap - 1, bp - 1] += -1
    q[am - 1, bm - 1] += -1
    q[ap - 1, bm - 1] += 1
    q[am - 1, bp - 1] += 1
    if (am, ap) == (bm, bp):
        t = -2
    elif am == bm or ap == bp:
        t = -1
    elif am == bp or ap == bm:
        t = 1
    else:
        t = 0
    return q, t


def markov_vertex_pairs(n: int) -> list[tuple[int, int]]:
    """Vertices of the overlap graph: two-element subsets of {1..n}."""
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def row_sum_statistic(sample: EnsembleSample) -> float:
    """(1/n^2) * sum_i (sum_j X_ij)^2 over the zero-diagonal symmetric array.

    Converges almost surely to the entry variance as n grows; used as a
    statistical self-test of the Markov sampler.
    """
    if sample.ensemble != "markov":
        raise InvalidArgumentError(
            f"row_sum_statistic needs a markov sample, got {sample.ensemble!r}"
        )
    x = sample.matrix.copy()
    np.fill_diagonal(x, 0.0)
    row_sums = x.sum(axis=1)
    return float(np.sum(row_sums**2)) / sample.n**2


def matrix_to_csv(sample: EnsembleSample, path) -> None:
    """Row-major CSV dump of the full symmetric matrix, 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in sample.matrix:
            fh.write(",".join(f"{x:.17g}" for x in row))
            fh.write("\n")
