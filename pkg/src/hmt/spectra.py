"""Empirical-spectrum statistics for the sampled ensembles.

Eigenvalues come from the LAPACK symmetric solver (Householder
tridiagonalization followed by implicitly shifted QL/QR iteration, the
'ev' driver); everything downstream (moments, norms, histograms,
distances) is computed from them.  The circuit-trace expansion over paths
is kept as an exact rational oracle against direct matrix powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from .ensembles import EnsembleSample, markov_vertex_pairs
from .errors import CapacityError, InvalidArgumentError, NumericError

_SYMMETRY_RTOL = 1e-12
_TRACE_RTOL = 1e-10

DEFAULT_CIRCUIT_N_CAP = 8
DEFAULT_CIRCUIT_R_CAP = 4


@dataclass(frozen=True)
class EmpiricalSpectrum:
    """Sorted eigenvalues of an already-scaled matrix plus provenance."""

    eigenvalues: np.ndarray
    scale: str  # "sqrt_n" | "n" | "none"
    ensemble: str = ""
    n: int = 0
    seed: int = 0


def eigvalsh(matrix: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix.

    Guards: the input must be symmetric to 1e-12 relative tolerance, and
    the eigenvalue sum must reproduce the trace to 1e-10 * Frobenius norm.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()) if a.size else 0.0)
    if float(np.abs(a - a.T).max()) > _SYMMETRY_RTOL * scale:
        raise InvalidArgumentError("matrix is not symmetric within 1e-12 relative tolerance")
    try:
        eigs = scipy.linalg.eigh(a, eigvals_only=True, driver="ev", check_finite=False)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericError(f"symmetric eigensolver failed to converge: {exc}") from exc
    fro = float(np.linalg.norm(a))
    resid = abs(float(eigs.sum()) - float(np.trace(a)))
    if resid > _TRACE_RTOL * max(fro, 1e-300):
        raise NumericError(
            f"eigenvalue sum misses the trace by {resid:.3g} (> 1e-10 * ||A||_F)"
        )
    return np.sort(eigs)


def empirical_moment(matrix: np.ndarray, r: int) -> float:
    """r-th moment of the spectral measure of A/sqrt(n): n^-(r/2+1) tr A^r."""
    if r < 1:
        raise InvalidArgumentError(f"moment order must be >= 1, got {r}")
    eigs = eigvalsh(matrix)
    n = eigs.shape[0]
    return float(np.sum(eigs**r)) * n ** (-(r / 2.0 + 1.0))


def spectral_norm(matrix: np.ndarray) -> float:
    """max(lambda_max, -lambda_min): the largest absolute eigenvalue."""
    eigs = eigvalsh(matrix)
    return float(max(eigs[-1], -eigs[0]))


def empirical_spectrum(
    sample: EnsembleSample, scale: str = "sqrt_n"
) -> EmpiricalSpectrum:
    """Eigenvalues of the sample scaled by 1/sqrt(n) or 1/n, sorted ascending."""
    if scale not in ("sqrt_n", "n", "none"):
        raise InvalidArgumentError(f"unknown scale {scale!r}")
    factor = {"sqrt_n": 1.0 / math.sqrt(sample.n), "n": 1.0 / sample.n, "none": 1.0}[scale]
    eigs = eigvalsh(sample.matrix) * factor
    return EmpiricalSpectrum(
        eigenvalues=eigs,
        scale=scale,
        ensemble=sample.ensemble,
        n=sample.n,
        seed=sample.seed,
    )


# ---------------------------------------------------------------------------
# Exact circuit-trace oracle
# ---------------------------------------------------------------------------

def _exact_matrix_power_trace(matrix: list[list[Fraction]], r: int) -> Fraction:
    n = len(matrix)
    power = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(r):
        power = [
            [sum(power[i][l] * matrix[l][j] for l in range(n)) for j in range(n)]
            for i in range(n)
        ]
    return sum(power[i][i] for i in range(n))


def trace_via_circuits(
    ensemble: str,
    entries: Mapping,
    n: int,
    r: int,
    n_cap: int = DEFAULT_CIRCUIT_N_CAP,
    r_cap: int = DEFAULT_CIRCUIT_R_CAP,
) -> Fraction:
    """tr(A^r) as an exact sum over circuits, in rational arithmetic.

    toeplitz: entries maps |i-j| -> X; the product over a circuit picks
    X_{|pi(i)-pi(i-1)|}.  hankel: entries maps i+j-1 -> X with the product
    picking X_{pi(i)+pi(i-1)-1}.  markov: entries maps vertex pairs (i, j),
    i<j, to X; circuits run over the overlap graph with t-factor chains.
    """
    if n < 1 or r < 1:
        raise InvalidArgumentError("n and r must be positive")
    if n > n_cap or r > r_cap:
        raise CapacityError(f"circuit enumeration capped at n <= {n_cap}, r <= {r_cap}")

    if ensemble in ("toeplitz", "hankel"):
        x = {key: Fraction(val) for key, val in entries.items()}
        total = Fraction(0)
        path = [0] * (r + 1)

        def key_of(a: int, b: int) -> int:
            return abs(a - b) if ensemble == "toeplitz" else a + b - 1

        def rec(step: int, prod: Fraction):
            nonlocal total
            if step == r:
                total += prod * x[key_of(path[r - 1], path[0])]
                return
            for v in range(1, n + 1):
                path[step] = v
                rec(step + 1, prod * x[key_of(path[step - 1], v)])

        # circuits pi: {0..r} -> {1..n} with pi(0) = pi(r)
        for start in range(1, n + 1):
            path[0] = start
            rec(1, Fraction(1))
        return total

    if ensemble == "markov":
        pairs = markov_vertex_pairs(n)
        x = {}
        for key, val in entries.items():
            pair = tuple(sorted(key))
            x[pair] = Fraction(val)
        missing = [p for p in pairs if p not in x]
        if missing:
            raise InvalidArgumentError(f"missing entries for vertex pairs {missing[:3]}...")

        def t_of(a: tuple[int, int], b: tuple[int, int]) -> int:
            if a == b:
                return -2
            if a[0] == b[0] or a[1] == b[1]:
                return -1
            if a[0] == b[1] or a[1] == b[0]:
                return 1
            return 0

        total = Fraction(0)

        def rec_m(chain: list[tuple[int, int]], prod: Fraction):
            nonlocal total
            if len(chain) == r:
                t_close = t_of(chain[-1], chain[0])
                if t_close:
                    total += prod * t_close * x[chain[-1]]
                return
            for b in pairs:
                t = t_of(chain[-1], b)
                if t:
                    rec_m(chain + [b], prod * t * x[chain[-1]])

        for a in pairs:
            rec_m([a], Fraction(1))
        return total

    raise InvalidArgumentError(f"unknown ensemble {ensemble!r} for circuit traces")


def exact_trace_power(ensemble: str, entries: Mapping, n: int, r: int) -> Fraction:
    """Direct tr(A^r) by exact matrix multiplication; oracle for the circuits."""
    if ensemble == "toeplitz":
        grid = [[Fraction(entries[abs(i - j)]) for j in range(n)] for i in range(n)]
    elif ensemble == "hankel":
        grid = [[Fraction(entries[i + j + 1]) for j in range(n)] for i in range(n)]
    elif ensemble == "markov":
        grid = [[Fraction(0)] * n for _ in range(n)]
        for (i, j) in markov_vertex_pairs(n):
            val = Fraction(entries[(i, j)])
            grid[i - 1][j - 1] = val
            grid[j - 1][i - 1] = val
        for i in range(n):
            grid[i][i] = -sum(grid[i][j] for j in range(n) if j != i)
    else:
        raise InvalidArgumentError(f"unknown ensemble {ensemble!r}")
    return _exact_matrix_power_trace(grid, r)


# ---------------------------------------------------------------------------
# Histograms and distances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Histogram:
    """Equal-width histogram rows; densities integrate to one."""

    bin_left: np.ndarray
    bin_right: np.ndarray
    count: np.ndarray
    density: np.ndarray

    @property
    def width(self) -> float:
        return float(self.bin_right[0] - self.bin_left[0])

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("bin_left,bin_right,count,density\n")
            for left, right, cnt, dens in zip(
                self.bin_left, self.bin_right, self.count, self.density
            ):
                fh.write(f"{left:.17g},{right:.17g},{int(cnt)},{dens:.17g}\n")


def histogram(
    spec: EmpiricalSpectrum | np.ndarray,
    bins: int,
    value_range: tuple[float, float] | None = None,
) -> Histogram:
    """Equal-width histogram over [min, max] or the given range."""
    values = spec.eigenvalues if isinstance(spec, EmpiricalSpectrum) else np.asarray(spec, float)
    if values.size == 0:
        raise InvalidArgumentError("cannot histogram an empty spectrum")
    if bins < 1:
        raise InvalidArgumentError(f"bins must be >= 1, got {bins}")
    counts, edges = np.histogram(values, bins=bins, range=value_range)
    width = edges[1] - edges[0]
    inside = int(counts.sum())
    density = counts / (inside * width) if inside and width > 0 else np.zeros(bins)
    return Histogram(
        bin_left=edges[:-1], bin_right=edges[1:], count=counts, density=density
    )


def smoothed_mode_count(hist: Histogram, bandwidth_bins: float = 2.0) -> int:
    """Strict local maxima of the Gaussian-smoothed density.

    The kernel bandwidth is bandwidth_bins bin widths (default 2), the
    reproducible finite-sample proxy for counting modes of the underlying
    density.
    """
    dens = hist.density
    m = dens.shape[0]
    idx = np.arange(m)
    kernel = np.exp(-0.5 * ((idx[:, None] - idx[None, :]) / bandwidth_bins) ** 2)
    smooth = kernel @ dens / kernel.sum(axis=1)
    modes = 0
    for i in range(m):
        left = smooth[i - 1] if i > 0 else -np.inf
        right = smooth[i + 1] if i < m - 1 else -np.inf
        if smooth[i] > left and smooth[i] > right:
            modes += 1
    return modes


def kolmogorov_distance(
    a: EmpiricalSpectrum | Sequence[float], b: EmpiricalSpectrum | Sequence[float]
) -> float:
    """Sup distance between the two empirical CDFs, in [0, 1]."""
    xa = np.sort(a.eigenvalues if isinstance(a, EmpiricalSpectrum) else np.asarray(a, float))
    xb = np.sort(b.eigenvalues if isinstance(b, EmpiricalSpectrum) else np.asarray(b, float))
    if xa.size == 0 or xb.size == 0:
        raise InvalidArgumentError("cannot compare empty spectra")
    grid = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, grid, side="right") / xa.size
    fb = np.searchsorted(xb, grid, side="right") / xb.size
    return float(np.abs(fa - fb).max())
