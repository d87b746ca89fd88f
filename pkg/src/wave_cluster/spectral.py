"""
Spectral analysis of wave histories.

Each node's history is a finite sum of cosines, one per Laplacian
eigenvalue. This module turns histories into one-sided spectra, finds the
lowest-frequency peaks, maps them back to eigenvalues and reads the sign of
every node's eigenvector component off the Fourier coefficient at each peak.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.fft
import scipy.linalg
from scipy.optimize import minimize_scalar

from .exceptions import (
    DomainError,
    InsufficientPeaksError,
    NoisyFloorError,
    TooShortError,
    ValidationError,
    ZeroComponentError,
)
from .graph import Partition

logger = logging.getLogger(__name__)

MIN_SAMPLES = 8
ABSOLUTE_FLOOR = 1e-9
RELATIVE_FLOOR = 1e-3
ZERO_TOLERANCE = 1e-6


@dataclass
class Spectrum:
    """One-sided spectrum of a real history; dc kept apart from the bins."""

    owner: int
    bin_freqs: np.ndarray
    coeffs: np.ndarray
    dc: float
    n_samples: int
    samples: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def magnitudes(self) -> np.ndarray:
        return np.abs(self.coeffs)

    @property
    def resolution(self) -> float:
        """Bin spacing 2 pi / T in radians per round."""
        return 2.0 * math.pi / self.n_samples

    def bin_index(self, omega: float) -> int:
        """Full-spectrum bin b (1-based over the non-dc bins) nearest omega."""
        b = int(round(omega / self.resolution))
        return min(max(b, 1), len(self.bin_freqs))


@dataclass
class EigenPeak:
    """One recovered Laplacian mode."""

    omega: float
    eigenvalue: float
    bin_omega: float
    coefficients: np.ndarray = field(repr=False)
    zero_nodes: Tuple[int, ...] = ()

    def signs(self) -> np.ndarray:
        """+1 where the phase-aligned coefficient is positive, else -1."""
        return np.where(self.coefficients > 0, 1, -1)


@dataclass
class EigenEstimate:
    """Eigenvalue/eigenvector information recovered from one run."""

    peaks: List[EigenPeak]
    k: int
    c: float
    n_samples: int
    frequency_inconsistent: int = 0

    @property
    def omegas(self) -> List[float]:
        return [p.omega for p in self.peaks]

    @property
    def eigenvalues(self) -> List[float]:
        return [p.eigenvalue for p in self.peaks]

    @property
    def resolution(self) -> float:
        return 2.0 * math.pi / self.n_samples

    @property
    def eigenvalue_tolerance(self) -> float:
        """One FFT bin mapped through the frequency-eigenvalue relation."""
        return (2.0 - 2.0 * math.cos(self.resolution)) / (self.c * self.c)

    def sign_matrix(self) -> np.ndarray:
        """N x k matrix of coefficient signs, column j for peak j."""
        return np.column_stack([p.signs() for p in self.peaks])

    def zero_nodes(self) -> List[int]:
        return sorted({i for p in self.peaks for i in p.zero_nodes})


@dataclass
class GatheredEigenvector:
    """Eigenvector assembled from every node's coefficient."""

    values: np.ndarray
    omega: float
    eigenvalue: float
    messages: int


def _check_history(history: np.ndarray) -> np.ndarray:
    x = np.asarray(history, dtype=float)
    if x.shape[-1] < MIN_SAMPLES:
        raise TooShortError(
            f"history has {x.shape[-1]} samples; at least {MIN_SAMPLES} are needed"
        )
    if not np.all(np.isfinite(x)):
        raise ValidationError("history contains non-finite values")
    return x


def bin_frequencies(n_samples: int) -> np.ndarray:
    """omega_b = 2 pi b / T for b = 1..floor(T/2)."""
    return 2.0 * math.pi * np.arange(1, n_samples // 2 + 1) / n_samples


def local_spectrum(history: Sequence[float], owner: int = 0) -> Spectrum:
    """
    One-sided DFT of a node history u(1..T).

    Args:
        history: Real samples, at least 8
        owner: Node id recorded on the spectrum

    Returns:
        Spectrum with floor(T/2) non-dc bins

    Raises:
        TooShortError: Fewer than 8 samples
    """
    x = _check_history(history)
    full = scipy.fft.rfft(x)
    return Spectrum(
        owner=owner,
        bin_freqs=bin_frequencies(x.size),
        coeffs=full[1:],
        dc=float(full[0].real),
        n_samples=x.size,
        samples=x,
    )


def history_spectra(histories: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Non-dc rfft bins of every row of an N x T history matrix, plus dc terms."""
    h = _check_history(histories)
    full = scipy.fft.rfft(h, axis=1)
    return full[:, 1:], full[:, 0].real


def consensus_spectrum(histories: np.ndarray, weights: np.ndarray) -> Spectrum:
    """
    Degree-weighted power spectrum sum_i d_i |Y_i(b)|^2, returned as magnitudes.

    Laplacian eigenvectors are orthogonal in the degree-weighted inner
    product, so cross-mode terms cancel and every mode contributes one
    bump at its own frequency.
    """
    coeffs, dc = history_spectra(histories)
    w = np.asarray(weights, dtype=float)
    power = w @ (np.abs(coeffs) ** 2)
    n_samples = histories.shape[1]
    return Spectrum(
        owner=-1,
        bin_freqs=bin_frequencies(n_samples),
        coeffs=np.sqrt(power).astype(complex),
        dc=float(np.sqrt(w @ dc ** 2)),
        n_samples=n_samples,
    )


def noise_floor(magnitudes: np.ndarray) -> float:
    """max(1e-9, 1e-3 x largest non-dc magnitude)."""
    top = float(np.max(magnitudes)) if magnitudes.size else 0.0
    return max(ABSOLUTE_FLOOR, RELATIVE_FLOOR * top)


def peak_bins(magnitudes: np.ndarray, floor: float) -> np.ndarray:
    """
    Indices of 3-bin local maxima at or above ``floor``.

    The dc bin is excluded, so the first non-dc bin only has to beat its
    right-hand neighbor.
    """
    mags = np.asarray(magnitudes, dtype=float)
    left = np.concatenate([[-np.inf], mags[:-1]])
    right = np.concatenate([mags[1:], [-np.inf]])
    return np.flatnonzero((mags >= floor) & (mags > left) & (mags >= right))


def find_peaks(spec: Spectrum, k: int) -> List[float]:
    """
    The k lowest-frequency spectral peaks, ascending.

    Raises:
        NoisyFloorError: No bin rises above the absolute floor
        InsufficientPeaksError: Fewer than k peaks found
    """
    if k < 1:
        raise ValidationError(f"k must be at least 1, got {k}")
    mags = spec.magnitudes
    floor = noise_floor(mags)
    if mags.size == 0 or float(np.max(mags)) < floor:
        raise NoisyFloorError(
            f"no spectral bin of node {spec.owner} exceeds the floor {floor:.3g}"
        )
    found = peak_bins(mags, floor)
    if found.size < k:
        raise InsufficientPeaksError(
            f"found {found.size} peak(s) for node {spec.owner}, need {k}; "
            f"increase T_max (now {spec.n_samples}) or request fewer clusters"
        )
    return [float(spec.bin_freqs[b]) for b in found[:k]]


def lowest_peak_bins(coeffs: np.ndarray) -> np.ndarray:
    """Per-row index of the lowest peak bin of an N x B coefficient matrix, -1 if none."""
    mags = np.abs(coeffs)
    floors = np.maximum(ABSOLUTE_FLOOR, RELATIVE_FLOOR * mags.max(axis=1, initial=0.0))
    left = np.concatenate([np.full((mags.shape[0], 1), -np.inf), mags[:, :-1]], axis=1)
    right = np.concatenate([mags[:, 1:], np.full((mags.shape[0], 1), -np.inf)], axis=1)
    is_peak = (mags >= floors[:, None]) & (mags > left) & (mags >= right)
    first = np.argmax(is_peak, axis=1)
    return np.where(is_peak.any(axis=1), first, -1)


def frequency_to_eigenvalue(omega: float, c: float) -> float:
    """
    Laplacian eigenvalue of a mode oscillating at omega: (2 - 2 cos omega) / c^2.

    Raises:
        DomainError: omega outside (0, pi] or c outside (0, sqrt(2)]
    """
    if not 0.0 < omega <= math.pi + 1e-12:
        raise DomainError(f"omega must lie in (0, pi], got {omega}")
    if not 0.0 < c <= math.sqrt(2.0) + 1e-12:
        raise DomainError(f"c must lie in (0, sqrt(2)], got {c}")
    return (2.0 - 2.0 * math.cos(omega)) / (c * c)


def _basis(n_samples: int, omega: float) -> np.ndarray:
    t = np.arange(n_samples)
    cols = [np.ones(n_samples), np.cos(omega * t)]
    if math.pi - omega > 1e-9:
        cols.append(np.sin(omega * t))
    return np.column_stack(cols)


def projection_energy(histories: np.ndarray, weights: np.ndarray, omega: float) -> float:
    """Degree-weighted energy of the histories inside span{1, cos wt, sin wt}."""
    basis = _basis(histories.shape[1], omega)
    q, _ = scipy.linalg.qr(basis, mode="economic")
    proj = histories @ q
    return float(np.asarray(weights, dtype=float) @ np.sum(proj * proj, axis=1))


def refine_frequency(
    histories: np.ndarray, weights: np.ndarray, omega: float, resolution: float
) -> float:
    """
    Locate a peak between FFT bins.

    Scans +-1 bin around ``omega`` and polishes the best point with a
    bounded scalar search on the projection energy.
    """
    lo_limit, hi_limit = 1e-9, math.pi
    grid = np.clip(omega + resolution * np.linspace(-1.0, 1.0, 9), lo_limit, hi_limit)
    energies = [projection_energy(histories, weights, w) for w in grid]
    best = float(grid[int(np.argmax(energies))])
    best_energy = max(energies)

    lo = max(lo_limit, best - resolution / 4)
    hi = min(hi_limit, best + resolution / 4)
    result = minimize_scalar(
        lambda w: -projection_energy(histories, weights, w),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    if result.success and -result.fun >= best_energy:
        return float(result.x)
    return best


def coefficients_at(histories: np.ndarray, omega: float) -> np.ndarray:
    """
    Complex Fourier coefficient of every row at omega (DFT scaling).

    A least-squares fit of m + a cos wt + b sin wt gives a - ib, scaled by
    T/2 so an on-bin cosine matches its FFT bin.
    """
    h = np.atleast_2d(np.asarray(histories, dtype=float))
    n_samples = h.shape[1]
    basis = _basis(n_samples, omega)
    solution, *_ = scipy.linalg.lstsq(basis, h.T)
    a = solution[1]
    b = solution[2] if solution.shape[0] > 2 else np.zeros_like(a)
    return (a - 1j * b) * (n_samples / 2.0)


def coefficient_at(spec: Spectrum, omega: float) -> complex:
    """Coefficient of one spectrum at omega; nearest bin when samples are absent."""
    if spec.samples is not None:
        return complex(coefficients_at(spec.samples, omega)[0])
    return complex(spec.coeffs[spec.bin_index(omega) - 1])


def phase_reference(coefficients: np.ndarray) -> complex:
    """Unit phase of the largest-magnitude coefficient."""
    coeffs = np.asarray(coefficients)
    ref = coeffs[int(np.argmax(np.abs(coeffs)))]
    if abs(ref) == 0:
        return 1.0 + 0.0j
    return complex(ref / abs(ref))


def align_phase(coefficients: np.ndarray, reference: complex) -> np.ndarray:
    """Real parts after rotating by the conjugate reference phase."""
    return np.real(np.asarray(coefficients) * np.conj(reference))


def coefficient_sign(
    spec: Spectrum,
    omega: float,
    reference: complex = 1.0 + 0.0j,
    zero_tolerance: float = ZERO_TOLERANCE,
) -> int:
    """
    Sign of the node's eigenvector component at a detected peak.

    Args:
        spec: The node's spectrum
        omega: Peak frequency
        reference: Run-wide phase reference shared by all nodes
        zero_tolerance: Relative magnitude below which no sign is defined

    Returns:
        +1 or -1

    Raises:
        ZeroComponentError: The node sits on a nodal line
    """
    coef = coefficient_at(spec, omega)
    node_max = float(np.max(spec.magnitudes)) if spec.coeffs.size else 0.0
    if abs(coef) < zero_tolerance * node_max or node_max == 0.0:
        raise ZeroComponentError(
            f"node {spec.owner}: coefficient {abs(coef):.3g} at omega={omega:.6g} "
            f"is below {zero_tolerance:g} x {node_max:.3g}"
        )
    return 1 if align_phase(np.array([coef]), reference)[0] > 0 else -1


def assign_clusters(signs: np.ndarray) -> Partition:
    """
    Cluster ids from per-node sign vectors: sum_j A_j 2^(j-1), A_j = [sign_j > 0].

    Ids are canonicalized to 0..(distinct-1) by first occurrence.
    """
    arr = np.asarray(signs)
    if arr.ndim == 1:
        arr = arr[:, None]
    bits = (arr > 0).astype(np.int64)
    ids = bits @ (1 << np.arange(bits.shape[1], dtype=np.int64))
    return Partition.from_labels(ids.tolist())


def estimate_eigenpairs(
    histories: np.ndarray,
    weights: np.ndarray,
    k: int,
    c: float,
    refine: bool = True,
    zero_tolerance: float = ZERO_TOLERANCE,
) -> EigenEstimate:
    """
    Recover the k lowest non-trivial modes from an N x T history matrix.

    Peaks come from the degree-weighted consensus spectrum; each is refined
    off the bin grid, mapped to an eigenvalue and turned into a phase-aligned
    real coefficient per node.

    Raises:
        TooShortError, NoisyFloorError, InsufficientPeaksError
    """
    h = _check_history(histories)
    w = np.asarray(weights, dtype=float)
    consensus = consensus_spectrum(h, w)
    bin_omegas = find_peaks(consensus, k)
    node_coeffs, _ = history_spectra(h)
    node_max = np.abs(node_coeffs).max(axis=1)

    peaks = []
    for bin_omega in bin_omegas:
        omega = (
            refine_frequency(h, w, bin_omega, consensus.resolution) if refine else bin_omega
        )
        coeffs = coefficients_at(h, omega)
        aligned = align_phase(coeffs, phase_reference(coeffs))
        zero = np.flatnonzero(np.abs(coeffs) < zero_tolerance * node_max)
        peaks.append(
            EigenPeak(
                omega=omega,
                eigenvalue=frequency_to_eigenvalue(omega, c),
                bin_omega=bin_omega,
                coefficients=aligned,
                zero_nodes=tuple(int(i) for i in zero),
            )
        )

    lowest = lowest_peak_bins(node_coeffs)
    consensus_bin = consensus.bin_index(bin_omegas[0]) - 1
    inconsistent = int(np.sum((lowest < 0) | (np.abs(lowest - consensus_bin) > 1)))
    if inconsistent:
        logger.warning(
            f"{inconsistent} node(s) see their lowest peak more than one bin "
            f"away from the consensus frequency {bin_omegas[0]:.6g}"
        )

    estimate = EigenEstimate(
        peaks=peaks, k=k, c=c, n_samples=h.shape[1], frequency_inconsistent=inconsistent
    )
    logger.debug(
        "Recovered eigenvalues "
        + ", ".join(f"{p.eigenvalue:.6g} (omega={p.omega:.6g})" for p in peaks)
    )
    return estimate


def gather_eigenvector(
    run, j: int, estimate: Optional[EigenEstimate] = None
) -> GatheredEigenvector:
    """
    Collect every node's coefficient for the j-th eigenvector (j >= 2).

    The result is proportional to v^(j) up to a global scale and sign; the
    gather costs one message per node.

    Args:
        run: Completed WaveRun with histories
        j: Eigenvector index, 2 for the lowest non-trivial mode
        estimate: Existing estimate covering index j, reused when given
    """
    if j < 2:
        raise ValidationError(f"eigenvector index must be >= 2, got {j}")
    if estimate is None or len(estimate.peaks) < j - 1:
        estimate = estimate_eigenpairs(run.history, run.graph.degrees, j - 1, run.config.c)
    peak = estimate.peaks[j - 2]
    return GatheredEigenvector(
        values=peak.coefficients.copy(),
        omega=peak.omega,
        eigenvalue=peak.eigenvalue,
        messages=run.graph.n,
    )
