"""
Dense spectral oracle and reference dynamics.

Ground truth for the wave pipeline: the full spectrum of the normalized
Laplacian, spectral partitions from eigenvector signs, the eigenvalues of
the wave companion matrix, and the heat-equation iteration with its
closed-form eigen-expansion.
"""

import cmath
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .exceptions import (
    DegenerateEigengapWarning,
    NotConvergedError,
    TooLargeError,
    ValidationError,
)
from .graph import Graph, Partition
from .spectral import assign_clusters

logger = logging.getLogger(__name__)

DEFAULT_DENSE_LIMIT = 4096
RESIDUAL_TOLERANCE = 1e-8
DEGENERATE_GAP = 1e-9
ZERO_EIGENVALUE = 1e-10
MODULUS_TOLERANCE = 1e-9


@dataclass
class DenseSpectral:
    """
    Full spectrum of L = I - D^-1 W.

    Eigenvectors are the columns of ``eigenvectors`` and satisfy
    V^T D V = I. Each column is signed so its largest-magnitude entry
    is positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    degrees: np.ndarray = field(repr=False)
    max_residual: float = 0.0

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def lambda2(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def fiedler(self) -> np.ndarray:
        return self.eigenvectors[:, 1]

    def eigenvector(self, j: int) -> np.ndarray:
        """v^(j), 1-based like the eigenvalue ordering."""
        return self.eigenvectors[:, j - 1]

    def eigenspace(self, j: int, tol: float = 1e-8) -> np.ndarray:
        """Columns spanning the eigenspace of lambda_j (repeated eigenvalues grouped)."""
        target = self.eigenvalues[j - 1]
        cols = np.flatnonzero(np.abs(self.eigenvalues - target) <= tol)
        return self.eigenvectors[:, cols]

    def projection_cosine(self, vector: np.ndarray, j: int) -> float:
        """
        |cos| of the angle between ``vector`` and the eigenspace of lambda_j.

        Uses the degree-weighted inner product in which the eigenvectors are
        orthonormal.
        """
        basis = self.eigenspace(j)
        x = np.asarray(vector, dtype=float)
        coords = basis.T @ (self.degrees * x)
        norm = math.sqrt(float(x @ (self.degrees * x)))
        if norm == 0:
            return 0.0
        return float(np.linalg.norm(coords) / norm)


def dense_spectral(
    g: Graph,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    residual_tolerance: float = RESIDUAL_TOLERANCE,
) -> DenseSpectral:
    """
    Full eigendecomposition via the symmetric form D^-1/2 (D - W) D^-1/2.

    Args:
        g: Graph
        dense_limit: Largest accepted node count
        residual_tolerance: Bound on max_j ||L v_j - lambda_j v_j||_inf

    Returns:
        DenseSpectral sorted by ascending eigenvalue

    Raises:
        TooLargeError: g.n above dense_limit
        NotConvergedError: Residual above tolerance
    """
    if g.n > dense_limit:
        raise TooLargeError(f"{g.n} nodes exceed the dense limit {dense_limit}")

    values, w = scipy.linalg.eigh(g.sym_laplacian())
    inv_sqrt = 1.0 / np.sqrt(g.degrees)
    vectors = inv_sqrt[:, None] * w

    lead = np.argmax(np.abs(vectors), axis=0)
    flip = vectors[lead, np.arange(vectors.shape[1])] < 0
    vectors[:, flip] *= -1.0

    lap = g.laplacian_matrix()
    residual = float(np.max(np.abs(lap @ vectors - vectors * values[None, :])))
    if residual > residual_tolerance:
        raise NotConvergedError(
            f"eigen-decomposition residual {residual:.3g} exceeds {residual_tolerance:g}"
        )
    logger.debug(f"Dense spectrum of {g!r}: lambda_2={values[1]:.6g}, residual={residual:.2g}")
    return DenseSpectral(
        eigenvalues=values,
        eigenvectors=vectors,
        degrees=np.asarray(g.degrees, dtype=float),
        max_residual=residual,
    )


def eigengap_report(ds: DenseSpectral, max_k: int = 8) -> Dict[str, Any]:
    """
    Gaps lambda_{k+2} - lambda_{k+1} for k = 1..max_k.

    The k with the widest gap is the natural number of sign bits to request.
    """
    max_k = max(1, min(max_k, ds.n - 2))
    lam = ds.eigenvalues
    gaps = [float(lam[k + 1] - lam[k]) for k in range(1, max_k + 1)]
    suggested = int(np.argmax(gaps)) + 1 if gaps else 1
    return {
        "eigenvalues": [float(x) for x in lam[: max_k + 2]],
        "gaps": gaps,
        "suggested_k": suggested,
        "degenerate_k": [k for k, gap in enumerate(gaps, start=1) if gap < DEGENERATE_GAP],
    }


def is_degenerate(ds: DenseSpectral, k: int) -> bool:
    """True when lambda_{k+1} and lambda_{k+2} coincide within 1e-9."""
    if k + 2 > ds.n:
        return False
    return abs(ds.eigenvalues[k + 1] - ds.eigenvalues[k]) < DEGENERATE_GAP


def oracle_partition(ds: DenseSpectral, k: int) -> Partition:
    """
    Spectral partition from the signs of v^(2)..v^(k+1).

    Warns with DegenerateEigengapWarning when lambda_{k+1} ~ lambda_{k+2}:
    the cut is then not unique.
    """
    if not 1 <= k < ds.n:
        raise ValidationError(f"k must lie in [1, {ds.n - 1}], got {k}")
    if is_degenerate(ds, k):
        message = (
            f"lambda_{k + 1}={ds.eigenvalues[k]:.12g} and "
            f"lambda_{k + 2}={ds.eigenvalues[k + 1]:.12g} coincide; the spectral cut is not unique"
        )
        logger.warning(message)
        warnings.warn(message, DegenerateEigengapWarning, stacklevel=2)

    return assign_clusters(np.where(ds.eigenvectors[:, 1 : k + 1] > 0, 1, -1))


def companion_alphas(lambda_: float, c: float) -> tuple:
    """Both eigenvalues of the companion block for one Laplacian eigenvalue."""
    theta = 2.0 - c * c * lambda_
    root = cmath.sqrt(theta * theta - 4.0)
    return (theta + root) / 2.0, (theta - root) / 2.0


@dataclass
class CompanionMatrix:
    """The 2N x 2N wave operator M = [[2I - c^2 L, -I], [I, 0]]."""

    laplacian: sp.csr_matrix
    c: float

    @classmethod
    def from_graph(cls, g: Graph, c: float) -> "CompanionMatrix":
        return cls(laplacian=g.laplacian_matrix(), c=c)

    @property
    def n(self) -> int:
        return self.laplacian.shape[0]

    def matrix(self) -> sp.csr_matrix:
        eye = sp.identity(self.n, format="csr")
        top_left = 2.0 * eye - (self.c * self.c) * self.laplacian
        return sp.bmat([[top_left, -eye], [eye, None]], format="csr")

    def propagate(self, z0: np.ndarray, t: int) -> np.ndarray:
        """z(t) = M^t z(0) by repeated products."""
        m = self.matrix()
        z = np.asarray(z0, dtype=float).copy()
        for _ in range(t):
            z = m @ z
        return z


@dataclass
class CompanionReport:
    """Per-eigenvalue companion analysis."""

    c: float
    rows: List[Dict[str, Any]]
    max_modulus_deviation: float
    case_i: bool
    case_iii: bool

    @property
    def stable(self) -> bool:
        return self.max_modulus_deviation <= MODULUS_TOLERANCE and not self.case_iii

    def to_dict(self) -> Dict[str, Any]:
        return {
            "c": self.c,
            "rows": self.rows,
            "max_modulus_deviation": self.max_modulus_deviation,
            "case_i": self.case_i,
            "case_iii": self.case_iii,
            "stable": self.stable,
        }


def companion_eigencheck(
    g: Graph,
    c: float,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    ds: Optional[DenseSpectral] = None,
) -> CompanionReport:
    """
    Eigenvalues of the wave companion matrix from the Laplacian spectrum.

    For each lambda_j both roots alpha = (2 - c^2 lambda)/2 +- (c/2) sqrt(c^2 lambda^2 - 4 lambda)
    are evaluated. lambda = 0 gives the double root 1 with the generalized
    eigenvector (1, -1); c^2 lambda = 4 gives the double root -1.
    """
    if ds is None:
        ds = dense_spectral(g, dense_limit=dense_limit)
    rows = []
    deviation = 0.0
    case_i = case_iii = False
    for lam in ds.eigenvalues:
        lam = 0.0 if abs(lam) < ZERO_EIGENVALUE else float(lam)
        a_plus, a_minus = companion_alphas(lam, c)
        note = "distinct"
        if lam == 0.0:
            case_i = True
            note = "double root 1, generalized eigenvector (1, -1)"
        elif abs(c * c * lam - 4.0) < MODULUS_TOLERANCE:
            case_iii = True
            a_plus = a_minus = complex(-1.0, 0.0)
            note = "double root -1"
        elif c * c * lam > 4.0:
            note = "real roots, |alpha| > 1"
        moduli = (abs(a_plus), abs(a_minus))
        deviation = max(deviation, max(abs(m - 1.0) for m in moduli))
        rows.append(
            {
                "lambda": lam,
                "alpha_plus": [a_plus.real, a_plus.imag],
                "alpha_minus": [a_minus.real, a_minus.imag],
                "modulus_plus": moduli[0],
                "modulus_minus": moduli[1],
                "note": note,
            }
        )
    report = CompanionReport(
        c=c, rows=rows, max_modulus_deviation=deviation, case_i=case_i, case_iii=case_iii
    )
    if not report.stable:
        logger.warning(
            f"Companion matrix unstable at c^2={c * c:.6g}: "
            f"max |alpha| deviation {deviation:.3g}, case iii={case_iii}"
        )
    return report


def heat_iteration(g: Graph, u0: np.ndarray, t: int, step_size: float = 1.0) -> np.ndarray:
    """
    Apply u <- u - step_size * L u ``t`` times.

    step_size=1 is the plain iteration u(t+1) = (I - L) u(t); 0.5 is the lazy
    variant, which avoids the lambda = 2 oscillation on bipartite graphs.
    """
    lap = g.laplacian_matrix()
    u = np.asarray(u0, dtype=float).copy()
    for _ in range(t):
        u = u - step_size * (lap @ u)
    return u


def heat_expansion(
    ds: DenseSpectral, u0: np.ndarray, t: int, step_size: float = 1.0
) -> np.ndarray:
    """Closed form sum_j C_j (1 - step_size lambda_j)^t v^(j) with C_j = v^(j)^T D u0."""
    coeffs = ds.eigenvectors.T @ (ds.degrees * np.asarray(u0, dtype=float))
    factors = (1.0 - step_size * ds.eigenvalues) ** t
    return ds.eigenvectors @ (coeffs * factors)
