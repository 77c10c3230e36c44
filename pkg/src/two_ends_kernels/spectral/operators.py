"""Discrete Laplace-Beltrami and Schrodinger operators and their exact spectral oracle.

The operator acts as ``(Lf)(i) = mu_i^-1 sum_j c_ij (f(i) - f(j)) + V(i) f(i)`` and is
self-adjoint in the weighted inner product ``<f, g> = sum_i mu_i f(i) g(i)``.
"""

import csv
import logging
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

import numpy as np
from scipy import linalg
from scipy.sparse import csr_matrix, diags

from two_ends_kernels.config import config
from two_ends_kernels.enums.base_enums import PotentialKindEnum, RegionEnum
from two_ends_kernels.exceptions import (
    NegativePotentialError,
    SpectralConvergenceError,
    SpectralInvariantError,
    SpectralSizeError,
)
from two_ends_kernels.geometry.model_geometry import ManifoldModel

logger = logging.getLogger(__name__)


def mu_inner(measures: np.ndarray, f: np.ndarray, g: np.ndarray) -> complex | float:
    """Return the weighted inner product sum_i mu_i f(i) conj(g(i))."""
    return np.sum(measures * f * np.conj(g))


def mu_norm(measures: np.ndarray, f: np.ndarray) -> float:
    """Return the weighted l2 norm."""
    return float(np.sqrt(np.sum(measures * np.abs(f) ** 2)))


@dataclass(frozen=True, eq=False)
class OperatorHandle:
    """Laplacian of a model plus a non-negative diagonal potential."""

    model: ManifoldModel
    potential: np.ndarray

    @property
    def n_sites(self) -> int:
        """Return the number of sites."""
        return self.model.n_sites

    @property
    def measures(self) -> np.ndarray:
        """Return the site measures."""
        return self.model.measures

    @cached_property
    def stiffness(self) -> csr_matrix:
        """Return the conductance Laplacian D_c - C (symmetric, unweighted)."""
        conductances = self.model.conductance_matrix
        degrees = np.asarray(conductances.sum(axis=1)).ravel()
        return csr_matrix(diags(degrees) - conductances)

    def apply(self, f: np.ndarray) -> np.ndarray:
        """Return Lf."""
        return self.stiffness @ f / self.measures + self.potential * f

    def quadratic_form(self, f: np.ndarray) -> float:
        """Return <Lf, f> in the weighted inner product."""
        return float(np.real(mu_inner(self.measures, self.apply(f), f)))

    def dense_matrix(self) -> np.ndarray:
        """Return L as a dense matrix acting on site vectors."""
        return self.stiffness.toarray() / self.measures[:, None] + np.diag(self.potential)

    def symmetrized_matrix(self) -> np.ndarray:
        """Return D^(1/2) L D^(-1/2) with D = diag(mu), a symmetric matrix."""
        inv_sqrt = 1.0 / np.sqrt(self.measures)
        matrix = self.stiffness.toarray() * inv_sqrt[:, None] * inv_sqrt[None, :]
        matrix += np.diag(self.potential)
        return (matrix + matrix.T) / 2

    def trace(self) -> float:
        """Return the trace of L."""
        return float(np.sum(self.stiffness.diagonal() / self.measures + self.potential))


def assemble_laplacian(model: ManifoldModel) -> OperatorHandle:
    """Return the discrete Laplace-Beltrami operator of a model."""
    return OperatorHandle(model=model, potential=np.zeros(model.n_sites))


def add_potential(op: OperatorHandle, potential: np.ndarray) -> OperatorHandle:
    """Return a new handle with ``potential`` added to the diagonal."""
    potential = np.asarray(potential, dtype=float)
    if potential.shape != (op.n_sites,):
        msg = f"potential must have shape ({op.n_sites},), got {potential.shape}"
        raise ValueError(msg)
    if np.any(potential < 0):
        site = int(np.argmin(potential))
        raise NegativePotentialError(min_value=float(potential[site]), site=site)
    return replace(op, potential=op.potential + potential)


def potential_from_profile(
    model: ManifoldModel, kind: PotentialKindEnum, strength: float, power: float = 2.0
) -> np.ndarray:
    """Return a named non-negative potential profile.

    ``constant`` is ``strength`` everywhere, ``bump`` is ``strength`` on K and 0 elsewhere,
    ``radial_decay`` is ``strength / |x|^power``.
    """
    match kind:
        case PotentialKindEnum.CONSTANT:
            return np.full(model.n_sites, strength, dtype=float)
        case PotentialKindEnum.BUMP:
            return strength * model.region_mask(RegionEnum.CENTER).astype(float)
        case PotentialKindEnum.RADIAL_DECAY:
            return strength / model.norm_abs_values**power


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigen-decomposition of an operator, orthonormal in the weighted inner product.

    Column ``j`` of ``eigenvectors`` is the eigenfunction of ``eigenvalues[j]``;
    eigenvalues are sorted and eigenvalues at round-off level are exactly 0.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    measures: np.ndarray

    @classmethod
    def from_eigenvalues(cls, eigenvalues: list[float] | np.ndarray) -> Self:
        """Build a toy spectrum with unit measures and the standard basis as eigenvectors."""
        values = np.sort(np.asarray(eigenvalues, dtype=float))
        return cls(
            eigenvalues=values,
            eigenvectors=np.eye(values.shape[0]),
            measures=np.ones(values.shape[0]),
        )

    @property
    def n_modes(self) -> int:
        """Return the number of eigenpairs."""
        return int(self.eigenvalues.shape[0])

    @property
    def zero_mask(self) -> np.ndarray:
        """Return the indicator of the zero modes."""
        return self.eigenvalues == 0

    @property
    def lambda_max(self) -> float:
        """Return the largest eigenvalue."""
        return float(self.eigenvalues[-1])

    @property
    def lambda_min_positive(self) -> float:
        """Return the smallest positive eigenvalue."""
        positive = self.eigenvalues[self.eigenvalues > 0]
        if positive.size == 0:
            msg = "spectrum has no positive eigenvalue"
            raise ValueError(msg)
        return float(positive[0])

    def coefficients(self, f: np.ndarray) -> np.ndarray:
        """Return the coefficients <f, phi_j>."""
        return self.eigenvectors.T @ (self.measures * f)

    def synthesize(self, coefficients: np.ndarray) -> np.ndarray:
        """Return sum_j coefficients[j] phi_j."""
        return self.eigenvectors @ coefficients

    def apply_symbol(self, symbol_values: np.ndarray, f: np.ndarray) -> np.ndarray:
        """Return sum_j symbol_values[j] <f, phi_j> phi_j."""
        return self.synthesize(symbol_values * self.coefficients(f))

    def zero_mode_projection(self, f: np.ndarray) -> np.ndarray:
        """Return the projection of f on the zero modes."""
        return self.apply_symbol(self.zero_mask.astype(float), f)

    def kernel_from_symbol(self, symbol_values: np.ndarray) -> np.ndarray:
        """Return the kernel sum_j s_j phi_j(x) phi_j(y), symmetrized."""
        kernel = (self.eigenvectors * symbol_values[None, :]) @ self.eigenvectors.T
        return (kernel + kernel.T) / 2


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip eigenvectors so that their largest entry in modulus is positive."""
    rows = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[rows, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs[None, :]


def spectral_decompose(op: OperatorHandle) -> SpectralData:
    """Return the full eigensystem of an operator.

    The symmetric similarity transform S = D^(1/2) L D^(-1/2) is diagonalized with a dense
    solver and its eigenvectors are mapped back by D^(-1/2). Orthonormality and residual
    tolerances are enforced as hard errors.
    """
    if op.n_sites > config.spectral_size_cap:
        raise SpectralSizeError(n_sites=op.n_sites, cap=config.spectral_size_cap)

    symmetric = op.symmetrized_matrix()
    try:
        eigenvalues, eigenvectors = linalg.eigh(symmetric)
    except linalg.LinAlgError as exc:
        raise SpectralConvergenceError(str(exc)) from exc
    eigenvectors = _fix_signs(eigenvectors)

    scale = max(float(np.max(np.abs(eigenvalues))), 1.0)
    if eigenvalues[0] < -config.zero_mode_tol * scale:
        raise SpectralInvariantError(
            invariant="nonnegativity", value=float(-eigenvalues[0]), tolerance=config.zero_mode_tol
        )
    snapped = np.where(np.abs(eigenvalues) <= config.zero_mode_tol * scale, 0.0, eigenvalues)

    gram_error = float(np.max(np.abs(eigenvectors.T @ eigenvectors - np.eye(op.n_sites))))
    if gram_error > config.orthonormality_tol:
        raise SpectralInvariantError(
            invariant="orthonormality", value=gram_error, tolerance=config.orthonormality_tol
        )
    residuals = np.linalg.norm(symmetric @ eigenvectors - eigenvectors * snapped[None, :], axis=0)
    relative = residuals / np.maximum(1.0, snapped)
    if np.max(relative) > config.residual_tol:
        raise SpectralInvariantError(
            invariant="residual", value=float(np.max(relative)), tolerance=config.residual_tol
        )

    logger.info(
        f"Spectral decomposition of {op.n_sites} sites: lambda in "
        f"[{snapped[0]:.3e}, {snapped[-1]:.3e}], {int(np.sum(snapped == 0))} zero mode(s)"
    )
    return SpectralData(
        eigenvalues=snapped,
        eigenvectors=eigenvectors / np.sqrt(op.measures)[:, None],
        measures=op.measures.copy(),
    )


def export_spectrum_csv(
    spec: SpectralData, path: Path, *, include_eigenvectors: bool = False
) -> Path:
    """Write the eigenvalues, and optionally the eigenvectors, as CSV."""
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ["j", "eigenvalue"]
    if include_eigenvectors:
        header += [f"phi_{site}" for site in range(spec.eigenvectors.shape[0])]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for j, value in enumerate(spec.eigenvalues):
            row = [j, repr(float(value))]
            if include_eigenvectors:
                row += [repr(float(entry)) for entry in spec.eigenvectors[:, j]]
            writer.writerow(row)
    logger.info(f"Spectrum with {spec.n_modes} eigenvalues written to {path}")
    return path
