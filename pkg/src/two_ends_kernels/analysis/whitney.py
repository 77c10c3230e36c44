"""Constructive Whitney covering of an open set of sites by balls of half the boundary distance."""

import logging
from dataclasses import dataclass, field

import numpy as np

from two_ends_kernels.exceptions import WhitneyDomainError
from two_ends_kernels.schemas.analysis_schemas import BallSummary, WhitneySummary

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WhitneyCover:
    """Balls B(x_i, r_i) with r_i = d(x_i, complement) / 2, and their membership matrix.

    ``membership[i, y]`` is True when d(x_i, y) < r_i.
    """

    omega: np.ndarray = field(repr=False)
    centers: np.ndarray
    radii: np.ndarray
    membership: np.ndarray = field(repr=False)
    distances: np.ndarray = field(repr=False)

    @property
    def overlap_counts(self) -> np.ndarray:
        """Return the number of balls containing each site."""
        return self.membership.sum(axis=0)

    @property
    def overlap_constant(self) -> int:
        """Return the largest number of balls sharing a site."""
        return int(self.overlap_counts.max())

    def weights(self) -> np.ndarray:
        """Return the partition of unity w_i(y) = chi_i(y) / sum_k chi_k(y), zero off the set."""
        counts = self.overlap_counts
        return np.where(counts > 0, self.membership / np.maximum(counts, 1), 0.0)

    def covers_open_set(self) -> bool:
        """Return True when the union of the balls is exactly the open set."""
        return bool(np.array_equal(self.overlap_counts > 0, self.omega))

    def fifth_balls_disjoint(self) -> bool:
        """Return True when the open balls B(x_i, r_i / 5) are pairwise disjoint.

        On a geodesic graph metric two such balls meet only if the centers are closer than
        the sum of the radii; this pairwise condition is what is tested.
        """
        gaps = self.distances[np.ix_(self.centers, self.centers)]
        sums = (self.radii[:, None] + self.radii[None, :]) / 5
        off_diagonal = ~np.eye(self.centers.shape[0], dtype=bool)
        return bool(np.all(gaps[off_diagonal] >= sums[off_diagonal]))

    def to_summary(self) -> WhitneySummary:
        """Return the JSON-ready summary."""
        weight_sums = self.weights().sum(axis=0)
        return WhitneySummary(
            n_open_sites=int(self.omega.sum()),
            balls=[
                BallSummary(center=int(c), radius=float(r), n_sites=int(row.sum()))
                for c, r, row in zip(self.centers, self.radii, self.membership, strict=True)
            ],
            overlap_constant=self.overlap_constant,
            covers_open_set=self.covers_open_set(),
            fifth_balls_disjoint=self.fifth_balls_disjoint(),
            max_weight_error=float(np.max(np.abs(weight_sums[self.omega] - 1.0))),
        )


def whitney_cover(distances: np.ndarray, omega: np.ndarray) -> WhitneyCover:
    """Cover the open set ``omega`` (boolean site mask) by Whitney balls.

    Candidate centers are visited by decreasing distance to the complement; a candidate
    already inside a chosen ball is skipped. Chosen centers are therefore at least the
    larger radius apart, so the fifth-balls are disjoint, and every site of the set is a
    center or lies in a chosen ball.
    """
    omega = np.asarray(omega, dtype=bool)
    if not omega.any():
        raise WhitneyDomainError("the open set is empty")
    if omega.all():
        raise WhitneyDomainError("the open set is the whole space")

    inside = np.flatnonzero(omega)
    to_complement = distances[np.ix_(inside, np.flatnonzero(~omega))].min(axis=1)
    order = np.lexsort((inside, -to_complement))

    centers, radii, rows = [], [], []
    covered = np.zeros(omega.shape[0], dtype=bool)
    for position in order:
        site = int(inside[position])
        if covered[site]:
            continue
        radius = float(to_complement[position]) / 2
        row = distances[site] < radius
        centers.append(site)
        radii.append(radius)
        rows.append(row)
        covered |= row
    cover = WhitneyCover(
        omega=omega,
        centers=np.array(centers, dtype=int),
        radii=np.array(radii),
        membership=np.array(rows),
        distances=distances,
    )
    logger.info(
        f"Whitney cover of {inside.shape[0]} sites with {len(centers)} balls, "
        f"overlap {cover.overlap_constant}"
    )
    return cover
