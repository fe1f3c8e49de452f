"""Core data types: reflection matrices, uniform-grid paths, tolerances.

A reflection pair (R, R_tilde) is given through the nonnegative matrices
P and P_tilde via R = E - P and R_tilde = E - P_tilde, where E is the
identity and both P matrices have zero diagonal and spectral radius below
one.  All solvers in this package contract in a weighted supremum norm
whose weights w > 0 satisfy (P_hat w)_i <= eta * w_i with eta < 1, where
P_hat is the entrywise maximum of P and P_tilde.  The weights are built
constructively as w = (E - P_hat)^{-1} 1, which is finite and positive by
the Neumann series whenever the spectral radius of P_hat is below one.

Paths live on uniform time grids.  Vector-valued paths (free path x,
constrained path z, regulator y) are interpreted as piecewise linear
between grid points; matrix-valued paths (the derivative a and its
cumulative push b) are piecewise constant and right-continuous.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NegativeEntry,
    NonzeroDiagonal,
    ShapeMismatch,
    SpectralRadiusTooLarge,
)

#: Margin used when rejecting spectral radii: estimates >= 1 - RADIUS_MARGIN fail.
RADIUS_MARGIN = 1e-9

#: Iterations used by the power-iteration radius estimate.
POWER_ITERATIONS = 200


@dataclass(frozen=True)
class ToleranceConfig:
    """Numeric thresholds shared by the solvers.

    tau_zero is the base threshold for declaring a coordinate "at the
    boundary"; solvers scale it by (1 + running max |z_i|) to absorb
    floating-point noise on paths of any magnitude.  tau_fp is the
    fixed-point convergence threshold in the weighted sup norm, and
    max_iters caps every fixed-point loop.
    """

    tau_zero: float = 1e-10
    tau_fp: float = 1e-12
    max_iters: int = 10_000

    def __post_init__(self):
        if not (self.tau_zero > 0 and self.tau_fp > 0):
            raise ValueError("tau_zero and tau_fp must be strictly positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


DEFAULT_TOL = ToleranceConfig()


def _as_square(M, name: str) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"{name} must be a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def spectral_radius_estimate(P: np.ndarray, iterations: int = POWER_ITERATIONS) -> float:
    """Power-iteration estimate of the spectral radius of a nonnegative matrix.

    Starts from the all-ones vector, renormalises in the 1-norm each step,
    and returns the final Rayleigh quotient.  For a nonnegative matrix the
    iteration converges to the Perron root; if the iterate hits zero (e.g.
    for nilpotent matrices) the radius is reported as 0.
    """
    P = np.asarray(P, dtype=float)
    J = P.shape[0]
    v = np.ones(J) / J
    lam = 0.0
    for _ in range(iterations):
        pv = P @ v
        norm = pv.sum()
        if norm <= 0.0:
            return 0.0
        lam = float(v @ pv / (v @ v))
        v = pv / norm
    pv = P @ v
    return float(v @ pv / (v @ v))


@dataclass(frozen=True)
class ReflectionSpec:
    """A validated reflection pair with contraction weights.

    Fields are exactly the validated inputs plus derived quantities:
    R = E - P, R_tilde = E - P_tilde, weights w > 0 and contraction
    factor eta in [0, 1) such that (P_tilde w)_i <= eta * w_i.
    Instances are immutable; build them with validate_reflection_matrices.
    """

    J: int
    P: np.ndarray
    R: np.ndarray
    P_tilde: np.ndarray
    R_tilde: np.ndarray
    w: np.ndarray
    eta: float

    def __post_init__(self):
        for name in ("P", "R", "P_tilde", "R_tilde", "w"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @property
    def has_matching_pair(self) -> bool:
        """True when P_tilde is exactly P (the drift-derivative case)."""
        return np.array_equal(self.P, self.P_tilde)


def validate_reflection_matrices(P, P_tilde=None) -> ReflectionSpec:
    """Validate a routing-matrix pair and derive contraction weights.

    Checks, for each of P and P_tilde: entrywise nonnegativity, zero
    diagonal, and spectral radius strictly below one (power iteration with
    a 1e-9 margin).  The entrywise maximum P_hat of the two must also have
    radius below one so that w = (E - P_hat)^{-1} 1 exists; eta is then
    max_i (P_hat w)_i / w_i < 1.

    P_tilde defaults to P, which is the pairing used by the derivative
    process.
    """
    P = _as_square(P, "P")
    if P_tilde is None:
        P_tilde = P
    P_tilde = _as_square(P_tilde, "P_tilde")
    if P_tilde.shape != P.shape:
        raise ShapeMismatch(
            f"P and P_tilde must have equal shapes, got {P.shape} and {P_tilde.shape}"
        )
    J = P.shape[0]

    for name, M in (("P", P), ("P_tilde", P_tilde)):
        if np.any(M < 0):
            i, j = np.argwhere(M < 0)[0]
            raise NegativeEntry(f"{name}[{i},{j}] = {M[i, j]} is negative")
        if np.any(np.diagonal(M) != 0):
            i = int(np.nonzero(np.diagonal(M))[0][0])
            raise NonzeroDiagonal(f"{name}[{i},{i}] = {M[i, i]} must be zero")

    P_hat = np.maximum(P, P_tilde)
    for name, M in (("P", P), ("P_tilde", P_tilde), ("max(P, P_tilde)", P_hat)):
        rho = spectral_radius_estimate(M)
        if rho >= 1.0 - RADIUS_MARGIN:
            raise SpectralRadiusTooLarge(
                f"spectral radius of {name} is ~{rho:.12g}, not strictly below 1"
            )

    E = np.eye(J)
    w = np.linalg.solve(E - P_hat, np.ones(J))
    # w >= 1 componentwise since P_hat >= 0; eta = 1 - 1/max(w) < 1.
    eta = float(np.max((P_hat @ w) / w)) if J > 0 else 0.0
    eta = max(eta, 0.0)
    return ReflectionSpec(
        J=J,
        P=P.copy(),
        R=E - P,
        P_tilde=P_tilde.copy(),
        R_tilde=E - P_tilde,
        w=w,
        eta=eta,
    )


@dataclass(frozen=True)
class GridPath:
    """A vector- or matrix-valued function sampled on a uniform time grid.

    values has shape (K+1, J) for vector paths or (K+1, J, J) for matrix
    paths, with the value at index k belonging to time t0 + k*dt.  The
    array is frozen after construction so paths can be shared freely.
    """

    t0: float
    dt: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be strictly positive")
        v = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        if v.ndim not in (2, 3):
            raise ShapeMismatch(f"values must be (K+1, J) or (K+1, J, J), got {v.shape}")
        if v.ndim == 3 and v.shape[1] != v.shape[2]:
            raise ShapeMismatch(f"matrix path must be square in its last axes, got {v.shape}")
        if v.shape[0] < 2:
            raise ShapeMismatch("a path needs at least two grid points")
        if not np.all(np.isfinite(v)):
            raise ValueError("path values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_steps(self) -> int:
        """Number of grid steps K (one less than the number of points)."""
        return self.values.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def is_matrix(self) -> bool:
        return self.values.ndim == 3

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.shape[0])

    def same_grid(self, other: "GridPath") -> bool:
        return (
            self.t0 == other.t0
            and self.dt == other.dt
            and self.values.shape[0] == other.values.shape[0]
        )

    def with_values(self, values: np.ndarray) -> "GridPath":
        return GridPath(self.t0, self.dt, values)

    def to_csv(self, path, header_comment: str | None = None) -> None:
        """Write the path as CSV with columns t,component_1,...

        Matrix paths are flattened row-major.  An optional '# ...' comment
        line is written before the header.
        """
        flat = self.values.reshape(self.values.shape[0], -1)
        with open(path, "w", newline="") as fh:
            if header_comment:
                fh.write(f"# {header_comment}\n")
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"component_{i + 1}" for i in range(flat.shape[1])])
            for t, row in zip(self.times, flat):
                writer.writerow([repr(float(t))] + [repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path, matrix: bool = False) -> "GridPath":
        """Read a path written by to_csv; set matrix=True to unflatten J*J columns."""
        with open(path) as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
        rows = list(csv.reader(io.StringIO("".join(lines))))
        data = np.array(rows[1:], dtype=float)
        t, flat = data[:, 0], data[:, 1:]
        if len(t) < 2:
            raise ShapeMismatch("a path needs at least two grid points")
        dt = float(t[1] - t[0])
        if matrix:
            J = int(round(np.sqrt(flat.shape[1])))
            if J * J != flat.shape[1]:
                raise ShapeMismatch(f"{flat.shape[1]} columns do not form a square matrix")
            flat = flat.reshape(len(t), J, J)
        return cls(t0=float(t[0]), dt=dt, values=flat)


def weighted_sup_distance(a: GridPath, b: GridPath, w) -> float:
    """max over grid points and rows i of |a_i - b_i| / w_i.

    Matrix rows are reduced by the max over columns.  Both paths must share
    the grid and the value shape.
    """
    if not a.same_grid(b) or a.values.shape != b.values.shape:
        raise ShapeMismatch(
            f"paths differ in grid or shape: {a.values.shape} vs {b.values.shape}"
        )
    w = np.asarray(w, dtype=float)
    if w.shape != (a.dim,):
        raise ShapeMismatch(f"weights must have shape ({a.dim},), got {w.shape}")
    diff = np.abs(a.values - b.values)
    if a.is_matrix:
        diff = diff.max(axis=2)
    return float((diff / w).max())


def weighted_sup_values(av: np.ndarray, bv: np.ndarray, w: np.ndarray) -> float:
    """weighted_sup_distance on raw value arrays (no grid bookkeeping)."""
    diff = np.abs(av - bv)
    if diff.ndim == 3:
        diff = diff.max(axis=2)
    return float((diff / w).max())
