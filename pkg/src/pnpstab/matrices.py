"""Dense matrix carrier, stochastic-matrix validation, and Perron data.

All matrices are dense row-major float64 numpy arrays. Structural classes
(stochastic, doubly stochastic, irreducible, primitive, positive
semidefinite) are decided here, along with the left Perron vector of an
irreducible stochastic matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    NegativeEntryError,
    NoConvergenceError,
    NotIrreducibleError,
    NotSquareError,
    NotSymmetricError,
    RowSumViolationError,
)

__all__ = [
    "StochasticMatrix",
    "PerronData",
    "StructureReport",
    "as_matrix",
    "as_square_matrix",
    "ones_vector",
    "ones_matrix",
    "identity",
    "validate_stochastic",
    "structure",
    "left_perron_vector",
    "is_positive_semidefinite",
    "read_matrix",
    "write_matrix",
]


def as_matrix(entries) -> np.ndarray:
    """Coerce to a 2-D float64 array and require finite entries."""
    m = np.asarray(entries, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def as_square_matrix(entries) -> np.ndarray:
    m = as_matrix(entries)
    if m.shape[0] != m.shape[1]:
        raise NotSquareError(f"expected a square matrix, got shape {m.shape}")
    return m


def ones_vector(n: int) -> np.ndarray:
    """The all-ones vector e of length n."""
    return np.ones(n)


def ones_matrix(n: int) -> np.ndarray:
    """The all-ones n-by-n matrix."""
    return np.ones((n, n))


def identity(n: int) -> np.ndarray:
    return np.eye(n)


@dataclass(frozen=True)
class StochasticMatrix:
    """A validated row-stochastic matrix: entries >= 0, rows summing to 1.

    `tol` is the admission tolerance used at validation time; it is reused
    for subsequent structural decisions (double stochasticity, symmetry).
    """

    matrix: np.ndarray
    tol: float

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PerronData:
    """Left Perron vector pi of an irreducible stochastic matrix.

    Normalized so pi @ e = 1, with residual = max-norm of pi @ W - pi.
    """

    pi: np.ndarray
    residual: float
    iterations: int


@dataclass(frozen=True)
class StructureReport:
    irreducible: bool
    primitive: bool
    doubly_stochastic: bool
    symmetric: bool
    psd: bool | None


def validate_stochastic(entries, tol: float = 1e-10) -> StochasticMatrix:
    """Admit a matrix as row-stochastic.

    Entries in [-tol, 0) are clamped to 0 and each row is renormalized to
    sum to 1, so identities like We = e hold to machine precision
    downstream. Entries below -tol or row sums off by more than tol are
    rejected.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    m = as_square_matrix(entries).copy()
    neg = np.argwhere(m < -tol)
    if neg.size:
        i, j = map(int, neg[0])
        raise NegativeEntryError(i, j, float(m[i, j]))
    sums = m.sum(axis=1)
    bad = np.argwhere(np.abs(sums - 1.0) > tol)
    if bad.size:
        i = int(bad[0][0])
        raise RowSumViolationError(i, float(sums[i]))
    np.clip(m, 0.0, None, out=m)
    m /= m.sum(axis=1, keepdims=True)
    m.setflags(write=False)
    return StochasticMatrix(matrix=m, tol=float(tol))


def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.uint8) @ b.astype(np.uint8)) > 0


def _is_strongly_connected(pattern: np.ndarray) -> bool:
    # Reachability within n-1 steps via repeated squaring of I | pattern.
    n = pattern.shape[0]
    reach = pattern | np.eye(n, dtype=bool)
    steps = 1
    while steps < n - 1:
        reach = _bool_matmul(reach, reach)
        steps *= 2
    return bool(reach.all())


def _wielandt_bound(n: int) -> int:
    return (n - 1) ** 2 + 1


def _is_primitive_pattern(pattern: np.ndarray) -> bool:
    # Definitional test: some single power of the pattern is entrywise
    # positive; the Wielandt bound caps the power that must be inspected.
    power = pattern.copy()
    for _ in range(_wielandt_bound(pattern.shape[0])):
        if power.all():
            return True
        power = _bool_matmul(power, pattern)
    return False


def structure(w: StochasticMatrix) -> StructureReport:
    """Structural classification of an admitted stochastic matrix.

    Irreducibility is strong connectivity of the nonzero pattern;
    primitivity is decided by boolean pattern powers up to the Wielandt
    bound (n-1)^2 + 1.
    """
    m = w.matrix
    pattern = m > 0.0
    irreducible = _is_strongly_connected(pattern)
    primitive = irreducible and _is_primitive_pattern(pattern)
    doubly = bool(np.all(np.abs(m.sum(axis=0) - 1.0) <= w.tol))
    symmetric = bool(np.max(np.abs(m - m.T)) <= w.tol)
    psd: bool | None = None
    if symmetric:
        psd = bool(np.linalg.eigvalsh((m + m.T) / 2.0).min() >= -w.tol)
    return StructureReport(
        irreducible=irreducible,
        primitive=primitive,
        doubly_stochastic=doubly,
        symmetric=symmetric,
        psd=psd,
    )


def _perron_residual(pi: np.ndarray, m: np.ndarray) -> float:
    return float(np.max(np.abs(pi @ m - pi)))


def _perron_by_solve(m: np.ndarray) -> np.ndarray:
    # (W^T - I) pi = 0 with the last equation replaced by sum(pi) = 1;
    # nonsingular whenever 1 is a simple eigenvalue (irreducible W).
    n = m.shape[0]
    a = m.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    return np.linalg.solve(a, b)


def left_perron_vector(w: StochasticMatrix, tol: float = 1e-13, max_iter: int = 50_000) -> PerronData:
    """Left Perron vector of an irreducible stochastic matrix.

    Power iteration on the transpose with L1 renormalization; if the
    iteration cycles (irreducible but non-primitive patterns), falls back
    to solving the singular system directly.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = w.matrix
    if not _is_strongly_connected(m > 0.0):
        raise NotIrreducibleError("nonzero pattern is not strongly connected")
    n = w.n
    pi = np.full(n, 1.0 / n)
    iterations = 0
    residual = _perron_residual(pi, m)
    checkpoint = residual
    while residual > tol and iterations < max_iter:
        pi = pi @ m
        pi /= pi.sum()
        iterations += 1
        residual = _perron_residual(pi, m)
        if iterations % 64 == 0:
            # Periodic patterns cycle without progress; divert to the solve.
            if residual > 0.5 * checkpoint:
                break
            checkpoint = residual
    if residual > tol:
        pi = _perron_by_solve(m)
        pi /= pi.sum()
        residual = _perron_residual(pi, m)
        if residual > tol:
            raise NoConvergenceError(iterations, residual)
    if pi.min() <= 0.0:
        raise NoConvergenceError(iterations, residual)
    pi.setflags(write=False)
    return PerronData(pi=pi, residual=residual, iterations=iterations)


def is_positive_semidefinite(b, tol: float = 1e-10) -> bool:
    """True iff the symmetrized matrix has minimum eigenvalue >= -tol.

    The input must be symmetric to within tol; it is symmetrized as
    (B + B^T)/2 before the eigenvalue test.
    """
    m = as_square_matrix(b)
    asym = float(np.max(np.abs(m - m.T)))
    if asym > tol:
        raise NotSymmetricError(asym)
    s = (m + m.T) / 2.0
    return bool(np.linalg.eigvalsh(s).min() >= -tol)


def read_matrix(path) -> np.ndarray:
    """Read the plain matrix text format.

    Line 1 holds `rows cols`; each following non-comment line holds one
    matrix row of whitespace-separated decimals. `#` starts a comment.
    """
    lines = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"{path}: header must be `rows cols`")
    rows, cols = int(header[0]), int(header[1])
    if rows < 1 or cols < 1:
        raise ValueError(f"{path}: dimensions must be positive")
    if len(lines) - 1 != rows:
        raise ValueError(f"{path}: expected {rows} data rows, found {len(lines) - 1}")
    data = []
    for k, line in enumerate(lines[1:]):
        row = [float(tok) for tok in line.split()]
        if len(row) != cols:
            raise ValueError(f"{path}: row {k} has {len(row)} entries, expected {cols}")
        data.append(row)
    return as_matrix(data)


def write_matrix(path, m) -> None:
    """Write the matrix text format with value-preserving precision.

    17 significant decimal digits guarantee a bitwise float64 round trip.
    """
    m = as_matrix(m)
    rows, cols = m.shape
    out = [f"{rows} {cols}"]
    for row in m:
        out.append(" ".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(out) + "\n")
