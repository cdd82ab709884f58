"""Subspaces represented by kernel matrices, and their orthogonal projectors.

A subspace L of R^n is stored as the kernel of a full-row-rank matrix A
(m x n, m <= n).  The projector onto L and the projector onto the row space
Im(A^T) = L-perp are obtained from a QR factorization of A^T.  Diagonal
rescalings D, D_hat act on the primal and dual sides independently:
D(L) = ker(A D^{-1}) and D_hat(L-perp) = Im(D_hat A^T).

Index sets in file formats are 1-based; in-memory arrays are 0-based.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import serialize
from .exceptions import DimensionMismatch, RankDeficient

DEFAULT_RANK_TOL = 1e-10

INFEASIBLE = float("-inf")  # known_delta value for a provably infeasible primal


def as_matrix(A) -> np.ndarray:
    """Coerce to a finite 2-D float array."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got ndim={A.ndim}")
    if A.size and not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


@dataclass
class InstanceMeta:
    """Ground-truth metadata attached by the instance generators.

    known_delta is the condition measure of the primal cone when the
    generator certifies it (the product of the entries of the known
    interior point); -inf encodes a provably infeasible primal and None
    means unknown.  known_partition stores 0-based index lists (B, N).
    """

    generator: str = ""
    seed: int = 0
    known_delta: Optional[float] = None
    known_interior_point: Optional[np.ndarray] = None
    known_partition: Optional[tuple] = None


@dataclass
class Instance:
    """A feasibility instance: L = ker(A) for a full-row-rank A (m x n)."""

    n: int
    m: int
    A: np.ndarray
    meta: Optional[InstanceMeta] = None

    def validate(self, tol: float = 1e-8, rank_tol: float = DEFAULT_RANK_TOL) -> None:
        """Check the structural invariants; raises on violation."""
        A = as_matrix(self.A)
        if A.shape != (self.m, self.n):
            raise DimensionMismatch(
                f"A has shape {A.shape}, expected ({self.m}, {self.n})"
            )
        if self.m > self.n:
            raise DimensionMismatch(f"m={self.m} exceeds n={self.n}")
        if self.m > 0:
            # raises RankDeficient when A is not full row rank
            _orthonormal_range_basis(A.T, rank_tol)
        if self.meta is None:
            return
        x = self.meta.known_interior_point
        if x is not None:
            x = np.asarray(x, dtype=float)
            if x.shape != (self.n,):
                raise DimensionMismatch("known_interior_point has wrong length")
            if not np.all(x > 0):
                raise ValueError("known_interior_point must be strictly positive")
            if abs(np.max(x) - 1.0) > 1e-12:
                raise ValueError("known_interior_point must have max-norm 1")
            if self.m > 0:
                resid = np.max(np.abs(A @ x))
                if resid > tol * max(1.0, np.max(np.abs(A))):
                    raise ValueError(
                        f"known_interior_point is not in ker(A): residual {resid:g}"
                    )
        part = self.meta.known_partition
        if part is not None:
            B, N = part
            B, N = set(int(i) for i in B), set(int(i) for i in N)
            if B & N or (B | N) != set(range(self.n)):
                raise ValueError("known_partition must partition the index set")


@dataclass
class ProjectorPair:
    """Orthogonal projectors onto the working primal and dual subspaces."""

    P: np.ndarray
    P_hat: np.ndarray


def _orthonormal_range_basis(M: np.ndarray, rank_tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of M via QR.

    Columns are normalized to unit length first: this leaves the column
    space (and therefore the projector built from the basis) unchanged but
    keeps the rank test meaningful when rescaling has scaled columns by
    many orders of magnitude.  M must then have full column rank within
    rank_tol, measured on the diagonal of the triangular factor relative
    to its largest magnitude entry.
    """
    n, m = M.shape
    if m == 0:
        return np.zeros((n, 0))
    norms = np.linalg.norm(M, axis=0)
    if np.any(norms == 0.0):
        raise RankDeficient("matrix has a zero column")
    Q, R = np.linalg.qr(M / norms, mode="reduced")
    diag = np.abs(np.diag(R))
    dmax = np.max(diag)
    if dmax == 0.0 or np.min(diag) < rank_tol * dmax:
        raise RankDeficient(
            f"matrix is rank deficient within rank_tol={rank_tol:g} "
            f"(diagonal range [{np.min(diag):.3e}, {dmax:.3e}])"
        )
    return Q


def projector_from_kernel(A, rank_tol: float = DEFAULT_RANK_TOL) -> ProjectorPair:
    """Projectors onto ker(A) and Im(A^T).

    Parameters
    ----------
    A : (m, n) array
        Kernel representation of the subspace; must be full row rank.
    rank_tol : float
        Relative tolerance on the triangular factor's diagonal below which
        A is reported as rank deficient.

    Returns
    -------
    ProjectorPair with P + P_hat = I up to rounding.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m > n:
        raise DimensionMismatch(f"kernel matrix must have m <= n, got {m} x {n}")
    Q = _orthonormal_range_basis(A.T, rank_tol)
    P_hat = Q @ Q.T
    P = np.eye(n) - P_hat
    return ProjectorPair(P=P, P_hat=P_hat)


def rescaled_projectors(
    A, D, D_hat, rank_tol: float = DEFAULT_RANK_TOL
) -> ProjectorPair:
    """Projectors onto the rescaled subspaces D(L) and D_hat(L-perp).

    D and D_hat are positive diagonals given as length-n vectors.  The
    primal side factors (A D^{-1})^T, the dual side factors D_hat A^T; the
    two projectors are complementary only when D = D_hat = I.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m > n:
        raise DimensionMismatch(f"kernel matrix must have m <= n, got {m} x {n}")
    D = np.asarray(D, dtype=float)
    D_hat = np.asarray(D_hat, dtype=float)
    if D.shape != (n,) or D_hat.shape != (n,):
        raise DimensionMismatch("rescaling diagonals must have length n")
    if np.any(D <= 0) or np.any(D_hat <= 0):
        raise ValueError("rescaling diagonals must be strictly positive")
    At = A.T
    Qp = _orthonormal_range_basis(At / D[:, None], rank_tol)
    P = np.eye(n) - Qp @ Qp.T
    Qd = _orthonormal_range_basis(At * D_hat[:, None], rank_tol)
    P_hat = Qd @ Qd.T
    return ProjectorPair(P=P, P_hat=P_hat)


def apply_projector(P, z) -> np.ndarray:
    """Return P @ z with a shape check."""
    P = as_matrix(P)
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or P.shape[1] != z.shape[0]:
        raise DimensionMismatch(
            f"cannot apply {P.shape} projector to vector of shape {z.shape}"
        )
    return P @ z


# ---------------------------------------------------------------------------
# Instance file format (shared by every tool in the package):
#   { "n": int, "m": int, "A": [[row floats] ...],
#     "meta": { "generator": str, "seed": int,
#               "known_delta": float | "infeasible" | null,
#               "known_interior_point": [floats] | null,
#               "known_partition": {"B": [1-based ints], "N": [...]} | null } }
# ---------------------------------------------------------------------------


def instance_to_dict(inst: Instance) -> dict:
    A = as_matrix(inst.A)
    doc = {"n": int(inst.n), "m": int(inst.m), "A": A.tolist(), "meta": None}
    meta = inst.meta
    if meta is not None:
        if meta.known_delta is None:
            delta = None
        elif meta.known_delta == INFEASIBLE:
            delta = "infeasible"
        else:
            delta = float(meta.known_delta)
        point = meta.known_interior_point
        part = meta.known_partition
        doc["meta"] = {
            "generator": meta.generator,
            "seed": int(meta.seed),
            "known_delta": delta,
            "known_interior_point": None if point is None else np.asarray(point).tolist(),
            "known_partition": None
            if part is None
            else {
                "B": [int(i) + 1 for i in part[0]],
                "N": [int(i) + 1 for i in part[1]],
            },
        }
    return doc


def instance_from_dict(doc: dict) -> Instance:
    n = int(doc["n"])
    m = int(doc["m"])
    A = np.asarray(doc["A"], dtype=float).reshape(m, n)
    meta = None
    mdoc = doc.get("meta")
    if mdoc is not None:
        delta = mdoc.get("known_delta")
        if delta == "infeasible":
            delta = INFEASIBLE
        elif delta is not None:
            delta = float(delta)
        point = mdoc.get("known_interior_point")
        if point is not None:
            point = np.asarray(point, dtype=float)
        part = mdoc.get("known_partition")
        if part is not None:
            part = (
                [int(i) - 1 for i in part["B"]],
                [int(i) - 1 for i in part["N"]],
            )
        meta = InstanceMeta(
            generator=mdoc.get("generator", ""),
            seed=int(mdoc.get("seed", 0)),
            known_delta=delta,
            known_interior_point=point,
            known_partition=part,
        )
    return Instance(n=n, m=m, A=A, meta=meta)


def save_instance(inst: Instance, path) -> None:
    serialize.dump(instance_to_dict(inst), path)


def load_instance(path) -> Instance:
    return instance_from_dict(serialize.load(path))
