"""First-order schemes over the standard simplex.

Given an orthogonal projector P and a tolerance eps in (0, 1), each scheme
iterates z on the simplex until either

    P z > 0                          (interior certificate), or
    ||(P z)^+||_1 <= eps ||z||_inf   (rescaling trigger).

Four schemes are provided: the plain perceptron update, the von Neumann
scheme with exact line search, the von Neumann scheme with away steps, and
the smooth perceptron.  All tie-breaking is by lowest index so runs are
deterministic.

Every iterate moves by a convex (or, for away steps, affine) combination of
the current point and a simplex vertex, so P z is tracked incrementally at
O(n) cost per iteration and recomputed from scratch every _REFRESH steps.
A returned status is always re-verified against a freshly computed P z.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import (
    DegenerateStep,
    EmptySupport,
    NoImprovingVertex,
)

INTERIOR_FOUND = "interior_found"
RESCALE_READY = "rescale_ready"
ITER_LIMIT = "iter_limit"

PERCEPTRON = "perceptron"
VON_NEUMANN = "vn"
VON_NEUMANN_AWAY = "vna"
SMOOTH_PERCEPTRON = "smooth"

_SCHEME_NAMES = (PERCEPTRON, VON_NEUMANN, VON_NEUMANN_AWAY, SMOOTH_PERCEPTRON)

# steps between full recomputations of the tracked projection
_REFRESH = 128


@dataclass
class BpConfig:
    """Basic-procedure settings.

    max_iters = 0 disables the iteration cap.  The default cap of 10000
    matches the standalone benchmark convention; the rescaling solver
    overrides it with a much larger value.
    """

    epsilon: float = 0.5
    max_iters: int = 10000
    scheme: str = SMOOTH_PERCEPTRON

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.scheme not in _SCHEME_NAMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")


@dataclass
class BpOutcome:
    """Result of one scheme run: final iterate, its projection, and status."""

    status: str
    z: np.ndarray
    Pz: np.ndarray
    iterations: int


def uniform_simplex(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def stop_check(Pz, z, epsilon: float) -> Optional[str]:
    """Evaluate the two termination conditions.

    Returns INTERIOR_FOUND when min(Pz) > 0 (exact comparison: a positive
    tolerance could falsely reject genuine interior points), RESCALE_READY
    when the sum of the positive part of Pz is at most epsilon * max(z),
    and None otherwise.  Assumes z >= 0, z != 0.
    """
    Pz = np.asarray(Pz, dtype=float)
    z = np.asarray(z, dtype=float)
    if float(np.min(Pz)) > 0.0:
        return INTERIOR_FOUND
    if float(np.sum(np.maximum(Pz, 0.0))) <= epsilon * float(np.max(z)):
        return RESCALE_READY
    return None


def min_vertex(v) -> int:
    """Index of a minimal component (the simplex vertex minimizing <u, v>);
    ties broken by lowest index."""
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        raise ValueError("empty vector")
    return int(np.argmin(v))


def away_vertex(z, Pz) -> int:
    """Index maximizing Pz over the support of z; ties by lowest index."""
    z = np.asarray(z, dtype=float)
    Pz = np.asarray(Pz, dtype=float)
    support = z > 0
    if not support.any():
        raise EmptySupport("z has no positive component")
    return int(np.argmax(np.where(support, Pz, -np.inf)))


def project_simplex(y) -> np.ndarray:
    """Euclidean projection onto the standard simplex (sort-based)."""
    y = np.asarray(y, dtype=float)
    u = np.sort(y)[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, y.size + 1)
    k = int(np.nonzero(u > (css - 1.0) / ks)[0][-1]) + 1
    tau = (css[k - 1] - 1.0) / k
    return np.maximum(y - tau, 0.0)


def simplex_prox(v, mu: float, u_bar) -> np.ndarray:
    """Minimizer over the simplex of <u, v> + (mu/2) ||u - u_bar||^2.

    Equals the Euclidean projection of u_bar - v/mu onto the simplex.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    v = np.asarray(v, dtype=float)
    u_bar = np.asarray(u_bar, dtype=float)
    return project_simplex(u_bar - v / mu)


def _check_start(z0) -> np.ndarray:
    z = np.array(z0, dtype=float)
    if z.ndim != 1 or np.any(z < 0) or abs(z.sum() - 1.0) > 1e-9:
        raise ValueError("starting point must lie on the standard simplex")
    return z


class _Loop:
    """Shared stop/limit/refresh plumbing for the vertex-step schemes."""

    def __init__(self, P, z, cfg: BpConfig, callback):
        self.P = P
        self.z = z
        self.cfg = cfg
        self.callback = callback
        self.Pz = P @ z
        self.t = 0
        self._since_refresh = 0

    def finished(self) -> Optional[BpOutcome]:
        """Stop conditions, iteration cap, and periodic refresh.

        Returns the outcome when the run is over, else None.  Any candidate
        status is re-verified against a freshly computed projection; a
        false alarm caused by tracking drift just corrects the projection
        and lets the run continue.
        """
        if self.callback is not None:
            self.callback(self.t, self.z, self.Pz)
        status = stop_check(self.Pz, self.z, self.cfg.epsilon)
        if status is not None:
            fresh = self.P @ self.z
            status = stop_check(fresh, self.z, self.cfg.epsilon)
            self.Pz = fresh
            self._since_refresh = 0
            if status is not None:
                return BpOutcome(status, self.z, fresh, self.t)
        if self.cfg.max_iters and self.t >= self.cfg.max_iters:
            fresh = self.P @ self.z
            status = stop_check(fresh, self.z, self.cfg.epsilon)
            return BpOutcome(status or ITER_LIMIT, self.z, fresh, self.t)
        return None

    def advance(self, force_refresh: bool = False) -> None:
        self.t += 1
        self._since_refresh += 1
        if force_refresh or self._since_refresh >= _REFRESH:
            self.Pz = self.P @ self.z
            self._since_refresh = 0


def run_perceptron(P, z0, cfg: BpConfig, callback: Optional[Callable] = None) -> BpOutcome:
    """Perceptron scheme.

    At each step pick the vertex e_i with i minimizing (Pz)_i (a vertex u
    with <u, Pz> <= 0 always exists while the stop conditions fail) and set
    z <- (1 - 1/(t+1)) z + (1/(t+1)) e_i.
    """
    loop = _Loop(P, _check_start(z0), cfg, callback)
    while True:
        out = loop.finished()
        if out is not None:
            return out
        i = min_vertex(loop.Pz)
        if loop.Pz[i] > 0.0:
            raise NoImprovingVertex(
                "min(Pz) > 0 while the interior check failed; numerical anomaly"
            )
        beta = 1.0 / (loop.t + 1)
        loop.z *= 1.0 - beta
        loop.z[i] += beta
        loop.Pz *= 1.0 - beta
        loop.Pz += beta * P[:, i]
        loop.advance()


def run_von_neumann(P, z0, cfg: BpConfig, callback: Optional[Callable] = None) -> BpOutcome:
    """Von Neumann scheme: greedy perceptron with exact line search.

    z <- z + theta (e_i - z) with theta minimizing ||P(z + theta(e_i - z))||^2
    over [0, 1]; the norm ||Pz|| is nonincreasing.
    """
    loop = _Loop(P, _check_start(z0), cfg, callback)
    while True:
        out = loop.finished()
        if out is not None:
            return out
        Pz = loop.Pz
        i = min_vertex(Pz)
        Pu = P[:, i]
        pz2 = float(Pz @ Pz)
        upz = float(Pz[i])
        denom = pz2 + float(Pu @ Pu) - 2.0 * upz
        if denom <= 0.0:
            raise DegenerateStep(
                "line-search denominator is nonpositive; numerical anomaly"
            )
        theta = (pz2 - upz) / denom
        theta = min(1.0, max(0.0, theta))
        loop.z *= 1.0 - theta
        loop.z[i] += theta
        loop.Pz = (1.0 - theta) * Pz + theta * Pu
        loop.advance()


def run_vna(P, z0, cfg: BpConfig, callback: Optional[Callable] = None) -> BpOutcome:
    """Von Neumann scheme with away steps.

    Chooses between the regular direction a = e_i - z (i the min vertex)
    and the away direction a = z - e_j (j maximizing Pz over the support),
    whichever promises the larger decrease; the step length is the exact
    minimizer of ||P(z + theta a)||^2 capped at theta_max.  The away cap is
    z_j / (1 - z_j); when z is the vertex e_j itself the away step cannot
    move, so a regular step is taken instead.
    """
    loop = _Loop(P, _check_start(z0), cfg, callback)
    while True:
        out = loop.finished()
        if out is not None:
            return out
        z, Pz = loop.z, loop.Pz
        pz2 = float(Pz @ Pz)
        iu = min_vertex(Pz)
        iv = away_vertex(z, Pz)
        away = not (pz2 - float(Pz[iu]) > float(Pz[iv]) - pz2)
        if away and float(z[iv]) >= 1.0:
            away = False  # away step from a vertex cannot move
        if away:
            Pa = Pz - P[:, iv]
            vz = float(z[iv])
            theta_max = vz / (1.0 - vz)
        else:
            Pa = P[:, iu] - Pz
            theta_max = 1.0
        pa2 = float(Pa @ Pa)
        if pa2 <= 0.0:
            raise DegenerateStep("||P a||^2 = 0 while the stop conditions failed")
        theta = min(theta_max, -float(z @ Pa) / pa2)
        if away:
            loop.z = (1.0 + theta) * z
            loop.z[iv] -= theta
            np.maximum(loop.z, 0.0, out=loop.z)  # clip roundoff when the cap binds
            loop.Pz = (1.0 + theta) * Pz - theta * P[:, iv]
        else:
            loop.z = (1.0 - theta) * z
            loop.z[iu] += theta
            loop.Pz = (1.0 - theta) * Pz + theta * P[:, iu]
        # away steps scale the tracked projection by 1 + theta, which can
        # amplify drift, so refresh eagerly after long ones
        loop.advance(force_refresh=away and theta > 0.5)


def run_smooth(P, u_bar, cfg: BpConfig, callback: Optional[Callable] = None) -> BpOutcome:
    """Smooth perceptron scheme.

    Maintains the auxiliary sequence u_t and smoothing parameter mu_t with
    theta_t = 2/(t+3), mu_{t+1} = (1-theta_t) mu_t and the prox map
    w(mu, v) = argmin_{u in simplex} <u, v> + (mu/2)||u - u_bar||^2:

        u_{t+1} = (1-theta_t)(u_t + theta_t z_t) + theta_t^2 w(mu_t, P u_t)
        z_{t+1} = (1-theta_t) z_t + theta_t w(mu_{t+1}, P u_{t+1})

    The u-update coefficients sum to one, so every iterate stays on the
    simplex.  One matrix-vector product per iteration (P u and P z are
    tracked incrementally).
    """
    ub = _check_start(u_bar)
    u = ub.copy()
    mu = 2.0
    Pu = P @ u
    w = simplex_prox(Pu, mu, ub)
    z = w.copy()
    Pw = P @ w
    Pz = Pw.copy()
    t = 0
    while True:
        if callback is not None:
            callback(t, z, Pz)
        status = stop_check(Pz, z, cfg.epsilon)
        if status is not None:
            Pz = P @ z
            status = stop_check(Pz, z, cfg.epsilon)
            if status is not None:
                return BpOutcome(status, z, Pz, t)
            # drift false alarm: continue with the corrected projection
        if cfg.max_iters and t >= cfg.max_iters:
            Pz = P @ z
            status = stop_check(Pz, z, cfg.epsilon)
            return BpOutcome(status or ITER_LIMIT, z, Pz, t)
        theta = 2.0 / (t + 3)
        u = (1.0 - theta) * (u + theta * z) + theta**2 * w
        Pu = (1.0 - theta) * (Pu + theta * Pz) + theta**2 * Pw
        mu = (1.0 - theta) * mu
        w = simplex_prox(Pu, mu, ub)
        Pw = P @ w
        z = (1.0 - theta) * z + theta * w
        Pz = (1.0 - theta) * Pz + theta * Pw
        t += 1


SCHEMES = {
    PERCEPTRON: run_perceptron,
    VON_NEUMANN: run_von_neumann,
    VON_NEUMANN_AWAY: run_vna,
    SMOOTH_PERCEPTRON: run_smooth,
}


def run_scheme(P, z0, cfg: BpConfig, callback: Optional[Callable] = None) -> BpOutcome:
    """Dispatch to the scheme named by cfg.scheme."""
    return SCHEMES[cfg.scheme](P, z0, cfg, callback=callback)
