"""Problem parameters, derived constants, and the exact blow-up kernel ODE.

The model equation is u_tt - lap(u) = u_t|u_t|^(p-1) with p > 1.  Its
spatially homogeneous reduction k_tt = k_t|k_t|^(p-1) has the closed-form
blowing-up solution

    k_t(t) = kappa * (T - t)^(-beta),   beta = 1/(p-1),   kappa = beta^beta,

which fixes the reference rate exponent and amplitude used by every
diagnostic in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, InvalidExponent, InvalidGrid, InvalidWeight

_BC_CHOICES = ("neumann", "periodic", "dirichlet")

# Step cap for the scalar kernel integrator; generous for any sane dt.
_ODE_STEP_CAP = 50_000_000


@dataclass(frozen=True)
class SimParams:
    """Physical and numerical parameters of one simulation.

    Parameters
    ----------
    p : float
        Nonlinearity exponent, must be > 1.
    N : int
        Spatial dimension (1 = interval, >= 2 = radially symmetric ball).
    domain_radius : float
        Half-width of the 1-D interval, or the radius of the radial domain.
    nx : int
        Number of spatial grid points.
    cfl : float
        Courant number in (0, 1]; the base time step is cfl * dx.  Values
        above ~0.3 are only safe for short runs: the two-stage midpoint
        scheme amplifies the highest grid mode by 1 + O((2*cfl)^4) per step.
    t_end : float
        Time horizon; runs halt here if no blow-up is detected.
    blowup_threshold : float
        max|u_t| level that declares blow-up.
    alpha : float
        Weight exponent of the degenerate weight (1-|y|^2)^alpha; must
        exceed max(beta*(beta+1)/2, 2).
    bc : str
        Boundary closure: "neumann" (default guard), "periodic" (1-D only),
        or "dirichlet".
    snapshot_stride : int
        Store full fields every k-th step while max|u_t| is below 1% of the
        threshold; every step above it (subject to max_snapshots thinning).
    debug_linear : bool
        Disable the nonlinear term (linear wave equation) for scheme tests.
    max_snapshots : int
        Soft cap on stored full-field snapshots; when reached, the stride is
        doubled so coverage continues with geometric thinning.
    max_steps : int
        Hard step budget; exhausting it halts with NumericalFailure.
    """

    p: float
    N: int = 1
    domain_radius: float = 1.0
    nx: int = 201
    cfl: float = 0.25
    t_end: float = 1.0
    blowup_threshold: float = 1.0e8
    alpha: float = 3.0
    bc: str = "neumann"
    snapshot_stride: int = 10
    debug_linear: bool = False
    max_snapshots: int = 12000
    max_steps: int = 2_000_000

    @property
    def regime_bounded(self) -> bool:
        """Exponent range where the bounded-profile theory applies.

        p <= 1 + 2/(N-1) for N >= 2, sharpened to p < 3 for N in {1, 2}.
        """
        if self.p <= 1.0:
            return False
        if self.N <= 2:
            return self.p < 3.0
        return self.p <= 1.0 + 2.0 / (self.N - 1)

    @property
    def regime_blowup(self) -> bool:
        """Exponent range where negative initial energy forces blow-up: p <= 1 + 2/N."""
        return 1.0 < self.p <= 1.0 + 2.0 / self.N

    @property
    def rate_scaling_positive(self) -> bool:
        """Whether 2*beta - N/2 > 0, required by the scaled shrinking-ball monitor."""
        if self.p <= 1.0:
            return False
        beta = 1.0 / (self.p - 1.0)
        return 2.0 * beta - 0.5 * self.N > 0.0


@dataclass(frozen=True)
class DerivedConstants:
    """Rate exponent and amplitude of the exact kernel: beta = 1/(p-1), kappa = beta^beta."""

    beta: float
    kappa: float


def derive_constants(p: float) -> DerivedConstants:
    if p <= 1.0:
        raise InvalidExponent(f"p must exceed 1, got {p}")
    beta = 1.0 / (p - 1.0)
    return DerivedConstants(beta=beta, kappa=beta**beta)


def param_errors(params: SimParams) -> list[str]:
    """Collect every validation problem (empty list means valid)."""
    errs = []
    if params.p <= 1.0:
        errs.append(f"p must exceed 1, got {params.p}")
    if params.N < 1:
        errs.append(f"N must be a positive integer, got {params.N}")
    if params.nx < 8:
        errs.append(f"nx must be at least 8, got {params.nx}")
    if not (0.0 < params.cfl <= 1.0):
        errs.append(f"cfl must lie in (0, 1], got {params.cfl}")
    if params.domain_radius <= 0.0:
        errs.append(f"domain_radius must be positive, got {params.domain_radius}")
    if params.t_end <= 0.0:
        errs.append(f"t_end must be positive, got {params.t_end}")
    if params.blowup_threshold <= 0.0:
        errs.append(f"blowup_threshold must be positive, got {params.blowup_threshold}")
    if params.p > 1.0:
        beta = 1.0 / (params.p - 1.0)
        alpha_min = max(beta * (beta + 1.0) / 2.0, 2.0)
        if params.alpha <= alpha_min:
            errs.append(
                f"alpha must exceed max(beta*(beta+1)/2, 2) = {alpha_min}, got {params.alpha}"
            )
    if params.bc not in _BC_CHOICES:
        errs.append(f"bc must be one of {_BC_CHOICES}, got {params.bc!r}")
    if params.bc == "periodic" and params.N != 1:
        errs.append("periodic boundaries are only defined for N = 1")
    if params.snapshot_stride < 1:
        errs.append(f"snapshot_stride must be >= 1, got {params.snapshot_stride}")
    if params.max_snapshots < 4:
        errs.append(f"max_snapshots must be >= 4, got {params.max_snapshots}")
    if params.max_steps < 1:
        errs.append(f"max_steps must be >= 1, got {params.max_steps}")
    return errs


def validate_params(params: SimParams) -> SimParams:
    """Validate and return the parameter set (idempotent).

    Raises
    ------
    InvalidExponent, InvalidWeight, InvalidGrid
        On a fatal problem; the first applicable category wins.
    """
    errs = param_errors(params)
    if not errs:
        return params
    if params.p <= 1.0:
        raise InvalidExponent(errs[0])
    beta = 1.0 / (params.p - 1.0)
    alpha_min = max(beta * (beta + 1.0) / 2.0, 2.0)
    if params.alpha <= alpha_min:
        raise InvalidWeight(
            f"alpha must exceed max(beta*(beta+1)/2, 2) = {alpha_min}, got {params.alpha}"
        )
    raise InvalidGrid("; ".join(errs))


def ode_exact_kt(t, T: float, consts: DerivedConstants):
    """Exact kernel velocity kappa*(T-t)^(-beta); accepts scalar or array t."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr >= T):
        raise DomainError(f"ode_exact_kt requires t < T = {T}")
    out = consts.kappa * (T - t_arr) ** (-consts.beta)
    if np.isscalar(t) or t_arr.ndim == 0:
        return float(out)
    return out


def ode_integrate(
    kt0: float,
    dt: float,
    t_end: float,
    p: float,
    blowup_threshold: float = 1.0e8,
    method: str = "euler",
):
    """Integrate the first-order kernel k_t' = k_t |k_t|^(p-1) explicitly.

    The base step shrinks near blow-up as dt_local = dt * min(1, 0.1/|k_t|^(p-1)),
    keeping the relative per-step growth bounded.  Integration stops as soon
    as |k_t| exceeds ``blowup_threshold`` (the crossing sample is kept) or
    t reaches ``t_end``.

    Parameters
    ----------
    method : {"euler", "midpoint"}
        "euler" is the reference first-order scheme; "midpoint" matches the
        two-stage scheme of the PDE solver (for like-for-like comparisons).

    Returns
    -------
    (t, kt) : pair of float arrays, starting at (0, kt0).
    """
    if kt0 < 0.0:
        raise DomainError(f"kt0 must be nonnegative, got {kt0}")
    if dt <= 0.0:
        raise DomainError(f"dt must be positive, got {dt}")
    if method not in ("euler", "midpoint"):
        raise ValueError(f"unknown method {method!r}")
    pm1 = p - 1.0
    ts = [0.0]
    ks = [float(kt0)]
    t = 0.0
    k = float(kt0)
    midpoint = method == "midpoint"
    for _ in range(_ODE_STEP_CAP):
        if t >= t_end or abs(k) > blowup_threshold:
            break
        a = abs(k) ** pm1
        dt_loc = dt if a <= 0.0 else dt * min(1.0, 0.1 / a)
        dt_loc = min(dt_loc, t_end - t)
        if t + dt_loc <= t:  # step underflow: cannot advance in float64
            break
        if midpoint:
            km = k + 0.5 * dt_loc * k * abs(k) ** pm1
            k = k + dt_loc * km * abs(km) ** pm1
        else:
            k = k + dt_loc * k * a
        t += dt_loc
        ts.append(t)
        ks.append(k)
    return np.asarray(ts), np.asarray(ks)


def with_params(params: SimParams, **changes) -> SimParams:
    """Functional update helper (frozen dataclass)."""
    return replace(params, **changes)


def ball_volume(N: int) -> float:
    """Volume of the unit ball in R^N."""
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0)


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere S^(N-1) in R^N."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)
