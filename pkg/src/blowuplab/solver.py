"""Explicit finite-difference solver for u_tt - lap(u) = u_t|u_t|^(p-1).

Works on a 1-D interval or a radially symmetric ball.  Time integration is
the two-stage (midpoint) method on the first-order system u' = ut,
ut' = lap(u) + ut|ut|^(p-1), with the step adapted near blow-up as
dt = dt_base * min(1, 0.1/max|ut|^(p-1)).  The run records a dense per-step
scalar trace (used by rate fitting) and strided full-field snapshots (used
by transforms and cross-validation).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NumericalFailure, ProfileError
from .grid import SpatialGrid
from .params import SimParams

# Dense-trace layout (one row per step).
TRACE_FIELDS = ("t", "dt", "max_u", "max_ut", "l2_u", "l2_ut")


class HaltReason(enum.Enum):
    ReachedTEnd = "ReachedTEnd"
    BlowupDetected = "BlowupDetected"
    NumericalFailure = "NumericalFailure"


@dataclass(frozen=True, eq=False)
class WaveState:
    t: float
    u: np.ndarray = field(repr=False)
    ut: np.ndarray = field(repr=False)


@dataclass(eq=False)
class WaveHistory:
    """Stored trajectory: strided full-field states plus a per-step trace.

    ``trace`` has one row per time step with columns TRACE_FIELDS; rate
    fitting and F(t) use it, so late-time thinning of ``states`` never
    degrades them.  ``fields_thinned`` records whether the snapshot stride
    was enlarged to respect params.max_snapshots.
    """

    states: list
    dt_sequence: np.ndarray
    halt_reason: HaltReason
    trace: np.ndarray
    params: SimParams
    grid: SpatialGrid
    fields_thinned: bool = False

    @property
    def state_times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def final_state(self) -> WaveState:
        return self.states[-1]


def init_state(grid: SpatialGrid, u0, u1) -> WaveState:
    """Sample initial profiles on the grid (t = 0)."""
    u = np.asarray(u0(grid.coordinates), dtype=float).copy()
    ut = np.asarray(u1(grid.coordinates), dtype=float).copy()
    if u.shape != (grid.nx,) or ut.shape != (grid.nx,):
        raise ProfileError("initial profiles must evaluate to one sample per grid point")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(ut))):
        raise ProfileError("initial profiles produced non-finite samples")
    return WaveState(t=0.0, u=u, ut=ut)


def laplacian(grid: SpatialGrid, f, bc: str = "neumann") -> np.ndarray:
    """Second-order Laplacian stencil; radial grids use lap = f'' + (N-1)/r f'
    with the symmetry limit 2N(f[1]-f[0])/dx^2 at r = 0."""
    f = np.asarray(f, dtype=float)
    out = np.empty_like(f)
    kernels._laplacian_numpy(f, grid.coordinates, grid.dx, grid.dim, kernels.BC_CODES[bc], out)
    return out


def _l2_weights(grid: SpatialGrid) -> np.ndarray:
    """Trapezoid weights against the volume element (used by the trace norms)."""
    w = np.full(grid.nx, grid.dx)
    w[0] *= 0.5
    w[-1] *= 0.5
    if grid.dim >= 2:
        from .params import sphere_area

        w = w * sphere_area(grid.dim) * grid.coordinates ** (grid.dim - 1)
    return w


def step(state: WaveState, grid: SpatialGrid, params: SimParams, dt: float) -> WaveState:
    """One midpoint step of the first-order system at a fixed dt.

    Raises NumericalFailure if the step produces non-finite values.
    """
    if dt > params.cfl * grid.dx * (1.0 + 1e-12):
        raise ValueError(f"dt = {dt} exceeds cfl*dx = {params.cfl * grid.dx}")
    bc = params.bc
    nonlinear = not params.debug_linear
    pm1 = params.p - 1.0

    def rhs(uv, vv):
        acc = laplacian(grid, uv, bc)
        if nonlinear:
            acc = acc + vv * np.abs(vv) ** pm1
        return acc

    u, ut = state.u, state.ut
    a1 = rhs(u, ut)
    um = u + 0.5 * dt * ut
    vm = ut + 0.5 * dt * a1
    if bc == "dirichlet":
        um[0] = um[-1] = 0.0
        vm[0] = vm[-1] = 0.0
    a2 = rhs(um, vm)
    u_new = u + dt * vm
    ut_new = ut + dt * a2
    if bc == "dirichlet":
        u_new[0] = u_new[-1] = 0.0
        ut_new[0] = ut_new[-1] = 0.0
    if not (np.all(np.isfinite(u_new)) and np.all(np.isfinite(ut_new))):
        raise NumericalFailure("midpoint step produced non-finite values")
    return WaveState(t=state.t + dt, u=u_new, ut=ut_new)


def run(state0: WaveState, grid: SpatialGrid, params: SimParams, dt_base: float | None = None,
        backend: str | None = None) -> WaveHistory:
    """Integrate until blow-up, t_end, or failure; returns the stored history.

    Snapshots of the full fields are kept every ``snapshot_stride`` steps
    (every step once max|ut| exceeds 1% of the threshold); whenever the
    stored count reaches 2/3 of ``max_snapshots`` the effective stride is
    doubled, so coverage always extends to the halt at bounded memory.
    """
    if dt_base is None:
        dt_base = params.cfl * grid.dx
    K = kernels.get_kernels(backend)
    bc = kernels.BC_CODES[params.bc]
    l2w = _l2_weights(grid)
    nonlinear = not params.debug_linear

    u = state0.u.astype(float).copy()
    ut = state0.ut.astype(float).copy()
    t = float(state0.t)

    states = [WaveState(t=t, u=u.copy(), ut=ut.copy())]
    trace_chunks = []
    thin_mult = 1
    thinned = False
    steps_total = 0
    halt = None
    if t >= params.t_end:
        halt = HaltReason.ReachedTEnd
    last_max_ut = float(np.max(np.abs(ut)))
    dense_level = 0.01 * params.blowup_threshold

    while halt is None:
        stride = 1 if last_max_ut > dense_level else params.snapshot_stride
        block = stride * thin_mult
        block = min(block, params.max_steps - steps_total)
        if block <= 0:
            halt = HaltReason.NumericalFailure  # step budget exhausted
            break
        trace_buf = np.empty((block, kernels.TRACE_COLS))
        done, t, code = K.wave_block(
            u,
            ut,
            grid.coordinates,
            l2w,
            t,
            grid.dx,
            dt_base,
            params.p,
            grid.dim,
            bc,
            params.blowup_threshold,
            params.t_end,
            nonlinear,
            block,
            trace_buf,
        )
        if done:
            trace_chunks.append(trace_buf[:done].copy())
            last_max_ut = float(trace_buf[done - 1, 3])
        steps_total += done

        if code == kernels.HALT_NONFINITE:
            halt = HaltReason.NumericalFailure
        elif code == kernels.HALT_THRESHOLD:
            halt = HaltReason.BlowupDetected
        elif code == kernels.HALT_T_END:
            halt = HaltReason.ReachedTEnd
        elif done == 0:
            halt = HaltReason.NumericalFailure
        store = halt is not None and halt is not HaltReason.NumericalFailure
        if halt is None and done == block:
            store = True
        if store:
            states.append(WaveState(t=t, u=u.copy(), ut=ut.copy()))
            if len(states) >= (2 * params.max_snapshots) // 3:
                thin_mult *= 2
                thinned = True

    trace = (
        np.concatenate(trace_chunks, axis=0)
        if trace_chunks
        else np.empty((0, kernels.TRACE_COLS))
    )
    return WaveHistory(
        states=states,
        dt_sequence=trace[:, 1].copy(),
        halt_reason=halt,
        trace=trace,
        params=params,
        grid=grid,
        fields_thinned=thinned,
    )
