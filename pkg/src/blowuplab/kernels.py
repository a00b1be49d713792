"""Hot inner loops in twin implementations: pure numpy and optional JIT.

Two kernels dominate runtime: the adaptive finite-difference wave stepper
(``wave_block``) and the characteristic update of the semi-analytic 1-D
solver (``duhamel_step``).  Each exists as a pure-numpy reference and, when
numba is importable, as an @njit-compiled twin with identical arithmetic.

Backend selection: the BLOWUPLAB_BACKEND environment variable ("numba" or
"numpy").  Unset, the JIT path is used when available.  ``get_kernels`` also
accepts an explicit name so tests and benchmarks can pin either path.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional dependency
    HAS_NUMBA = False

BACKEND_ENV = "BLOWUPLAB_BACKEND"

# Boundary-closure codes shared by both implementations.
BC_NEUMANN, BC_PERIODIC, BC_DIRICHLET = 0, 1, 2
BC_CODES = {"neumann": BC_NEUMANN, "periodic": BC_PERIODIC, "dirichlet": BC_DIRICHLET}

# Halt codes returned by wave_block.
HALT_NONE, HALT_T_END, HALT_THRESHOLD, HALT_NONFINITE = 0, 1, 2, 3

# Trace columns written per step: t, dt, max|u|, max|ut|, ||u||_2, ||ut||_2.
TRACE_COLS = 6


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------


def _laplacian_numpy(f, coords, dx, dim, bc, out):
    n = f.shape[0]
    inv_dx2 = 1.0 / (dx * dx)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) * inv_dx2
    if dim >= 2:
        out[1:-1] += (dim - 1.0) / coords[1:-1] * (f[2:] - f[:-2]) / (2.0 * dx)
        out[0] = 2.0 * dim * (f[1] - f[0]) * inv_dx2  # on-axis symmetry limit
        if bc == BC_DIRICHLET:
            out[n - 1] = 0.0
        else:  # mirror closure: f' = 0 at the outer wall
            out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * inv_dx2
        return out
    if bc == BC_PERIODIC:  # endpoints identified: neighbors wrap past the duplicate
        out[0] = (f[1] - 2.0 * f[0] + f[n - 2]) * inv_dx2
        out[n - 1] = (f[1] - 2.0 * f[n - 1] + f[n - 2]) * inv_dx2
    elif bc == BC_DIRICHLET:
        out[0] = 0.0
        out[n - 1] = 0.0
    else:
        out[0] = 2.0 * (f[1] - f[0]) * inv_dx2
        out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * inv_dx2
    return out


def wave_block_numpy(
    u,
    ut,
    coords,
    l2w,
    t,
    dx,
    dt_base,
    p,
    dim,
    bc,
    threshold,
    t_end,
    nonlinear,
    nmax,
    trace,
):
    """Advance (u, ut) in place by up to nmax adaptive midpoint steps.

    Per-step trace rows are written into ``trace`` (nmax x 6).  Returns
    (steps_done, t, halt_code); halt_code 0 means the block was exhausted
    without hitting t_end, the blow-up threshold, or a non-finite value.
    """
    pm1 = p - 1.0
    lap = np.empty_like(u)
    um = np.empty_like(u)
    vm = np.empty_like(u)
    halt = HALT_NONE
    done = 0
    for k in range(nmax):
        m = float(np.max(np.abs(ut)))
        a = m**pm1
        dt = dt_base if a <= 0.0 else dt_base * min(1.0, 0.1 / a)
        if t + dt >= t_end:
            dt = t_end - t
        if t + dt <= t and dt >= 0.0:
            halt = HALT_NONFINITE  # time-step underflow: cannot advance
            break

        _laplacian_numpy(u, coords, dx, dim, bc, lap)
        if nonlinear:
            acc = lap + ut * np.abs(ut) ** pm1
        else:
            acc = lap
        np.multiply(ut, 0.5 * dt, out=um)
        um += u
        np.multiply(acc, 0.5 * dt, out=vm)
        vm += ut
        if bc == BC_DIRICHLET:
            um[0] = um[-1] = 0.0
            vm[0] = vm[-1] = 0.0
        _laplacian_numpy(um, coords, dx, dim, bc, lap)
        if nonlinear:
            acc2 = lap + vm * np.abs(vm) ** pm1
        else:
            acc2 = lap
        u += dt * vm
        ut += dt * acc2
        if bc == BC_DIRICHLET:
            u[0] = u[-1] = 0.0
            ut[0] = ut[-1] = 0.0
        t = t + dt

        max_u = float(np.max(np.abs(u)))
        max_ut = float(np.max(np.abs(ut)))
        l2_u = float(np.sqrt(np.sum(l2w * u * u)))
        l2_ut = float(np.sqrt(np.sum(l2w * ut * ut)))
        trace[k, 0] = t
        trace[k, 1] = dt
        trace[k, 2] = max_u
        trace[k, 3] = max_ut
        trace[k, 4] = l2_u
        trace[k, 5] = l2_ut
        done = k + 1
        if not (np.isfinite(max_u) and np.isfinite(max_ut)):
            halt = HALT_NONFINITE
            break
        if max_ut > threshold:
            halt = HALT_THRESHOLD
            break
        if t >= t_end:
            halt = HALT_T_END
            break
    return done, t, halt


def duhamel_step_numpy(n, H, P, Q, u_nm1, u_n, u_next, u0e, du0e, u1e, I1e, dt, p, nonlinear):
    """One characteristics-aligned step of the 1-D integral-representation solver.

    Arrays live on the extended grid (size nxe); level n -> n+1 is valid on
    indices [n+1, nxe-n-1).  Updates H[n+1], P, Q, u_next in place and
    returns (ut_next_full, contraction) where contraction is the measured
    Picard ratio ||H2-H1||/||H1-H0|| for the step.
    """
    nxe = H.shape[1]
    m = n + 1
    lo, hi = m, nxe - m
    pm1 = p - 1.0
    sl = slice(lo, hi)

    # fixed part of ut(n+1): data terms plus the characteristic integrals
    # excluding their t_{n+1} trapezoid endpoints
    C = 0.5 * (du0e[lo + m : hi + m] - du0e[lo - m : hi - m]) + 0.5 * (
        u1e[lo + m : hi + m] + u1e[lo - m : hi - m]
    )
    Pb = P[lo + 1 : hi + 1] + 0.5 * dt * H[n, lo + 1 : hi + 1]
    Qb = Q[lo - 1 : hi - 1] + 0.5 * dt * H[n, lo - 1 : hi - 1]
    A = C + 0.5 * (Pb + Qb)

    if nonlinear:
        H0 = H[n, sl]
        ut1 = A + 0.5 * dt * H0
        H1 = ut1 * np.abs(ut1) ** pm1
        ut2 = A + 0.5 * dt * H1
        H2 = ut2 * np.abs(ut2) ** pm1
        d10 = float(np.max(np.abs(H1 - H0)))
        d21 = float(np.max(np.abs(H2 - H1)))
        contraction = d21 / (d10 + 1e-300)
        ut_new = A + 0.5 * dt * H2
        H[n + 1, sl] = ut_new * np.abs(ut_new) ** pm1
    else:
        contraction = 0.0
        ut_new = A
        H[n + 1, sl] = 0.0

    # characteristic integrals for the next level, closed with the final H
    P[sl] = Pb + 0.5 * dt * H[n + 1, sl]
    Q[sl] = Qb + 0.5 * dt * H[n + 1, sl]

    if n == 0:
        u_next[sl] = (
            0.5 * (u0e[lo + 1 : hi + 1] + u0e[lo - 1 : hi - 1])
            + 0.5 * (I1e[lo + 1 : hi + 1] - I1e[lo - 1 : hi - 1])
            + dt * dt / 6.0 * (H[0, lo - 1 : hi - 1] + H[0, lo + 1 : hi + 1] + H[1, sl])
        )
    else:
        u_next[sl] = (
            u_n[lo + 1 : hi + 1]
            + u_n[lo - 1 : hi - 1]
            - u_nm1[sl]
            + 0.25
            * dt
            * dt
            * (H[n + 1, sl] + H[n - 1, sl] + H[n, lo + 1 : hi + 1] + H[n, lo - 1 : hi - 1])
        )
    ut_full = np.zeros(nxe)
    ut_full[sl] = ut_new
    return ut_full, contraction


# ---------------------------------------------------------------------------
# numba twins
# ---------------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True, nogil=True)
    def _lap_fill_nb(f, coords, dx, dim, bc, out):  # pragma: no cover - exercised via wrapper
        n = f.shape[0]
        inv_dx2 = 1.0 / (dx * dx)
        for i in range(1, n - 1):
            out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv_dx2
        if dim >= 2:
            for i in range(1, n - 1):
                out[i] += (dim - 1.0) / coords[i] * (f[i + 1] - f[i - 1]) / (2.0 * dx)
            out[0] = 2.0 * dim * (f[1] - f[0]) * inv_dx2
            if bc == 2:
                out[n - 1] = 0.0
            else:
                out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * inv_dx2
        else:
            if bc == 1:
                out[0] = (f[1] - 2.0 * f[0] + f[n - 2]) * inv_dx2
                out[n - 1] = (f[1] - 2.0 * f[n - 1] + f[n - 2]) * inv_dx2
            elif bc == 2:
                out[0] = 0.0
                out[n - 1] = 0.0
            else:
                out[0] = 2.0 * (f[1] - f[0]) * inv_dx2
                out[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * inv_dx2

    @njit(cache=True, nogil=True)
    def wave_block_numba(
        u,
        ut,
        coords,
        l2w,
        t,
        dx,
        dt_base,
        p,
        dim,
        bc,
        threshold,
        t_end,
        nonlinear,
        nmax,
        trace,
    ):  # pragma: no cover - exercised via wrapper
        n = u.shape[0]
        pm1 = p - 1.0
        lap = np.empty(n)
        um = np.empty(n)
        vm = np.empty(n)
        halt = 0
        done = 0
        for k in range(nmax):
            m = 0.0
            for i in range(n):
                av = abs(ut[i])
                if av > m:
                    m = av
            a = m**pm1
            dt = dt_base
            if a > 0.0:
                f = 0.1 / a
                if f < 1.0:
                    dt = dt_base * f
            if t + dt >= t_end:
                dt = t_end - t
            if t + dt <= t and dt >= 0.0:
                halt = 3
                break

            _lap_fill_nb(u, coords, dx, dim, bc, lap)
            for i in range(n):
                acc = lap[i]
                if nonlinear:
                    acc += ut[i] * abs(ut[i]) ** pm1
                um[i] = u[i] + 0.5 * dt * ut[i]
                vm[i] = ut[i] + 0.5 * dt * acc
            if bc == 2:
                um[0] = 0.0
                um[n - 1] = 0.0
                vm[0] = 0.0
                vm[n - 1] = 0.0
            _lap_fill_nb(um, coords, dx, dim, bc, lap)
            for i in range(n):
                acc = lap[i]
                if nonlinear:
                    acc += vm[i] * abs(vm[i]) ** pm1
                u[i] = u[i] + dt * vm[i]
                ut[i] = ut[i] + dt * acc
            if bc == 2:
                u[0] = 0.0
                u[n - 1] = 0.0
                ut[0] = 0.0
                ut[n - 1] = 0.0
            t = t + dt

            max_u = 0.0
            max_ut = 0.0
            s_u = 0.0
            s_ut = 0.0
            for i in range(n):
                au = abs(u[i])
                av = abs(ut[i])
                if au > max_u:
                    max_u = au
                if av > max_ut:
                    max_ut = av
                s_u += l2w[i] * u[i] * u[i]
                s_ut += l2w[i] * ut[i] * ut[i]
            l2_u = np.sqrt(s_u)
            l2_ut = np.sqrt(s_ut)
            trace[k, 0] = t
            trace[k, 1] = dt
            trace[k, 2] = max_u
            trace[k, 3] = max_ut
            trace[k, 4] = l2_u
            trace[k, 5] = l2_ut
            done = k + 1
            if not (np.isfinite(max_u) and np.isfinite(max_ut)):
                halt = 3
                break
            if max_ut > threshold:
                halt = 2
                break
            if t >= t_end:
                halt = 1
                break
        return done, t, halt

    @njit(cache=True, nogil=True)
    def duhamel_step_numba(
        n, H, P, Q, u_nm1, u_n, u_next, u0e, du0e, u1e, I1e, dt, p, nonlinear
    ):  # pragma: no cover - exercised via wrapper
        nxe = H.shape[1]
        m = n + 1
        lo = m
        hi = nxe - m
        pm1 = p - 1.0
        w = hi - lo
        A = np.empty(w)
        Pb = np.empty(w)
        Qb = np.empty(w)
        for j in range(w):
            i = lo + j
            c = 0.5 * (du0e[i + m] - du0e[i - m] + u1e[i + m] + u1e[i - m])
            pb = P[i + 1] + 0.5 * dt * H[n, i + 1]
            qb = Q[i - 1] + 0.5 * dt * H[n, i - 1]
            Pb[j] = pb
            Qb[j] = qb
            A[j] = c + 0.5 * (pb + qb)

        contraction = 0.0
        if nonlinear:
            d10 = 0.0
            d21 = 0.0
            H1 = np.empty(w)
            H2 = np.empty(w)
            for j in range(w):
                h0 = H[n, lo + j]
                ut1 = A[j] + 0.5 * dt * h0
                h1 = ut1 * abs(ut1) ** pm1
                ut2 = A[j] + 0.5 * dt * h1
                h2 = ut2 * abs(ut2) ** pm1
                H1[j] = h1
                H2[j] = h2
                a10 = abs(h1 - h0)
                a21 = abs(h2 - h1)
                if a10 > d10:
                    d10 = a10
                if a21 > d21:
                    d21 = a21
            contraction = d21 / (d10 + 1e-300)
            for j in range(w):
                ut_new = A[j] + 0.5 * dt * H2[j]
                A[j] = ut_new
                H[n + 1, lo + j] = ut_new * abs(ut_new) ** pm1
        else:
            for j in range(w):
                H[n + 1, lo + j] = 0.0

        for j in range(w):
            i = lo + j
            P[i] = Pb[j] + 0.5 * dt * H[n + 1, i]
            Q[i] = Qb[j] + 0.5 * dt * H[n + 1, i]

        if n == 0:
            for j in range(w):
                i = lo + j
                u_next[i] = (
                    0.5 * (u0e[i + 1] + u0e[i - 1])
                    + 0.5 * (I1e[i + 1] - I1e[i - 1])
                    + dt * dt / 6.0 * (H[0, i - 1] + H[0, i + 1] + H[1, i])
                )
        else:
            for j in range(w):
                i = lo + j
                u_next[i] = (
                    u_n[i + 1]
                    + u_n[i - 1]
                    - u_nm1[i]
                    + 0.25 * dt * dt * (H[n + 1, i] + H[n - 1, i] + H[n, i + 1] + H[n, i - 1])
                )
        ut_full = np.zeros(nxe)
        for j in range(w):
            ut_full[lo + j] = A[j]
        return ut_full, contraction


# ---------------------------------------------------------------------------
# backend dispatch
# ---------------------------------------------------------------------------

_NUMPY_KERNELS = SimpleNamespace(
    name="numpy",
    wave_block=wave_block_numpy,
    duhamel_step=duhamel_step_numpy,
)

if HAS_NUMBA:
    _NUMBA_KERNELS = SimpleNamespace(
        name="numba",
        wave_block=wave_block_numba,
        duhamel_step=duhamel_step_numba,
    )
else:  # pragma: no cover
    _NUMBA_KERNELS = None


def available_backends():
    return ("numpy", "numba") if HAS_NUMBA else ("numpy",)


def default_backend() -> str:
    choice = os.environ.get(BACKEND_ENV, "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice == "numba":
        if not HAS_NUMBA:
            raise RuntimeError(f"{BACKEND_ENV}=numba requested but numba is not importable")
        return "numba"
    if choice:
        raise RuntimeError(f"unknown {BACKEND_ENV} value {choice!r}; use 'numba' or 'numpy'")
    return "numba" if HAS_NUMBA else "numpy"


def get_kernels(backend: str | None = None) -> SimpleNamespace:
    """Kernel namespace for the requested backend (default: env selection)."""
    name = backend or default_backend()
    if name == "numpy":
        return _NUMPY_KERNELS
    if name == "numba":
        if _NUMBA_KERNELS is None:
            raise RuntimeError("numba backend requested but numba is not importable")
        return _NUMBA_KERNELS
    raise ValueError(f"unknown backend {name!r}")
