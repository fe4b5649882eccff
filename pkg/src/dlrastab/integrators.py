"""Explicit Euler time steppers for ``u_t = -A u_x`` (plus scattering).

Every low-rank stepper maps an orthonormal :class:`LowRankState` to a new one
using the Lax-Friedrichs stencils of :mod:`dlrastab.stencil`:

* ``ps_discrete_step``   projector splitting on the discretized matrix ODE
* ``ps_naive_step``      projector splitting of the continuous equations,
  central differences in the S and L steps
* ``ps_stabilized_step`` as above with Lax-Friedrichs stabilization in S and L
  (flipped sign in S)
* ``unconventional_step`` unconventional integrator on the matrix ODE

``full_step`` is the full-rank reference scheme ``L1 u - L2 u A^T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Union

import numpy as np

from dlrastab.bases import MomentSystem
from dlrastab.lowrank import LowRankState, orthonormalize, truncated_init
from dlrastab.stencil import Boundary, Grid1D, StencilOperators

BLOWUP_FACTOR = 1e12


class Variant(str, Enum):
    FULL = "full"
    PS_DISCRETE = "ps-discrete"
    PS_NAIVE = "ps-naive"
    PS_STABILIZED = "ps-stabilized"
    UNCONVENTIONAL = "unconventional"


class ScatteringMode(str, Enum):
    NONE = "none"
    FULL_SPLIT_3STEP = "full-split"
    L_STEP_ONLY = "l-only"


@dataclass(frozen=True)
class SchemeSpec:
    variant: Variant
    cfl: float
    end_time: float
    rank: int | None = None
    scattering: ScatteringMode = ScatteringMode.L_STEP_ONLY

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "scattering", ScatteringMode(self.scattering))
        if not (math.isfinite(self.cfl) and self.cfl > 0):
            raise ValueError(f"cfl must be positive and finite, got {self.cfl}")
        if not self.end_time > 0:
            raise ValueError(f"end_time must be positive, got {self.end_time}")
        if self.variant is not Variant.FULL and (self.rank is None or self.rank < 1):
            raise ValueError(f"{self.variant.value} needs a positive rank")


@dataclass(frozen=True)
class Problem:
    """Initial data plus everything needed to step it."""

    name: str
    u0: np.ndarray
    system: MomentSystem
    grid: Grid1D
    boundary: Boundary = Boundary.DIRICHLET_ZERO


@dataclass
class NormTrace:
    steps: list[int] = field(default_factory=list)
    times: list[float] = field(default_factory=list)
    norms: list[float] = field(default_factory=list)
    status: list[str] = field(default_factory=list)

    def append(self, step: int, time: float, norm: float, status: str = "ok") -> None:
        self.steps.append(step)
        self.times.append(time)
        self.norms.append(norm)
        self.status.append(status)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def diverged(self) -> bool:
        return bool(self.status) and self.status[-1] == "diverged"

    def ratios(self) -> np.ndarray:
        """Per-step growth factors ``||u^{n+1}|| / ||u^n||``."""
        n = np.asarray(self.norms)
        return n[1:] / n[:-1]

    def rows(self):
        return zip(self.steps, self.times, self.norms, self.status)


@dataclass
class RunResult:
    state: Union[LowRankState, np.ndarray]
    trace: NormTrace
    spec: SchemeSpec
    dt: float
    diverged: bool = False
    divergence_step: int | None = None

    def dense(self) -> np.ndarray:
        if isinstance(self.state, LowRankState):
            return self.state.X @ self.state.S @ self.state.W.T
        return self.state


# --------------------------------------------------------------------------
# streaming steps

def flux_update(u: np.ndarray, ops: StencilOperators, A: np.ndarray) -> np.ndarray:
    """``L1 u - L2 u A^T``; also valid for u = K (N_x x r) with A -> A~."""
    return ops.apply_L1(u) - ops.apply_L2(u) @ A.T


def full_step(u: np.ndarray, ops: StencilOperators, sys: MomentSystem) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (ops.grid.nx, sys.n_moments):
        raise ValueError(f"state shape {u.shape} != {(ops.grid.nx, sys.n_moments)}")
    return flux_update(u, ops, sys.A)


def _split_L(L: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """QR of ``L^T``; returns (W, S) with ``L = S W^T``."""
    W, R = orthonormalize(L.T)
    return W, R.T


def _check_state(st: LowRankState, ops: StencilOperators, sys: MomentSystem) -> None:
    if st.shape != (ops.grid.nx, sys.n_moments):
        raise ValueError(f"state shape {st.shape} != {(ops.grid.nx, sys.n_moments)}")


def ps_discrete_step(st: LowRankState, ops: StencilOperators, sys: MomentSystem) -> LowRankState:
    _check_state(st, ops, sys)
    A, X, S, W = sys.A, st.X, st.S, st.W
    At = W.T @ A.T @ W

    # K-step: K + ((L1 - I) u_I - L2 u_I A^T) W with u_I = K W^T
    K = X @ S
    K = K + (ops.apply_L1(K) - K) - ops.apply_L2(K) @ At
    X1, S_t = orthonormalize(K)

    # S-step (backward in time): S~ - X1^T ((L1 - I) u_II - L2 u_II A^T) W
    Y = X1 @ S_t
    S_t = S_t - X1.T @ ((ops.apply_L1(Y) - Y) - ops.apply_L2(Y) @ At)

    # L-step: L + X1^T ((L1 - I) u_III - L2 u_III A^T), u_III = X1 L
    L = S_t @ W.T
    P1 = ops.projected("L1", X1)
    P2 = ops.projected("L2", X1)
    L = L + (P1 @ L - L) - P2 @ L @ A.T
    W1, S1 = _split_L(L)
    return LowRankState(X1, S1, W1)


def ps_naive_step(st: LowRankState, ops: StencilOperators, sys: MomentSystem) -> LowRankState:
    _check_state(st, ops, sys)
    A, X, S, W = sys.A, st.X, st.S, st.W
    At = W.T @ A.T @ W

    X1, S_t = orthonormalize(flux_update(X @ S, ops, At))
    P2 = ops.projected("L2", X1)
    S_t = S_t + P2 @ S_t @ At
    L = S_t @ W.T
    L = L - P2 @ L @ A.T
    W1, S1 = _split_L(L)
    return LowRankState(X1, S1, W1)


def ps_stabilized_step(st: LowRankState, ops: StencilOperators, sys: MomentSystem) -> LowRankState:
    _check_state(st, ops, sys)
    A, X, S, W = sys.A, st.X, st.S, st.W
    At = W.T @ A.T @ W

    X1, S_t = orthonormalize(flux_update(X @ S, ops, At))
    P1 = ops.projected("L1", X1)
    P2 = ops.projected("L2", X1)
    S_t = P1 @ S_t + P2 @ S_t @ At
    L = S_t @ W.T
    L = P1 @ L - P2 @ L @ A.T
    W1, S1 = _split_L(L)
    return LowRankState(X1, S1, W1)


def unconventional_step(st: LowRankState, ops: StencilOperators, sys: MomentSystem) -> LowRankState:
    _check_state(st, ops, sys)
    A, X, S, W = sys.A, st.X, st.S, st.W
    At = W.T @ A.T @ W

    # K and L both start from u^n
    K = flux_update(X @ S, ops, At)
    P1 = ops.projected("L1", X)
    P2 = ops.projected("L2", X)
    SW = S @ W.T
    L = P1 @ SW - P2 @ SW @ A.T
    X1, _ = orthonormalize(K)
    W1, _ = orthonormalize(L.T)
    M = X1.T @ X
    N = W1.T @ W

    # Galerkin S-step on u_bar = X1 (M S N^T) W1^T in factored form
    S_bar = M @ S @ N.T
    At1 = W1.T @ A.T @ W1
    S1 = ops.projected("L1", X1) @ S_bar - ops.projected("L2", X1) @ S_bar @ At1
    return LowRankState(X1, S1, W1)


STEPPERS: dict[Variant, Callable[[LowRankState, StencilOperators, MomentSystem], LowRankState]] = {
    Variant.PS_DISCRETE: ps_discrete_step,
    Variant.PS_NAIVE: ps_naive_step,
    Variant.PS_STABILIZED: ps_stabilized_step,
    Variant.UNCONVENTIONAL: unconventional_step,
}


# --------------------------------------------------------------------------
# scattering

def scattering_L_only(L: np.ndarray, dt: float, G: np.ndarray) -> np.ndarray:
    """Explicit Euler for ``L' = L G`` with diagonal G: ``L (I + dt G)``."""
    return L * (1.0 + dt * np.asarray(G))[None, :]


def scattering_full_split(
    st: Union[LowRankState, np.ndarray], dt: float, G: np.ndarray
) -> Union[LowRankState, np.ndarray]:
    """Scattering substep through K, S and L projector-splitting substeps.

    Dense input gets the single factor ``u (I + dt G)``.
    """
    g = np.asarray(G, dtype=float)
    if not isinstance(st, LowRankState):
        return np.asarray(st) * (1.0 + dt * g)[None, :]
    X, S, W = st.X, st.S, st.W
    plus = (W * (1.0 + dt * g)[:, None])
    minus = (W * (1.0 - dt * g)[:, None])
    K = X @ S @ (W.T @ plus)
    X1, S_t = orthonormalize(K)
    S_t = S_t @ (W.T @ minus)
    L = scattering_L_only(S_t @ W.T, dt, g)
    W1, S1 = _split_L(L)
    return LowRankState(X1, S1, W1)


def scatter(
    st: Union[LowRankState, np.ndarray], dt: float, G: np.ndarray, mode: ScatteringMode
) -> Union[LowRankState, np.ndarray]:
    mode = ScatteringMode(mode)
    if mode is ScatteringMode.NONE or not np.any(G):
        return st
    if not isinstance(st, LowRankState):
        # both treatments coincide for the full-rank scheme
        return np.asarray(st) * (1.0 + dt * np.asarray(G))[None, :]
    if mode is ScatteringMode.FULL_SPLIT_3STEP:
        return scattering_full_split(st, dt, G)
    W1, S1 = _split_L(scattering_L_only(st.S @ st.W.T, dt, G))
    return LowRankState(st.X, S1, W1)


# --------------------------------------------------------------------------
# driver

def time_steps(end_time: float, dt: float) -> np.ndarray:
    """Step sizes covering [0, end_time]; the last one is shortened to land on T."""
    n = max(1, math.ceil(end_time / dt - 1e-10))
    steps = np.full(n, dt)
    steps[-1] = end_time - (n - 1) * dt
    return steps


def run(problem: Problem, spec: SchemeSpec) -> RunResult:
    """Advance ``problem`` to ``spec.end_time`` and record the Frobenius norm per step.

    Non-finite values or growth beyond ``BLOWUP_FACTOR`` times the initial
    norm end the run with status ``diverged``; that is a result, not an error.
    """
    sys_ = problem.system
    grid = problem.grid
    dt = spec.cfl * grid.dx / sys_.lambda_max
    ops = StencilOperators(grid, dt, problem.boundary)

    if spec.variant is Variant.FULL:
        state: Union[LowRankState, np.ndarray] = np.array(problem.u0, dtype=float)
        norm0 = float(np.linalg.norm(state))
        stepper = None
    else:
        state = truncated_init(problem.u0, spec.rank)
        norm0 = state.norm()
        stepper = STEPPERS[spec.variant]

    trace = NormTrace()
    trace.append(0, 0.0, norm0)
    result = RunResult(state=state, trace=trace, spec=spec, dt=dt)
    limit = BLOWUP_FACTOR * max(norm0, np.finfo(float).tiny)

    t = 0.0
    steps = time_steps(spec.end_time, dt)
    with np.errstate(all="ignore"):
        for n, h in enumerate(steps, start=1):
            step_ops = ops if h == dt else ops.with_dt(h)
            try:
                if stepper is None:
                    new = full_step(state, step_ops, sys_)
                else:
                    new = stepper(state, step_ops, sys_)
                new = scatter(new, h, sys_.G, spec.scattering)
            except ValueError:
                # QR on non-finite intermediates
                new = None
            t = spec.end_time if n == len(steps) else t + h
            if new is None:
                norm = math.inf
            else:
                norm = float(np.linalg.norm(new.S if isinstance(new, LowRankState) else new))
            if not math.isfinite(norm) or norm > limit:
                trace.append(n, t, norm, "diverged")
                result.diverged = True
                result.divergence_step = n
                break
            state = new
            trace.append(n, t, norm)
    result.state = state
    return result
