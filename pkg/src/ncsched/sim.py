"""Closed-NCS simulation, schedule extraction, and verification.

The simulator applies two zeroing conventions before and during the forward
recursion so that the reported trajectory is achievable under the reported
schedule and so that a steered state stays at rest:

* input entries below the per-plant zero threshold are physically zeroed, not
  merely ignored while counting, so schedule and actuation agree exactly;
* a state whose norm falls below the zero threshold (relative to the running
  trajectory sup-norm, floored at 1) is clamped to the exact zero vector.
  Without the clamp, the ~1e-15 rounding left at a steering window's end
  regrows under an unstable state map to O(1) or far worse over the remaining
  open-loop steps, reporting failure for trajectories whose exact-arithmetic
  counterparts are identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    TERMINAL_RTOL,
    ZERO_RTOL,
    ControlLogic,
    NcsInstance,
    PlantDynamics,
    SchedulingLogic,
)
from .errors import CapacityViolationError, NonFiniteError


@dataclass(frozen=True)
class SimulationResult:
    """Trajectories and the verdict of one closed-NCS run."""

    trajectories: tuple[np.ndarray, ...]
    terminal_residuals: np.ndarray
    max_column_occupancy: int
    verified: bool
    violations: tuple[str, ...] = ()

    def state_norms(self) -> list[list[float]]:
        """Per-plant 2-norm series, length T+1 each."""
        return [
            [float(np.linalg.norm(x)) for x in traj] for traj in self.trajectories
        ]


def extract_schedule(
    logic: ControlLogic,
    capacity: int | None = None,
    zero_rtol: float = ZERO_RTOL,
) -> SchedulingLogic:
    """Channel slots implied by a control logic: plants with nonzero input.

    Dropping plants whose input is zero loses nothing, since a closed-loop
    step with zero input equals an open-loop step. When ``capacity`` is given,
    a slot holding more plants raises ``CapacityViolationError``.
    """
    mask = logic.nonzero_mask(zero_rtol)
    slots = tuple(
        frozenset(np.nonzero(mask[:, t])[0].tolist()) for t in range(logic.horizon)
    )
    if capacity is not None:
        for t, slot in enumerate(slots):
            if len(slot) > capacity:
                raise CapacityViolationError(
                    f"slot {t} holds {len(slot)} plants, capacity is {capacity}"
                )
    return SchedulingLogic(slots)


def rollout(
    p: PlantDynamics,
    xi: np.ndarray,
    u: np.ndarray,
    zero_rtol: float = ZERO_RTOL,
) -> np.ndarray:
    """Forward recursion of one plant; returns the (T+1) x d state array.

    States are clamped to exact zero once below the running-sup zero
    threshold (see module docstring); the initial state is never clamped.
    """
    xi = np.asarray(xi, dtype=float).reshape(-1)
    u = np.asarray(u, dtype=float).reshape(-1)
    out = np.empty((u.shape[0] + 1, p.d))
    out[0] = xi
    sup = max(1.0, float(np.linalg.norm(xi)))
    x = xi
    for t in range(u.shape[0]):
        x = p.A @ x + p.b * u[t]
        norm = float(np.linalg.norm(x))
        if not np.isfinite(norm):
            raise NonFiniteError(f"state overflowed at step {t + 1}")
        sup = max(sup, norm)
        if norm <= zero_rtol * sup:
            x = np.zeros(p.d)
        out[t + 1] = x
    return out


def simulate(
    inst: NcsInstance,
    logic: ControlLogic,
    zero_rtol: float = ZERO_RTOL,
    terminal_rtol: float = TERMINAL_RTOL,
) -> SimulationResult:
    """Run every plant under the (thresholded) logic and judge the outcome.

    ``verified`` is true iff every relative terminal residual is at most
    ``terminal_rtol`` and no slot is over capacity. The residual denominator
    is the plant's trajectory sup-norm floored at 1.
    """
    if logic.u.shape != (inst.n, inst.horizon):
        raise ValueError(
            f"control logic shape {logic.u.shape} does not match instance "
            f"({inst.n}, {inst.horizon})"
        )
    zeroed = logic.thresholded(zero_rtol)
    trajectories = []
    residuals = np.empty(inst.n)
    for i, (p, x0) in enumerate(zip(inst.plants, inst.xi)):
        traj = rollout(p, x0, zeroed.u[i], zero_rtol)
        norms = np.linalg.norm(traj, axis=1)
        residuals[i] = norms[-1] / max(1.0, float(norms.max()))
        trajectories.append(traj)
    occupancy = zeroed.occupancy(zero_rtol)
    max_occ = int(occupancy.max()) if occupancy.size else 0

    violations = []
    bad = np.nonzero(residuals > terminal_rtol)[0]
    if bad.size:
        shown = ", ".join(str(i + 1) for i in bad[:5])
        violations.append(
            f"{bad.size} plants end away from zero (first few, 1-based: {shown})"
        )
    if max_occ > inst.capacity:
        t_bad = int(np.argmax(occupancy))
        violations.append(
            f"capacity violation: slot {t_bad} holds {max_occ} plants, "
            f"capacity is {inst.capacity}"
        )
    return SimulationResult(
        trajectories=tuple(trajectories),
        terminal_residuals=residuals,
        max_column_occupancy=max_occ,
        verified=not violations,
        violations=tuple(violations),
    )


def verify_logic(
    inst: NcsInstance,
    logic: ControlLogic,
    zero_rtol: float = ZERO_RTOL,
    terminal_rtol: float = TERMINAL_RTOL,
) -> SimulationResult:
    """Simulate and check both requirements: zero terminal states, capacity.

    The returned ``verified`` flag is the single source of truth used by the
    solve pipeline and the acceptance tests.
    """
    return simulate(inst, logic, zero_rtol=zero_rtol, terminal_rtol=terminal_rtol)
