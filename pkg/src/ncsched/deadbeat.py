"""Finite-window input bursts that steer a reachable plant's state to zero.

A window of length ``width > d`` starts with ``width - d`` exact zeros and
ends with the d-entry burst ``-inv(Psi) @ A^width @ x``, where ``Psi`` is the
controllability matrix. Forward simulation from ``x`` under the window lands
on the zero state at the window's end, so each plant needs at most d nonzero
inputs no matter how long its window is.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import PlantDynamics, is_reachable, mat_pow, reach_matrix
from .errors import IllConditionedWarning, NotReachableError, WindowOverflowError

COND_WARN_LIMIT = 1e12


@dataclass(frozen=True)
class DeadbeatWindow:
    """One plant's steering burst placed inside the horizon.

    ``inputs`` has length ``length`` and starts with a run of exact zeros;
    ``start + length`` must not exceed the horizon it is embedded into.
    """

    plant: int
    start: int
    length: int
    inputs: np.ndarray

    def __post_init__(self):
        inputs = np.array(self.inputs, dtype=float)
        if self.plant < 0 or self.start < 0:
            raise ValueError("plant index and start must be nonnegative")
        if inputs.shape != (self.length,):
            raise ValueError(
                f"window holds {inputs.shape} inputs, expected ({self.length},)"
            )
        inputs.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)

    @property
    def end(self) -> int:
        return self.start + self.length

    def embed(self, horizon: int) -> np.ndarray:
        """Full-horizon input row: zeros outside [start, start+length)."""
        if self.end > horizon:
            raise WindowOverflowError(
                f"window [{self.start}, {self.end}) exceeds horizon {horizon}"
            )
        row = np.zeros(horizon)
        row[self.start : self.end] = self.inputs
        return row


def deadbeat_inputs(p: PlantDynamics, xi: np.ndarray, width: int) -> np.ndarray:
    """Length-``width`` input sequence driving ``xi`` to the zero state.

    Parameters
    ----------
    p : PlantDynamics
        Must be reachable.
    xi : array
        State to annihilate, length ``p.d``.
    width : int
        Window length, strictly greater than ``p.d``.

    Returns
    -------
    ndarray
        ``width - d`` zeros followed by ``-inv(Psi) @ A^width @ xi``, computed
        with a factorization-based solve (never an explicit inverse). A
        condition number above ``COND_WARN_LIMIT`` raises an
        ``IllConditionedWarning`` but still returns the window; the simulator's
        verification is authoritative.
    """
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.shape[0] != p.d:
        raise ValueError("state has wrong length")
    if width <= p.d:
        raise ValueError(f"window length {width} must exceed dimension {p.d}")
    if not is_reachable(p):
        raise NotReachableError()
    psi = reach_matrix(p)
    cond = np.linalg.cond(psi)
    if cond > COND_WARN_LIMIT:
        warnings.warn(
            f"controllability matrix condition number {cond:.2e} exceeds "
            f"{COND_WARN_LIMIT:.0e}; window accuracy may degrade",
            IllConditionedWarning,
            stacklevel=2,
        )
    tail = -np.linalg.solve(psi, mat_pow(p.A, width) @ xi)
    u = np.zeros(width)
    u[width - p.d :] = tail
    return u


def windowed_inputs(
    p: PlantDynamics, xi: np.ndarray, offset: int, width: int, horizon: int
) -> np.ndarray:
    """Full-horizon input row with one steering window at a given offset.

    The plant coasts with zero input on [0, offset), so the window is built
    for the propagated state ``A^offset xi``; the state is zero from
    ``offset + width`` through the horizon.
    """
    if offset < 0:
        raise ValueError("offset must be nonnegative")
    if offset + width > horizon:
        raise WindowOverflowError(
            f"window [{offset}, {offset + width}) exceeds horizon {horizon}"
        )
    shifted = mat_pow(p.A, offset) @ np.asarray(xi, dtype=float).reshape(-1)
    window = deadbeat_inputs(p, shifted, width)
    return DeadbeatWindow(plant=0, start=offset, length=width, inputs=window).embed(
        horizon
    )


def make_window(
    plant: int, p: PlantDynamics, xi: np.ndarray, offset: int, width: int
) -> DeadbeatWindow:
    """Steering window for a specific plant index, ready to embed into a row."""
    shifted = mat_pow(p.A, offset) @ np.asarray(xi, dtype=float).reshape(-1)
    return DeadbeatWindow(
        plant=plant, start=offset, length=width, inputs=deadbeat_inputs(p, shifted, width)
    )
