"""Instance files: seeded generation and lossless JSON round-tripping."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import NcsInstance, PlantDynamics, is_reachable
from .errors import RejectionBudgetError, SchemaError

SCHEMA_VERSION = 1
SPECTRAL_RADIUS_MIN = 1.0 + 1e-9
REJECTION_BUDGET = 10_000


@dataclass(frozen=True)
class InstanceFile:
    """An instance plus the metadata needed to reproduce and audit it."""

    instance: NcsInstance
    seed: int | None = None
    provenance: str = ""


def spectral_radius(A: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvals(np.asarray(A, dtype=float))).max())


def generate_instance(
    n: int,
    capacity: int,
    horizon: int,
    dims: list[int],
    value_range: float = 2.0,
    seed: int = 0,
    max_draws: int = REJECTION_BUDGET,
) -> InstanceFile:
    """Random instance family: open-loop unstable, reachable plants.

    Each plant's matrices are drawn entrywise uniform on
    [-value_range, value_range] and redrawn until the state map's spectral
    radius exceeds 1 and the pair passes the reachability rank test. Initial
    states are uniform on [-1, 1]^d, redrawn if exactly zero. Deterministic
    for a fixed seed.
    """
    if len(dims) != n:
        raise ValueError(f"got {len(dims)} dimensions for {n} plants")
    if not 0 < capacity < n:
        raise ValueError(f"capacity must satisfy 0 < M < N, got M={capacity}, N={n}")
    if value_range <= 0:
        raise ValueError("value range must be positive")
    rng = np.random.default_rng(seed)
    plants = []
    for i, d in enumerate(dims):
        for _ in range(max_draws):
            A = rng.uniform(-value_range, value_range, (d, d))
            b = rng.uniform(-value_range, value_range, d)
            p = PlantDynamics(A, b)
            if spectral_radius(A) > SPECTRAL_RADIUS_MIN and is_reachable(p):
                plants.append(p)
                break
        else:
            raise RejectionBudgetError(
                f"plant {i + 1}: no unstable reachable draw in {max_draws} tries"
            )
    xi = []
    for d in dims:
        x = rng.uniform(-1.0, 1.0, d)
        while not x.any():
            x = rng.uniform(-1.0, 1.0, d)
        xi.append(x)
    instance = NcsInstance(
        plants=tuple(plants), xi=tuple(xi), capacity=capacity, horizon=horizon
    )
    provenance = (
        f"generated: n={n} capacity={capacity} horizon={horizon} "
        f"range={value_range} seed={seed}"
    )
    return InstanceFile(instance=instance, seed=seed, provenance=provenance)


def instance_to_dict(rec: InstanceFile) -> dict:
    inst = rec.instance
    return {
        "schema_version": SCHEMA_VERSION,
        "N": inst.n,
        "M": inst.capacity,
        "T": inst.horizon,
        "plants": [
            {"A": p.A.reshape(-1).tolist(), "b": p.b.tolist()} for p in inst.plants
        ],
        "xi": [x.tolist() for x in inst.xi],
        "seed": rec.seed,
        "provenance": rec.provenance,
    }


def instance_from_dict(data: dict) -> InstanceFile:
    try:
        if data["schema_version"] != SCHEMA_VERSION:
            raise SchemaError(
                f"unsupported schema_version {data['schema_version']}"
            )
        n, capacity, horizon = data["N"], data["M"], data["T"]
        plants = []
        for entry in data["plants"]:
            b = np.asarray(entry["b"], dtype=float)
            d = b.shape[0]
            A = np.asarray(entry["A"], dtype=float)
            if A.size != d * d:
                raise SchemaError(
                    f"state map has {A.size} entries, expected {d * d}"
                )
            plants.append(PlantDynamics(A.reshape(d, d), b))
        if len(plants) != n:
            raise SchemaError(f"N={n} but {len(plants)} plants listed")
        xi = [np.asarray(x, dtype=float) for x in data["xi"]]
        instance = NcsInstance(
            plants=tuple(plants), xi=tuple(xi), capacity=capacity, horizon=horizon
        )
        return InstanceFile(
            instance=instance,
            seed=data.get("seed"),
            provenance=data.get("provenance", ""),
        )
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed instance file: {exc}") from exc


def dump_json(data: dict) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline.

    Floats use Python's shortest round-trip representation, so
    write -> read -> write is byte-identical.
    """
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_instance(path, rec: InstanceFile) -> None:
    Path(path).write_text(dump_json(instance_to_dict(rec)))


def read_instance(path) -> InstanceFile:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    return instance_from_dict(data)
