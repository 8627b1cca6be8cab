"""Scenario files: parsing, validation and seeded generation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import DEFAULT_TOLERANCES, DimensionError, Tolerances, ValidationError
from .events import random_hermitian
from .linalg import as_hermitian, matrix_from_json, matrix_to_json
from .process import (
    HamiltonianProcess,
    HamiltonianSchedule,
    as_density_matrix,
    pure_state,
    schedule_from_json,
    thermal_state,
)

RNG_ALGORITHM = "numpy.random.PCG64"
DEFAULT_Q_VALUES = [0.0, 0.5, 1.0]
DEFAULT_U_GRID = np.linspace(-4.0, 4.0, 17).tolist()


@dataclass
class Scenario:
    process: HamiltonianProcess
    schedule: HamiltonianSchedule | None
    q_values: list = field(default_factory=lambda: list(DEFAULT_Q_VALUES))
    u_grid: list = field(default_factory=lambda: list(DEFAULT_U_GRID))
    tolerances: Tolerances = DEFAULT_TOLERANCES
    seed: int = 0
    raw: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.process.dim


def _parse_rho(obj, dim: int, h_initial: np.ndarray) -> np.ndarray:
    kind = obj.get("type")
    if kind == "matrix":
        return matrix_from_json(obj["matrix"])
    if kind == "pure":
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != (dim,) or im.shape != (dim,):
            raise DimensionError(f"pure state must have {dim} components")
        return pure_state(re + 1j * im)
    if kind == "thermal":
        ref = obj.get("hamiltonian", "initial")
        h = h_initial if ref == "initial" else matrix_from_json(ref)
        return thermal_state(h, float(obj["beta"]))
    raise ValidationError(f"unknown rho type {kind!r}")


def load_scenario(source) -> Scenario:
    """Build a :class:`Scenario` from a dict, a JSON string or a file path."""
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        try:
            obj = json.loads(Path(source).read_text())
        except OSError as exc:
            raise ValidationError(f"cannot read scenario: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"scenario is not valid JSON: {exc}") from exc
    elif isinstance(source, str):
        obj = json.loads(source)
    else:
        obj = source
    try:
        return _build(obj)
    except KeyError as exc:
        raise ValidationError(f"scenario is missing field {exc}") from exc


def _build(obj: dict) -> Scenario:
    dim = int(obj["dim"])
    schedule, u, h_first, h_last = schedule_from_json(obj["schedule"])
    h_initial = matrix_from_json(obj["h_initial"]) if "h_initial" in obj else h_first
    h_final = matrix_from_json(obj["h_final"]) if "h_final" in obj else h_last
    if h_initial is None or h_final is None:
        raise ValidationError("explicit_unitary schedules need h_initial and h_final")
    h_initial, h_final = as_hermitian(h_initial), as_hermitian(h_final)
    if h_initial.shape[0] != dim or u.shape[0] != dim:
        raise DimensionError(f"scenario declares dim {dim} but operators are {u.shape[0]}-dimensional")
    tol = DEFAULT_TOLERANCES.updated(obj.get("tolerances"))
    rho = as_density_matrix(_parse_rho(obj["rho"], dim, h_initial), tol)
    proc = HamiltonianProcess(h_initial, h_final, u, rho)
    return Scenario(
        process=proc,
        schedule=schedule,
        q_values=[float(q) for q in obj.get("q_values", DEFAULT_Q_VALUES)],
        u_grid=[float(u) for u in obj.get("u_grid", DEFAULT_U_GRID)],
        tolerances=tol,
        seed=int(obj.get("seed", 0)),
        raw=obj,
    )


def dumps_scenario(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def generate_scenario_dict(seed: int, dim: int, state: str | None = None, segments: int = 64) -> dict:
    """Seeded random ramp scenario.

    Hamiltonians have Gaussian entries symmetrised to be Hermitian; the state
    is a random pure state or a thermal state of ``H(0)`` (picked by the seed
    unless ``state`` is given).
    """
    if not 2 <= dim <= 8:
        raise ValidationError(f"dim must be in [2, 8], got {dim}")
    rng = np.random.default_rng(seed)
    h0 = random_hermitian(rng, dim)
    h1 = random_hermitian(rng, dim)
    tau = float(rng.uniform(0.5, 2.0))
    if state is None:
        state = "pure" if rng.uniform() < 0.5 else "thermal"
    if state == "pure":
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        rho = {"type": "pure", "re": psi.real.tolist(), "im": psi.imag.tolist()}
    elif state == "thermal":
        rho = {"type": "thermal", "beta": float(rng.uniform(0.2, 2.0)), "hamiltonian": "initial"}
    else:
        raise ValidationError(f"state must be 'pure' or 'thermal', got {state!r}")
    return {
        "dim": dim,
        "seed": seed,
        "rng": {"algorithm": RNG_ALGORITHM, "seed": seed},
        "schedule": {
            "type": "linear_ramp",
            "H0": matrix_to_json(h0),
            "H1": matrix_to_json(h1),
            "tau": tau,
            "segments": segments,
        },
        "rho": rho,
        "q_values": [0.0, 0.25, 0.5, 0.75, 1.0],
        "u_grid": list(DEFAULT_U_GRID),
    }


def generate_scenario(seed: int, dim: int, state: str | None = None) -> Scenario:
    return load_scenario(generate_scenario_dict(seed, dim, state))
