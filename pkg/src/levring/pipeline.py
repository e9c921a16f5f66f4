"""Glue: config -> derived constants -> operating point -> state-space model.

Shared by the CLI subcommands and the sweep drivers.  Also hosts the
ordered parallel map used by sweeps (thread count capped by SIM_THREADS;
results always assembled in grid order, so output is independent of
scheduling).
"""
from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import CODATA2018
from .dynamics import StateSpaceModel, build_model
from .model import (DerivedParams, SystemConfig, delta0_from_config,
                    derive_constants)
from .steady_state import OperatingPoint, solve_resonant_ring_charge, solve_xs

RING_MODES = ("fixed_charge", "resonant")


@dataclass(frozen=True)
class PointSolution:
    derived: DerivedParams      # completed with damping at op.omega_m
    op: OperatingPoint
    model: StateSpaceModel
    ring_charge: float          # C actually used at this point
    field_at_xs: float          # on-axis ring field at x_s, V/m


def ring_field_value(ring_charge: float, ring_radius: float, c0: float,
                     x: float) -> float:
    s = c0 + x
    u = s / ring_radius
    return ring_charge * s / (4.0 * np.pi * CODATA2018.eps0
                              * ring_radius ** 3 * (1.0 + u * u) ** 1.5)


def solve_point(cfg: SystemConfig, delta0: Optional[float] = None,
                ring_mode: str = "fixed_charge") -> PointSolution:
    """Run the steady-state pipeline for one detuning.

    fixed_charge keeps the configured ring charge; resonant re-solves the
    charge so the effective detuning sits on the mechanical sideband.
    """
    if ring_mode not in RING_MODES:
        raise ValueError(f"ring_mode must be one of {RING_MODES}")
    derived = derive_constants(cfg)
    if delta0 is None:
        delta0 = delta0_from_config(cfg, derived)
    c0 = cfg.ring_offset_c0
    if ring_mode == "resonant":
        res = solve_resonant_ring_charge(derived, delta0, c0)
        derived = dataclasses.replace(
            derived, A_q=res.op.A_q, ring_charge=res.ring_charge)
        op = res.op
    else:
        op = solve_xs(derived, delta0, c0)
    completed = derived.with_damping(op.omega_m)
    model = build_model(op, completed)
    return PointSolution(
        derived=completed, op=op, model=model,
        ring_charge=completed.ring_charge,
        field_at_xs=ring_field_value(completed.ring_charge,
                                     cfg.ring_radius, c0, op.x_s))


def thread_count() -> int:
    """Worker count for sweeps; SIM_THREADS caps it, default serial."""
    raw = os.environ.get("SIM_THREADS", "1").strip()
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


def map_ordered(func, items):
    """Apply func over items, possibly in threads, preserving order."""
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))
