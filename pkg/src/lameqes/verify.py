"""Floquet-discriminant oracle for the associated Lamé band structure.

The potential has period ``2K(m)`` (a shift by ``K`` swaps the two terms,
so ``K`` is only a period when ``a == b``).  The transfer matrix over one
period is obtained by RK4 from the two canonical initial conditions; its
trace ``delta(E)`` satisfies ``|delta| <= 2`` inside allowed bands and
``delta = +2`` / ``-2`` at edges whose states are ``2K``-periodic /
``2K``-antiperiodic (i.e. of period ``4K``).

This module knows nothing about the residue construction; it only consumes
energies and period labels to compare against.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq

from .elliptic import complete_K
from .kernels import get_backend
from .potential import potential_value
from .qes import PotentialParams

__all__ = [
    "BandEdge",
    "CrosscheckEntry",
    "CrosscheckReport",
    "DiscriminantSample",
    "Monodromy",
    "ResolutionWarning",
    "crosscheck",
    "discriminant",
    "discriminant_trace",
    "find_band_edges",
    "monodromy",
    "potential_value",
]

DEFAULT_STEPS = 20000
SCAN_POINTS = 4000
TANGENT_TOL = 1e-6
# Closed gaps come out at |delta| - 2 ~ 1e-14 for any steps >= 1000, while
# genuinely open gaps converge to a fixed depth; anything deeper than this is
# treated as open even inside TANGENT_TOL.
GAP_FLOOR = 1e-10
WARN_BAND = 1e-4
EDGE_XTOL = 1e-10
ON_EDGE_TOL = 1e-5
MATCH_TOL = 1e-6

PERIODIC = "periodic_2K"
ANTIPERIODIC = "antiperiodic_4K"
DEGENERATE_2K = "degenerate_2K"
DEGENERATE_4K = "degenerate_4K"


class ResolutionWarning(UserWarning):
    """An oracle result sits at the edge of what the discretisation resolves."""


class Monodromy(NamedTuple):
    m11: float
    m12: float
    m21: float
    m22: float

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def trace(self) -> float:
        return self.m11 + self.m22


class DiscriminantSample(NamedTuple):
    energy: float
    delta: float


class BandEdge(NamedTuple):
    energy: float
    kind: str
    delta: float


@lru_cache(maxsize=16)
def _lattice(p: PotentialParams, steps: int):
    period = 2.0 * complete_K(p.m)
    h = period / steps
    nodes = potential_value(np.arange(2 * steps + 1) * (0.5 * h), p)
    nodes = np.ascontiguousarray(nodes, dtype=float)
    nodes.setflags(write=False)
    return nodes, h


def _check_steps(steps: int) -> int:
    steps = int(steps)
    if steps < 1:
        raise ValueError(f"steps must be positive, got {steps}")
    if steps < 1000:
        warnings.warn(
            f"steps={steps} is below 1000; discriminant values may not resolve band edges",
            ResolutionWarning,
            stacklevel=3,
        )
    return steps


def _run(p: PotentialParams, energies, steps: int, backend=None, potential=None):
    if potential is None:
        nodes, h = _lattice(p, steps)
    else:
        period = 2.0 * complete_K(p.m)
        h = period / steps
        nodes = np.ascontiguousarray(potential(np.arange(2 * steps + 1) * (0.5 * h)), dtype=float)
        if nodes.shape != (2 * steps + 1,):
            nodes = np.broadcast_to(nodes, (2 * steps + 1,)).copy()
    out = get_backend(backend).propagate(nodes, h, energies)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("monodromy integration produced a non-finite state")
    return out


def monodromy(
    E: float,
    p: PotentialParams,
    steps: int = DEFAULT_STEPS,
    *,
    potential: Callable[[np.ndarray], np.ndarray] | None = None,
    backend: str | None = None,
) -> Monodromy:
    """Transfer matrix of ``psi'' = (V - E) psi`` across ``[0, 2K]``.

    ``potential`` replaces ``V`` (it receives an array of ``x`` values);
    it exists so the integrator can be checked against closed forms.
    """
    steps = _check_steps(steps)
    row = _run(p, [float(E)], steps, backend, potential)[0]
    return Monodromy(*map(float, row[:4]))


def discriminant(energies, p: PotentialParams, steps: int = DEFAULT_STEPS, *, backend=None):
    """``(delta, d delta / dE)`` at each energy."""
    return _discriminant(energies, p, _check_steps(steps), backend)


def _discriminant(energies, p, steps, backend):
    e = np.atleast_1d(np.asarray(energies, dtype=float))
    out = _run(p, e, steps, backend)
    return out[:, 0] + out[:, 3], out[:, 4]


def discriminant_trace(
    p: PotentialParams,
    e_min: float,
    e_max: float,
    samples: int,
    steps: int = DEFAULT_STEPS,
    *,
    backend: str | None = None,
) -> list[DiscriminantSample]:
    """``delta(E)`` on a uniform energy grid including both endpoints."""
    if not e_min < e_max:
        raise ValueError("need e_min < e_max")
    if samples < 2:
        raise ValueError("need at least two samples")
    grid = np.linspace(e_min, e_max, samples)
    delta, _ = discriminant(grid, p, steps, backend=backend)
    return [DiscriminantSample(float(e), float(d)) for e, d in zip(grid, delta)]


def find_band_edges(
    p: PotentialParams,
    e_min: float,
    e_max: float,
    *,
    scan_points: int = SCAN_POINTS,
    steps: int = DEFAULT_STEPS,
    backend: str | None = None,
) -> list[BandEdge]:
    """All energies in ``[e_min, e_max]`` where ``delta = +-2``.

    Transversal crossings are bracketed on a coarse grid and refined by
    bracketing root search to ``1e-10``.  Local extrema of ``delta`` close
    to ``+-2`` are refined by solving ``d delta / dE = 0``.  An extremum
    within ``1e-6`` of ``+-2`` is a closed gap, reported once as a
    degenerate (double) edge, unless it overshoots by more than
    ``GAP_FLOOR`` and both crossings of the resulting narrow gap can be
    bracketed.
    """
    if not e_min < e_max:
        raise ValueError("need e_min < e_max")
    steps = _check_steps(steps)
    grid = np.linspace(e_min, e_max, scan_points + 1)
    delta, ddelta = _discriminant(grid, p, steps, backend)

    def f(e):
        return _discriminant([e], p, steps, backend)[0][0]

    def df(e):
        return _discriminant([e], p, steps, backend)[1][0]

    crossings: dict[float, list[float]] = {2.0: [], -2.0: []}
    for target in (2.0, -2.0):
        g = delta - target
        for i in range(scan_points):
            if g[i] == 0.0:
                crossings[target].append(float(grid[i]))
            elif g[i] * g[i + 1] < 0.0:
                root = brentq(lambda e: f(e) - target, grid[i], grid[i + 1], xtol=EDGE_XTOL * 0.1)
                crossings[target].append(float(root))
        if g[-1] == 0.0:
            crossings[target].append(float(grid[-1]))

    degenerate: list[BandEdge] = []
    spacing = grid[1] - grid[0]
    for i in range(scan_points):
        if ddelta[i] * ddelta[i + 1] >= 0.0:
            continue
        is_max = ddelta[i] > 0.0
        target = 2.0 if is_max else -2.0
        near = min(abs(delta[i] - target), abs(delta[i + 1] - target))
        if near > 0.05:
            continue
        e_star = float(brentq(df, grid[i], grid[i + 1], xtol=1e-13 * max(1.0, abs(grid[i]))))
        d_star = float(f(e_star))
        excess = (d_star - target) if is_max else (target - d_star)
        # excess > 0: the extremum pokes into the forbidden region (open gap)
        if GAP_FLOOR < excess <= TANGENT_TOL:
            # shallower than the tangency tolerance but well above the
            # integration error: resolve it as two transversal edges if we can
            if _add_gap_crossings(crossings[target], f, target, e_star, grid, delta, i, is_max) == 2:
                continue
        if abs(excess) <= TANGENT_TOL:
            kind = DEGENERATE_2K if is_max else DEGENERATE_4K
            degenerate.append(BandEdge(e_star, kind, d_star))
            window = 2.0 * spacing
            crossings[target] = [c for c in crossings[target] if abs(c - e_star) > window]
            continue
        if abs(excess) <= WARN_BAND:
            warnings.warn(
                f"extremum of delta at E={e_star:.10f} is {excess:+.2e} from {target:+.0f}; "
                "cannot decide between a closed and a narrow open gap at this resolution",
                ResolutionWarning,
                stacklevel=2,
            )
        if excess > 0.0:
            _add_gap_crossings(crossings[target], f, target, e_star, grid, delta, i, is_max)

    edges = [BandEdge(e, PERIODIC, 2.0) for e in crossings[2.0]]
    edges += [BandEdge(e, ANTIPERIODIC, -2.0) for e in crossings[-2.0]]
    edges += degenerate
    edges = [BandEdge(float(e), k, float(d)) for e, k, d in edges]
    edges.sort(key=lambda b: b.energy)
    return edges


def _add_gap_crossings(found, f, target, e_star, grid, delta, i, is_max):
    # Both crossings of a narrow open gap may sit inside one grid cell.
    inside = (lambda d: d < target) if is_max else (lambda d: d > target)
    j = i
    while j > 0 and not inside(delta[j]):
        j -= 1
    k = i + 1
    while k < len(grid) - 1 and not inside(delta[k]):
        k += 1
    located = 0
    for lo, hi in ((grid[j], e_star), (e_star, grid[k])):
        flo, fhi = f(lo) - target, f(hi) - target
        if flo * fhi >= 0.0:
            continue
        root = float(brentq(lambda e: f(e) - target, lo, hi, xtol=EDGE_XTOL * 0.1))
        located += 1
        if all(abs(root - c) > 1e-9 for c in found):
            found.append(root)
    found.sort()
    return located


@dataclass
class CrosscheckEntry:
    energy: float
    set_id: int
    period_class: str
    delta: float
    nearest_edge: float | None
    nearest_kind: str | None
    checks: dict = field(default_factory=dict)
    messages: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "set_id": self.set_id,
            "period_class": self.period_class,
            "delta": self.delta,
            "nearest_edge": self.nearest_edge,
            "nearest_kind": self.nearest_kind,
            "checks": dict(self.checks),
            "messages": list(self.messages),
            "passed": self.passed,
        }


@dataclass
class CrosscheckReport:
    steps: int
    entries: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    messages: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.entries) and all(e.passed for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "steps": self.steps,
            "entries": [e.to_dict() for e in self.entries],
            "edges": [{"energy": b.energy, "kind": b.kind, "delta": b.delta} for b in self.edges],
            "messages": list(self.messages),
        }


def crosscheck(
    analytic: Sequence,
    p: PotentialParams,
    steps: int = DEFAULT_STEPS,
    *,
    scan_points: int = SCAN_POINTS,
    backend: str | None = None,
) -> CrosscheckReport:
    """Compare analytic band edges with the discriminant oracle.

    Every solution must have ``||delta(E)| - 2| <= 1e-5``, a numerically
    located edge within ``1e-6``, and a ``delta`` sign matching its period
    class (``2K`` with ``+2``, ``4K`` with ``-2``).  Solutions flagged as
    degenerate must land on a tangential edge.  Failures are recorded in
    the report; nothing is raised.
    """
    if not analytic:
        raise ValueError("crosscheck needs at least one analytic solution")
    report = CrosscheckReport(steps=int(steps))
    energies = np.array([s.energy for s in analytic], dtype=float)
    lo = float(energies.min()) - 1.0
    hi = float(energies.max()) + 1.0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        edges = find_band_edges(p, lo, hi, scan_points=scan_points, steps=steps, backend=backend)
        deltas, _ = _discriminant(energies, p, steps, backend)
    report.edges = edges
    report.messages = list(dict.fromkeys(str(w.message) for w in caught))

    for s, d in zip(analytic, deltas):
        d = float(d)
        period = s.record.period_class
        entry = CrosscheckEntry(
            energy=float(s.energy),
            set_id=s.record.set_id,
            period_class=period,
            delta=d,
            nearest_edge=None,
            nearest_kind=None,
        )
        gap = abs(abs(d) - 2.0)
        entry.checks["on_edge"] = gap <= ON_EDGE_TOL
        if not entry.checks["on_edge"]:
            entry.messages.append(f"||delta|-2| = {gap:.3e} exceeds {ON_EDGE_TOL:g}")
        if edges:
            near = min(edges, key=lambda b: abs(b.energy - s.energy))
            entry.nearest_edge = near.energy
            entry.nearest_kind = near.kind
            dist = abs(near.energy - s.energy)
            entry.checks["matched_edge"] = dist <= MATCH_TOL
            if not entry.checks["matched_edge"]:
                entry.messages.append(f"nearest numerical edge {dist:.3e} away (limit {MATCH_TOL:g})")
            entry.checks["edge_kind"] = near.kind.endswith(period)
            if not entry.checks["edge_kind"]:
                entry.messages.append(f"edge kind {near.kind} disagrees with period class {period}")
            if s.degeneracy_partners:
                entry.checks["tangential"] = near.kind.startswith("degenerate")
                if not entry.checks["tangential"]:
                    entry.messages.append("degenerate solution matched to a transversal edge")
        else:
            entry.checks["matched_edge"] = False
            entry.messages.append("oracle found no band edges in range")
        expected_sign = 1.0 if period == "2K" else -1.0
        entry.checks["period_sign"] = math.copysign(1.0, d) == expected_sign
        if not entry.checks["period_sign"]:
            entry.messages.append(f"delta={d:+.6f} has the wrong sign for period {period}")
        report.entries.append(entry)
    return report
