"""Band-edge energies and eigenfunctions of the quasi-exactly solvable sector.

For each admissible residue set the polynomial factor ``P_n`` satisfies,
after clearing denominators with ``R(t) = (t^2 - 1)(m t^2 - 1)``,

    R P'' + 2 S_num P' + (Q(t) + E) P = 0,

where ``S_num / R`` is the pole sum of the logarithmic derivative and
``Q`` is a quadratic polynomial in ``t``.  Matching powers of ``t`` over the
monomials of the right parity gives a square pencil ``M0 + E M1`` whose
singular values of ``E`` are the band-edge energies of the unshifted
potential.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
from numpy.polynomial import Chebyshev
from scipy.optimize import brentq

from . import _poly as bp
from .elliptic import complete_K, jacobi_arrays
from .potential import potential_value
from .qes import PotentialParams, SolvabilityRecord, solvability_records

__all__ = [
    "BandEdgeSolution",
    "DefectivePencilError",
    "DerivationError",
    "Pencil",
    "build_pencil",
    "dedupe_degeneracies",
    "determinant_polynomial",
    "energy_bracket",
    "eval_wavefunction",
    "null_space",
    "polynomial_ode",
    "schrodinger_residual",
    "solve",
    "solve_pencil",
]

SCAN_POINTS = 2000
DEGENERACY_RTOL = 1e-9
FINGERPRINT_POINTS = 32
NULL_RESIDUAL_RTOL = 1e-10


class DerivationError(RuntimeError):
    """Coefficient matching did not produce a consistent square system."""


class DefectivePencilError(RuntimeError):
    """Determinant of the pencil has the wrong degree in ``E``."""


@dataclass(frozen=True)
class Pencil:
    M0: np.ndarray
    M1: np.ndarray
    basis_degrees: tuple[int, ...]
    # exact entries of M0 as polynomials in m, {power: Fraction}
    exact_M0: tuple[tuple[dict, ...], ...] = ()

    @property
    def dim(self) -> int:
        return len(self.basis_degrees)


@dataclass(frozen=True)
class BandEdgeSolution:
    energy_unshifted: float
    energy: float
    coeffs: tuple[float, ...]
    basis_degrees: tuple[int, ...]
    record: SolvabilityRecord
    params: PotentialParams
    degeneracy_partners: tuple[int, ...] = ()

    @property
    def set_id(self) -> int:
        return self.record.set_id

    def dense_coefficients(self) -> np.ndarray:
        """Coefficients of ``P_n`` in ascending powers of ``t``, length ``n + 1``."""
        out = np.zeros(self.record.n + 1)
        for k, c in zip(self.basis_degrees, self.coeffs):
            out[k] = c
        return out

    def P(self, t):
        return np.polynomial.polynomial.polyval(t, self.dense_coefficients())


# -- derivation --------------------------------------------------------------

_T2_MINUS_1 = bp.poly([((2, 0), 1), ((0, 0), -1)])
_MT2_MINUS_1 = bp.poly([((2, 1), 1), ((0, 0), -1)])
_R = bp.mul(_T2_MINUS_1, _MT2_MINUS_1)


def polynomial_ode(r: SolvabilityRecord, p: PotentialParams):
    """Exact coefficients ``(R, L, Q)`` of ``R P'' + L P' + (Q + E) P = 0``.

    The logarithmic derivative in ``t`` is taken as
    ``chi = S + P'/P`` with ``S = 2 b1 t/(t^2-1) + 2 m d1 t/(m t^2-1)`` and
    substituted into

        chi^2 + chi' + W(t) = 0,
        W = (m^2 t^2 + 2m(1 - 2b(b+1))) / (4 (1 - m t^2)^2)
            + (2 + t^2) / (4 (1 - t^2)^2)
            + (2E - m t^2 (1 + 2a(a+1))) / (2 (1 - t^2)(1 - m t^2)).

    Everything is multiplied by ``R^2`` and then divided by ``R`` exactly;
    a non-zero remainder means a double pole at ``t = +-1`` or
    ``t = +-1/sqrt(m)`` survived, i.e. the residues are inconsistent.
    """
    a, b = p.a, p.b
    b1, d1 = r.b1, r.d1
    t1 = bp.poly([((1, 0), 1)])
    # R * S
    s_num = bp.add(
        bp.scale(bp.mul(t1, _MT2_MINUS_1), 2 * b1),
        bp.scale(bp.mul(bp.poly([((1, 1), 1)]), _T2_MINUS_1), 2 * d1),
    )
    dR = bp.dt(_R)
    # R^2 * W without the energy term
    w_b = bp.poly([((2, 2), 1), ((0, 1), 2 * (1 - 2 * b * (b + 1)))])
    w_t = bp.poly([((0, 0), 2), ((2, 0), 1)])
    w_a = bp.poly([((2, 1), -(1 + 2 * a * (a + 1)))])
    r2w = bp.add(
        bp.scale(bp.mul(w_b, bp.mul(_T2_MINUS_1, _T2_MINUS_1)), Fraction(1, 4)),
        bp.scale(bp.mul(w_t, bp.mul(_MT2_MINUS_1, _MT2_MINUS_1)), Fraction(1, 4)),
        bp.scale(bp.mul(w_a, _R), Fraction(1, 2)),
    )
    numer = bp.add(
        bp.mul(s_num, s_num),
        bp.mul(bp.dt(s_num), _R),
        bp.neg(bp.mul(s_num, dR)),
        r2w,
    )
    q, rem = bp.divide_unit_constant(numer, _R)
    if rem:
        raise DerivationError(
            f"set {r.set_id}: double poles do not cancel for b1={b1}, d1={d1} "
            f"(a={a}, b={b})"
        )
    return _R, bp.scale(s_num, 2), q


def build_pencil(r: SolvabilityRecord, p: PotentialParams) -> Pencil:
    """Coefficient-matching pencil ``M0 + E M1`` for one residue set."""
    R, L, Q = polynomial_ode(r, p)
    n = r.n
    basis = tuple(range(n % 2, n + 1, 2))
    index = {k: i for i, k in enumerate(basis)}
    dim = len(basis)

    exact = [[{} for _ in range(dim)] for _ in range(dim)]
    m1 = np.zeros((dim, dim))
    for col, k in enumerate(basis):
        image = bp.mul(Q, bp.poly([((k, 0), 1)]))
        if k >= 1:
            image = bp.add(image, bp.scale(bp.mul(L, bp.poly([((k - 1, 0), 1)])), k))
        if k >= 2:
            image = bp.add(image, bp.scale(bp.mul(R, bp.poly([((k - 2, 0), 1)])), k * (k - 1)))
        for (i, j), c in image.items():
            if i not in index:
                raise DerivationError(
                    f"set {r.set_id}: t^{i} survives outside the degree-{n} basis; "
                    "matched system would not be square"
                )
            row = exact[index[i]][col]
            row[j] = row.get(j, Fraction(0)) + c
        m1[col, col] = 1.0
    m0 = np.array([[bp.eval_m(exact[i][j], p.m) for j in range(dim)] for i in range(dim)])
    frozen = tuple(tuple(dict(e) for e in row) for row in exact)
    return Pencil(M0=m0, M1=m1, basis_degrees=basis, exact_M0=frozen)


# -- determinant and roots ---------------------------------------------------

def energy_bracket(p: PotentialParams) -> tuple[float, float]:
    scale = 10.0 * float(p.a * (p.a + 1) + p.b * (p.b + 1)) * max(p.m, 1.0) + 10.0
    return -scale, scale


def _det(pc: Pencil, energies):
    e = np.asarray(energies, dtype=float)
    mats = pc.M0[None, :, :] + e.reshape(-1, 1, 1) * pc.M1[None, :, :]
    out = np.linalg.det(mats)
    return out.reshape(e.shape)


def _ddet(pc: Pencil, energy: float) -> float:
    # Jacobi's formula; only used away from roots
    a = pc.M0 + energy * pc.M1
    return float(np.linalg.det(a) * np.trace(np.linalg.solve(a, pc.M1)))


def determinant_polynomial(pc: Pencil, bracket: tuple[float, float]) -> Chebyshev:
    """``det(M0 + E M1)`` interpolated at ``dim + 1`` Chebyshev energies."""
    poly = Chebyshev.interpolate(lambda e: _det(pc, e), pc.dim, domain=list(bracket))
    lead = float(np.linalg.det(pc.M1))
    half_width = 0.5 * (bracket[1] - bracket[0])
    expected_top = lead * half_width**pc.dim / 2.0 ** (pc.dim - 1)
    top = poly.coef[-1]
    if abs(top) <= 1e-10 * np.max(np.abs(poly.coef)) or abs(top - expected_top) > 1e-6 * abs(expected_top) + 1e-300:
        raise DefectivePencilError(
            f"determinant degree differs from pencil dimension {pc.dim}"
        )
    return poly


def _hadamard_scale(pc: Pencil, energy: float) -> float:
    a = pc.M0 + energy * pc.M1
    return float(np.prod(np.linalg.norm(a, axis=1)))


def _polish(pc: Pencil, lo: float, hi: float) -> float:
    f = lambda e: float(_det(pc, e))
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    mid = 0.5 * (lo + hi)
    return brentq(f, lo, hi, xtol=1e-13 * max(1.0, abs(mid)), rtol=4 * np.finfo(float).eps, maxiter=200)


def _scan_roots(pc: Pencil, lo: float, hi: float, points: int) -> list[float]:
    grid = np.linspace(lo, hi, points + 1)
    vals = _det(pc, grid)
    roots = []
    for i in range(points):
        v0, v1 = vals[i], vals[i + 1]
        if v0 == 0.0:
            roots.append(grid[i])
        elif v0 * v1 < 0.0:
            roots.append(_polish(pc, grid[i], grid[i + 1]))
    if vals[-1] == 0.0:
        roots.append(grid[-1])

    # Hidden pairs / double roots: a local minimum of |det| without a sign
    # change is probed at the nearby critical point of det.
    absv = np.abs(vals)
    for i in range(1, points):
        if not (absv[i] < absv[i - 1] and absv[i] <= absv[i + 1]):
            continue
        if vals[i - 1] * vals[i] <= 0.0 or vals[i] * vals[i + 1] <= 0.0:
            continue
        a, b = grid[i - 1], grid[i + 1]
        try:
            da, db = _ddet(pc, a), _ddet(pc, b)
        except np.linalg.LinAlgError:
            continue
        if da * db >= 0.0:
            continue
        crit = brentq(lambda e: _ddet(pc, e), a, b, xtol=1e-14 * max(1.0, abs(a)))
        vc = float(_det(pc, crit))
        if vc * vals[i] < 0.0:
            roots.append(_polish(pc, a, crit))
            roots.append(_polish(pc, crit, b))
        elif abs(vc) <= 1e-12 * _hadamard_scale(pc, crit):
            roots.extend([crit, crit])
    return sorted(roots)


def _pencil_roots(pc: Pencil, bracket: tuple[float, float]) -> list[float]:
    points = SCAN_POINTS
    while True:
        roots = _scan_roots(pc, bracket[0], bracket[1], points)
        if len(roots) >= pc.dim or points >= 64 * SCAN_POINTS:
            break
        points *= 2
    if len(roots) != pc.dim:
        raise DefectivePencilError(
            f"found {len(roots)} real roots for a pencil of dimension {pc.dim}"
        )
    return roots


# -- null vectors ------------------------------------------------------------

def null_space(a: np.ndarray, rtol: float = 1e-8) -> list[np.ndarray]:
    """Null vectors of ``a`` by Gaussian elimination with full pivoting.

    Pivots smaller than ``rtol * max|a|`` are treated as zero.  At least
    one vector is always returned for a square input (the direction of the
    smallest pivot), since the caller hands in a numerically singular matrix.
    """
    u = np.array(a, dtype=float)
    rows, cols = u.shape
    perm = list(range(cols))
    scale = np.max(np.abs(u)) or 1.0
    rank = 0
    for k in range(min(rows, cols)):
        sub = np.abs(u[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        i += k
        j += k
        if sub.max() <= rtol * scale:
            break
        u[[k, i], :] = u[[i, k], :]
        u[:, [k, j]] = u[:, [j, k]]
        perm[k], perm[j] = perm[j], perm[k]
        u[k + 1:, k:] -= np.outer(u[k + 1:, k] / u[k, k], u[k, k:])
        rank += 1
    if rank == cols:
        # numerically full rank: drop the last pivot
        rank = cols - 1
    vectors = []
    for free in range(rank, cols):
        y = np.zeros(cols)
        y[free] = 1.0
        for k in range(rank - 1, -1, -1):
            y[k] = -(u[k, k + 1:] @ y[k + 1:]) / u[k, k]
        x = np.zeros(cols)
        x[perm] = y
        vectors.append(x)
    return vectors


def _normalise(coeffs: np.ndarray, basis: tuple[int, ...]) -> np.ndarray:
    mags = np.abs(coeffs)
    lead = max(i for i in range(len(coeffs)) if mags[i] > 1e-13 * mags.max())
    c = coeffs / abs(coeffs[lead])
    value = float(np.sum(c))  # P(1)
    deriv = float(sum(k * ck for k, ck in zip(basis, c)))  # P'(1)
    ref = value if abs(value) > 1e-12 * np.sum(np.abs(c)) else deriv
    if ref < 0.0:
        c = -c
    return c


def solve_pencil(pc: Pencil, p: PotentialParams, r: SolvabilityRecord) -> list[BandEdgeSolution]:
    """All real band-edge energies of one pencil with their polynomials."""
    bracket = energy_bracket(p)
    determinant_polynomial(pc, bracket)  # degree check
    out = []
    for e in _pencil_roots(pc, bracket):
        mat = pc.M0 + e * pc.M1
        for vec in null_space(mat):
            resid = np.linalg.norm(mat @ vec)
            if resid > NULL_RESIDUAL_RTOL * max(np.linalg.norm(mat), 1.0) * np.linalg.norm(vec):
                raise DerivationError(
                    f"set {r.set_id}: null-vector residual {resid:.3e} at E={e!r}"
                )
            c = _normalise(vec, pc.basis_degrees)
            out.append(
                BandEdgeSolution(
                    energy_unshifted=float(e),
                    energy=float(e) + p.shift,
                    coeffs=tuple(float(v) for v in c),
                    basis_degrees=pc.basis_degrees,
                    record=r,
                    params=p,
                )
            )
    out.sort(key=lambda s: s.energy)
    return out


# -- wave functions ------------------------------------------------------------

def _psi_from(s: BandEdgeSolution, sn, cn, dn):
    # Horner in the dtype of ``sn`` so extended-precision inputs stay extended
    poly = np.zeros_like(sn)
    for c in s.dense_coefficients()[::-1]:
        poly = poly * sn + c
    return cn ** int(s.record.alpha) * dn ** sn.dtype.type(float(s.record.beta)) * poly


def eval_wavefunction(s: BandEdgeSolution, x, p: PotentialParams | None = None):
    """``cn(x)**alpha * dn(x)**beta * P_n(sn(x))``."""
    p = s.params if p is None else p
    sn, cn, dn = jacobi_arrays(x, p.m)
    psi = _psi_from(s, np.atleast_1d(sn), np.atleast_1d(cn), np.atleast_1d(dn))
    return float(psi[0]) if np.ndim(x) == 0 else psi


def _small_argument_triple(d: float, m: float):
    # Maclaurin series of (sn, cn, dn); the first omitted terms are O(d^7)
    d = np.longdouble(d)
    m = np.longdouble(m)
    d2 = d * d
    sn = d * (1 - (1 + m) * d2 / 6 + (1 + 14 * m + m * m) * d2 * d2 / 120)
    cn = 1 - d2 / 2 + (1 + 4 * m) * d2 * d2 / 24 - (1 + 44 * m + 16 * m * m) * d2**3 / 720
    dn = 1 - m * d2 / 2 + m * (4 + m) * d2 * d2 / 24 - m * (16 + 44 * m + m * m) * d2**3 / 720
    return sn, cn, dn


def schrodinger_residual(s: BandEdgeSolution, p: PotentialParams, xs, h: float = 1e-4) -> float:
    """Scaled defect of ``-psi'' + V psi - E psi`` on the points ``xs``.

    ``psi''`` uses the five-point central stencil with step ``h``; the
    maximum defect is divided by ``max |psi|`` over ``xs``.

    At ``h = 1e-4`` the stencil divides by ``h**2 = 1e-8``, so plain double
    rounding (both in forming ``x + j h`` and in evaluating ``psi``) would
    leave a floor near ``1e-6``.  The off-centre nodes are therefore built
    from the centre values with the addition theorem and evaluated in
    ``numpy.longdouble``; errors shared by all five nodes are not amplified.
    On platforms where ``longdouble`` is plain double the floor returns.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ld = np.longdouble
    m = ld(p.m)
    su, cu, du = (np.asarray(v, dtype=ld) for v in jacobi_arrays(xs, p.m))
    nodes = {}
    for j in (-2, -1, 0, 1, 2):
        sv, cv, dv = _small_argument_triple(j * h, p.m)
        den = 1 - m * su * su * sv * sv
        sn = (su * cv * dv + sv * cu * du) / den
        cn = (cu * cv - su * sv * du * dv) / den
        dn = (du * dv - m * su * sv * cu * cv) / den
        nodes[j] = _psi_from(s, sn, cn, dn)
    psi = nodes[0]
    d2 = (-nodes[2] + 16 * nodes[1] - 30 * psi + 16 * nodes[-1] - nodes[-2]) / (12 * ld(h) * ld(h))
    v = np.asarray(potential_value(xs, p), dtype=ld)
    defect = -d2 + v * psi - ld(s.energy) * psi
    norm = np.max(np.abs(psi))
    if norm == 0.0:
        raise ValueError("wave function vanishes on every sample point")
    return float(np.max(np.abs(defect)) / norm)


# -- degeneracies --------------------------------------------------------------

def _fingerprint(s: BandEdgeSolution) -> np.ndarray:
    period = 4.0 * complete_K(s.params.m)
    xs = (np.arange(FINGERPRINT_POINTS) + 0.37) * period / FINGERPRINT_POINTS
    v = eval_wavefunction(s, xs)
    v = v / np.linalg.norm(v)
    pivot = np.argmax(np.abs(v))
    return v if v[pivot] > 0 else -v


def dedupe_degeneracies(solutions: list[BandEdgeSolution]) -> list[BandEdgeSolution]:
    """Merge repeats of the same state and link genuinely degenerate ones.

    Energies within ``1e-9`` (relative) form a group; inside a group two
    solutions are the same state when their sampled, normalised wave
    functions coincide.  The first occurrence (lowest set id) is kept.
    """
    ordered = sorted(solutions, key=lambda s: (s.energy, s.set_id))
    groups: list[list[BandEdgeSolution]] = []
    for s in ordered:
        if groups:
            ref = groups[-1][0].energy
            if abs(s.energy - ref) <= DEGENERACY_RTOL * max(1.0, abs(ref)):
                groups[-1].append(s)
                continue
        groups.append([s])

    kept_groups = []
    for group in groups:
        kept, prints = [], []
        for s in group:
            fp = _fingerprint(s)
            if any(np.max(np.abs(fp - q)) <= 1e-6 for q in prints):
                continue
            kept.append(s)
            prints.append(fp)
        kept_groups.append(kept)

    out = []
    for kept in kept_groups:
        start = len(out)
        idx = tuple(range(start, start + len(kept)))
        for i, s in enumerate(kept):
            partners = tuple(j for j in idx if j != start + i)
            out.append(replace(s, degeneracy_partners=partners))
    return out


def solve_sets(p: PotentialParams) -> list[tuple[SolvabilityRecord, list[BandEdgeSolution]]]:
    """Per-record solutions before deduplication."""
    return [(r, solve_pencil(build_pencil(r, p), p, r)) for r in solvability_records(p)]


def solve(p: PotentialParams) -> list[BandEdgeSolution]:
    """Every analytically obtainable band edge of ``p``, sorted by energy."""
    raw = [s for _, sols in solve_sets(p) for s in sols]
    return dedupe_degeneracies(raw)
