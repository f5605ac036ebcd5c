"""Quasi-exactly solvable band edges of the associated Lamé potential.

``V(x) = a(a+1) m sn^2(x, m) + b(b+1) m cn^2(x, m) / dn^2(x, m)``

The analytic side (:mod:`lameqes.qes`, :mod:`lameqes.spectral`) builds the
band-edge energies and eigenfunctions from the pole structure of the
logarithmic derivative; :mod:`lameqes.verify` checks them against a
Floquet-discriminant computation that shares no code with it beyond the
potential itself.
"""
from .elliptic import EllipticTriple, complete_K, jacobi
from .kernels import BACKEND as KERNEL_BACKEND
from .qes import (
    MixedParityError,
    ParameterError,
    PotentialParams,
    ResidueSet,
    SolvabilityRecord,
    classify_period,
    residue_sets,
    solvability_records,
)
from .spectral import (
    BandEdgeSolution,
    Pencil,
    build_pencil,
    dedupe_degeneracies,
    eval_wavefunction,
    schrodinger_residual,
    solve,
    solve_pencil,
)
from .verify import crosscheck, discriminant_trace, find_band_edges, monodromy, potential_value

__version__ = "0.1.0"
