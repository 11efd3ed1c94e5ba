"""Finite separable decompositions: verification and the phase-average families.

A separable decomposition is a convex combination of pure product states.
On an m-dimensional composite space at most m^2 terms are ever needed, and
that bound is enforced structurally here. The two built-in families realize
circle averages of product projectors as exact finite sums: a uniform
n-point sum over the circle reproduces the average exactly as soon as every
nonzero phase frequency in the integrand survives reduction mod n.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np

from . import matkit
from .matkit import ContractViolation
from .statefab import BipartiteState, ProductVector, StateFormatError

WEIGHT_SUM_TOL = 1e-12
NORMALIZATION_TOL = 1e-10

# Highest phase frequency appearing in each builtin integrand.
_MAX_FREQUENCY = {"rho_symmetric": 6, "sigma_symmetric": 4}


@dataclass(frozen=True)
class SeparableDecomposition:
    """Weighted product-state ensemble with the m^2 term bound enforced."""

    dimA: int
    dimB: int
    terms: tuple[tuple[float, np.ndarray, np.ndarray], ...]

    def __post_init__(self):
        m = self.dimA * self.dimB
        if len(self.terms) > m * m:
            raise ContractViolation(
                f"{len(self.terms)} terms exceed the bound {m * m} for an {m}-dimensional space")
        cleaned = []
        total = 0.0
        for w, phi, chi in self.terms:
            w = float(w)
            if w <= 0.0:
                raise ContractViolation("weights must be positive")
            phi = matkit.as_cvector(phi)
            chi = matkit.as_cvector(chi)
            if phi.shape[0] != self.dimA or chi.shape[0] != self.dimB:
                raise ContractViolation("term factor dimensions do not match the declared dims")
            for v in (phi, chi):
                if abs(float(np.real(np.vdot(v, v))) - 1.0) > NORMALIZATION_TOL:
                    raise ContractViolation("term factors must be normalized")
            total += w
            cleaned.append((w, phi, chi))
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ContractViolation(f"weights sum to {total:.17g}, not 1")
        object.__setattr__(self, "terms", tuple(cleaned))

    def __len__(self) -> int:
        return len(self.terms)

    def reconstruct(self) -> np.ndarray:
        n = self.dimA * self.dimB
        acc = np.zeros((n, n), dtype=np.complex128)
        for w, phi, chi in self.terms:
            v = np.kron(phi, chi)
            acc += w * np.outer(v, v.conj())
        return acc

    def product_vectors(self) -> list[ProductVector]:
        return [ProductVector(phi, chi) for _, phi, chi in self.terms]


def verify_decomposition(state: BipartiteState, d: SeparableDecomposition,
                         tol: float = 1e-10) -> tuple[bool, float]:
    """Check that the ensemble reassembles the state entrywise.

    Returns (ok, max deviation). Dimension mismatches raise.
    """
    if (state.dimA, state.dimB) != (d.dimA, d.dimB):
        raise ContractViolation(
            f"dimension mismatch: state is {state.dimA}x{state.dimB}, "
            f"decomposition is {d.dimA}x{d.dimB}")
    deviation = float(np.max(np.abs(d.reconstruct() - state.rho)))
    return deviation <= tol, deviation


def fourier_decomposition(which: str, n_points: int) -> SeparableDecomposition:
    """Exact finite realization of the circle-averaged product ensembles.

    which = "rho_symmetric": terms (1/n) P_{phi_k} (x) P_{conj(phi_k)} with
    phi_k = (1, e^{i t}, e^{-2 i t})/sqrt(3) at t = 2 pi k / n; exact for
    n >= 7 (frequencies up to 6).

    which = "sigma_symmetric": terms (1/n) P_{psi_k} (x) P_{Psi_k} with
    psi_k = (1, e^{i t})/sqrt(2) and
    Psi_k = (1, e^{-i t}, e^{-2 i t}, e^{-3 i t})/2; exact for n >= 5
    (frequencies up to 4).
    """
    if which not in _MAX_FREQUENCY:
        raise ContractViolation(f"unknown builtin decomposition: {which!r}")
    threshold = _MAX_FREQUENCY[which] + 1
    if n_points < threshold:
        raise ContractViolation(
            f"{which} needs at least {threshold} points for the finite sum to be exact; "
            f"got {n_points}")
    w = 1.0 / n_points
    terms = []
    for k in range(n_points):
        t = 2.0 * math.pi * k / n_points
        z = cmath.exp(1j * t)
        if which == "rho_symmetric":
            phi = np.array([1.0, z, z ** -2], dtype=np.complex128) / math.sqrt(3.0)
            chi = phi.conj()
        else:
            phi = np.array([1.0, z], dtype=np.complex128) / math.sqrt(2.0)
            chi = np.array([1.0, z ** -1, z ** -2, z ** -3], dtype=np.complex128) / 2.0
        terms.append((w, phi, chi))
    da, db = (3, 3) if which == "rho_symmetric" else (2, 4)
    return SeparableDecomposition(da, db, tuple(terms))


def ensemble_in_range(state: BipartiteState, vectors, tol: float = 1e-7) -> list[bool]:
    """Membership of each vector in the range of the state (relative residual)."""
    from .sepcrit import range_of  # local import to avoid a cycle

    ran = range_of(state.rho)
    out = []
    for v in vectors:
        vec = v.embed() if isinstance(v, ProductVector) else matkit.as_cvector(v)
        out.append(ran.contains(vec, tol))
    return out


# ---------------------------------------------------------------------------
# Decomposition file format
# ---------------------------------------------------------------------------

_ALLOWED_KEYS = {"dims", "terms"}
_ALLOWED_TERM_KEYS = {"w", "phi", "chi"}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _vec_json(v: np.ndarray) -> str:
    return "[" + ", ".join(f"[{_fmt(z.real)}, {_fmt(z.imag)}]" for z in v) + "]"


def write_decomposition(d: SeparableDecomposition) -> str:
    lines = ["{", f'  "dims": [{d.dimA}, {d.dimB}],', '  "terms": [']
    for i, (w, phi, chi) in enumerate(d.terms):
        comma = "," if i < len(d.terms) - 1 else ""
        lines.append(
            f'    {{"w": {_fmt(w)}, "phi": {_vec_json(phi)}, "chi": {_vec_json(chi)}}}{comma}')
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _parse_cvector(obj, what: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise StateFormatError(f"{what} must be a nonempty list of [re, im] pairs")
    out = np.zeros(len(obj), dtype=np.complex128)
    for i, cell in enumerate(obj):
        if (not isinstance(cell, list) or len(cell) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in cell)):
            raise StateFormatError(f"{what}[{i}] must be a [re, im] number pair")
        out[i] = complex(cell[0], cell[1])
    return out


def read_decomposition(text: str) -> SeparableDecomposition:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise StateFormatError("top level must be a JSON object")
    unknown = set(obj) - _ALLOWED_KEYS
    if unknown:
        raise StateFormatError(f"unknown fields: {sorted(unknown)}")
    dims = obj.get("dims")
    if (not isinstance(dims, list) or len(dims) != 2
            or not all(isinstance(d, int) and d >= 1 for d in dims)):
        raise StateFormatError("'dims' must be two positive integers")
    terms_obj = obj.get("terms")
    if not isinstance(terms_obj, list) or not terms_obj:
        raise StateFormatError("'terms' must be a nonempty list")
    terms = []
    for i, t in enumerate(terms_obj):
        if not isinstance(t, dict):
            raise StateFormatError(f"terms[{i}] must be an object")
        unknown = set(t) - _ALLOWED_TERM_KEYS
        if unknown:
            raise StateFormatError(f"terms[{i}] has unknown fields: {sorted(unknown)}")
        if "w" not in t or "phi" not in t or "chi" not in t:
            raise StateFormatError(f"terms[{i}] needs 'w', 'phi' and 'chi'")
        w = t["w"]
        if not isinstance(w, (int, float)) or isinstance(w, bool):
            raise StateFormatError(f"terms[{i}].w must be a number")
        phi = _parse_cvector(t["phi"], f"terms[{i}].phi")
        chi = _parse_cvector(t["chi"], f"terms[{i}].chi")
        terms.append((float(w), phi, chi))
    try:
        return SeparableDecomposition(dims[0], dims[1], tuple(terms))
    except ContractViolation as exc:
        raise StateFormatError(str(exc)) from exc
