"""Bipartite density matrices: construction, partial transposition, file I/O.

The composite index convention is first-factor-major throughout: basis
vector e_m (x) e_mu of a dimA x dimB system sits at index m * dimB + mu,
matching matkit.kron.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import matkit
from .matkit import ContractViolation, kron, projector

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9


class StateFormatError(ValueError):
    """A state file could not be parsed into a well-formed matrix."""


class StateInvariantError(ValueError):
    """A parsed matrix violates density-matrix invariants.

    The `failed` attribute lists which invariants failed ("hermitian",
    "trace", "psd").
    """

    def __init__(self, failed: list[str], detail: str):
        super().__init__(f"state invariant violation ({', '.join(failed)}): {detail}")
        self.failed = failed


@dataclass(frozen=True)
class BipartiteState:
    """Density matrix with factor dimensions; validated on construction."""

    dimA: int
    dimB: int
    rho: np.ndarray
    label: str = ""

    def __post_init__(self):
        if self.dimA < 1 or self.dimB < 1:
            raise ContractViolation("factor dimensions must be positive")
        n = self.dimA * self.dimB
        rho = matkit.as_cmatrix(self.rho, n, n)
        failed = []
        details = []
        scale = max(1.0, float(np.max(np.abs(rho))))
        herm_dev = float(np.max(np.abs(rho - rho.conj().T)))
        if herm_dev > HERMITICITY_TOL * scale:
            failed.append("hermitian")
            details.append(f"max|rho - rho^dag| = {herm_dev:.3e}")
        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > TRACE_TOL:
            failed.append("trace")
            details.append(f"trace = {tr:.17g}")
        if "hermitian" not in failed:
            eigvals, _ = matkit.eig_hermitian(0.5 * (rho + rho.conj().T))
            if eigvals.size and float(eigvals[0]) < -PSD_TOL:
                failed.append("psd")
                details.append(f"min eigenvalue = {float(eigvals[0]):.3e}")
        if failed:
            raise StateInvariantError(failed, "; ".join(details))
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.dimA * self.dimB


@dataclass(frozen=True)
class ProductVector:
    """A product vector phi (x) chi; factors kept separately, both nonzero."""

    phi: np.ndarray
    chi: np.ndarray

    def __post_init__(self):
        phi = matkit.as_cvector(self.phi)
        chi = matkit.as_cvector(self.chi)
        if not phi.any() or not chi.any():
            raise ContractViolation("product vector factors must be nonzero")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "chi", chi)

    def embed(self) -> np.ndarray:
        """Composite-space column vector kron(phi, chi)."""
        return np.kron(self.phi, self.chi)

    def normalized(self) -> "ProductVector":
        return ProductVector(
            self.phi / math.sqrt(float(np.real(np.vdot(self.phi, self.phi)))),
            self.chi / math.sqrt(float(np.real(np.vdot(self.chi, self.chi)))),
        )


def partial_transpose_matrix(rho: np.ndarray, dimA: int, dimB: int) -> np.ndarray:
    """Transpose the second-factor indices: out[(m,mu),(n,nu)] = rho[(m,nu),(n,mu)].

    The operation is an exact index permutation (an involution); it preserves
    Hermiticity and the trace.
    """
    n = dimA * dimB
    rho = matkit.as_cmatrix(rho, n, n)
    four = rho.reshape(dimA, dimB, dimA, dimB)
    return four.transpose(0, 3, 2, 1).reshape(n, n).copy()


def partial_transpose(state: BipartiteState) -> np.ndarray:
    return partial_transpose_matrix(state.rho, state.dimA, state.dimB)


# ---------------------------------------------------------------------------
# Named state families
# ---------------------------------------------------------------------------

def _e(i: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[i] = 1.0
    return v


def _max_entangled3() -> np.ndarray:
    return sum(np.kron(_e(i, 3), _e(i, 3)) for i in range(3)) / math.sqrt(3.0)


def _flag_projector() -> np.ndarray:
    """Diagonal projector of rank 5 on the 3x3 composite space.

    Complement of the four product-basis directions |00>, |11>, |22>, |20>.
    """
    q = np.eye(9, dtype=np.complex128)
    for i in range(3):
        q -= projector(np.kron(_e(i, 3), _e(i, 3)))
    q -= projector(np.kron(_e(2, 3), _e(0, 3)))
    return q


def _tilted_product3(a: float) -> np.ndarray:
    """e3 (x) (sqrt((1+a)/2) e1 + sqrt((1-a)/2) e3) on the 3x3 space."""
    chi = math.sqrt((1.0 + a) / 2.0) * _e(0, 3) + math.sqrt((1.0 - a) / 2.0) * _e(2, 3)
    return np.kron(_e(2, 3), chi)


def _rho_insep() -> np.ndarray:
    psi = _max_entangled3()
    return 0.375 * projector(psi) + 0.125 * _flag_projector()


def _rho_a(a: float) -> np.ndarray:
    return (8.0 * a * _rho_insep() + projector(_tilted_product3(a))) / (8.0 * a + 1.0)


def _rho_symmetric() -> np.ndarray:
    psi = _max_entangled3()
    diag = np.eye(9, dtype=np.complex128)
    for i in range(3):
        diag -= projector(np.kron(_e(i, 3), _e(i, 3)))
    return (3.0 * projector(psi) + diag) / 9.0


def _ladder_pairs() -> list[np.ndarray]:
    """The three entangled pair vectors (|0,i> + |1,i+1>)/sqrt(2) on 2x4."""
    out = []
    for i in range(3):
        v = (np.kron(_e(0, 2), _e(i, 4)) + np.kron(_e(1, 2), _e(i + 1, 4))) / math.sqrt(2.0)
        out.append(v)
    return out


def _sigma_insep() -> np.ndarray:
    acc = np.zeros((8, 8), dtype=np.complex128)
    for v in _ladder_pairs():
        acc += 2.0 * projector(v)
    acc += projector(np.kron(_e(0, 2), _e(3, 4)))
    return acc / 7.0


def _tilted_product24(b: float) -> np.ndarray:
    """e2 (x) (sqrt((1+b)/2) e1 + sqrt((1-b)/2) e4) on the 2x4 space."""
    chi = math.sqrt((1.0 + b) / 2.0) * _e(0, 4) + math.sqrt((1.0 - b) / 2.0) * _e(3, 4)
    return np.kron(_e(1, 2), chi)


def _sigma_b(b: float) -> np.ndarray:
    return (7.0 * b * _sigma_insep() + projector(_tilted_product24(b))) / (7.0 * b + 1.0)


def _sigma_symmetric() -> np.ndarray:
    acc = np.zeros((8, 8), dtype=np.complex128)
    for v in _ladder_pairs():
        acc += 2.0 * projector(v)
    acc += projector(np.kron(_e(0, 2), _e(3, 4)))
    acc += projector(np.kron(_e(1, 2), _e(0, 4)))
    return acc / 8.0


def _werner2x2(p: float) -> np.ndarray:
    singlet = (np.kron(_e(0, 2), _e(1, 2)) - np.kron(_e(1, 2), _e(0, 2))) / math.sqrt(2.0)
    return p * projector(singlet) + (1.0 - p) * np.eye(4, dtype=np.complex128) / 4.0


_FAMILY_DIMS = {
    "psi_me3": (3, 3),
    "q_proj": (3, 3),
    "rho_insep": (3, 3),
    "rho_a": (3, 3),
    "rho_symmetric": (3, 3),
    "sigma_insep": (2, 4),
    "sigma_b": (2, 4),
    "sigma_symmetric": (2, 4),
    "werner2x2": (2, 2),
}

_PARAMETRIC = {"rho_a", "sigma_b", "werner2x2", "eps_mix"}

FAMILY_NAMES = tuple(sorted(_FAMILY_DIMS) + ["eps_mix"])


def family_dims(name: str) -> tuple[int, int]:
    if name not in _FAMILY_DIMS:
        raise ContractViolation(f"unknown state family: {name!r}")
    return _FAMILY_DIMS[name]


def family_has_parameter(name: str) -> bool:
    return name in _PARAMETRIC


def state_family(name: str, param: float | None = None, *,
                 base: BipartiteState | None = None) -> BipartiteState:
    """Construct a named state.

    Parametric families (rho_a, sigma_b, werner2x2, eps_mix) require `param`
    in [0, 1]; the rest reject one. eps_mix additionally requires `base`, and
    mixes it with the maximally mixed state of the same dimensions:
    (1 - param) * base + param * I / (dimA * dimB).
    """
    if name == "eps_mix":
        if base is None:
            raise ContractViolation("eps_mix requires a base state")
        if param is None or not 0.0 <= param <= 1.0:
            raise ContractViolation("eps_mix parameter must lie in [0, 1]")
        n = base.dim
        rho = (1.0 - param) * base.rho + param * np.eye(n, dtype=np.complex128) / n
        return BipartiteState(base.dimA, base.dimB, rho, label=f"eps_mix({base.label or 'base'},{param:g})")

    if name not in _FAMILY_DIMS:
        raise ContractViolation(f"unknown state family: {name!r}")
    if name in _PARAMETRIC:
        if param is None or not 0.0 <= param <= 1.0:
            raise ContractViolation(f"family {name!r} requires a parameter in [0, 1]")
    elif param is not None:
        raise ContractViolation(f"family {name!r} takes no parameter")

    da, db = _FAMILY_DIMS[name]
    if name == "psi_me3":
        rho = projector(_max_entangled3())
    elif name == "q_proj":
        q = _flag_projector()
        rho = q / complex(np.trace(q)).real
    elif name == "rho_insep":
        rho = _rho_insep()
    elif name == "rho_a":
        rho = _rho_a(float(param))
    elif name == "rho_symmetric":
        rho = _rho_symmetric()
    elif name == "sigma_insep":
        rho = _sigma_insep()
    elif name == "sigma_b":
        rho = _sigma_b(float(param))
    elif name == "sigma_symmetric":
        rho = _sigma_symmetric()
    else:  # werner2x2
        rho = _werner2x2(float(param))

    label = name if param is None else f"{name}({param:g})"
    return BipartiteState(da, db, rho, label=label)


# ---------------------------------------------------------------------------
# State file format
# ---------------------------------------------------------------------------

_ALLOWED_KEYS = {"dims", "matrix", "label"}


def _fmt(x: float) -> str:
    """17 significant digits: enough to round-trip any double exactly."""
    return format(float(x), ".17g")


def write_state(state: BipartiteState) -> str:
    n = state.dim
    lines = ["{"]
    lines.append(f'  "dims": [{state.dimA}, {state.dimB}],')
    if state.label:
        lines.append(f'  "label": {json.dumps(state.label)},')
    lines.append('  "matrix": [')
    flat = state.rho.reshape(-1)
    for r in range(n):
        row = flat[r * n:(r + 1) * n]
        cells = ", ".join(f"[{_fmt(z.real)}, {_fmt(z.imag)}]" for z in row)
        comma = "," if r < n - 1 else ""
        lines.append(f"    {cells}{comma}")
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_state(text: str) -> BipartiteState:
    """Parse and validate a state file; errors name what failed and where."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"malformed JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise StateFormatError("top level must be a JSON object")
    unknown = set(obj) - _ALLOWED_KEYS
    if unknown:
        raise StateFormatError(f"unknown fields: {sorted(unknown)}")
    if "dims" not in obj or "matrix" not in obj:
        raise StateFormatError("missing required field 'dims' or 'matrix'")
    dims = obj["dims"]
    if (not isinstance(dims, list) or len(dims) != 2
            or not all(isinstance(d, int) and d >= 1 for d in dims)):
        raise StateFormatError("'dims' must be two positive integers")
    da, db = dims
    n = da * db
    matrix = obj["matrix"]
    if not isinstance(matrix, list) or len(matrix) != n * n:
        raise StateFormatError(
            f"'matrix' must hold {n * n} entries for dims [{da}, {db}], got {len(matrix) if isinstance(matrix, list) else 'non-list'}")
    flat = np.zeros(n * n, dtype=np.complex128)
    for i, cell in enumerate(matrix):
        if (not isinstance(cell, list) or len(cell) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in cell)):
            raise StateFormatError(f"matrix entry {i} must be a [re, im] number pair")
        flat[i] = complex(cell[0], cell[1])
    label = obj.get("label", "")
    if not isinstance(label, str):
        raise StateFormatError("'label' must be a string")
    rho = flat.reshape(n, n)
    return BipartiteState(da, db, rho, label=label)
