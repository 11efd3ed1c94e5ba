"""Dense complex linear algebra and polynomial root finding for small problems.

The heavy lifting is deliberately self-contained: eigendecompositions use a
cyclic Jacobi iteration for complex Hermitian matrices, nullspaces are
derived from it, and polynomial roots come from a Durand-Kerner iteration.
Every matrix in this package has at most a few dozen rows, a regime where
these methods are robust, fast, and bit-reproducible across platforms.

numpy arrays (complex128) are the universal carrier: vectors are 1-D arrays,
matrices 2-D arrays in row-major layout. All functions are pure.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

HERMITICITY_RTOL = 1e-10
ORTHONORMALITY_ATOL = 1e-10
COEFF_TRIM_RTOL = 1e-12

_JACOBI_MAX_SWEEPS = 60
_JACOBI_OFF_RTOL = 1e-15

_DK_MAX_ITER = 500
_DK_MOVE_TOL = 1e-13


class ContractViolation(ValueError):
    """An argument failed a documented precondition."""


def as_cmatrix(entries, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce input to a fresh complex128 2-D array, optionally checking shape."""
    m = np.array(entries, dtype=np.complex128)
    if m.ndim != 2:
        raise ContractViolation(f"expected a 2-D matrix, got ndim={m.ndim}")
    if rows is not None and m.shape[0] != rows:
        raise ContractViolation(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise ContractViolation(f"expected {cols} cols, got {m.shape[1]}")
    return m


def as_cvector(entries) -> np.ndarray:
    v = np.array(entries, dtype=np.complex128)
    if v.ndim != 1:
        raise ContractViolation(f"expected a 1-D vector, got ndim={v.ndim}")
    return v


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def is_hermitian(m: np.ndarray, rtol: float = HERMITICITY_RTOL) -> bool:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 0.0)
    return float(np.max(np.abs(m - dagger(m)))) <= rtol * scale


def require_hermitian(m: np.ndarray, what: str = "matrix") -> np.ndarray:
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ContractViolation(f"{what} must be square, got shape {m.shape}")
    if not is_hermitian(m):
        raise ContractViolation(f"{what} is not Hermitian within tolerance")
    return m


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with first-factor-major composite indexing.

    Entry ((m, mu), (n, nu)) of the result is a[m, n] * b[mu, nu] under the
    composite index m * rows_b + mu, i.e. the product basis is ordered
    e1(x)e1, e1(x)e2, ..., e2(x)e1, ...
    """
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def outer(v: np.ndarray, w: np.ndarray | None = None) -> np.ndarray:
    """|v><w| (defaults to |v><v|)."""
    v = as_cvector(v)
    w = v if w is None else as_cvector(w)
    return np.outer(v, w.conj())


def projector(v: np.ndarray) -> np.ndarray:
    """Rank-1 projector onto the (normalized) direction of v."""
    v = as_cvector(v)
    n2 = float(np.real(np.vdot(v, v)))
    if n2 <= 0.0:
        raise ContractViolation("cannot project onto the zero vector")
    return np.outer(v, v.conj()) / n2


# ---------------------------------------------------------------------------
# Hermitian eigenproblem (cyclic Jacobi)
# ---------------------------------------------------------------------------

def _phase_fix_columns(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        i = int(np.argmax(np.abs(col)))
        a = col[i]
        if abs(a) > 0.0:
            out[:, k] = col * (a.conjugate() / abs(a))
    return out


def eig_hermitian(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a complex Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues real and ascending
    and eigenvectors as orthonormal columns; column k belongs to eigenvalue
    k. Eigenvector phases are fixed by making the largest-magnitude
    component real positive.

    Uses a cyclic Jacobi iteration: each sweep annihilates every off-diagonal
    pair via a complex plane rotation. Convergence is quadratic; a handful of
    sweeps suffices at these sizes.
    """
    a = require_hermitian(m, "eig_hermitian input").copy()
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=np.complex128)
    scale = max(1.0, float(np.max(np.abs(a))))
    thresh = _JACOBI_OFF_RTOL * scale

    for _ in range(_JACOBI_MAX_SWEEPS):
        off = 0.0
        for p in range(n - 1):
            row = a[p, p + 1:]
            if row.size:
                off = max(off, float(np.max(np.abs(row))))
        if off <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                u = apq / abs(apq)
                tau = (aqq - app) / (2.0 * abs(apq))
                # both branches avoid cancellation in tau + sqrt(1 + tau^2)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # G = [[c, s*conj(u)^-1...]] acting on the (p, q) plane:
                # columns transform by G, rows by G† with
                # G[p,p]=c, G[p,q]=s, G[q,p]=-conj(u)*s, G[q,q]=conj(u)*c.
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - (u.conjugate() * s) * colq
                a[:, q] = s * colp + (u.conjugate() * c) * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - (u * s) * rowq
                a[q, :] = s * rowp + (u * c) * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - (u.conjugate() * s) * vq
                v[:, q] = s * vp + (u.conjugate() * c) * vq

    eigvals = np.real(np.diag(a))
    order = np.argsort(eigvals, kind="stable")
    eigvals = eigvals[order]
    v = v[:, order]
    return eigvals, _phase_fix_columns(v)


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal spanning set of a subspace, vectors stored as rows."""

    dim_ambient: int
    vectors: np.ndarray  # shape (dim, dim_ambient), rows orthonormal

    def __post_init__(self):
        vecs = np.asarray(self.vectors, dtype=np.complex128)
        if vecs.ndim != 2 or vecs.shape[1] != self.dim_ambient:
            raise ContractViolation("basis vectors must be rows of ambient dimension")
        if vecs.shape[0]:
            gram = vecs @ vecs.conj().T
            dev = float(np.max(np.abs(gram - np.eye(vecs.shape[0]))))
            if dev > ORTHONORMALITY_ATOL:
                raise ContractViolation(f"basis is not orthonormal (deviation {dev:.2e})")
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def project(self, v: np.ndarray) -> np.ndarray:
        v = as_cvector(v)
        if self.dim == 0:
            return np.zeros_like(v)
        coeffs = self.vectors.conj() @ v
        return self.vectors.T @ coeffs

    def residual(self, v: np.ndarray) -> float:
        """Norm of the component of v orthogonal to the subspace."""
        return _norm(as_cvector(v) - self.project(v))

    def contains(self, v: np.ndarray, rtol: float) -> bool:
        v = as_cvector(v)
        nv = _norm(v)
        if nv == 0.0:
            return True
        return self.residual(v) <= rtol * nv


def _norm(v: np.ndarray) -> float:
    return float(math.sqrt(float(np.real(np.vdot(v, v)))))


def orthonormalize(vectors, tol: float) -> SubspaceBasis:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Vectors whose residual after projection drops below tol times their
    original norm are dropped, so the output size reveals numerical rank.
    Empty input yields an empty basis.
    """
    vecs = [as_cvector(v) for v in vectors]
    if not vecs:
        return SubspaceBasis(0, np.zeros((0, 0), dtype=np.complex128))
    ambient = vecs[0].shape[0]
    basis: list[np.ndarray] = []
    for v in vecs:
        if v.shape[0] != ambient:
            raise ContractViolation("all vectors must share one ambient dimension")
        original = _norm(v)
        if original == 0.0:
            continue
        w = v.copy()
        for _ in range(2):  # MGS + one re-orthogonalization pass
            for b in basis:
                w = w - np.vdot(b, w) * b
        r = _norm(w)
        if r > tol * original:
            basis.append(w / r)
    rows = np.array(basis, dtype=np.complex128) if basis else np.zeros((0, ambient), dtype=np.complex128)
    return SubspaceBasis(ambient, rows)


def nullspace(m: np.ndarray, tol: float) -> SubspaceBasis:
    """Orthonormal basis of {x : ||m x|| <= tol * max(1, ||m||)}.

    Computed from the Hermitian eigendecomposition of m† m, keeping
    eigenvectors whose eigenvalue is at most tol^2 (relative to the largest).
    """
    m = as_cmatrix(m)
    cols = m.shape[1]
    if m.shape[0] == 0 or cols == 0:
        return SubspaceBasis(cols, np.eye(cols, dtype=np.complex128))
    gram = dagger(m) @ m
    gram = 0.5 * (gram + dagger(gram))
    eigvals, eigvecs = eig_hermitian(gram)
    lam_max = max(1.0, float(eigvals[-1]) if eigvals.size else 0.0)
    keep = [k for k in range(cols) if eigvals[k] <= tol * tol * lam_max]
    rows = eigvecs[:, keep].T.copy() if keep else np.zeros((0, cols), dtype=np.complex128)
    return SubspaceBasis(cols, rows)


def complement(basis: SubspaceBasis, tol: float = 1e-8) -> SubspaceBasis:
    """Orthonormal basis of the orthogonal complement within the ambient space."""
    if basis.dim == 0:
        return SubspaceBasis(basis.dim_ambient, np.eye(basis.dim_ambient, dtype=np.complex128))
    return nullspace(basis.vectors.conj(), tol)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

def trim_coeffs(coeffs, rtol: float = COEFF_TRIM_RTOL) -> tuple[complex, ...]:
    cs = [complex(c) for c in coeffs]
    scale = max((abs(c) for c in cs), default=0.0)
    if scale == 0.0:
        return ()
    cut = rtol * scale
    out = [c if abs(c) > cut else 0.0 + 0.0j for c in cs]
    while out and abs(out[-1]) == 0.0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class Polynomial:
    """Coefficients in ascending degree; the zero polynomial has no coefficients."""

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", trim_coeffs(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: complex) -> complex:
        acc = 0.0 + 0.0j
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def max_coeff(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def is_negligible(self, scale: float, rtol: float = 1e-10) -> bool:
        """True when every coefficient is tiny relative to the given data scale."""
        return self.max_coeff() <= rtol * max(1.0, scale)


def poly_from_roots(roots, leading: complex = 1.0) -> Polynomial:
    """Monic-style expansion of leading * prod (x - r)."""
    cs = [complex(leading)]
    for r in roots:
        r = complex(r)
        nxt = [0.0 + 0.0j] * (len(cs) + 1)
        for i, c in enumerate(cs):
            nxt[i + 1] += c
            nxt[i] -= r * c
        cs = nxt
    return Polynomial(tuple(cs))


def poly_roots(p: Polynomial) -> list[complex]:
    """All roots with multiplicity via the Durand-Kerner iteration.

    Requires degree >= 1; callers must branch on identically-zero input
    before calling. Residuals satisfy
    |p(r)| <= 1e-8 * max|coeff| * max(1, |r|)^degree.
    """
    if not isinstance(p, Polynomial):
        p = Polynomial(tuple(p))
    if p.is_zero or p.degree < 1:
        raise ContractViolation("poly_roots requires degree >= 1 (and a nonzero polynomial)")
    deg = p.degree
    lead = p.coeffs[-1]
    monic = [c / lead for c in p.coeffs]
    if deg == 1:
        return [-monic[0]]

    radius = 1.0 + max(abs(c) for c in monic[:-1])
    roots = [radius * cmath.exp(2j * math.pi * k / deg + 0.4j) for k in range(deg)]

    def val(x: complex) -> complex:
        acc = 1.0 + 0.0j
        for c in reversed(monic[:-1]):
            acc = acc * x + c
        return acc

    for _ in range(_DK_MAX_ITER):
        move = 0.0
        new_roots = list(roots)
        for i in range(deg):
            w = roots[i]
            denom = 1.0 + 0.0j
            for j in range(deg):
                if j != i:
                    denom *= (w - new_roots[j]) if j < i else (w - roots[j])
            if denom == 0:
                denom = 1e-30
            step = val(w) / denom
            new_roots[i] = w - step
            move = max(move, abs(step))
        roots = new_roots
        if move <= _DK_MOVE_TOL * max(1.0, max(abs(r) for r in roots)):
            break
    return roots


def poly_interpolate(fn, degree_bound: int, radius: float = 1.0) -> Polynomial:
    """Recover polynomial coefficients by sampling fn on scaled unit roots.

    fn must be a polynomial of degree <= degree_bound; the inverse DFT on
    nodes radius * exp(i(2 pi k / n + 0.31)) gives its coefficients exactly
    up to roundoff.
    """
    n = degree_bound + 1
    offset = 0.31
    nodes = [radius * cmath.exp(1j * (2.0 * math.pi * k / n + offset)) for k in range(n)]
    ys = np.array([fn(t) for t in nodes], dtype=np.complex128)
    # d_j = c_j * radius^j * exp(i j offset) is the inverse DFT of ys
    ks = np.arange(n)
    dft = np.exp(-2j * math.pi * np.outer(ks, ks) / n)
    d = (dft @ ys) / n
    coeffs = [d[j] * cmath.exp(-1j * offset * j) / (radius ** j) for j in range(n)]
    return Polynomial(tuple(coeffs))


# ---------------------------------------------------------------------------
# Bivariate helpers (coefficient arrays c[j, k] for x^j y^k)
# ---------------------------------------------------------------------------

def biv_eval(c: np.ndarray, x: complex, y: complex) -> complex:
    acc = 0.0 + 0.0j
    for j in range(c.shape[0] - 1, -1, -1):
        inner = 0.0 + 0.0j
        for k in range(c.shape[1] - 1, -1, -1):
            inner = inner * y + c[j, k]
        acc = acc * x + inner
    return acc


def biv_interpolate(fn, degx: int, degy: int, radius: float = 1.0) -> np.ndarray:
    """Tensor-grid interpolation of a bivariate polynomial of bounded bidegree.

    fn(x, y) must be polynomial of degree <= degx in x and <= degy in y;
    coefficients are recovered exactly (up to roundoff) by inverse DFTs on a
    tensor grid of scaled, phase-offset unit roots.
    """
    nx, ny = degx + 1, degy + 1
    ox, oy = 0.47, 0.31
    xnodes = [radius * cmath.exp(1j * (2.0 * math.pi * k / nx + ox)) for k in range(nx)]
    ynodes = [radius * cmath.exp(1j * (2.0 * math.pi * l / ny + oy)) for l in range(ny)]
    vals = np.array([[fn(xv, yv) for yv in ynodes] for xv in xnodes], dtype=np.complex128)

    ky = np.arange(ny)
    dft_y = np.exp(-2j * math.pi * np.outer(ky, ky) / ny)
    cy = vals @ dft_y.T / ny  # cy[k, m] = coeff of y^m at x-node k, scaled
    for m in range(ny):
        cy[:, m] *= cmath.exp(-1j * oy * m) / (radius ** m)

    kx = np.arange(nx)
    dft_x = np.exp(-2j * math.pi * np.outer(kx, kx) / nx)
    out = dft_x @ cy / nx
    for j in range(nx):
        out[j, :] *= cmath.exp(-1j * ox * j) / (radius ** j)
    return out


def biv_is_negligible(c: np.ndarray, scale: float, rtol: float = 1e-10) -> bool:
    mx = float(np.max(np.abs(c))) if c.size else 0.0
    return mx <= rtol * max(1.0, scale)


def biv_coeffs_in_y(c: np.ndarray) -> list[Polynomial]:
    """View c(x, y) as a polynomial in y: list of coefficient Polynomials in x."""
    return [Polynomial(tuple(c[:, k])) for k in range(c.shape[1])]


def biv_swap_conj(c: np.ndarray) -> np.ndarray:
    """Map c(x, y) to the polynomial whose value at (x, y) is conj(c(conj(y), conj(x))).

    On the real slice y = conj(x) this is the complex conjugate of c, so the
    zero set of the pair (c, swap_conj(c)) contains every reality-slice zero.
    """
    return c.conj().T.copy()


def _det_lu(a: np.ndarray) -> complex:
    """Determinant by LU with partial pivoting (small dense complex)."""
    a = np.array(a, dtype=np.complex128)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    det = 1.0 + 0.0j
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[piv, k]) == 0.0:
            return 0.0 + 0.0j
        if piv != k:
            a[[k, piv], :] = a[[piv, k], :]
            det = -det
        det *= a[k, k]
        a[k + 1:, k:] = a[k + 1:, k:] - np.outer(a[k + 1:, k] / a[k, k], a[k, k:])
    return det


def det(a: np.ndarray) -> complex:
    return _det_lu(as_cmatrix(a))


def resultant_eliminating_y(p: np.ndarray, q: np.ndarray) -> Polynomial | None:
    """Resultant of two bivariate polynomials with respect to y.

    Returns a Polynomial in x whose roots include every x admitting a common
    y-root of p and q. Returns None when either polynomial has y-degree < 1
    (no elimination possible).
    """
    py = [Polynomial(tuple(p[:, k])) for k in range(p.shape[1])]
    qy = [Polynomial(tuple(q[:, k])) for k in range(q.shape[1])]
    while py and py[-1].is_zero:
        py.pop()
    while qy and qy[-1].is_zero:
        qy.pop()
    dp = len(py) - 1
    dq = len(qy) - 1
    if dp < 1 or dq < 1:
        return None
    degx_p = max((c.degree for c in py if not c.is_zero), default=0)
    degx_q = max((c.degree for c in qy if not c.is_zero), default=0)
    bound = dq * degx_p + dp * degx_q

    size = dp + dq

    def sylvester_det(x: complex) -> complex:
        pv = [c(x) for c in py]
        qv = [c(x) for c in qy]
        s = np.zeros((size, size), dtype=np.complex128)
        for r in range(dq):
            for i, c in enumerate(reversed(pv)):
                s[r, r + i] = c
        for r in range(dp):
            for i, c in enumerate(reversed(qv)):
                s[dq + r, r + i] = c
        return _det_lu(s)

    return poly_interpolate(sylvester_det, bound, radius=1.2)


# ---------------------------------------------------------------------------
# Deterministic pseudo-randomness
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Tiny deterministic 64-bit generator; identical streams on every platform."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def normal(self) -> float:
        u1 = self.uniform()
        u2 = self.uniform()
        while u1 <= 1e-300:
            u1 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def complex_disk(self, radius: float = 1.0) -> complex:
        r = radius * math.sqrt(self.uniform())
        phi = 2.0 * math.pi * self.uniform()
        return r * cmath.exp(1j * phi)

    def complex_phase(self) -> complex:
        return cmath.exp(2j * math.pi * self.uniform())

    def complex_normal(self) -> complex:
        return complex(self.normal(), self.normal()) / math.sqrt(2.0)

    def spawn(self, tag: str) -> "SplitMix64":
        """Child generator deterministically derived from a string tag."""
        h = self._state ^ 0xCBF29CE484222325
        for byte in tag.encode("utf-8"):
            h = ((h ^ byte) * 0x100000001B3) & _MASK64
        return SplitMix64(h)
