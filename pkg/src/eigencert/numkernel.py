"""Dense complex linear algebra: norms, duals, solves and a small eigensolver.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Covectors are
1-d arrays paired with vectors through the bilinear product ``phi @ v``;
nothing here ever conjugates a covector implicitly.
"""

from __future__ import annotations

import enum
import warnings

import numpy as np
import scipy.linalg

from .errors import InputError, NoConvergence, SingularSystem

MAX_DIM = 64
EIG_RESIDUAL_TOL = 1e-9
PIVOT_TOL = 1e-13
# per-eigenvalue QR iteration cap; NoConvergence once exceeded
QR_MAX_ITER = 60

_EPS = np.finfo(float).eps


class NormKind(enum.Enum):
    ONE = "one"
    TWO = "two"
    SUP = "sup"

    @property
    def dual(self) -> "NormKind":
        return _DUAL[self]

    @classmethod
    def parse(cls, text: str | "NormKind") -> "NormKind":
        if isinstance(text, NormKind):
            return text
        key = text.strip().lower()
        aliases = {"1": "one", "l1": "one", "2": "two", "l2": "two",
                   "inf": "sup", "infinity": "sup", "max": "sup"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise InputError(f"unknown norm kind {text!r}") from None


_DUAL = {NormKind.ONE: NormKind.SUP, NormKind.SUP: NormKind.ONE,
         NormKind.TWO: NormKind.TWO}


def as_matrix(a, *, max_dim: int = MAX_DIM) -> np.ndarray:
    """Validate and promote ``a`` to a square finite complex matrix."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"matrix must be square, got shape {m.shape}")
    n = m.shape[0]
    if not 2 <= n <= max_dim:
        raise InputError(f"dimension {n} outside supported range [2, {max_dim}]")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return m


def vec_norm(v, kind: NormKind) -> float:
    a = np.abs(np.asarray(v, dtype=complex))
    if kind is NormKind.ONE:
        return float(a.sum())
    if kind is NormKind.TWO:
        return float(np.sqrt(np.sum(a * a)))
    return float(a.max())


def covec_norm(phi, kind: NormKind) -> float:
    """Norm of the linear form ``x -> phi @ x`` when vectors carry ``kind``."""
    return vec_norm(phi, kind.dual)


def op_norm(a, kind: NormKind) -> float:
    m = np.asarray(a, dtype=complex)
    if kind is NormKind.ONE:
        return float(np.abs(m).sum(axis=0).max())
    if kind is NormKind.SUP:
        return float(np.abs(m).sum(axis=1).max())
    return float(scipy.linalg.svdvals(m)[0])


def norming_covector(v, kind: NormKind) -> np.ndarray:
    """Return psi with ``covec_norm(psi) == 1`` and ``psi @ v == vec_norm(v)``."""
    v = np.asarray(v, dtype=complex)
    a = np.abs(v)
    phase = np.where(a > 0, np.conj(v) / np.where(a > 0, a, 1.0), 1.0)
    if kind is NormKind.ONE:
        return phase
    if kind is NormKind.TWO:
        return np.conj(v) / vec_norm(v, kind)
    psi = np.zeros_like(v)
    j = int(np.argmax(a))
    psi[j] = phase[j]
    return psi


def norming_vector(phi, kind: NormKind) -> np.ndarray:
    """Return x with ``vec_norm(x, kind) == 1`` and ``phi @ x == covec_norm(phi)``."""
    return norming_covector(phi, kind.dual)


def solve(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` by LU with partial pivoting.

    Raises SingularSystem when a pivot falls below ``1e-13 * ||a||_sup``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or b.shape[0] != a.shape[0]:
        raise InputError("solve: incompatible shapes")
    scale = op_norm(a, NormKind.SUP)
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularSystem
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if scale == 0.0 or pivots.min() < PIVOT_TOL * scale:
        raise SingularSystem(
            f"pivot {pivots.min():.3e} below {PIVOT_TOL:g} * ||A||_sup = {PIVOT_TOL * scale:.3e}")
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


# --- eigensolver -----------------------------------------------------------

def _householder_hessenberg(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    h = a.copy()
    q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = h[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        # H <- (I - 2vv*) H (I - 2vv*)
        h[k + 1:, :] -= 2.0 * np.outer(v, np.conj(v) @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, np.conj(v))
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, np.conj(v))
        h[k + 2:, k] = 0.0
    return h, q


def _givens(a: complex, b: complex) -> tuple[float, complex]:
    """c, s such that [[c, s], [-conj(s), c]] @ [a, b] = [r, 0]."""
    if b == 0:
        return 1.0, 0j
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    na, nb = abs(a), abs(b)
    r = np.hypot(na, nb)
    c = na / r
    s = (a / na) * np.conj(b) / r
    return c, s


def _wilkinson_shift(h: np.ndarray, hi: int) -> complex:
    a, b = h[hi - 1, hi - 1], h[hi - 1, hi]
    c, d = h[hi, hi - 1], h[hi, hi]
    tr = 0.5 * (a - d)
    disc = np.sqrt(tr * tr + b * c)
    # root of the trailing 2x2 block nearest to d
    r1 = d - b * c / (tr + disc) if (tr + disc) != 0 else d
    r2 = d - b * c / (tr - disc) if (tr - disc) != 0 else d
    return r1 if abs(r1 - d) <= abs(r2 - d) else r2


def _schur(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur form ``a = Z T Z*`` by shifted QR on the Hessenberg form."""
    n = a.shape[0]
    h, z = _householder_hessenberg(a)
    hi = n - 1
    its = 0
    total = 0
    while hi > 0:
        # locate the bottom of the unreduced active block
        lo = hi
        while lo > 0:
            off = abs(h[lo, lo - 1])
            diag = abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])
            if diag == 0.0:
                diag = np.abs(h).sum() / n
            if off <= _EPS * diag:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        its += 1
        total += 1
        if its > QR_MAX_ITER:
            raise NoConvergence(
                f"QR iteration stalled after {QR_MAX_ITER} sweeps on eigenvalue {hi}")
        if its % 11 == 0:
            # exceptional shift breaks symmetric stagnation
            mu = h[hi, hi] + 1.5 * abs(h[hi, hi - 1])
        else:
            mu = _wilkinson_shift(h, hi)
        for k in range(lo, hi + 1):
            h[k, k] -= mu
        rots = []
        for k in range(lo, hi):
            c, s = _givens(h[k, k], h[k + 1, k])
            g = np.array([[c, s], [-np.conj(s), c]])
            h[k:k + 2, k:] = g @ h[k:k + 2, k:]
            h[k + 1, k] = 0.0
            rots.append(g)
        for k, g in zip(range(lo, hi), rots):
            gh = np.conj(g.T)
            h[:k + 2, k:k + 2] = h[:k + 2, k:k + 2] @ gh
            z[:, k:k + 2] = z[:, k:k + 2] @ gh
        for k in range(lo, hi + 1):
            h[k, k] += mu
    return np.triu(h), z


def _triangular_eigenvectors(t: np.ndarray) -> np.ndarray:
    n = t.shape[0]
    smin = max(_EPS * np.abs(t).max(), np.finfo(float).tiny)
    x = np.zeros((n, n), dtype=complex)
    for k in range(n):
        lam = t[k, k]
        xk = x[:, k]
        xk[k] = 1.0
        for i in range(k - 1, -1, -1):
            rhs = -(t[i, k] + t[i, i + 1:k] @ xk[i + 1:k])
            d = t[i, i] - lam
            if abs(d) < smin:
                d = smin
            xk[i] = rhs / d
            big = np.abs(xk[i:k + 1]).max()
            if big > 1e100:
                xk[i:k + 1] /= big
    return x


def eig_all(a) -> list[tuple[complex, np.ndarray]]:
    """All eigenpairs of a dense matrix, eigenvectors of unit two-norm.

    Hessenberg reduction followed by complex single-shift QR (Wilkinson
    shifts, at most ``QR_MAX_ITER`` sweeps per eigenvalue), then
    back-substitution on the Schur factor. Pairs come out in Schur order.
    """
    m = np.asarray(a, dtype=complex)
    n = m.shape[0]
    if n > MAX_DIM:
        raise InputError(f"dimension {n} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    t, z = _schur(m)
    vecs = z @ _triangular_eigenvectors(t)
    vecs /= np.linalg.norm(vecs, axis=0)
    return [(complex(t[k, k]), vecs[:, k].copy()) for k in range(n)]


def eigvals(a) -> np.ndarray:
    return np.array([lam for lam, _ in eig_all(a)])


def nearest_index(values, target: complex) -> int:
    """Index of the value nearest ``target``; ties go to the larger real part."""
    values = np.asarray(values, dtype=complex)
    d = np.abs(values - target)
    best = d.min()
    cands = np.flatnonzero(d <= best * (1 + 1e-12) + 1e-300)
    return int(max(cands, key=lambda i: (values[i].real, values[i].imag)))


def kernel_basis(phi) -> np.ndarray:
    """Orthonormal columns spanning ``{x : phi @ x = 0}``."""
    phi = np.asarray(phi, dtype=complex).reshape(1, -1)
    return scipy.linalg.null_space(phi)


def _two_sparse_kernel_points(phi: np.ndarray) -> np.ndarray:
    # x = phi_j e_i - phi_i e_j lies in ker phi; vertices of the l1 section when phi is real
    n = phi.shape[0]
    i, j = np.triu_indices(n, 1)
    pts = np.zeros((n, i.size), dtype=complex)
    cols = np.arange(i.size)
    pts[i, cols] = phi[j]
    pts[j, cols] = -phi[i]
    keep = np.abs(pts).sum(axis=0) > 0
    return pts[:, keep]


def restricted_op_norm(L, phi, kind: NormKind, u=None, *, samples: int = 2000,
                       seed: int = 0) -> tuple[float, float]:
    """Bracket ``sup{||L x|| : phi @ x = 0, ||x|| <= 1}``.

    The two-norm value is exact. For the one and sup norms the lower end is a
    sampled maximum over kernel points and the upper end is ``||L pi||`` where
    ``pi`` projects onto the kernel along ``u`` (or along ``conj(phi)`` when
    ``u`` is not given).
    """
    L = np.asarray(L, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    if not np.any(phi):
        raise InputError("restricted_op_norm: phi must be nonzero")
    if kind is NormKind.TWO:
        b = kernel_basis(phi)
        val = float(scipy.linalg.svdvals(L @ b)[0]) if b.shape[1] else 0.0
        return val, val

    w = np.conj(phi) if u is None else np.asarray(u, dtype=complex)
    pw = phi @ w
    if abs(pw) < 1e-14 * np.linalg.norm(phi) * np.linalg.norm(w):
        w = np.conj(phi)
        pw = phi @ w
    proj = np.eye(L.shape[0], dtype=complex) - np.outer(w, phi) / pw
    upper = op_norm(L @ proj, kind)

    rng = np.random.default_rng(seed)
    n = L.shape[0]
    z = rng.standard_normal((n, samples))
    if np.iscomplexobj(L) and np.any(L.imag) or np.any(phi.imag):
        z = z + 1j * rng.standard_normal((n, samples))
    pts = np.concatenate([proj @ z, _two_sparse_kernel_points(phi)], axis=1)
    col = np.abs(pts)
    nx = col.sum(axis=0) if kind is NormKind.ONE else col.max(axis=0)
    ok = nx > 1e-300
    lx = np.abs(L @ pts[:, ok])
    nlx = lx.sum(axis=0) if kind is NormKind.ONE else lx.max(axis=0)
    lower = float((nlx / nx[ok]).max()) if ok.any() else 0.0
    return min(lower, upper), upper
