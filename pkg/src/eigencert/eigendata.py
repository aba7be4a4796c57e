"""Eigentriple extraction and the derived spectral objects P, pi, S, R, tau, gamma."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePairing, InputError, NotSimple
from .numkernel import (
    NormKind,
    as_matrix,
    covec_norm,
    eig_all,
    nearest_index,
    op_norm,
    solve,
    vec_norm,
)

SIMPLE_GAP_TOL = 1e-8
PAIRING_TOL = 1e-10


@dataclass(frozen=True)
class Selector:
    """Which eigenvalue to extract: the largest in modulus, or the one nearest a target."""

    target: complex | None = None

    @classmethod
    def largest(cls) -> "Selector":
        return cls(None)

    @classmethod
    def nearest(cls, target: complex) -> "Selector":
        return cls(complex(target))

    def pick(self, values) -> int:
        values = np.asarray(values, dtype=complex)
        if self.target is not None:
            return nearest_index(values, self.target)
        mod = np.abs(values)
        cands = np.flatnonzero(mod >= mod.max() * (1 - 1e-12))
        return int(max(cands, key=lambda i: (values[i].real, values[i].imag)))


@dataclass(frozen=True)
class EigenTriple:
    lam: complex
    u: np.ndarray
    phi: np.ndarray

    def rescaled(self, c: complex) -> "EigenTriple":
        return EigenTriple(self.lam, self.u * c, self.phi / c)


def eigengap(values, index: int) -> float:
    values = np.asarray(values, dtype=complex)
    others = np.delete(values, index)
    return float(np.abs(others - values[index]).min()) if others.size else np.inf


def extract_triple(L, selector: Selector | None = None) -> EigenTriple:
    """Extract (lambda, u, phi) for a simple eigenvalue, normalized so phi @ u = 1.

    ``u`` keeps unit two-norm; only ``phi`` absorbs the normalization.
    """
    L = as_matrix(L)
    selector = selector or Selector.largest()
    pairs = eig_all(L)
    vals = np.array([p[0] for p in pairs])
    k = selector.pick(vals)
    lam, u = pairs[k]
    scale = max(1.0, op_norm(L, NormKind.TWO))
    gap = eigengap(vals, k)
    if gap <= SIMPLE_GAP_TOL * scale:
        raise NotSimple(f"eigenvalue {lam:.6g} has eigengap {gap:.3e} <= {SIMPLE_GAP_TOL * scale:.3e}")

    left = eig_all(L.T)
    lvals = np.array([p[0] for p in left])
    phi = left[nearest_index(lvals, lam)][1]
    pairing = phi @ u
    if abs(pairing) < PAIRING_TOL * np.linalg.norm(phi) * np.linalg.norm(u):
        raise DegeneratePairing(f"|phi u| = {abs(pairing):.3e} too small")
    return EigenTriple(complex(lam), u, phi / pairing)


@dataclass(frozen=True)
class SpectralData:
    """Eigendata of one operator, with every norm measured in ``kind``."""

    L: np.ndarray
    triple: EigenTriple
    P: np.ndarray
    pi: np.ndarray
    S: np.ndarray
    R: np.ndarray
    tau: float
    gamma: float
    kind: NormKind

    @property
    def lam(self) -> complex:
        return self.triple.lam

    @property
    def u(self) -> np.ndarray:
        return self.triple.u

    @property
    def phi(self) -> np.ndarray:
        return self.triple.phi

    @property
    def n(self) -> int:
        return self.L.shape[0]

    def norm(self, a) -> float:
        return op_norm(a, self.kind)

    def residuals(self) -> dict[str, float]:
        """Max-abs defects of the algebraic identities the data must satisfy."""
        L, lam, u, phi = self.L, self.lam, self.u, self.phi
        eye = np.eye(self.n)
        d = {
            "P^2-P": self.P @ self.P - self.P,
            "pi^2-pi": self.pi @ self.pi - self.pi,
            "P pi": self.P @ self.pi,
            "pi P": self.pi @ self.P,
            "(L-lam)S-pi": (L - lam * eye) @ self.S - self.pi,
            "Su": self.S @ u,
            "phiS": phi @ self.S,
            "PR": self.P @ self.R,
            "RP": self.R @ self.P,
        }
        return {k: float(np.abs(v).max()) for k, v in d.items()}


def check_triple(L, triple: EigenTriple, tol: float = 1e-8) -> None:
    """Raise InputError unless ``triple`` is an eigentriple of L with phi @ u = 1."""
    lam, u, phi = triple.lam, triple.u, triple.phi
    scale = tol * op_norm(L, NormKind.TWO)
    right = np.linalg.norm(L @ u - lam * u)
    left = np.linalg.norm(phi @ L - lam * phi)
    if right > scale * np.linalg.norm(u) + 1e-300 or left > scale * np.linalg.norm(phi) + 1e-300:
        raise InputError(f"not an eigentriple: residuals {right:.3e}, {left:.3e}")
    if abs(phi @ u - 1) > PAIRING_TOL:
        raise InputError(f"phi u = {phi @ u} is not normalized to 1")


def spectral_data(L, triple: EigenTriple, kind: NormKind = NormKind.SUP) -> SpectralData:
    L = as_matrix(L)
    check_triple(L, triple)
    lam, u, phi = triple.lam, triple.u, triple.phi
    n = L.shape[0]
    P = np.outer(u, phi)
    pi = np.eye(n) - P
    # bordered inverse: (L - lam + u phi) is invertible exactly when lam is simple isolated
    S = solve(L - lam * np.eye(n) + P, pi)
    R = L - lam * P
    tau = covec_norm(phi, kind) * vec_norm(u, kind) / abs(phi @ u)
    gamma = op_norm(S, kind)
    return SpectralData(L=L, triple=triple, P=P, pi=pi, S=S, R=R,
                        tau=tau, gamma=gamma, kind=kind)


def analyze(L, kind: NormKind = NormKind.SUP, selector: Selector | None = None) -> SpectralData:
    """Extract the selected triple and build its spectral data in one call."""
    L = as_matrix(L)
    return spectral_data(L, extract_triple(L, selector), kind)


def duality_pair(L, kind: NormKind = NormKind.SUP,
                 selector: Selector | None = None) -> tuple[float, float, float, float]:
    """(tau, gamma) of L under ``kind`` next to those of L^T under the dual norm."""
    L = as_matrix(L)
    data = analyze(L, kind, selector)
    data_t = analyze(L.T, kind.dual, Selector.nearest(data.lam))
    if abs(data_t.lam - data.lam) > 1e-8 * max(1.0, abs(data.lam)):
        raise InputError("transpose eigenvalue did not match")
    return data.tau, data.gamma, data_t.tau, data_t.gamma
