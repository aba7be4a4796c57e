"""Closed-form derivatives of eigendata and finite-difference oracles for them.

All formulas are evaluated at a base point, in the chart where the
eigenvector is pinned by ``phi0 @ u = 1``; there the gauge term of the
eigenvector derivative vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigendata import EigenTriple, SpectralData, eigengap, extract_triple, spectral_data
from .errors import InputError, NotSimple, TrackingLost, ZeroEigenvalue
from .numkernel import NormKind, eig_all, op_norm

QUANTITIES = ("lambda", "u", "phi", "P", "pi", "S", "R_over_lambda")


@dataclass(frozen=True)
class Direction:
    M: np.ndarray
    normalized: bool = False

    @classmethod
    def unit(cls, M, kind: NormKind) -> "Direction":
        M = np.asarray(M, dtype=complex)
        nrm = op_norm(M, kind)
        if nrm == 0.0:
            raise InputError("cannot normalize the zero direction")
        return cls(M / nrm, True)


@dataclass(frozen=True)
class FDConfig:
    h: float = 1e-4
    scheme: str = "central"
    tracking: str = "nearest"

    def __post_init__(self):
        if not 1e-7 <= self.h <= 1e-2:
            raise InputError(f"FD step {self.h} outside [1e-7, 1e-2]")


def _mat(M) -> np.ndarray:
    return np.asarray(M.M if isinstance(M, Direction) else M, dtype=complex)


def d_lambda(data: SpectralData, M) -> complex:
    M = _mat(M)
    return complex(data.phi @ M @ data.u)


def d_u_base(data: SpectralData, M) -> np.ndarray:
    return -data.S @ (_mat(M) @ data.u)


def d_phi_base(data: SpectralData, M) -> np.ndarray:
    return -(data.phi @ _mat(M)) @ data.S


def d2_lambda(data: SpectralData, M) -> complex:
    M = _mat(M)
    return complex(-2.0 * (data.phi @ M) @ data.S @ (M @ data.u))


def d_P(data: SpectralData, M) -> np.ndarray:
    M = _mat(M)
    phiMS = (data.phi @ M) @ data.S
    SMu = data.S @ (M @ data.u)
    return -np.outer(data.u, phiMS) - np.outer(SMu, data.phi)


def d_pi(data: SpectralData, M) -> np.ndarray:
    return -d_P(data, M)


def d_S(data: SpectralData, M) -> np.ndarray:
    M = _mat(M)
    S, u, phi = data.S, data.u, data.phi
    S2 = S @ S
    Mu = M @ u
    return (-S @ M @ S
            + np.outer(S2 @ Mu, phi)
            + (phi @ Mu) * S2
            + np.outer(u, (phi @ M) @ S2))


def d3_lambda(data: SpectralData, M) -> complex:
    M = _mat(M)
    S, u, phi = data.S, data.u, data.phi
    a = phi @ M @ u
    SMu = S @ (M @ u)
    inner = M @ SMu - a * SMu
    return complex(6.0 * (phi @ M) @ (S @ inner))


def d_normalized_R(data: SpectralData, M) -> np.ndarray:
    lam = data.lam
    if abs(lam) <= 1e-12:
        raise ZeroEigenvalue(f"|lambda| = {abs(lam):.3e}")
    M = _mat(M)
    phiMS = (data.phi @ M) @ data.S
    SMu = data.S @ (M @ data.u)
    return (M / lam - (data.phi @ M @ data.u) / lam ** 2 * data.L
            + np.outer(data.u, phiMS) + np.outer(SMu, data.phi))


FORMULAS = {
    "d_lambda": d_lambda,
    "d_u": d_u_base,
    "d_phi": d_phi_base,
    "d2_lambda": d2_lambda,
    "d_P": d_P,
    "d_pi": d_pi,
    "d_S": d_S,
    "d3_lambda": d3_lambda,
    "d_normalized_R": d_normalized_R,
}

# formula name -> (quantity differenced, derivative order)
FD_TARGETS = {
    "d_lambda": ("lambda", 1),
    "d_u": ("u", 1),
    "d_phi": ("phi", 1),
    "d2_lambda": ("lambda", 2),
    "d_P": ("P", 1),
    "d_pi": ("pi", 1),
    "d_S": ("S", 1),
    "d3_lambda": ("lambda", 3),
    "d_normalized_R": ("R_over_lambda", 1),
}


# --- finite-difference oracle ----------------------------------------------

def _track(values, target: complex) -> int:
    d = np.abs(np.asarray(values) - target)
    order = np.argsort(d, kind="stable")
    if len(order) > 1 and d[order[1]] <= 2.0 * d[order[0]]:
        raise TrackingLost(
            f"two eigenvalues within factor 2 of distance to {target:.6g}: "
            f"{d[order[0]]:.3e}, {d[order[1]]:.3e}")
    return int(order[0])


def tracked_triple(L, lam0: complex, phi0: np.ndarray) -> EigenTriple:
    """Eigentriple of L continuing ``lam0``, with ``phi0 @ u = 1`` and ``phi @ u = 1``."""
    L = np.asarray(L, dtype=complex)
    pairs = eig_all(L)
    vals = np.array([p[0] for p in pairs])
    k = _track(vals, lam0)
    lam, u = pairs[k]
    if eigengap(vals, k) <= 1e-8 * max(1.0, op_norm(L, NormKind.TWO)):
        raise NotSimple(f"tracked eigenvalue {lam:.6g} is not simple")
    u = u / (phi0 @ u)
    left = eig_all(L.T)
    lvals = np.array([p[0] for p in left])
    phi = left[_track(lvals, lam)][1]
    phi = phi / (phi @ u)
    return EigenTriple(complex(lam), u, phi)


def _quantity(L, triple: EigenTriple, quantity: str):
    if quantity == "lambda":
        return triple.lam
    if quantity == "u":
        return triple.u
    if quantity == "phi":
        return triple.phi
    n = L.shape[0]
    P = np.outer(triple.u, triple.phi)
    if quantity == "P":
        return P
    if quantity == "pi":
        return np.eye(n) - P
    if quantity == "S":
        return spectral_data(L, triple, NormKind.TWO).S
    if quantity == "R_over_lambda":
        return L / triple.lam - P
    raise InputError(f"unknown quantity {quantity!r}")


_STENCILS = {
    1: ((1, 0.5), (-1, -0.5)),
    2: ((1, 1.0), (0, -2.0), (-1, 1.0)),
    # (f(2h) - 2 f(h) + 2 f(-h) - f(-2h)) / (2 h^3)
    3: ((2, 0.5), (1, -1.0), (-1, 1.0), (-2, -0.5)),
}


def fd_oracle(L0, M, quantity: str, order: int = 1, cfg: FDConfig | None = None,
              *, base: SpectralData | None = None):
    """Central-difference derivative of ``quantity`` along M at L0.

    The eigenvalue is followed by nearest matching to the base eigenvalue;
    eigenvectors are normalized by ``phi0 @ u = 1`` before differencing.
    """
    cfg = cfg or FDConfig()
    if quantity not in QUANTITIES:
        raise InputError(f"unknown quantity {quantity!r}")
    if order not in _STENCILS:
        raise InputError(f"order must be 1, 2 or 3, got {order}")
    L0 = np.asarray(L0, dtype=complex)
    M = _mat(M)
    t0 = extract_triple(L0) if base is None else base.triple
    lam0, phi0 = t0.lam, t0.phi
    h = cfg.h
    acc = 0
    for k, w in _STENCILS[order]:
        Lk = L0 + (k * h) * M
        tk = t0 if k == 0 else tracked_triple(Lk, lam0, phi0)
        acc = acc + w * np.asarray(_quantity(Lk, tk, quantity))
    out = acc / h ** order
    return complex(out) if np.ndim(out) == 0 else out
