"""Certified radius, derivative bound tables, growth envelope and Taylor enclosures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigendata import SpectralData
from .errors import BadK, BadOverride, OutOfRadius
from .numkernel import NormKind, op_norm


@dataclass(frozen=True)
class BaseCertificate:
    tau0: float
    gamma0: float
    kind: NormKind
    radius_asie: float
    gamma_computed: float
    gamma_note: str | None = None

    @property
    def gamma_source(self) -> str:
        return "computed" if self.gamma_note is None else "override"

    @property
    def tg(self) -> float:
        return self.tau0 * self.gamma0


def base_certificate(data: SpectralData, gamma_override: float | None = None,
                     note: str | None = None) -> BaseCertificate:
    """Radius ``1/(6 tau0 gamma0)`` of the ball on which the eigenvalue stays analytic.

    ``gamma_override`` substitutes any upper bound for the computed gamma; it
    is then used in every downstream formula.
    """
    gamma = data.gamma
    if gamma_override is not None:
        if not gamma_override >= gamma:
            raise BadOverride(f"override {gamma_override} below computed gamma {gamma}")
        gamma = float(gamma_override)
        note = note or "user override"
    else:
        note = None
    return BaseCertificate(
        tau0=data.tau, gamma0=gamma, kind=data.kind,
        radius_asie=1.0 / (6.0 * data.tau * gamma),
        gamma_computed=data.gamma, gamma_note=note)


@dataclass(frozen=True)
class KBallBounds:
    K: float
    r_K: float
    bound_Dlambda: float
    bound_D2lambda: float
    bound_DP: float
    bound_Dpi: float
    bound_D3lambda: float

    def as_dict(self) -> dict:
        return {
            "K": self.K, "r": self.r_K,
            "Dlambda": self.bound_Dlambda, "D2lambda": self.bound_D2lambda,
            "DP": self.bound_DP, "Dpi": self.bound_Dpi, "D3lambda": self.bound_D3lambda,
        }


def k_bounds(cert: BaseCertificate, K: float) -> KBallBounds:
    if not K > 1:
        raise BadK(f"K must exceed 1, got {K}")
    t, tg = cert.tau0, cert.tg
    return KBallBounds(
        K=K,
        r_K=(K - 1) / (6 * K * tg),
        bound_Dlambda=t + (K - 1) / 3,
        bound_D2lambda=2 * K * tg,
        bound_DP=2 * K * tg,
        bound_Dpi=2 * K * tg,
        bound_D3lambda=12 * K ** 2 * tg ** 2,
    )


def _check_r(cert: BaseCertificate, r: float) -> None:
    if not 0 <= r < cert.radius_asie:
        raise OutOfRadius(f"r = {r} not in [0, {cert.radius_asie})")


def r_bounds(cert: BaseCertificate, r: float) -> KBallBounds:
    _check_r(cert, r)
    t, tg = cert.tau0, cert.tg
    den = 1 - 6 * tg * r
    return KBallBounds(
        K=1 / den,
        r_K=r,
        bound_Dlambda=t + 2 * tg * r / den,
        bound_D2lambda=2 * tg / den,
        bound_DP=2 * tg / den,
        bound_Dpi=2 * tg / den,
        bound_D3lambda=12 * tg ** 2 / den ** 2,
    )


def tau_gamma_envelope(cert: BaseCertificate, r: float) -> float:
    _check_r(cert, r)
    return cert.tg / (1 - 6 * cert.tg * r)


def remainder_coeff(cert: BaseCertificate, order: int, K: float) -> float:
    if order == 0:
        return cert.tau0 + (K - 1) / 3
    if order == 1:
        return K * cert.tg
    if order == 2:
        return 2 * K ** 2 * cert.tg ** 2
    raise ValueError(f"Taylor order must be 0, 1 or 2, got {order}")


@dataclass(frozen=True)
class TaylorEnclosure:
    order: int
    center_value: complex
    linear_term: complex
    quadratic_term: complex
    remainder_coeff: float
    valid_radius: float
    r: float
    K: float

    @property
    def approx(self) -> complex:
        val = self.center_value
        if self.order >= 1:
            val += self.linear_term
        if self.order >= 2:
            val += self.quadratic_term
        return val

    @property
    def half_width(self) -> float:
        return self.remainder_coeff * self.r ** (self.order + 1)

    def contains(self, value: complex, slack: float = 0.0) -> bool:
        return abs(value - self.approx) <= self.half_width + slack


def taylor_enclosure(base: SpectralData, cert: BaseCertificate, order: int, L) -> TaylorEnclosure:
    """Enclose the continued eigenvalue of L by a Taylor polynomial at the base.

    The quadratic term is ``-phi0 dL S0 dL u0``, half the second derivative.
    """
    dL = np.asarray(L, dtype=complex) - base.L
    r = op_norm(dL, cert.kind)
    _check_r(cert, r)
    K = 1 / (1 - 6 * cert.tg * r)
    phi, u, S = base.phi, base.u, base.S
    lin = complex(phi @ dL @ u)
    quad = complex(-(phi @ dL) @ S @ (dL @ u))
    return TaylorEnclosure(
        order=order, center_value=base.lam, linear_term=lin, quadratic_term=quad,
        remainder_coeff=remainder_coeff(cert, order, K), valid_radius=cert.radius_asie,
        r=r, K=K)


def projection_constants(cert: BaseCertificate, K: float) -> dict:
    """Enclosure constants for P and pi exactly as listed in the bound table.

    They differ although ``DP = -Dpi``; both are reported and the mismatch flagged.
    """
    p_const = 2 * K * cert.tg
    pi_const = cert.tau0 + (K - 1) / 3
    return {"P": p_const, "pi": pi_const, "discrepancy": not np.isclose(p_const, pi_const)}
