"""Spectral-gap checks with constant 1 and the radii on which such a gap persists."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .eigendata import SpectralData
from .envelopes import BaseCertificate
from .errors import BadDelta, BadOverride, HypothesisFailed, RegimeMismatch
from .numkernel import op_norm, restricted_op_norm

GAP_SLACK = 1e-9
REGIME_TOL = 1e-9


@dataclass(frozen=True)
class GapCheck:
    status: str  # "certified" | "refuted" | "inconclusive"
    lower: float
    upper: float
    threshold: float
    delta: float

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "restricted_norm_bracket": [self.lower, self.upper],
            "threshold": self.threshold,
            "delta": self.delta,
            # ||L^n x|| <= ||L|_G||^n ||x|| since G is L-invariant
            "all_powers_by_submultiplicativity": self.certified,
        }


def check_gap_c1(L, data: SpectralData, delta: float, *, samples: int = 2000,
                 seed: int = 0) -> GapCheck:
    """Decide whether ``||L x|| <= (1 - delta) |lambda| ||x||`` on ``ker phi``."""
    lower, upper = restricted_op_norm(L, data.phi, data.kind, data.u,
                                      samples=samples, seed=seed)
    thr = (1 - delta) * abs(data.lam)
    if upper <= thr + GAP_SLACK:
        status = "certified"
    elif lower > thr + GAP_SLACK:
        status = "refuted"
    else:
        status = "inconclusive"
    return GapCheck(status, lower, upper, thr, delta)


def quadratic_coeffs(delta: float, delta0: float, lambda0_abs: float, a: float,
                     tau0: float, gamma0: float) -> tuple[float, float, float]:
    c = 6 * lambda0_abs * (delta - delta0)
    qa = a + (1 - delta) / (6 * tau0 * gamma0)
    qb = c + a + (1 - delta) / gamma0 + 1 / (tau0 * gamma0)
    return qa, qb, c


def rho_root(delta: float, delta0: float, lambda0_abs: float, a: float,
             tau0: float, gamma0: float, *, allow_zero_delta: bool = False) -> float:
    """Positive root of the gap-persistence quadratic ``A X^2 + B X + C``."""
    low_ok = delta >= 0 if allow_zero_delta else delta > 0
    if not (low_ok and delta < delta0 < 1):
        raise BadDelta(f"need 0 < delta < delta0 < 1, got delta={delta}, delta0={delta0}")
    qa, qb, qc = quadratic_coeffs(delta, delta0, lambda0_abs, a, tau0, gamma0)
    disc = math.sqrt(qb * qb - 4 * qa * qc)
    # C < 0 < A: pick the cancellation-free expression for the positive root
    if qb >= 0:
        return (2 * qc) / (-qb - disc)
    return (-qb + disc) / (2 * qa)


def quadratic_residual(x: float, delta, delta0, lambda0_abs, a, tau0, gamma0) -> float:
    qa, qb, qc = quadratic_coeffs(delta, delta0, lambda0_abs, a, tau0, gamma0)
    return abs((qa * x + qb) * x + qc) / max(abs(qa), abs(qb), abs(qc))


@dataclass(frozen=True)
class GapCertificate:
    delta0: float
    delta: float
    a: float
    rho: float
    radius: float
    mode: str  # "theoremC" | "short-form" | "some-gap"
    K: float | None = None
    max_gap_radius: float | None = None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("mode", "delta0", "delta", "a", "rho", "K", "radius", "max_gap_radius")}


def gap_radius_theoremC(data0: SpectralData, cert: BaseCertificate, delta: float,
                        delta0: float, *, base_check: GapCheck | None = None) -> GapCertificate:
    """Radius ``rho/(6(1+rho) tau0 gamma0)`` on which a size-delta gap with constant 1 persists.

    ``delta0`` is declared by the caller and verified on the base operator.
    """
    if not 0 < delta0 < 1:
        raise BadDelta(f"delta0 must lie in (0, 1), got {delta0}")
    check = base_check or check_gap_c1(data0.L, data0, delta0)
    if not check.certified:
        raise HypothesisFailed(
            f"base gap of size {delta0} not certified ({check.status}, "
            f"bracket [{check.lower:.6g}, {check.upper:.6g}] vs {check.threshold:.6g})")
    lam_abs = abs(data0.lam)
    a = 2 * (lam_abs * (1 - delta0) + op_norm(data0.L, data0.kind))
    tau0, gamma0 = cert.tau0, cert.gamma0
    rho = rho_root(delta, delta0, lam_abs, a, tau0, gamma0)
    rho_lim = rho_root(0.0, delta0, lam_abs, a, tau0, gamma0, allow_zero_delta=True)
    return GapCertificate(
        delta0=delta0, delta=delta, a=a, rho=rho,
        radius=rho / (6 * (1 + rho) * tau0 * gamma0), mode="theoremC", K=1 + rho,
        max_gap_radius=rho_lim / (6 * (1 + rho_lim) * tau0 * gamma0))


def check_regime(data0: SpectralData) -> None:
    """Raise RegimeMismatch unless ``lambda0 = ||L0|| = 1``."""
    lam_err = abs(data0.lam - 1)
    norm_err = abs(op_norm(data0.L, data0.kind) - 1)
    if lam_err > REGIME_TOL or norm_err > REGIME_TOL:
        raise RegimeMismatch(
            f"short-form radii need lambda0 = ||L0|| = 1 (|lambda0-1| = {lam_err:.3e}, "
            f"|  ||L0|| - 1| = {norm_err:.3e})")


def gap_radius_short(delta: float, delta0: float, tau0: float, pi0_norm: float,
                     data0: SpectralData | None = None) -> tuple[float, float]:
    """Simplified radii (size-delta gap, some gap) valid when ``lambda0 = ||L0|| = 1``."""
    if data0 is not None:
        check_regime(data0)
    if not 0 < delta < delta0 < 1:
        raise BadDelta(f"need 0 < delta < delta0 < 1, got delta={delta}, delta0={delta0}")
    radius_delta = delta0 * (delta0 - delta) / (6 * (1 + delta0 - delta) * tau0 * pi0_norm)
    radius_some = delta0 ** 2 / (6 * (1 + delta0) * tau0 * pi0_norm)
    return radius_delta, radius_some


def gamma_from_gap(pi0_norm: float, delta0: float) -> float:
    """Upper bound ``||pi0|| / delta0`` for gamma0 implied by a constant-1 gap of size delta0."""
    return pi0_norm / delta0


def short_form_certificates(data0: SpectralData, delta: float, delta0: float, *,
                            pi0_norm: float | None = None) -> list[GapCertificate]:
    """Short-form radii at the base; ``pi0_norm`` may replace ||pi0|| by an upper bound."""
    check_regime(data0)
    tau0 = data0.tau
    pi0 = op_norm(data0.pi, data0.kind)
    if pi0_norm is not None:
        if pi0_norm < pi0:
            raise BadOverride(f"pi0 bound {pi0_norm} below computed ||pi0|| = {pi0}")
        pi0 = pi0_norm
    r_delta, r_some = gap_radius_short(delta, delta0, tau0, pi0)
    return [
        GapCertificate(delta0=delta0, delta=delta, a=2 * (2 - delta0),
                       rho=delta0 - delta, radius=r_delta, mode="short-form"),
        GapCertificate(delta0=delta0, delta=0.0, a=2 * (2 - delta0),
                       rho=delta0, radius=r_some, mode="some-gap"),
    ]
