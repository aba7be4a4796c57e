"""Perron-style certificate, randomized soundness campaigns and report assembly.

Each campaign draws its samples from ``numpy`` generators keyed by
``(seed, campaign tag, sample index)``, so a sample can be replayed on its
own and results do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import __version__
from .calculus import FD_TARGETS, FORMULAS, Direction, FDConfig, d2_lambda, fd_oracle
from .eigendata import Selector, SpectralData, analyze, eigengap, extract_triple, spectral_data
from .envelopes import (
    BaseCertificate,
    base_certificate,
    r_bounds,
    tau_gamma_envelope,
    taylor_enclosure,
)
from .errors import EigenCertError, InputError, ZeroC
from .gaps import GapCertificate, check_gap_c1
from .numkernel import NormKind, eig_all, op_norm
from .serialize import dumps

DEFAULT_SEED = 0x5EED
SCHEMA_VERSION = 1

TOLERANCES = {
    "eig_residual_rel": 1e-9,
    "simple_gap_rel": 1e-8,
    "pivot_rel": 1e-13,
    "envelope_rel_slack": 1e-8,
    "dlambda_bound_slack": 1e-6,
    "gap_slack": 1e-9,
    "fd_rel_tol_order12": 1e-4,
    "fd_rel_tol_order3": 1e-2,
    "rank_one_probe_abs": 1e-8,
}

_TAGS = {"radius": 1, "taylor": 2, "envelope": 3, "derivatives": 4, "gap": 5}


@dataclass(frozen=True)
class CampaignConfig:
    seed: int = DEFAULT_SEED
    samples: int = 1000
    radius_fractions: tuple[float, ...] = (0.5, 0.9, 0.99)
    taylor_fraction: float = 0.5
    envelope_fractions: tuple[float, ...] = (0.3, 0.6, 0.9)
    # mixture weights for (gaussian, sparse, rank-one) directions
    directions: tuple[float, float, float] = (0.5, 0.25, 0.25)
    continuation_steps: int = 4
    derivative_pairs: int = 20

    def __post_init__(self):
        if self.samples < 1:
            raise InputError("samples must be >= 1")
        fr = tuple(self.radius_fractions) + (self.taylor_fraction,) + tuple(self.envelope_fractions)
        if any(not 0 <= f < 1 for f in fr):
            raise InputError("radius fractions must lie in [0, 1)")
        if min(self.directions) < 0 or sum(self.directions) <= 0:
            raise InputError("direction weights must be nonnegative with positive sum")

    def rng(self, campaign: str, index: int) -> np.random.Generator:
        return np.random.default_rng([self.seed & (2**64 - 1), _TAGS[campaign], index])

    def as_dict(self) -> dict:
        return {
            "seed": self.seed, "samples": self.samples,
            "radius_fractions": list(self.radius_fractions),
            "taylor_fraction": self.taylor_fraction,
            "envelope_fractions": list(self.envelope_fractions),
            "direction_weights": dict(zip(("gaussian", "sparse", "rank_one"), self.directions)),
            "continuation_steps": self.continuation_steps,
            "derivative_pairs": self.derivative_pairs,
        }


# --- Perron certificate ------------------------------------------------------

@dataclass(frozen=True)
class PerronResult:
    c: complex
    deviations: np.ndarray
    threshold: float
    passed: bool

    @property
    def margins(self) -> np.ndarray:
        return self.threshold - self.deviations

    def as_dict(self) -> dict:
        n = self.deviations.size
        out = {
            "c": self.c, "threshold": self.threshold, "pass": self.passed,
            "row_deviation": self.deviations, "row_margin": self.margins,
            "failing_rows": [int(i) for i in np.flatnonzero(self.margins < 0)],
        }
        if self.passed:
            out["linked_certificate"] = {
                "base": "constant matrix with every entry c",
                "norm": "sup",
                "eigenvalue": n * self.c,
                "tau0": 1.0,
                "gamma0_bound": 2.0 / (n * abs(self.c)),
                "radius_sup": n * abs(self.c) / 12.0,
                "radius_row_mean_deviation": abs(self.c) / 12.0,
            }
        else:
            out["note"] = "test inconclusive on failing rows; this is not a disproof of simplicity"
        return out


def perron_certificate(L, c: complex | None = None) -> PerronResult:
    """Row-mean deviation test ``(1/n) sum_k |l_ik - c| <= |c|/12`` on every row."""
    L = np.asarray(L, dtype=complex)
    if c is None:
        c = complex(L.mean())
    c = complex(c)
    if abs(c) <= 1e-14:
        raise ZeroC(f"|c| = {abs(c):.3e}: certificate is vacuous")
    dev = np.abs(L - c).mean(axis=1)
    thr = abs(c) / 12.0
    return PerronResult(c=c, deviations=dev, threshold=thr, passed=bool(np.all(dev <= thr)))


# --- sampling helpers ----------------------------------------------------------

def random_direction(rng: np.random.Generator, n: int, kind: NormKind,
                     weights=(0.5, 0.25, 0.25), complex_: bool = False) -> tuple[str, np.ndarray]:
    """Draw a unit-norm direction from the gaussian/sparse/rank-one mixture."""
    w = np.asarray(weights, dtype=float)
    label = ("gaussian", "sparse", "rank_one")[rng.choice(3, p=w / w.sum())]

    def gauss(*shape):
        z = rng.standard_normal(shape)
        return z + 1j * rng.standard_normal(shape) if complex_ else z.astype(complex)

    if label == "gaussian":
        M = gauss(n, n)
    elif label == "sparse":
        M = np.zeros((n, n), dtype=complex)
        i, j = rng.integers(0, n, size=2)
        ph = np.exp(2j * np.pi * rng.random()) if complex_ else rng.choice([-1.0, 1.0])
        M[i, j] = ph
    else:
        M = np.outer(gauss(n), gauss(n))
    return label, Direction.unit(M, kind).M


def rank_one_probe(data0: SpectralData) -> np.ndarray:
    P = np.outer(data0.u, data0.phi)
    return P / op_norm(P, data0.kind)


@dataclass
class Tracked:
    ok: bool
    lam: complex | None = None
    reason: str = ""


def continue_eigenvalue(L0, lam0: complex, dL, steps: int = 4, max_halvings: int = 8) -> Tracked:
    """Follow ``lam0`` along ``L0 + s dL``, s in [0, 1], by nearest matching.

    A step is halved while matching is ambiguous (runner-up within a factor 2
    of the nearest). Fails on ambiguity at the smallest step or on a
    non-simple tracked eigenvalue.
    """
    L0 = np.asarray(L0, dtype=complex)
    lam = complex(lam0)
    s = 0.0
    ds = 1.0 / steps
    floor = ds / 2 ** max_halvings
    while s < 1.0:
        step = min(ds, 1.0 - s)
        L = L0 + (s + step) * dL
        vals = np.array([p[0] for p in eig_all(L)])
        d = np.abs(vals - lam)
        order = np.argsort(d, kind="stable")
        nearest, runner = d[order[0]], (d[order[1]] if len(d) > 1 else np.inf)
        if runner <= 2.0 * nearest and nearest > 0:
            if step <= floor:
                return Tracked(False, None, "tracking_lost")
            ds = step / 2
            continue
        k = int(order[0])
        if eigengap(vals, k) <= 1e-8 * max(1.0, op_norm(L, NormKind.TWO)):
            return Tracked(False, complex(vals[k]), "not_simple")
        lam = complex(vals[k])
        s += step
        ds = min(2 * ds, 1.0 / steps)
    return Tracked(True, lam)


class _Worst:
    """Running maximum with lowest-index tie-break."""

    def __init__(self):
        self.value = -np.inf
        self.index = -1
        self.info: dict = {}

    def offer(self, value: float, index: int, info) -> None:
        if value > self.value or (value == self.value and index < self.index):
            self.value, self.index = value, index
            self.info = info() if callable(info) else info

    def as_dict(self) -> dict:
        return {"value": self.value if self.index >= 0 else None,
                "sample_index": self.index if self.index >= 0 else None, **self.info}


def _is_complex(a) -> bool:
    return bool(np.any(np.asarray(a).imag != 0))


def _directions(cfg: CampaignConfig, campaign: str, data0: SpectralData, count: int):
    """Yield (index, label, M); index 0 is always the rank-one probe."""
    cplx = _is_complex(data0.L)
    for i in range(count):
        if i == 0:
            yield i, "rank_one_probe", rank_one_probe(data0)
            continue
        label, M = random_direction(cfg.rng(campaign, i), data0.n, data0.kind,
                                    cfg.directions, cplx)
        yield i, label, M


# --- campaigns -----------------------------------------------------------------

def campaign_radius(data0: SpectralData, cert: BaseCertificate, cfg: CampaignConfig) -> dict:
    """Check that the eigenvalue continues as a simple eigenvalue inside the radius."""
    R = cert.radius_asie
    counts = {"tracking_lost": 0, "not_simple": 0, "outside_order0_disc": 0}
    worst = _Worst()
    probe_err = 0.0
    evaluated = 0
    for f in cfg.radius_fractions:
        r = f * R
        disc = (cert.tau0 + (1 / (1 - 6 * cert.tg * r) - 1) / 3) * r
        for i, label, M in _directions(cfg, "radius", data0, cfg.samples):
            evaluated += 1
            tr = continue_eigenvalue(data0.L, data0.lam, r * M, cfg.continuation_steps)
            if not tr.ok:
                counts[tr.reason] += 1
                worst.offer(np.inf, i, lambda: _witness(i, label, f, M, tr.reason))
                continue
            shift = abs(tr.lam - data0.lam)
            ratio = shift / disc if disc > 0 else (0.0 if shift == 0 else np.inf)
            if ratio > 1:
                counts["outside_order0_disc"] += 1
            worst.offer(ratio, i, lambda: _witness(i, label, f, M))
            if label == "rank_one_probe":
                t = r / op_norm(np.outer(data0.u, data0.phi), data0.kind)
                probe_err = max(probe_err, abs(tr.lam - (data0.lam + t)))
    violations = sum(counts.values())
    return {
        "campaign": "radius",
        "radius_asie": R,
        "fractions": list(cfg.radius_fractions),
        "samples": evaluated,
        "violations": violations,
        "violation_kinds": counts,
        "tracking_neighborhood": "order-0 enclosure disc |z - lambda0| <= (tau0 + (K-1)/3) r",
        "worst_shift_over_disc": worst.as_dict(),
        "rank_one_probe_max_error": probe_err,
        "rank_one_probe_ok": probe_err <= TOLERANCES["rank_one_probe_abs"],
    }


def _witness(i, label, f, M, reason=None) -> dict:
    w = {"direction_kind": label, "fraction": f, "direction": M}
    if reason:
        w["reason"] = reason
    return w


def campaign_taylor(data0: SpectralData, cert: BaseCertificate, cfg: CampaignConfig) -> dict:
    """Oracle eigenvalue against the order 0, 1, 2 enclosures at a fixed radius fraction."""
    r = cfg.taylor_fraction * cert.radius_asie
    worst = {o: _Worst() for o in (0, 1, 2)}
    viol = {o: 0 for o in (0, 1, 2)}
    lost = 0
    for i, label, M in _directions(cfg, "taylor", data0, cfg.samples):
        L = data0.L + r * M
        tr = continue_eigenvalue(data0.L, data0.lam, r * M, cfg.continuation_steps)
        if not tr.ok:
            lost += 1
            continue
        for order in (0, 1, 2):
            enc = taylor_enclosure(data0, cert, order, L)
            err = abs(tr.lam - enc.approx)
            ratio = err / enc.half_width if enc.half_width > 0 else (0.0 if err == 0 else np.inf)
            if ratio > 1:
                viol[order] += 1
            worst[order].offer(ratio, i, lambda: {
                **_witness(i, label, cfg.taylor_fraction, M),
                "error": err, "half_width": enc.half_width})
    return {
        "campaign": "taylor",
        "r": r,
        "K": 1 / (1 - 6 * cert.tg * r),
        "samples": cfg.samples,
        "tracking_lost": lost,
        "violations": sum(viol.values()) + lost,
        "violations_by_order": {str(o): v for o, v in viol.items()},
        "worst_error_over_half_width": {str(o): w.as_dict() for o, w in worst.items()},
    }


def campaign_envelope(data0: SpectralData, cert: BaseCertificate, cfg: CampaignConfig,
                      h: float = 1e-6) -> dict:
    """Measured tau*gamma against the growth envelope, plus |D lambda| against its r-ball bound."""
    viol_env = 0
    viol_dl = 0
    failed = 0
    worst_env = _Worst()
    worst_dl = _Worst()
    evaluated = 0
    for f in cfg.envelope_fractions:
        r = f * cert.radius_asie
        env = tau_gamma_envelope(cert, r)
        bound_dl = r_bounds(cert, r).bound_Dlambda
        for i, label, M in _directions(cfg, "envelope", data0, cfg.samples):
            evaluated += 1
            L = data0.L + r * M
            tr = continue_eigenvalue(data0.L, data0.lam, r * M, cfg.continuation_steps)
            try:
                if not tr.ok:
                    raise EigenCertError(tr.reason)
                data = spectral_data(L, extract_triple(L, Selector.nearest(tr.lam)), data0.kind)
            except EigenCertError:
                failed += 1
                continue
            tg = data.tau * data.gamma
            ratio = tg / env
            if tg > env * (1 + TOLERANCES["envelope_rel_slack"]):
                viol_env += 1
            worst_env.offer(ratio, i, lambda: {**_witness(i, label, f, M), "tau_gamma": tg,
                                               "envelope": env})
            # finite-difference slope of lambda at L along M (unit norm)
            lp = continue_eigenvalue(L, data.lam, h * M, 1)
            lm = continue_eigenvalue(L, data.lam, -h * M, 1)
            if lp.ok and lm.ok:
                slope = abs(lp.lam - lm.lam) / (2 * h)
                if slope > bound_dl + TOLERANCES["dlambda_bound_slack"]:
                    viol_dl += 1
                worst_dl.offer(slope / bound_dl, i, lambda: {
                    **_witness(i, label, f, M), "slope": slope, "bound": bound_dl})
    return {
        "campaign": "envelope",
        "fractions": list(cfg.envelope_fractions),
        "samples": evaluated,
        "failed_evaluations": failed,
        "envelope_violations": viol_env,
        "dlambda_bound_violations": viol_dl,
        "violations": viol_env + viol_dl + failed,
        "worst_tau_gamma_over_envelope": worst_env.as_dict(),
        "worst_slope_over_dlambda_bound": worst_dl.as_dict(),
    }


def random_test_pair(rng: np.random.Generator, n: int, kind: NormKind):
    """A random (L, M) with a well isolated leading eigenvalue; M has unit norm."""
    while True:
        x = rng.standard_normal(n)
        L = rng.standard_normal((n, n)) / np.sqrt(n) + 3.0 * np.outer(x, x) / (x @ x)
        try:
            data = analyze(L, kind)
        except EigenCertError:
            continue
        if data.tau * data.gamma <= 10.0:
            M = Direction.unit(rng.standard_normal((n, n)), kind)
            return data, M


def derivative_errors(data: SpectralData, M) -> dict[str, float]:
    """Relative error |formula - FD| / max(1, |formula|) for every derivative formula."""
    out = {}
    for name, fn in FORMULAS.items():
        quantity, order = FD_TARGETS[name]
        cfg = FDConfig(h=1e-2 if order == 3 else 1e-4)
        exact = np.asarray(fn(data, M))
        approx = np.asarray(fd_oracle(data.L, M, quantity, order, cfg, base=data))
        out[name] = float(np.abs(exact - approx).max() / max(1.0, np.abs(exact).max()))
    return out


def campaign_derivatives(cfg: CampaignConfig, kind: NormKind = NormKind.SUP,
                         n_range: tuple[int, int] = (3, 8)) -> dict:
    """Formula-vs-finite-difference errors on seeded random (L, M) pairs."""
    max_err = {name: 0.0 for name in FORMULAS}
    viol = 0
    for i in range(cfg.derivative_pairs):
        rng = cfg.rng("derivatives", i)
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        data, M = random_test_pair(rng, n, kind)
        errs = derivative_errors(data, M)
        for name, e in errs.items():
            tol = TOLERANCES["fd_rel_tol_order3" if FD_TARGETS[name][1] == 3 else "fd_rel_tol_order12"]
            viol += e > tol
            max_err[name] = max(max_err[name], e)
    # closed form: the 2x2 block [[2, t], [t, 1]] has second derivative 2 at t = 0
    base = analyze(np.diag([2.0, 1.0, 0.0]), kind)
    Mb = np.zeros((3, 3))
    Mb[0, 1] = Mb[1, 0] = 1.0
    d2 = d2_lambda(base, Mb)
    closed_ok = abs(d2 - 2.0) <= 1e-6
    return {
        "campaign": "derivatives",
        "pairs": cfg.derivative_pairs,
        "max_relative_error": max_err,
        "violations": int(viol) + (0 if closed_ok else 1),
        "closed_form_d2lambda": d2,
        "closed_form_ok": closed_ok,
    }


def campaign_gap(data0: SpectralData, gap_cert: GapCertificate, cfg: CampaignConfig) -> dict:
    """Perturbations at the gap radius must still certify a size-delta gap."""
    counts = {"certified": 0, "refuted": 0, "inconclusive": 0, "failed": 0}
    worst = _Worst()
    R = gap_cert.radius
    for i, label, M in _directions(cfg, "gap", data0, cfg.samples):
        L = data0.L + R * M
        tr = continue_eigenvalue(data0.L, data0.lam, R * M, cfg.continuation_steps)
        try:
            if not tr.ok:
                raise EigenCertError(tr.reason)
            data = spectral_data(L, extract_triple(L, Selector.nearest(tr.lam)), data0.kind)
        except EigenCertError:
            counts["failed"] += 1
            continue
        chk = check_gap_c1(L, data, gap_cert.delta, seed=i)
        counts[chk.status] += 1
        worst.offer(chk.upper / chk.threshold, i, lambda: {
            **_witness(i, label, 1.0, M), "bracket": [chk.lower, chk.upper],
            "threshold": chk.threshold})
    return {
        "campaign": "gap",
        "mode": gap_cert.mode,
        "radius": R,
        "delta": gap_cert.delta,
        "samples": cfg.samples,
        "outcomes": counts,
        "violations": counts["refuted"] + counts["failed"],
        "inconclusive": counts["inconclusive"],
        "worst_upper_over_threshold": worst.as_dict(),
    }


# --- report --------------------------------------------------------------------

def base_summary(data0: SpectralData) -> dict:
    return {
        "n": data0.n,
        "norm": data0.kind.value,
        "lambda0": data0.lam,
        "tau0": data0.tau,
        "gamma0": data0.gamma,
        "pi0_norm": op_norm(data0.pi, data0.kind),
        "L0_norm": op_norm(data0.L, data0.kind),
        "eigenvalue_real_positive_observed": bool(data0.lam.real > 0 and abs(data0.lam.imag) <= 1e-12),
    }


def certificate_summary(cert: BaseCertificate) -> dict:
    return {
        "tau0": cert.tau0,
        "gamma0": cert.gamma0,
        "gamma_computed": cert.gamma_computed,
        "gamma_source": cert.gamma_source,
        "gamma_note": cert.gamma_note,
        "radius_asie": cert.radius_asie,
        "norm": cert.kind.value,
    }


def emit_report(command: str, sections: dict, *, config: dict | None = None) -> str:
    """Serialize a report deterministically (sorted keys, round-trip floats)."""
    campaigns = {k: v for k, v in sections.items() if isinstance(v, dict) and "violations" in v}
    total = sum(int(v["violations"]) for v in campaigns.values())
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        **sections,
        "provenance": {
            "tool": "eigencert",
            "version": __version__,
            "tolerances": TOLERANCES,
            "config": config or {},
        },
    }
    if campaigns:
        report["total_violations"] = total
    return dumps(report)


def verify(data0: SpectralData, cfg: CampaignConfig, *, gamma_override: float | None = None,
           gap_cert: GapCertificate | None = None) -> dict:
    """Run every applicable campaign on one base operator."""
    cert = base_certificate(data0, gamma_override)
    sections = {
        "base": base_summary(data0),
        "certificate": certificate_summary(cert),
        "radius": campaign_radius(data0, cert, cfg),
        "taylor": campaign_taylor(data0, cert, cfg),
        "envelope": campaign_envelope(data0, cert, cfg),
        "derivatives": campaign_derivatives(cfg, data0.kind),
    }
    if gap_cert is not None:
        sections["gap_certificate"] = gap_cert.as_dict()
        sections["gap"] = campaign_gap(data0, gap_cert, cfg)
    return sections


__all__ = [
    "CampaignConfig", "PerronResult", "perron_certificate", "campaign_radius",
    "campaign_taylor", "campaign_envelope", "campaign_derivatives", "campaign_gap",
    "emit_report", "verify", "continue_eigenvalue", "random_direction", "random_test_pair",
    "derivative_errors", "rank_one_probe", "DEFAULT_SEED",
]
