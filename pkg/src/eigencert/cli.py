"""Command-line front end.

Exit codes: 0 success, 1 campaign violation found, 2 certificate hypothesis
failure, 3 input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .certify import (
    DEFAULT_SEED,
    CampaignConfig,
    base_summary,
    certificate_summary,
    continue_eigenvalue,
    emit_report,
    perron_certificate,
    verify,
)
from .eigendata import Selector, analyze
from .envelopes import (
    base_certificate,
    k_bounds,
    projection_constants,
    r_bounds,
    taylor_enclosure,
)
from .errors import EigenCertError, HypothesisError, InputError
from .gaps import (
    check_gap_c1,
    check_regime,
    gamma_from_gap,
    gap_radius_theoremC,
    short_form_certificates,
)
from .numkernel import NormKind, eig_all, op_norm
from .serialize import read_matrix

EXIT_OK, EXIT_VIOLATION, EXIT_HYPOTHESIS, EXIT_INPUT = 0, 1, 2, 3

log = logging.getLogger("eigencert")


def _complex(text: str) -> complex:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise argparse.ArgumentTypeError(f"expected RE[,IM], got {text!r}")


def _seed(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--norm", default="sup", choices=["one", "two", "sup"])
    common.add_argument("--target", type=_complex, default=None, metavar="RE[,IM]",
                        help="select the eigenvalue nearest this value (default: largest modulus)")
    common.add_argument("--K", type=float, default=None, dest="K")
    common.add_argument("--delta0", type=float, default=None)
    common.add_argument("--delta", type=float, default=None)
    common.add_argument("--gamma-override", type=float, default=None)
    common.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    common.add_argument("--samples", type=int, default=1000)
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="eigencert", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"eigencert {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="condition number, isolation, radius, bounds")
    a.add_argument("matrix")
    t = sub.add_parser("taylor", parents=[common], help="Taylor enclosures for a perturbed matrix")
    t.add_argument("matrix")
    t.add_argument("perturbed")
    g = sub.add_parser("gap", parents=[common], help="spectral-gap persistence radii")
    g.add_argument("matrix")
    pr = sub.add_parser("perron", parents=[common], help="almost-constant-coefficient certificate")
    pr.add_argument("matrix")
    pr.add_argument("--c", type=_complex, default=None, metavar="RE[,IM]")
    v = sub.add_parser("verify", parents=[common], help="run every soundness campaign")
    v.add_argument("matrix")
    return p


def _config(args) -> dict:
    keys = ("norm", "target", "K", "delta0", "delta", "gamma_override", "seed", "samples")
    return {k: getattr(args, k) for k in keys} | {"command": args.command}


def _selector(args) -> Selector:
    return Selector.largest() if args.target is None else Selector.nearest(args.target)


def _emit(args, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
        log.info("report written to %s", args.out)


def cmd_analyze(args) -> int:
    L = read_matrix(args.matrix)
    data = analyze(L, NormKind.parse(args.norm), _selector(args))
    cert = base_certificate(data, args.gamma_override)
    R = cert.radius_asie
    table = [r_bounds(cert, f * R).as_dict() for f in (0.0, 0.25, 0.5, 0.75)]
    sections = {
        "base": base_summary(data),
        "certificate": certificate_summary(cert),
        "r_bounds": table,
    }
    if args.K is not None:
        kb = k_bounds(cert, args.K)
        sections["k_bounds"] = kb.as_dict()
        sections["projection_enclosure_constants"] = projection_constants(cert, args.K)
    _emit(args, emit_report("analyze", sections, config=_config(args)))
    return EXIT_OK


def cmd_taylor(args) -> int:
    L0 = read_matrix(args.matrix)
    L = read_matrix(args.perturbed)
    if L.shape != L0.shape:
        raise InputError(f"shapes differ: {L0.shape} vs {L.shape}")
    data = analyze(L0, NormKind.parse(args.norm), _selector(args))
    cert = base_certificate(data, args.gamma_override)
    tr = continue_eigenvalue(L0, data.lam, L - L0)
    orders = []
    bad = not tr.ok
    for order in (0, 1, 2):
        enc = taylor_enclosure(data, cert, order, L)
        row = {"order": order, "approx": enc.approx, "half_width": enc.half_width,
               "remainder_coeff": enc.remainder_coeff, "r": enc.r, "K": enc.K}
        if tr.ok:
            err = abs(tr.lam - enc.approx)
            row |= {"oracle_lambda": tr.lam, "error": err, "inside": err <= enc.half_width}
            bad |= err > enc.half_width
        orders.append(row)
    sections = {
        "base": base_summary(data),
        "certificate": certificate_summary(cert),
        "perturbation_norm": op_norm(L - L0, data.kind),
        "oracle": {"tracked": tr.ok, "reason": tr.reason or None},
        "enclosures": orders,
    }
    _emit(args, emit_report("taylor", sections, config=_config(args)))
    return EXIT_VIOLATION if bad else EXIT_OK


def _gap_sections(data, cert, delta0: float, delta: float) -> dict:
    base_check = check_gap_c1(data.L, data, delta0)
    sections = {"base_gap_check": base_check.as_dict()}
    gc = gap_radius_theoremC(data, cert, delta, delta0, base_check=base_check)
    sections["theoremC"] = gc.as_dict()
    try:
        check_regime(data)
    except HypothesisError as exc:
        sections["short_form"] = {"applicable": False, "reason": str(exc)}
    else:
        pi0 = op_norm(data.pi, data.kind)
        short, some = short_form_certificates(data, delta, delta0)
        sections["short_form"] = {
            "applicable": True,
            "radius_delta": short.radius,
            "radius_some_gap": some.radius,
            "gamma0_prime": gamma_from_gap(pi0, delta0),
        }
    return sections


def cmd_gap(args) -> int:
    if args.delta0 is None or args.delta is None:
        raise InputError("gap requires --delta0 and --delta")
    L = read_matrix(args.matrix)
    data = analyze(L, NormKind.parse(args.norm), _selector(args))
    cert = base_certificate(data, args.gamma_override)
    sections = {"base": base_summary(data), "certificate": certificate_summary(cert)}
    sections |= _gap_sections(data, cert, args.delta0, args.delta)
    _emit(args, emit_report("gap", sections, config=_config(args)))
    return EXIT_OK


def cmd_perron(args) -> int:
    L = read_matrix(args.matrix)
    res = perron_certificate(L, args.c)
    sections = {"perron": res.as_dict()}
    if res.passed:
        # oracle observation only: simplicity of the eigenvalue nearest n*c
        vals = np.array([lam for lam, _ in eig_all(L)])
        target = L.shape[0] * res.c
        k = int(np.argmin(np.abs(vals - target)))
        sections["oracle"] = {"eigenvalue_near_nc": vals[k],
                              "min_distance_to_others": float(np.sort(np.abs(vals - vals[k]))[1])}
    _emit(args, emit_report("perron", sections, config=_config(args)))
    return EXIT_OK if res.passed else EXIT_HYPOTHESIS


def cmd_verify(args) -> int:
    L = read_matrix(args.matrix)
    data = analyze(L, NormKind.parse(args.norm), _selector(args))
    cfg = CampaignConfig(seed=args.seed, samples=args.samples)
    gap_cert = None
    if args.delta0 is not None and args.delta is not None:
        cert = base_certificate(data, args.gamma_override)
        gap_cert = gap_radius_theoremC(data, cert, args.delta, args.delta0)
        try:
            gap_cert = short_form_certificates(data, args.delta, args.delta0)[0]
        except HypothesisError:
            pass
    sections = verify(data, cfg, gamma_override=args.gamma_override, gap_cert=gap_cert)
    text = emit_report("verify", sections, config=_config(args) | {"campaign": cfg.as_dict()})
    _emit(args, text)
    total = sum(int(v["violations"]) for v in sections.values()
                if isinstance(v, dict) and "violations" in v)
    return EXIT_VIOLATION if total else EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "taylor": cmd_taylor, "gap": cmd_gap,
            "perron": cmd_perron, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; usage errors are input errors here
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except HypothesisError as exc:
        log.error("hypothesis failure: %s", exc)
        return EXIT_HYPOTHESIS
    except EigenCertError as exc:
        # singular bordered system / lost tracking: the eigenvalue is not usable
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())

