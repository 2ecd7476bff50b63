"""Command-line front end.

Subcommands: moments, ortho, exists, cubature, qcheck, verify.
Exit codes: 0 success / rule exists, 10 no Gaussian cubature (or failed
verification), 20 input or format error, 30 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import cubature as cub
from . import existence, measures, ortho, qcheck
from .indexing import dim_total, format_multiindex, glex_enumerate, parse_multiindex

EXIT_OK = 0
EXIT_NO_CUBATURE = 10
EXIT_INPUT = 20
EXIT_NUMERICAL = 30


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad usage; the exit-code contract says 20.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


@dataclass
class RunConfig:
    subcommand: str
    catalog: str | None = None
    moments: str | None = None
    m: int = 1
    tol: float = 1e-8
    commutation_tol: float = 1e-8
    seed: int = cub.DEFAULT_SEED
    out: str | None = None
    fmt: str = "text"
    sigma: str | None = None
    d_max: int | None = None
    rule: str | None = None
    sign: int = -1


def _fmt(v: float) -> str:
    return repr(float(v))


def _vec(v) -> str:
    return ", ".join(_fmt(x) for x in np.asarray(v).ravel())


class Report:
    """Accumulates key/value pairs; renders as text or machine-readable lines."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[tuple[str, str]] = []

    def add(self, key: str, value) -> None:
        if isinstance(value, float):
            value = _fmt(value)
        self.lines.append((key, str(value)))

    def render(self) -> str:
        if self.fmt == "machine":
            return "\n".join(f"{k} = {v}" for k, v in self.lines)
        width = max((len(k) for k, _ in self.lines), default=0)
        return "\n".join(f"{k.replace('_', ' '):<{width}}  {v}" for k, v in self.lines)


def _load_sequence(cfg: RunConfig, d_max: int):
    """Moment source resolution: exactly one of --catalog / --moments."""
    if (cfg.catalog is None) == (cfg.moments is None):
        raise ValueError("exactly one of --catalog and --moments is required")
    if cfg.catalog is not None:
        spec = measures.parse_measure_spec(cfg.catalog)
        return measures.catalog_moments(spec, d_max), spec
    seq = measures.load_moments(cfg.moments)
    if seq.d_max < d_max:
        raise ValueError(f"moment file holds degrees <= {seq.d_max}, need {d_max}")
    return measures.normalize_probability(seq), None


def _existence(cfg: RunConfig):
    seq, spec = _load_sequence(cfg, 4 * cfg.m)
    seq = measures.normalize_probability(seq)
    basis = ortho.build_orthobasis(seq, 2 * cfg.m)
    system = existence.assemble_system(seq, basis, cfg.m)
    verdict = existence.solve_existence(system, cfg.tol)
    return seq, spec, basis, system, verdict


def _cmd_exists(cfg: RunConfig) -> tuple[int, str]:
    seq, _, _, system, verdict = _existence(cfg)
    rep = Report(cfg.fmt)
    rep.add("verdict", "exists" if verdict.exists else "no-gaussian-cubature")
    rep.add("t_m", system.shape[0])
    rep.add("r_2m", system.shape[1])
    rep.add("s_m_minus_1", dim_total(seq.n, cfg.m - 1))
    rep.add("rank", verdict.rank)
    rep.add("residual", verdict.residual)
    rep.add("relative_residual", verdict.relative_residual)
    rep.add("tol", verdict.tol)
    rep.add("u", _vec(verdict.u))
    return (EXIT_OK if verdict.exists else EXIT_NO_CUBATURE), rep.render()


def _cmd_cubature(cfg: RunConfig) -> tuple[int, str]:
    seq, spec, basis, system, verdict = _existence(cfg)
    rep = Report(cfg.fmt)
    rep.add("verdict", "exists" if verdict.exists else "no-gaussian-cubature")
    rep.add("relative_residual", verdict.relative_residual)
    if not verdict.exists:
        return EXIT_NO_CUBATURE, rep.render()
    box = spec.box_support() if spec is not None else None
    rule = cub.build_rule(
        seq, basis, cfg.m, commutation_tol=cfg.commutation_tol, seed=cfg.seed, box=box
    )
    z = cub.complete_moments(seq, basis, verdict.u, cfg.m)
    flat = cub.flatness_check(z, basis, cfg.m)
    rep.add("nodes", rule.nodes.shape[0])
    rep.add("precision", rule.precision)
    rep.add("scale", rule.scale)
    rep.add("max_exactness_error", rule.report.max_error)
    rep.add("node_residual", rule.report.node_residual)
    rep.add("min_weight", rule.report.min_weight)
    rep.add("flat", flat.flat)
    rep.add("flat_rank", flat.rank)
    if cfg.fmt == "machine":
        for k, (x, w) in enumerate(zip(rule.nodes, rule.weights)):
            rep.add(f"node_{k}", f"{_vec(x)} : {_fmt(w)}")
    else:
        for x, w in zip(rule.nodes, rule.weights):
            rep.add("node", f"({_vec(x)})  weight {_fmt(w)}")
    if cfg.out:
        cub.store_rule(rule, cfg.out)
        rep.add("rule_file", cfg.out)
    return EXIT_OK, rep.render()


def _cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    if cfg.rule is None:
        raise ValueError("verify needs --rule FILE")
    rule = cub.load_rule(cfg.rule)
    cfg.m = rule.m
    seq, spec, basis, _, _ = _existence(cfg)
    box = spec.box_support() if spec is not None else None
    report = cub.verify_exactness(rule, seq, basis, box=box)
    rep = Report(cfg.fmt)
    rep.add("max_exactness_error", report.max_error)
    rep.add("node_residual", report.node_residual)
    rep.add("min_weight", report.min_weight)
    rep.add("inside_support", report.inside_support)
    scale_ok = abs(rule.scale - seq.scale) <= 1e-8 * max(1.0, seq.scale)
    ok = (
        report.max_error <= cfg.tol * max(1.0, seq.scale)
        and report.node_residual <= cfg.tol
        and report.min_weight > 0
        and scale_ok
        and report.inside_support is not False
    )
    rep.add("verified", ok)
    return (EXIT_OK if ok else EXIT_NO_CUBATURE), rep.render()


def _cmd_moments(cfg: RunConfig) -> tuple[int, str]:
    if cfg.d_max is None:
        raise ValueError("moments needs --d-max")
    seq, _ = _load_sequence(cfg, cfg.d_max)
    if cfg.out:
        measures.store_moments(seq, cfg.out)
        return EXIT_OK, f"wrote {cfg.out}"
    lines = [
        f"n = {seq.n}",
        f"d_max = {seq.d_max}",
        f"normalized = {'true' if seq.normalized else 'false'}",
        f"scale = {seq.scale.hex()}",
    ]
    for alpha in glex_enumerate(seq.n, seq.d_max).indices:
        lines.append(f'"{format_multiindex(alpha)}": {seq.values[alpha].hex()}')
    return EXIT_OK, "\n".join(lines)


def _cmd_ortho(cfg: RunConfig) -> tuple[int, str]:
    if cfg.sigma is None:
        raise ValueError("ortho needs --sigma")
    sigma = parse_multiindex(cfg.sigma)
    d = sum(sigma)
    seq, _ = _load_sequence(cfg, 2 * d)
    seq = measures.normalize_probability(seq)
    basis = ortho.build_orthobasis(seq, d)
    row = basis.row(sigma)
    rep = Report(cfg.fmt)
    rep.add("sigma", format_multiindex(sigma))
    rep.add("coefficients", _vec(row[: basis.table.rank(sigma) + 1]))
    terms = []
    for pos, c in enumerate(row):
        if c == 0.0:
            continue
        alpha = basis.table.indices[pos]
        mono = "*".join(
            f"x{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(alpha) if a > 0
        )
        terms.append(f"{c:+.12g}" + (f"*{mono}" if mono else ""))
    rep.add("polynomial", " ".join(terms) if terms else "0")
    return EXIT_OK, rep.render()


def _cmd_qcheck(cfg: RunConfig) -> tuple[int, str]:
    seq, spec, basis, _, verdict = _existence(cfg)
    rep = Report(cfg.fmt)
    rep.add("verdict", "exists" if verdict.exists else "no-gaussian-cubature")
    if not verdict.exists:
        return EXIT_NO_CUBATURE, rep.render()
    q = qcheck.build_Q(basis, verdict.u, sign=cfg.sign)
    dev = qcheck.verify_corollary(seq, basis, q, cfg.m)
    box = spec.box_support() if spec is not None else None
    rule = cub.build_rule(
        seq, basis, cfg.m, commutation_tol=cfg.commutation_tol, seed=cfg.seed, box=box
    )
    remark = qcheck.verify_remark(seq, basis, q, cfg.m, rule)
    rep.add("sign", q.sign)
    rep.add("corollary_deviation", dev)
    rep.add("remark_u_from_rule", remark.u_from_rule)
    rep.add("remark_low_degree", remark.low_degree)
    rep.add("remark_top_degree", remark.top_degree)
    rep.add("remark_mean", remark.mean)
    return EXIT_OK, rep.render()


_COMMANDS = {
    "moments": _cmd_moments,
    "ortho": _cmd_ortho,
    "exists": _cmd_exists,
    "cubature": _cmd_cubature,
    "qcheck": _cmd_qcheck,
    "verify": _cmd_verify,
}


def _add_source_args(p: _Parser) -> None:
    p.add_argument("--catalog", help="catalog spec, e.g. lebesgue^2 or symmetrized:0.5")
    p.add_argument("--moments", help="moment file path")
    p.add_argument("--format", dest="fmt", choices=("text", "machine"), default="text")


def build_parser() -> _Parser:
    parser = _Parser(prog="gausscub", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("moments", parents=[], help="emit a moment file")
    _add_source_args(p)
    p.add_argument("--d-max", dest="d_max", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("ortho", help="print an orthonormal polynomial")
    _add_source_args(p)
    p.add_argument("--sigma", required=True, help='multi-index, e.g. "1,1"')

    for name in ("exists", "cubature", "qcheck"):
        p = sub.add_parser(name)
        _add_source_args(p)
        p.add_argument("--m", type=int, required=True, help="half-degree (precision 2m-1)")
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--commutation-tol", dest="commutation_tol", type=float, default=1e-8)
        p.add_argument("--seed", type=int, default=cub.DEFAULT_SEED)
        if name == "cubature":
            p.add_argument("--out", help="rule file to write")
        if name == "qcheck":
            p.add_argument("--sign", type=int, choices=(-1, 1), default=-1)

    p = sub.add_parser("verify", help="re-check a rule file against a moment source")
    _add_source_args(p)
    p.add_argument("--rule", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    return parser


def run(cfg: RunConfig) -> tuple[int, str]:
    if cfg.m < 1:
        raise ValueError("m must be >= 1")
    if cfg.tol <= 0 or cfg.commutation_tol <= 0:
        raise ValueError("tolerances must be positive")
    return _COMMANDS[cfg.subcommand](cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(subcommand=args.subcommand)
    for name in vars(cfg):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    try:
        code, text = run(cfg)
    except (measures.MomentFormatError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (measures.NotPositiveDefiniteError, cub.DegenerateSpectrumError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    if text:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
