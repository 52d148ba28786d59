"""Command-line front end: ``storagecode <command> ...``.

Exit codes: 0 pass, 1 verification failure, 2 usage/parse, 3 I/O, 4 resource.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import families, gf2, ideals
from .algebra import dumps_polynomial, parse_polynomial
from .code import (
    DEFAULT_MAX_K,
    DEFAULT_SEED,
    CodeSpace,
    ConnectionSet,
    ceiling_witness,
    check_storage_property,
    code_rate,
    codewords_text,
    connection_set_from_element,
    coset_matrix,
    dimacs_text,
    edge_list_text,
    repair_all,
)
from .errors import ParameterError, StorageCodeError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO, EXIT_RESOURCE = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    name: str | None = None
    r: str | None = None
    k: str | None = None
    input: Path | None = None
    out: Path | None = None
    seed: int = DEFAULT_SEED
    max_arity: int | None = None
    max_k: int = DEFAULT_MAX_K
    fmt: str = "text"
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.input is not None and not self.input.is_file():
            raise FileNotFoundError(f"input file not found: {self.input}")
        if self.out is not None and not self.out.parent.exists():
            raise FileNotFoundError(f"output directory does not exist: {self.out.parent}")
        if self.max_k < 1:
            raise ParameterError("--max-k must be >= 1")


def _int_or_none(text: str | None) -> int | None:
    if text is None:
        return None
    try:
        return int(text)
    except ValueError:
        raise ParameterError(f"expected an integer, got {text!r}") from None


def parse_range(text: str | None) -> list[int | None]:
    """``"3..8"`` -> [3..8]; ``"4"`` -> [4]; None -> [None]. Empty if hi < lo."""
    if text is None:
        return [None]
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _load_connection_set(cfg: RunConfig) -> ConnectionSet:
    text = cfg.input.read_text()
    if cfg.extra.get("masks"):
        return ConnectionSet.loads(text)
    return connection_set_from_element(parse_polynomial(text))


def _emit(cfg: RunConfig, text: str, payload: dict | None = None) -> None:
    if cfg.fmt == "json" and payload is not None:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if cfg.out is not None and cfg.command in ("rate", "verify", "table", "ideal-verify"):
        cfg.out.write_text(text)
    sys.stdout.write(text)


def _frac(x: Fraction | None) -> str:
    return "none" if x is None else f"{x.numerator}/{x.denominator}"


# ------------------------------------------------------------------ commands


def cmd_family(cfg: RunConfig) -> int:
    inst = families.build(cfg.name, _int_or_none(cfg.r), _int_or_none(cfg.k))
    poly = dumps_polynomial(inst.element, comment=inst.label())
    if cfg.out is None:
        sys.stdout.write(poly)
        sys.stdout.write(inst.sidecar_json())
    else:
        cfg.out.write_text(poly)
        sidecar = cfg.out.with_name(cfg.out.name + ".json")
        sidecar.write_text(inst.sidecar_json())
        print(f"wrote {cfg.out} and {sidecar}")
        print(f"bounds: [{inst.rate_lower}, {inst.rate_upper}]")
    return EXIT_OK


def cmd_rate(cfg: RunConfig) -> int:
    conn = _load_connection_set(cfg)
    report = code_rate(conn, cfg.max_k)
    lines = [
        f"arity            {report.arity}",
        f"code_length      {report.code_length}",
        f"code_dim         {report.code_dim}",
        f"rate             {_frac(report.rate)} ({float(report.rate):.6f})",
        f"triangle_free    {report.triangle_free}",
        f"degree           {report.degree}" + ("  (edgeless)" if report.edgeless else ""),
        f"edge_count       {report.edge_count}",
        f"ceiling (k<={cfg.max_k})  {_frac(report.ceiling_from_necessary_conditions)}",
    ]
    _emit(cfg, "\n".join(lines) + "\n", report.to_dict())
    return EXIT_OK


def run_checks(conn: ConnectionSet, samples: int, repair_words: int, seed: int, max_k: int) -> dict:
    """All per-connection-set checks used by ``verify``; returns a JSON-able dict."""
    space = CodeSpace.build(conn)
    n_rank = space.length - space.dim
    report = code_rate(conn, max_k, code_dim=space.dim)
    checks = []

    def add(name: str, ok: bool, detail: str) -> None:
        checks.append({"name": name, "passed": bool(ok), "detail": detail})

    add("triangle_free", report.triangle_free, "no three nonzero masks XOR to zero")

    words = space.sample(samples, seed)
    stored = [check_storage_property(conn, w) for w in words]
    add("storage_property", all(stored), f"{sum(stored)}/{samples} sampled codewords")

    bad = 0
    vertices = 0
    for w in words[:repair_words]:
        vertices += space.length
        bad += int(np.count_nonzero(repair_all(conn, w) != w))
    add("single_vertex_repair", bad == 0, f"{vertices - bad}/{vertices} erasures repaired")

    ceiling = report.ceiling_from_necessary_conditions
    ok = ceiling is None or report.rate <= ceiling
    witness = ceiling_witness(conn, max_k)
    add("rate_below_ceiling", ok, f"rate {_frac(report.rate)} vs ceiling {_frac(ceiling)} witness {witness}")

    f = conn.element()
    h_rank = gf2.rank(coset_matrix(conn))
    i_dim = ideals.ideal_dim(ideals.IdealHandle.principal(f))
    a_dim = ideals.annihilator_dim(f)
    add(
        "dual_code_is_principal_ideal",
        h_rank == i_dim == n_rank,
        f"rank H = {h_rank}, dim <f> = {i_dim}",
    )
    add(
        "code_is_annihilator",
        space.dim == a_dim == space.length - h_rank,
        f"dim Null(H) = {space.dim}, dim ann f = {a_dim}",
    )
    return {
        "report": report.to_dict(),
        "seed": seed,
        "samples": samples,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


def cmd_verify(cfg: RunConfig) -> int:
    conn = _load_connection_set(cfg)
    result = run_checks(conn, cfg.extra["samples"], cfg.extra["repair_words"], cfg.seed, cfg.max_k)
    rep = result["report"]
    lines = [
        f"arity {rep['arity']}  rate {rep['rate']['exact']}  "
        f"ceiling {rep['ceiling_from_necessary_conditions']}  seed {cfg.seed}"
    ]
    for c in result["checks"]:
        lines.append(f"[{'PASS' if c['passed'] else 'FAIL'}] {c['name']}: {c['detail']}")
    _emit(cfg, "\n".join(lines) + "\n", result)
    return EXIT_OK if result["passed"] else EXIT_FAIL


def table_rows(family: str, r_values, k_values, max_k: int) -> list[dict]:
    rows = []
    for r in r_values:
        for k in k_values:
            inst = families.build(family, r, k)
            conn = connection_set_from_element(inst.element)
            # the tight ceiling for the generalized family needs r rows
            mk = max(max_k, r) if family == "generalized" and r else max_k
            report = code_rate(conn, mk)
            rows.append(
                {
                    **inst.params,
                    "N": report.code_length,
                    "degree": report.degree,
                    "code_dim": report.code_dim,
                    "rate": _frac(report.rate),
                    "rate_float": float(report.rate),
                    "lower": _frac(inst.rate_lower),
                    "upper": _frac(inst.rate_upper),
                    "ceiling": _frac(report.ceiling_from_necessary_conditions),
                    "triangle_free": report.triangle_free,
                    "within_bounds": inst.rate_lower <= report.rate <= inst.rate_upper,
                }
            )
    return rows


def format_table(rows: list[dict]) -> str:
    if not rows:
        return "(empty table)\n"
    headers = list(rows[0].keys())
    cells = [[h] + [f"{row[h]:.6f}" if isinstance(row[h], float) else str(row[h]) for row in rows] for h in headers]
    widths = [max(len(c) for c in col) for col in cells]
    out = []
    for i in range(len(rows) + 1):
        out.append("  ".join(col[i].rjust(w) for col, w in zip(cells, widths)))
    return "\n".join(out) + "\n"


def cmd_table(cfg: RunConfig) -> int:
    family = cfg.name
    if family not in families.FAMILIES:
        raise ParameterError(f"unknown family {family!r}")
    r_values = parse_range(cfg.r) if family != "seven_eighths" else [None]
    k_values = parse_range(cfg.k) if family != "hamming" else [None]
    rows = table_rows(family, r_values, k_values, cfg.max_k)
    payload = {"family": family, "rows": rows}
    _emit(cfg, format_table(rows), payload)
    return EXIT_OK


def cmd_ideal_verify(cfg: RunConfig) -> int:
    n = cfg.extra["n"]
    report = ideals.verify_ideal_identities(n, seed=cfg.seed, partitions=cfg.extra["partitions"])
    lines = [f"P_{n}  seed {cfg.seed}  partitions {report.partitions}"]
    for it in report.items:
        status = "PASS" if it.passed else "FAIL"
        extra = f"  counterexample {it.counterexample}" if it.counterexample else ""
        lines.append(f"[{status}] {it.name}: {it.cases} cases{extra}")
    _emit(cfg, "\n".join(lines) + "\n", report.to_dict())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_export(cfg: RunConfig) -> int:
    conn = _load_connection_set(cfg)
    what = cfg.extra["what"]
    if what == "matrix":
        text = coset_matrix(conn).dumps()
    elif what == "edges":
        text = edge_list_text(conn)
    elif what == "dimacs":
        text = dimacs_text(conn)
    elif what == "codewords":
        text = codewords_text(CodeSpace.build(conn).basis())
    else:
        text = conn.dumps()
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text)
    return EXIT_OK


COMMANDS = {
    "family": cmd_family,
    "rate": cmd_rate,
    "verify": cmd_verify,
    "table": cmd_table,
    "ideal-verify": cmd_ideal_verify,
    "export": cmd_export,
}


# ------------------------------------------------------------------ parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 2, as argparse does, without SystemExit noise
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="storagecode", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, with_input=True):
        if with_input:
            sp.add_argument("input", type=Path, help="polynomial file (or connection-set file with --masks)")
            sp.add_argument("--masks", action="store_true", help="input is a hex-mask connection-set file")
        sp.add_argument("--out", type=Path)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--max-k", type=int, default=DEFAULT_MAX_K)
        sp.add_argument("--max-arity", type=int, help="override the dense-matrix arity ceiling")
        sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("family", help="write a family element and its bounds")
    sp.add_argument("--name", required=True, choices=families.FAMILIES)
    sp.add_argument("--r")
    sp.add_argument("--k")
    common(sp, with_input=False)

    common(sub.add_parser("rate", help="exact rate report"))

    sp = sub.add_parser("verify", help="triangle, storage, repair and ideal consistency checks")
    common(sp)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--repair-words", type=int, default=10)

    sp = sub.add_parser("table", help="rate table over a parameter range, e.g. --r 3..8")
    sp.add_argument("--family", dest="name", required=True, choices=families.FAMILIES)
    sp.add_argument("--r")
    sp.add_argument("--k")
    common(sp, with_input=False)

    sp = sub.add_parser("ideal-verify", help="check ideal/annihilator identities in P_n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--partitions", type=int, default=ideals.DEFAULT_PARTITIONS)
    common(sp, with_input=False)
    sp.set_defaults(seed=ideals.DEFAULT_SEED)

    sp = sub.add_parser("export", help="export H, the graph, or a code basis")
    common(sp)
    sp.add_argument(
        "--what", choices=("matrix", "edges", "dimacs", "codewords", "connection-set"), default="matrix"
    )
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    extra = {
        key: getattr(args, key)
        for key in ("masks", "samples", "repair_words", "n", "partitions", "what")
        if hasattr(args, key)
    }
    return RunConfig(
        command=args.command,
        name=getattr(args, "name", None),
        r=getattr(args, "r", None),
        k=getattr(args, "k", None),
        input=getattr(args, "input", None),
        out=args.out,
        seed=args.seed,
        max_arity=args.max_arity,
        max_k=args.max_k,
        fmt=args.format,
        extra=extra,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cfg = config_from_args(args)
    previous = os.environ.get(gf2.ENV_MAX_ARITY)
    try:
        if cfg.max_arity is not None:
            os.environ[gf2.ENV_MAX_ARITY] = str(cfg.max_arity)
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except StorageCodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    finally:
        if cfg.max_arity is not None:
            if previous is None:
                os.environ.pop(gf2.ENV_MAX_ARITY, None)
            else:
                os.environ[gf2.ENV_MAX_ARITY] = previous


if __name__ == "__main__":
    sys.exit(main())
