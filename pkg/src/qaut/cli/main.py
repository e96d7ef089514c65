"""Command-line entry point: parse a presentation, run checks, emit a report."""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__
from ..coaction import coaction_suite
from ..embeddings import degeneration_report, embedding_reports
from ..hopf import (check_antipode, check_coassociativity, check_commutativity, check_counit,
                    check_coproduct_well_defined, check_kac_unitarity, system_for)
from ..models import (CapExceeded, DEFAULT_CAP, ad_character, phase_unitaries,
                      appendix_q_checks, au_model_rep, characters_magic_q, check_character,
                      classical_point_discrepancy, commutator_norm, enumerate_characters_magic,
                      NumericRep, numeric_verify, random_unitary, two_projection_rep)
from ..ncalg import X
from ..presentations import Presentation, QMatrix
from ..rewrite import DEFAULT_DEGREE_CAP, DEFAULT_RULE_CAP
from .dsl import DSLSpec, ParseError, build_presentation, parse_dsl

log = logging.getLogger("qaut")

SCHEMA = "qaut.report/1"
COMMANDS = ("check-hopf", "check-coaction", "classical-points", "rep-demo", "appendix-checks",
            "embeddings", "full-report")
EXIT_PASS, EXIT_USAGE, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    dsl: str | None = None
    input: str | None = None
    degree_cap: int = DEFAULT_DEGREE_CAP
    rule_cap: int = DEFAULT_RULE_CAP
    tolerance: float = 1e-9
    seed: int = 0
    output: str | None = None
    trace: str | None = None
    cstar: bool = True
    timings: bool = False

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("output")
        d.pop("trace")
        return d


@dataclass
class Report:
    config: dict
    entries: list = field(default_factory=list)
    presentation: str | None = None

    @property
    def overall(self) -> str:
        req = [e["verdict"] for e in self.entries if e.get("required", True)]
        if "Fail" in req:
            return "Fail"
        if "Inconclusive" in req:
            return "Inconclusive"
        return "Pass"

    @property
    def exit_code(self) -> int:
        return {"Pass": EXIT_PASS, "Fail": EXIT_FAIL, "Inconclusive": EXIT_INCONCLUSIVE}[self.overall]

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "tool": "qaut", "version": __version__,
                "config": self.config, "presentation": self.presentation,
                "entries": self.entries, "overall": self.overall}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def _entry(check: str, verdict: str, required: bool = True, **details) -> dict:
    return {"check": check, "verdict": verdict, "witness": None, "rules_used": 0,
            "elapsed_ms": None, "required": required, "details": details}


def _pass(ok: bool) -> str:
    return "Pass" if ok else "Fail"


class _Runner:
    def __init__(self, cfg: RunConfig, spec: DSLSpec | None):
        self.cfg = cfg
        self.spec = spec
        self.P: Presentation | None = build_presentation(spec) if spec is not None else None
        self._sys = None

    @property
    def budget(self) -> dict:
        return {"degree_cap": self.cfg.degree_cap, "rule_cap": self.cfg.rule_cap,
                "cstar": self.cfg.cstar}

    @property
    def sys(self):
        if self._sys is None:
            self._sys = system_for(self.P, **self.budget)
        return self._sys

    def need_presentation(self, what: str) -> Presentation:
        if self.P is None:
            raise ValueError(f"{what} needs a presentation (input file or --dsl)")
        return self.P

    def json_of(self, reps) -> list:
        return [r.to_json(self.cfg.timings) for r in reps]

    @property
    def kac(self) -> bool:
        P = self.P
        return P.variant in ("aut", "a_u", "a_o_old") or P.Q is None or P.Q.is_identity()

    # -- commands --------------------------------------------------------------

    def check_hopf(self) -> list:
        P = self.need_presentation("check-hopf")
        s = self.sys
        reps = [check_coproduct_well_defined(P, s), check_coassociativity(P, s),
                check_counit(P, s), check_antipode(P, s)]
        kac = check_kac_unitarity(P, s)
        kac.required = self.kac
        return self.json_of(reps + [kac])

    def check_coaction(self) -> list:
        P = self.need_presentation("check-coaction")
        if P.blocks is None:
            return [_entry("coaction.suite", "Inconclusive", False,
                           reason=f"{P.name} has no finite space to act on")]
        return self.json_of(coaction_suite(P, sys=self.sys))

    def classical_points(self) -> list:
        P = self.need_presentation("classical-points")
        space = self.spec.space
        out = []
        if P.kind == "X" and P.variant == "aut":
            n = space.params[0]
            chars = enumerate_characters_magic(n, DEFAULT_CAP)
            ok = len(chars) == math.factorial(n) and all(
                check_character(P, c).passed for c in chars)
            out.append(_entry("models.classical_points", _pass(ok), count=len(chars),
                              points=[c.label for c in chars]))
        elif P.kind == "X" and P.variant == "q_aut":
            n = space.params[0]
            res = classical_point_discrepancy(("X", n), QMatrix.identity(n), P.Q, DEFAULT_CAP)
            chars = characters_magic_q(n, P.Q, DEFAULT_CAP)
            ok = all(check_character(P, c).passed for c in chars)
            out.append(_entry("models.classical_points", _pass(ok), count=len(chars),
                              points=[c.label for c in chars]))
            out.append(_entry("models.classical_point_discrepancy", "Pass", False, **res))
        elif P.kind == "M" and P.variant == "aut" and space.params[0] <= 3:
            n = space.params[0]
            chars = [ad_character(n, w, lab) for lab, w in phase_unitaries(n)]
            reps = [check_character(P, c) for c in chars]
            ok = all(r.passed and r.details.get("induces_automorphism") for r in reps)
            out.append(_entry("models.classical_points", _pass(ok), sampled=True,
                              count=len(chars), points=[c.label for c in chars]))
        elif P.kind == "M" and P.variant == "q_aut" and space.params[0] <= 3:
            n = space.params[0]
            res = classical_point_discrepancy(("M", n), QMatrix.identity(n * n), P.Q)
            out.append(_entry("models.classical_point_discrepancy", "Pass", False, **res))
        else:
            out.append(_entry("models.classical_points", "Inconclusive", False,
                              reason=f"no finite enumeration for {P.name}"))
        return out

    def rep_demo(self) -> list:
        P = self.need_presentation("rep-demo")
        rng = np.random.default_rng(self.cfg.seed)
        tol = self.cfg.tolerance
        out = []
        if P.kind == "X" and P.variant == "aut" and len(P.index) == 4:
            thetas = [math.pi / 4] + sorted(float(t) for t in rng.uniform(0.05, 1.5, 4))
            for th in thetas:
                rep = two_projection_rep(th)
                res = numeric_verify(P, rep)["max_residual"]
                norm = commutator_norm(rep, X(1, 1), X(3, 3))
                expect = abs(math.sin(th) * math.cos(th))
                out.append(_entry("models.two_projection", _pass(res <= 1e-12 and
                                                                 abs(norm - expect) <= tol),
                                  theta=th, max_residual=res, commutator_norm=norm,
                                  expected_norm=expect))
        elif P.kind == "X" and P.variant == "aut":
            n = len(P.index)
            rep = NumericRep(1, {P.entry(a, b): np.array([[float(a == b)]]) for a in P.index
                                 for b in P.index}, tol, "identity character")
            res = numeric_verify(P, rep)
            out.append(_entry("models.identity_character", _pass(res["ok"]),
                              max_residual=res["max_residual"]))
        elif P.kind == "M" and P.variant == "aut":
            n = P.blocks[0]
            for w in (np.eye(n), random_unitary(n, rng)):
                res = numeric_verify(P, au_model_rep(n, w, tol))
                out.append(_entry("models.au_model", _pass(res["ok"]),
                                  max_residual=res["max_residual"],
                                  w=[[[float(z.real), float(z.imag)] for z in row] for row in w]))
        else:
            out.append(_entry("models.rep_demo", "Inconclusive", False,
                              reason=f"no stored representation for {P.name}"))
        return out

    def appendix_checks(self) -> list:
        tol = self.cfg.tolerance
        res = appendix_q_checks(seed=self.cfg.seed, tol=tol)
        lit = max((c.get("literal_ptilde_residual", 0.0) for c in res["cases"]), default=0.0)
        out = [_entry("appendix.q_twisted_equivalence", _pass(res["ok"]),
                      samples=len(res["cases"]),
                      max_p_ptilde_residual=res["max_p_ptilde_residual"]),
               _entry("appendix.literal_ptilde", _pass(lit <= tol), False,
                      max_residual=lit)]
        if self.spec is not None and self.spec.Q is not None:
            Qn = np.array([[complex(x) for x in row] for row in self.spec.Q.entries])
            mine = appendix_q_checks(Qn, seed=self.cfg.seed, tol=tol)
            out.append(_entry("appendix.given_Q", _pass(mine["ok"]), cases=mine["cases"]))
        return out

    def embeddings(self) -> list:
        blocks = (1, 2)
        if self.spec is not None and self.spec.space is not None \
                and self.spec.space.kind == "blocks" and len(self.spec.space.params) > 1:
            blocks = self.spec.space.params
        out = self.json_of(embedding_reports(blocks, **self.budget))
        for m in (2, 3):
            d = degeneration_report(m, **self.budget)
            ok = d["magic_subset_of_renamed"] and d["renamed_in_magic_ideal"] \
                and d["magic_in_renamed_ideal"]
            out.append(_entry("embedding.degeneration", _pass(ok), **d))
        return out

    def full_report(self) -> list:
        P = self.need_presentation("full-report")
        out = self.check_hopf()
        if P.blocks is not None:
            out += self.check_coaction()
        out += self.classical_points()
        out += self.rep_demo()
        if len(P.generators) <= 16:
            out += self.json_of([check_commutativity(P, self.sys)])
        return out


def run(cfg: RunConfig) -> Report:
    text = cfg.dsl
    if text is None and cfg.input is not None:
        text = sys.stdin.read() if cfg.input == "-" else Path(cfg.input).read_text()
    spec = parse_dsl(text) if text is not None else None
    runner = _Runner(cfg, spec)
    handler = getattr(runner, cfg.command.replace("-", "_"))
    entries = handler()
    if cfg.trace and runner.P is not None:
        runner.sys.write_trace(cfg.trace)
    return Report(cfg.echo() | {"dsl": None if spec is None else spec.to_json(),
                                "version": __version__},
                  entries, None if runner.P is None else runner.P.name)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qaut", description=(
        "Check Hopf, coaction and model claims for quantum automorphism presentations."))
    ap.add_argument("--version", action="version", version=f"qaut {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("input", nargs="?", help="presentation file in the DSL, or - for stdin")
        p.add_argument("-e", "--dsl", help="inline presentation, e.g. 'space X(3); variant aut;'")
        p.add_argument("--degree-cap", type=int, default=DEFAULT_DEGREE_CAP)
        p.add_argument("--rule-cap", type=int, default=DEFAULT_RULE_CAP)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", metavar="PATH", help="write the JSON report (- for stdout)")
        p.add_argument("--trace", metavar="PATH", help="write the completion trace as JSONL")
        p.add_argument("--no-cstar", action="store_true",
                       help="purely algebraic completion, without positivity lemmas")
        p.add_argument("--timings", action="store_true",
                       help="include elapsed times (makes output nondeterministic)")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    cfg = RunConfig(args.command, args.dsl, args.input, args.degree_cap, args.rule_cap,
                    args.tol, args.seed, args.json, args.trace, not args.no_cstar, args.timings)
    needs_input = args.command not in ("appendix-checks", "embeddings")
    if needs_input and cfg.dsl is None and cfg.input is None:
        print(f"qaut {args.command}: an input file or --dsl is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run(cfg)
    except ParseError as exc:
        print(f"qaut: parse error at {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, KeyError, CapExceeded) as exc:
        print(f"qaut: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.output == "-":
        sys.stdout.write(report.dumps())
    else:
        if cfg.output:
            Path(cfg.output).write_text(report.dumps())
        for e in report.entries:
            mark = e["verdict"].upper() if e.get("required", True) else e["verdict"].lower()
            print(f"{mark:13s} {e['check']}")
        print(f"overall: {report.overall}")
    return report.exit_code
