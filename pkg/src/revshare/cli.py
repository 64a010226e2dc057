"""Command-line front end.

Subcommands: solve (one equilibrium), sweep (CSV over a range of dominant
rates), bargain (one bargaining solution), tax (neutralizing taxes), verify
(oracle certification of a contract), and figures (preset sweeps reproducing
the standard comparison plots, optionally rendered to PNG).  All results go
to stdout, diagnostics to stderr; output is byte-identical across runs.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields

from .bargaining import (
    BargainingOutcome,
    BargainingProblem,
    nbs_closed_form,
    nbs_numeric,
    ne_disagreement,
)
from .equilibria import (
    EquilibriumReport,
    neutral_equilibrium,
    nonneutral_equilibrium,
)
from .model import NEUTRAL, NONNEUTRAL, REGIMES, Contract, MarketParams
from .numerics import BracketError, ConvergenceError
from .oracle import verify_equilibrium
from .regulator import TAX_MODES, neutralizing_tax

__all__ = [
    "OUTPUT_EQUILIBRIA",
    "OUTPUT_BARGAINING_ZERO_D",
    "OUTPUT_BARGAINING_NE_D",
    "CSV_HEADER",
    "SweepSpec",
    "SweepRow",
    "run_sweep",
    "emit_csv",
    "run_command",
    "main",
]

OUTPUT_EQUILIBRIA = "equilibria"
OUTPUT_BARGAINING_ZERO_D = "bargaining_zero_d"
OUTPUT_BARGAINING_NE_D = "bargaining_ne_d"
_OUTPUTS = (OUTPUT_EQUILIBRIA, OUTPUT_BARGAINING_ZERO_D, OUTPUT_BARGAINING_NE_D)

CSV_HEADER = (
    "r1,r2,c,beta1_nn,beta2_nn,beta1_n,beta2_n,a1_nn,a2_nn,a_n,"
    "ucp1_nn,ucp2_nn,ucp1_n,ucp2_n,uisp_nn,uisp_n,su_nn,su_n,"
    "total_effort_nn,total_effort_n,"
    "beta1_b,beta2_b,ucp1_b,ucp2_b,uisp_b,su_b,error"
)

_SOLVER_ERRORS = (ValueError, BracketError, ConvergenceError)


@dataclass(frozen=True)
class SweepSpec:
    """Uniform sweep of the dominant rate r1 with r2 and c fixed."""

    r1_from: float
    r1_to: float
    r1_steps: int
    r2: float
    c: float
    outputs: frozenset[str] = frozenset({OUTPUT_EQUILIBRIA})

    def __post_init__(self) -> None:
        if not self.r1_from <= self.r1_to:
            raise ValueError("sweep requires r1_from <= r1_to")
        if self.r1_steps < 2:
            raise ValueError("sweep requires at least 2 steps")
        if not (self.r2 > 0.0 and self.c > 0.0):
            raise ValueError("r2 and c must be positive")
        unknown = set(self.outputs) - set(_OUTPUTS)
        if unknown:
            raise ValueError(f"unknown outputs: {sorted(unknown)}")
        bargaining = self.outputs & {
            OUTPUT_BARGAINING_ZERO_D,
            OUTPUT_BARGAINING_NE_D,
        }
        if len(bargaining) > 1:
            raise ValueError(
                "a sweep carries at most one bargaining variant per run"
            )

    def r1_values(self) -> list[float]:
        span = self.r1_to - self.r1_from
        last = self.r1_steps - 1
        return [self.r1_from + span * i / last for i in range(self.r1_steps)]


@dataclass
class SweepRow:
    """One CSV row; unset fields render as empty strings."""

    r1: float
    r2: float
    c: float
    beta1_nn: float | None = None
    beta2_nn: float | None = None
    beta1_n: float | None = None
    beta2_n: float | None = None
    a1_nn: float | None = None
    a2_nn: float | None = None
    a_n: float | None = None
    ucp1_nn: float | None = None
    ucp2_nn: float | None = None
    ucp1_n: float | None = None
    ucp2_n: float | None = None
    uisp_nn: float | None = None
    uisp_n: float | None = None
    su_nn: float | None = None
    su_n: float | None = None
    total_effort_nn: float | None = None
    total_effort_n: float | None = None
    beta1_b: float | None = None
    beta2_b: float | None = None
    ucp1_b: float | None = None
    ucp2_b: float | None = None
    uisp_b: float | None = None
    su_b: float | None = None
    error: str = ""

    def note_error(self, message: str) -> None:
        clean = str(message).replace(",", ";").replace("\n", " ")
        self.error = f"{self.error}; {clean}" if self.error else clean


def _fill_equilibria(row: SweepRow, nn: EquilibriumReport, nt: EquilibriumReport) -> None:
    row.beta1_nn, row.beta2_nn = nn.contract.shares
    row.beta1_n, row.beta2_n = nt.contract.shares
    row.a1_nn, row.a2_nn = nn.efforts.efforts
    row.a_n = nt.efforts.efforts[0]
    row.ucp1_nn, row.ucp2_nn = nn.utilities.cp
    row.ucp1_n, row.ucp2_n = nt.utilities.cp
    row.uisp_nn = nn.utilities.isp_net
    row.uisp_n = nt.utilities.isp_net
    row.su_nn = nn.utilities.social
    row.su_n = nt.utilities.social
    row.total_effort_nn = nn.total_effort
    row.total_effort_n = nt.total_effort


def _fill_bargaining(row: SweepRow, outcome: BargainingOutcome) -> None:
    row.beta1_b, row.beta2_b = outcome.contract.shares
    row.ucp1_b, row.ucp2_b = outcome.utilities.cp
    row.uisp_b = outcome.utilities.isp_net
    row.su_b = outcome.utilities.social


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Evaluate the sweep row by row; solver failures land in the error
    column instead of aborting."""
    rows = []
    for r1 in spec.r1_values():
        row = SweepRow(r1=r1, r2=spec.r2, c=spec.c)
        params = MarketParams.of((r1, spec.r2), spec.c)
        try:
            _fill_equilibria(
                row, nonneutral_equilibrium(params), neutral_equilibrium(params)
            )
        except _SOLVER_ERRORS as exc:
            row.note_error(f"equilibria: {exc}")
            rows.append(row)
            continue
        if OUTPUT_BARGAINING_ZERO_D in spec.outputs:
            try:
                _fill_bargaining(row, nbs_closed_form(BargainingProblem(params)))
            except _SOLVER_ERRORS as exc:
                row.note_error(f"bargaining: {exc}")
        elif OUTPUT_BARGAINING_NE_D in spec.outputs:
            try:
                problem = BargainingProblem(params, ne_disagreement(params))
                _fill_bargaining(row, nbs_numeric(problem))
            except _SOLVER_ERRORS as exc:
                row.note_error(f"bargaining: {exc}")
        rows.append(row)
    return rows


def _fmt(value: float | None) -> str:
    if value is None:
        return ""
    return f"{value:.12g}"


_CSV_FIELDS = [f.name for f in fields(SweepRow)]


def emit_csv(rows: list[SweepRow]) -> str:
    """Render rows as CSV text with 12-significant-digit numbers.

    The header is fixed, rows follow input order, lines end with a single
    newline and the text ends with exactly one trailing newline.
    """
    lines = [CSV_HEADER]
    for row in rows:
        cells = []
        for name in _CSV_FIELDS:
            value = getattr(row, name)
            cells.append(value if name == "error" else _fmt(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _verify_sweep(rows: list[SweepRow], mode: str, step: float, tol: float) -> None:
    stride = 8 if mode == "spot" else 1
    for i in range(0, len(rows), stride):
        row = rows[i]
        if row.error:
            continue
        params = MarketParams.of((row.r1, row.r2), row.c)
        checks = (
            (NONNEUTRAL, (row.beta1_nn, row.beta2_nn)),
            (NEUTRAL, (row.beta1_n, row.beta2_n)),
        )
        for regime, shares in checks:
            report = verify_equilibrium(
                params, regime, Contract(shares=shares), step, tol
            )
            if not report.passed:
                row.note_error(
                    f"verify {regime}: gain {report.max_unilateral_gain:.3e}"
                )


# ---------------------------------------------------------------------------
# report formatting


def _fmt_seq(values) -> str:
    return ", ".join(f"{v:.12g}" for v in values)


def _format_equilibrium(report: EquilibriumReport) -> str:
    contributing = (
        " ".join(str(i + 1) for i in sorted(report.contributing_set)) or "-"
    )
    flags = " ".join(report.flags) or "-"
    return "\n".join(
        [
            f"regime: {report.regime}",
            f"shares: {_fmt_seq(report.contract.shares)}",
            f"efforts: {_fmt_seq(report.efforts.efforts)}",
            f"cp_utilities: {_fmt_seq(report.utilities.cp)}",
            f"isp_net_utility: {report.utilities.isp_net:.12g}",
            f"social_utility: {report.utilities.social:.12g}",
            f"total_effort: {report.total_effort:.12g}",
            f"multiplicity: {report.multiplicity}",
            f"contributing_cps: {contributing}",
            f"flags: {flags}",
        ]
    )


def _format_bargaining(outcome: BargainingOutcome, disagreement) -> str:
    flags = " ".join(outcome.flags) or "-"
    return "\n".join(
        [
            f"case: {outcome.case_tag}",
            f"shares: {_fmt_seq(outcome.contract.shares)}",
            f"cp_utilities: {_fmt_seq(outcome.utilities.cp)}",
            f"isp_net_utility: {outcome.utilities.isp_net:.12g}",
            f"social_utility: {outcome.utilities.social:.12g}",
            f"nash_product: {outcome.nash_product:.12g}",
            f"disagreement: {_fmt_seq(disagreement)}",
            f"flags: {flags}",
        ]
    )


# ---------------------------------------------------------------------------
# argument parsing


def _rates(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed rate list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("at least one rate is required")
    return values


def _range_spec(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"range must look like from:to:steps, got {text!r}"
        )
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed range {text!r}")
    return lo, hi, steps


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number {text!r}")
    if not (math.isfinite(value) and value > 0.0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revshare",
        description="Equilibrium revenue-sharing contracts between CPs and an ISP.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="equilibrium for one market")
    p.add_argument("--n", type=int, default=None, help="number of CPs")
    p.add_argument("--rates", type=_rates, required=True, help="comma-separated r_i")
    p.add_argument("--cost", type=_positive, required=True)
    p.add_argument("--regime", choices=REGIMES, required=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="CSV sweep over the dominant rate")
    p.add_argument("--r1", type=_range_spec, required=True, metavar="FROM:TO:STEPS")
    p.add_argument("--r2", type=_positive, required=True)
    p.add_argument("--cost", type=_positive, required=True)
    p.add_argument("--bargaining", choices=("none", "zero", "ne"), default="none")
    p.add_argument(
        "--verify", nargs="?", const="all", choices=("all", "spot"), default=None
    )
    p.add_argument("--verify-step", type=_positive, default=1e-3)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("bargain", help="bargaining solution for two CPs")
    p.add_argument("--rates", type=_rates, required=True)
    p.add_argument("--cost", type=_positive, required=True)
    p.add_argument("--disagreement", default="zero", metavar="zero|ne|d1,d2")
    p.set_defaults(func=_cmd_bargain)

    p = sub.add_parser("tax", help="neutralizing taxes for two CPs")
    p.add_argument("--rates", type=_rates, required=True)
    p.add_argument("--cost", type=_positive, required=True)
    p.add_argument("--mode", choices=("equal", "paper", "both"), default="both")
    p.set_defaults(func=_cmd_tax)

    p = sub.add_parser("verify", help="oracle-certify a contract")
    p.add_argument("--rates", type=_rates, required=True)
    p.add_argument("--cost", type=_positive, required=True)
    p.add_argument("--regime", choices=REGIMES, required=True)
    p.add_argument("--contract", type=_rates, required=True)
    p.add_argument("--step", type=_positive, default=1e-4)
    p.add_argument("--tol", type=_positive, default=1e-6)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("figures", help="preset sweeps behind the comparison figures")
    p.add_argument("--set", dest="preset", choices=("asym-zero", "asym-ne"), required=True)
    p.add_argument("--r1-max", type=_positive, default=None)
    p.add_argument("--outdir", default=None, help="also write CSV and PNG files here")
    p.add_argument(
        "--verify", nargs="?", const="all", choices=("all", "spot"), default=None
    )
    p.add_argument("--verify-step", type=_positive, default=1e-3)
    p.set_defaults(func=_cmd_figures)

    return parser


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_solve(ns: argparse.Namespace) -> int:
    if ns.n is not None and ns.n != len(ns.rates):
        raise ValueError(f"--n {ns.n} disagrees with {len(ns.rates)} rates")
    params = MarketParams.of(ns.rates, ns.cost)
    solver = neutral_equilibrium if ns.regime == NEUTRAL else nonneutral_equilibrium
    print(_format_equilibrium(solver(params)))
    return 0


def _cmd_sweep(ns: argparse.Namespace) -> int:
    lo, hi, steps = ns.r1
    outputs = {OUTPUT_EQUILIBRIA}
    if ns.bargaining == "zero":
        outputs.add(OUTPUT_BARGAINING_ZERO_D)
    elif ns.bargaining == "ne":
        outputs.add(OUTPUT_BARGAINING_NE_D)
    spec = SweepSpec(
        r1_from=lo, r1_to=hi, r1_steps=steps, r2=ns.r2, c=ns.cost,
        outputs=frozenset(outputs),
    )
    rows = run_sweep(spec)
    if ns.verify:
        _verify_sweep(rows, ns.verify, ns.verify_step, 1e-6)
    sys.stdout.write(emit_csv(rows))
    return 0


def _cmd_bargain(ns: argparse.Namespace) -> int:
    if len(ns.rates) != 2:
        raise ValueError("bargain expects exactly two rates")
    params = MarketParams.of(ns.rates, ns.cost)
    if ns.disagreement == "zero":
        problem = BargainingProblem(params)
        outcome = nbs_closed_form(problem)
    elif ns.disagreement == "ne":
        problem = BargainingProblem(params, ne_disagreement(params))
        outcome = nbs_numeric(problem)
    else:
        try:
            d = tuple(float(part) for part in ns.disagreement.split(","))
        except ValueError:
            raise ValueError(f"malformed disagreement {ns.disagreement!r}")
        if len(d) != 2:
            raise ValueError("disagreement must have two entries")
        problem = BargainingProblem(params, (d[0], d[1]))
        outcome = nbs_numeric(problem)
    print(_format_bargaining(outcome, problem.disagreement))
    return 0


def _cmd_tax(ns: argparse.Namespace) -> int:
    if len(ns.rates) != 2:
        raise ValueError("tax expects exactly two rates")
    params = MarketParams.of(ns.rates, ns.cost)
    modes = {
        "equal": TAX_MODES[:1],
        "paper": TAX_MODES[1:],
        "both": TAX_MODES,
    }[ns.mode]
    blocks = []
    for mode in modes:
        result = neutralizing_tax(params, mode)
        flags = " ".join(result.flags) or "-"
        blocks.append(
            "\n".join(
                [
                    f"mode: {result.mode}",
                    f"taxes: {_fmt_seq(result.taxes.taxes)}",
                    f"effort_gap: {result.effort_gap:.12g}",
                    f"flags: {flags}",
                ]
            )
        )
    print("\n".join(blocks))
    return 0


def _cmd_verify(ns: argparse.Namespace) -> int:
    params = MarketParams.of(ns.rates, ns.cost)
    contract = Contract(shares=ns.contract)
    report = verify_equilibrium(params, ns.regime, contract, ns.step, ns.tol)
    print(
        "\n".join(
            [
                f"regime: {ns.regime}",
                f"contract: {_fmt_seq(contract.shares)}",
                f"grid_step: {report.grid_step:.12g}",
                f"max_unilateral_gain: {report.max_unilateral_gain:.12g}",
                f"best_responses: {_fmt_seq(report.per_cp_best_response)}",
                f"passed: {'true' if report.passed else 'false'}",
            ]
        )
    )
    return 0


_PRESETS = {
    "asym-zero": (30.0, OUTPUT_BARGAINING_ZERO_D),
    "asym-ne": (10.0, OUTPUT_BARGAINING_NE_D),
}


def _cmd_figures(ns: argparse.Namespace) -> int:
    r1_max, bargaining_output = _PRESETS[ns.preset]
    if ns.r1_max is not None:
        r1_max = ns.r1_max
    if r1_max <= 2.0:
        raise ValueError("--r1-max must exceed 2")
    steps = round((r1_max - 2.0) / 0.5) + 1
    spec = SweepSpec(
        r1_from=2.0,
        r1_to=2.0 + 0.5 * (steps - 1),
        r1_steps=steps,
        r2=2.0,
        c=1.0,
        outputs=frozenset({OUTPUT_EQUILIBRIA, bargaining_output}),
    )
    rows = run_sweep(spec)
    if ns.verify:
        _verify_sweep(rows, ns.verify, ns.verify_step, 1e-6)
    csv_text = emit_csv(rows)
    sys.stdout.write(csv_text)
    if ns.outdir:
        from pathlib import Path

        from .plots import render_figures

        outdir = Path(ns.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / f"{ns.preset}.csv").write_text(csv_text)
        paths = render_figures(rows, outdir, ns.preset)
        for path in [outdir / f"{ns.preset}.csv", *paths]:
            print(f"wrote {path}", file=sys.stderr)
    return 0


def run_command(argv: list[str]) -> int:
    """Run one CLI invocation; returns 0 on success, 1 on solver errors and
    2 on usage errors."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    try:
        return ns.func(ns)
    except _SOLVER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
