import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

import mpmath

from orlicz_kit import __version__
from orlicz_kit.age import age_experiment, boyd_indices, ratio_bounds
from orlicz_kit.basis import (
    basis_delta_of_eps,
    compute_h,
    compute_r,
    extract_basis_witnesses,
    snap_to_basis,
)
from orlicz_kit.db import create_database, get_orlicz_kit_db_url, get_output_dir, get_session
from orlicz_kit.disjointness import (
    CERTIFIED,
    DEFAULT_DPS,
    EMPIRICAL,
    MODES,
    compute_C0,
    compute_cascade,
    delta_of_eps,
    witness_split,
)
from orlicz_kit.embeddings import (
    EmbeddingMap,
    align,
    disjointness_experiment,
    eps_transitivity_experiment,
    exhaustive_align,
)
from orlicz_kit.errors import (
    AlignmentImpossible,
    CounterexampleReport,
    DegenerateBudget,
    DistinctnessViolation,
    DomainError,
    EvaluationError,
    HypothesisViolation,
    InvalidFunction,
    InvalidInput,
    InvalidParameter,
    NotAnEmbedding,
    NumericalDegeneracy,
    OrliczKitError,
)
from orlicz_kit.ingest import ingest_report, load_matrix, load_vectors
from orlicz_kit.luxemburg import LuxemburgSpace, NumericContext, OrliczVector
from orlicz_kit.orlicz import K_GRID, UNIT_GRID, GridSpec, check_good, from_config, growth_constants
from orlicz_kit.reports import (
    AGE_REPORT,
    BASIS_REPORT,
    DISJOINTNESS_REPORT,
    RIGIDITY_REPORT,
    TRANSITIVITY_REPORT,
    dumps,
    envelope,
    write_csv,
    write_json,
)
from orlicz_kit.views import get_runs

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_HYPOTHESIS = 3
EXIT_IO = 4

# math failures, as opposed to bad input
HYPOTHESIS_ERRORS = (
    HypothesisViolation,
    InvalidFunction,
    DegenerateBudget,
    CounterexampleReport,
    DistinctnessViolation,
    AlignmentImpossible,
    NotAnEmbedding,
    EvaluationError,
    DomainError,
    NumericalDegeneracy,
)

COMMON_DEFAULTS = {
    "family": "exp_weighted",
    "p": 4.0,
    "eps": 0.1,
    "delta": None,
    "k": 2,
    "n": 6,
    "trials": 100,
    "seed": 0,
    "mode": CERTIFIED,
    "dps": DEFAULT_DPS,
    "k_grid_count": K_GRID.count,
    "unit_grid_count": UNIT_GRID.count,
}

COMMAND_DEFAULTS = {
    "norm": {"vec": None, "file": None},
    "check-good": {},
    "constants": {},
    "delta": {"basis": False},
    "witness": {"f": None, "g": None},
    "snap": {"vec": None, "h": None},
    "align": {"t1": None, "t2": None, "exhaustive": False},
    "disjointness": {},
    "transitivity": {},
    "boyd": {"decades": 8, "count": 1024, "lp": None},
    "age": {"lp": None, "block_sizes": [10, 100, 1000, 10000], "pairs": 100, "dim": 6},
}


@dataclass
class RunConfig:
    """Everything that determines a run; ``to_dict`` is what reports embed."""

    command: str
    family: Dict[str, Any]
    eps: Optional[float] = None
    delta: Optional[float] = None
    k: int = 2
    n: int = 6
    trials: int = 100
    seed: int = 0
    mode: str = CERTIFIED
    dps: int = DEFAULT_DPS
    k_grid_count: int = K_GRID.count
    unit_grid_count: int = UNIT_GRID.count
    output_dir: Path = Path(".")
    db_url: Optional[str] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_settings(
        cls, command: str, settings: Dict[str, Any], output_dir: Path, db_url: Optional[str]
    ) -> "RunConfig":
        if settings["mode"] not in MODES:
            raise InvalidParameter(f"Unknown mode {settings['mode']!r}; expected one of {MODES}")
        return cls(
            command=command,
            family={"family": settings["family"], "p": float(settings["p"])},
            eps=None if settings["eps"] is None else float(settings["eps"]),
            delta=None if settings["delta"] is None else float(settings["delta"]),
            k=int(settings["k"]),
            n=int(settings["n"]),
            trials=int(settings["trials"]),
            seed=int(settings["seed"]),
            mode=settings["mode"],
            dps=int(settings["dps"]),
            k_grid_count=int(settings["k_grid_count"]),
            unit_grid_count=int(settings["unit_grid_count"]),
            output_dir=Path(output_dir),
            db_url=db_url,
            extra={key: settings[key] for key in COMMAND_DEFAULTS[command]},
        )

    def function(self):
        return from_config(self.family)

    @property
    def k_grid(self) -> GridSpec:
        return GridSpec(K_GRID.lo, K_GRID.hi, self.k_grid_count)

    @property
    def unit_grid(self) -> GridSpec:
        return GridSpec(UNIT_GRID.lo, UNIT_GRID.hi, self.unit_grid_count)

    @property
    def context(self) -> NumericContext:
        return NumericContext(dps=self.dps)

    def to_dict(self) -> Dict[str, Any]:
        # output paths and the db URL do not change results
        return {
            "command": self.command,
            **self.family,
            "eps": self.eps,
            "delta": self.delta,
            "k": self.k,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "mode": self.mode,
            "dps": self.dps,
            "k_grid_count": self.k_grid_count,
            "unit_grid_count": self.unit_grid_count,
            **self.extra,
        }


def _load_config(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as f:
        try:
            config = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidParameter(f"Config file {path} is not valid JSON: {e}") from e
    if not isinstance(config, dict):
        raise InvalidParameter(f"Config file {path} must hold a JSON object")
    # {"function": {"family": ..., "p": ...}} is accepted as well as flat keys
    config = {**config.pop("function", {}), **config}
    return {key.replace("-", "_"): value for key, value in config.items()}


def _parse_coords(text: Optional[str]) -> List[float]:
    if text is None or not text.strip():
        return []
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as e:
        raise InvalidInput(f"Cannot parse coordinates {text!r}: {e}") from e


def _parse_sizes(value) -> List[int]:
    if isinstance(value, str):
        value = value.split(",")
    try:
        return [int(v) for v in value]
    except (TypeError, ValueError) as e:
        raise InvalidParameter(f"Cannot parse block sizes {value!r}") from e


def _store(config: RunConfig, report: Dict[str, Any]):
    if config.db_url is not None:
        create_database(config.db_url)
        ingest_report(json.loads(dumps(report)), session=get_session(config.db_url))


def _emit(config: RunConfig, filename: str, report: Dict[str, Any]) -> Path:
    path = write_json(report, config.output_dir / filename)
    _store(config, report)
    return path


def _subparser(command: str, usage: str, description: str) -> argparse.ArgumentParser:
    # unset flags stay out of the namespace so the config file can fill them
    parser = argparse.ArgumentParser(
        prog=f"orlicz_kit {command}",
        usage=usage,
        description=description,
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--family", choices=["power", "exp_weighted"], help="Orlicz family.")
    parser.add_argument("--p", type=float, help="Family exponent.")
    parser.add_argument("--dps", type=int, help="Decimal precision of constant chains.")
    return parser


def _add_grid_args(parser: argparse.ArgumentParser):
    parser.add_argument("--k-grid-count", type=int, help="Points on the grid for K.")
    parser.add_argument("--unit-grid-count", type=int, help="Points on the grid on (0, 1].")


def cmd_norm(config: RunConfig) -> int:
    M = config.function()
    if config.extra["file"]:
        vectors = load_vectors(config.extra["file"])
    else:
        vectors = [OrliczVector(_parse_coords(config.extra["vec"]))]
    print("norm\tmodular")
    for f in vectors:
        if f.space_dim == 0:
            print(f"{0.0!r}\t{0.0!r}")
            continue
        space = LuxemburgSpace(M, f.space_dim, config.context)
        value = space.norm(f)
        modular = space.modular(f, value) if value > 0 else 0.0
        print(f"{value!r}\t{modular!r}")
    return EXIT_OK


def cmd_check_good(config: RunConfig) -> int:
    report = check_good(config.function(), config.k_grid)
    print(dumps(envelope("check-good", config.to_dict(), report.to_dict())), end="")
    return EXIT_OK if report.is_good else EXIT_HYPOTHESIS


def cmd_constants(config: RunConfig) -> int:
    M = config.function()
    growth = growth_constants(M, config.k_grid, config.unit_grid)
    C0 = compute_C0(M, config.k_grid, config.unit_grid, config.dps)
    with mpmath.workdps(config.dps):
        C1, C2, C3 = compute_cascade(C0)
    body = {
        "function": M.to_dict(),
        "growth": growth.to_dict(),
        "submult": growth.submult(config.eps).to_dict(),
        "C0": C0,
        "C1": C1,
        "C2": C2,
        "C3": C3,
    }
    report = envelope("constants", config.to_dict(), body)
    _store(config, report)
    print(dumps(report), end="")
    return EXIT_OK


def cmd_delta(config: RunConfig) -> int:
    M = config.function()
    grids = {"k_grid": config.k_grid, "unit_grid": config.unit_grid}
    if config.extra["basis"]:
        budget = basis_delta_of_eps(M, config.eps, dps=config.dps, **grids)
        body = {"basis": budget.to_dict()}
        filename = BASIS_REPORT
    else:
        budget = delta_of_eps(
            M,
            M,
            config.eps,
            mode=config.mode,
            dps=config.dps,
            empirical_kwargs={"seed": config.seed},
            **grids,
        )
        body = {config.mode: budget.to_dict()}
        if config.mode == EMPIRICAL:
            body[CERTIFIED] = delta_of_eps(M, M, config.eps, dps=config.dps, **grids).to_dict()
        filename = RIGIDITY_REPORT
    path = _emit(config, filename, envelope("delta", config.to_dict(), body))
    print(f"delta\t{mpmath.nstr(budget.delta, 17)}")
    print(f"report\t{path}")
    return EXIT_OK


def cmd_witness(config: RunConfig) -> int:
    f = OrliczVector(_parse_coords(config.extra["f"]))
    g = OrliczVector(_parse_coords(config.extra["g"]))
    if f.space_dim == 0:
        raise InvalidInput("--f needs at least one coordinate")
    space = LuxemburgSpace(config.function(), f.space_dim, config.context)
    pair = witness_split(space, f, g)
    print(dumps({"witness": pair.to_dict(), "error": pair.error}), end="")
    return EXIT_OK


def cmd_snap(config: RunConfig) -> int:
    M = config.function()
    x = OrliczVector(_parse_coords(config.extra["vec"]))
    if x.space_dim == 0:
        raise InvalidInput("--vec needs at least one coordinate")
    h = config.extra["h"]
    if h is None:
        h = compute_h(M, config.eps, config.unit_grid, r=compute_r(M))
    hit = snap_to_basis(LuxemburgSpace(M, x.space_dim, config.context), x, float(h))
    print(f"h\t{float(h)!r}")
    print("none" if hit is None else f"{hit[0]}\t{hit[1]:+g}")
    return EXIT_OK


def cmd_align(config: RunConfig) -> int:
    M = config.function()
    if not (config.extra["t1"] and config.extra["t2"]):
        raise InvalidInput("align needs --t1 and --t2")
    m1, m2 = load_matrix(config.extra["t1"]), load_matrix(config.extra["t2"])
    n, k = m1.shape
    source = LuxemburgSpace(M, k, config.context)
    target = LuxemburgSpace(M, n, config.context)
    T1 = EmbeddingMap(m1, source, target, {"file": str(config.extra["t1"])})
    T2 = EmbeddingMap(m2, source, target, {"file": str(config.extra["t2"])})
    if config.extra["exhaustive"]:
        result = exhaustive_align(T1, T2)
        body = {"alignment": result.to_dict()}
    else:
        budget = basis_delta_of_eps(
            M, config.eps / (2 * k), dps=config.dps, k_grid=config.k_grid, unit_grid=config.unit_grid
        )
        w1 = extract_basis_witnesses(budget, target, T1.images())
        w2 = extract_basis_witnesses(budget, target, T2.images())
        result = align(T1, T2, w1, w2, seed=config.seed)
        body = {
            "alignment": result.to_dict(),
            "witnesses": [[w.to_dict() for w in w1], [w.to_dict() for w in w2]],
        }
    print(dumps(body), end="")
    return EXIT_OK


def _experiment_exit(config: RunConfig, failures: int) -> int:
    if config.mode == CERTIFIED and failures:
        sys.stderr.write(f"{failures} trial(s) failed the certified bound\n")
        return EXIT_HYPOTHESIS
    return EXIT_OK


def cmd_disjointness(config: RunConfig) -> int:
    space = LuxemburgSpace(config.function(), config.n, config.context)
    report = disjointness_experiment(
        space, config.n, config.eps, config.trials, config.seed, delta=config.delta, mode=config.mode
    )
    _emit(config, DISJOINTNESS_REPORT, envelope("disjointness", config.to_dict(), report.to_dict()))
    write_csv(report.rows(), config.output_dir / "disjointness.csv")
    print(f"max witness error\t{report.max_defect!r}")
    print(f"failures\t{report.failures}")
    return _experiment_exit(config, report.failures)


def cmd_transitivity(config: RunConfig) -> int:
    if config.mode != CERTIFIED:
        raise InvalidParameter("transitivity builds a certified basis budget; mode must be 'certified'")
    space = LuxemburgSpace(config.function(), config.n, config.context)
    report = eps_transitivity_experiment(
        space, config.k, config.n, config.eps, config.trials, config.seed, delta=config.delta
    )
    _emit(config, TRANSITIVITY_REPORT, envelope("transitivity", config.to_dict(), report.to_dict()))
    write_csv(report.rows(), config.output_dir / "transitivity.csv")
    print(f"max defect\t{report.max_defect!r}")
    print(f"failures\t{report.failures}")
    return _experiment_exit(config, report.failures)


def cmd_boyd(config: RunConfig) -> int:
    M = config.function()
    indices = boyd_indices(M, int(config.extra["decades"]), int(config.extra["count"]))
    if config.extra["lp"] is not None:
        indices = replace(indices, ratio_bounds=ratio_bounds(M, float(config.extra["lp"])))
    print(dumps(envelope("boyd", config.to_dict(), indices.to_dict())), end="")
    return EXIT_OK


def cmd_age(config: RunConfig) -> int:
    M = config.function()
    lp = config.extra["lp"]
    lp = config.family["p"] if lp is None else float(lp)
    result = age_experiment(
        M,
        lp,
        block_sizes=_parse_sizes(config.extra["block_sizes"]),
        pairs=int(config.extra["pairs"]),
        dim=int(config.extra["dim"]),
        seed=config.seed,
    )
    _emit(config, AGE_REPORT, envelope("age", config.to_dict(), result))
    write_csv(result["block_copies"], config.output_dir / "age-blocks.csv")
    certificate = result["basis_certificate"]
    print(f"margin\t{certificate['margin']!r}")
    for copy in result["block_copies"]:
        print(f"N={copy['N']}\t{copy['distortion']!r}")
    if config.mode == CERTIFIED and not certificate["conclusive"]:
        sys.stderr.write(f"Certificate inconclusive: {certificate['reason']}\n")
        return EXIT_HYPOTHESIS
    return EXIT_OK


def _build_subparsers() -> Dict[str, argparse.ArgumentParser]:
    parsers = {}

    p = _subparser("norm", "%(prog)s [--vec X1,X2,...|--file FILE]", "Luxemburg norm of a vector.")
    p.add_argument("--vec", help="Comma-separated coordinates (use --vec=-1,2 for a leading minus).")
    p.add_argument("--file", help="CSV, TSV or XLSX table with one vector per row.")
    parsers["norm"] = p

    p = _subparser("check-good", "%(prog)s", "Check that the Orlicz function is good.")
    _add_grid_args(p)
    parsers["check-good"] = p

    p = _subparser("constants", "%(prog)s [--eps EPS]", "Growth constants and the C0..C3 chain.")
    p.add_argument("--eps", type=float, help="Argument of the submultiplicativity constant.")
    _add_grid_args(p)
    parsers["constants"] = p

    p = _subparser(
        "delta", "%(prog)s --eps EPS [--basis] [--mode MODE]", "Explicit delta(eps) budgets."
    )
    p.add_argument("--eps", type=float, help="Target error.")
    p.add_argument("--basis", action="store_true", help="Basis-rigidity budget instead.")
    p.add_argument("--mode", choices=list(MODES), help="Constant mode.")
    p.add_argument("--seed", type=int, help="Seed for empirical constants.")
    _add_grid_args(p)
    parsers["delta"] = p

    p = _subparser("witness", "%(prog)s --f X1,... --g Y1,...", "Disjoint witnesses for (f, g).")
    p.add_argument("--f", help="Coordinates of f.")
    p.add_argument("--g", help="Coordinates of g.")
    parsers["witness"] = p

    p = _subparser("snap", "%(prog)s --vec X1,... [--eps EPS|--h H]", "Snap a vector to +-e_i.")
    p.add_argument("--vec", help="Comma-separated coordinates.")
    p.add_argument("--eps", type=float, help="Error giving the threshold h(eps).")
    p.add_argument("--h", type=float, help="Threshold h given directly.")
    _add_grid_args(p)
    parsers["snap"] = p

    p = _subparser(
        "align", "%(prog)s --t1 FILE --t2 FILE [--eps EPS] [--exhaustive]", "Align two embeddings."
    )
    p.add_argument("--t1", help="n x k matrix of T1 (CSV, TSV or XLSX, no header).")
    p.add_argument("--t2", help="n x k matrix of T2.")
    p.add_argument("--eps", type=float, help="Target defect.")
    p.add_argument("--seed", type=int, help="Seed for the operator-norm estimate.")
    p.add_argument("--exhaustive", action="store_true", help="Search every signed permutation.")
    _add_grid_args(p)
    parsers["align"] = p

    for name, text in (
        ("disjointness", "Seeded disjointness experiment."),
        ("transitivity", "Seeded approximate-transitivity experiment."),
    ):
        p = _subparser(name, "%(prog)s [--k K] [--n N] [--eps EPS] [--trials T] [--seed S]", text)
        p.add_argument("--k", type=int, help="Source dimension.")
        p.add_argument("--n", type=int, help="Target dimension.")
        p.add_argument("--eps", type=float, help="Target error.")
        p.add_argument("--delta", type=float, help="Override the computed delta.")
        p.add_argument("--trials", type=int, help="Number of trials.")
        p.add_argument("--seed", type=int, help="Root seed.")
        parsers[name] = p
    # the basis budget behind transitivity is always certified
    parsers["disjointness"].add_argument("--mode", choices=list(MODES), help="Constant mode.")

    p = _subparser("boyd", "%(prog)s [--lp P]", "Boyd indices.")
    p.add_argument("--decades", type=int, help="Decades covered by the base grid.")
    p.add_argument("--count", type=int, help="Points on the base grid.")
    p.add_argument("--lp", type=float, help="Also bound M(st) / (M(s) t^lp).")
    parsers["boyd"] = p

    p = _subparser("age", "%(prog)s [--lp P] [--block-sizes N1,N2,...]", "Non-closed age experiment.")
    p.add_argument("--lp", type=float, help="Exponent of l_p^2 (defaults to the family p).")
    p.add_argument("--block-sizes", help="Comma-separated block sizes.")
    p.add_argument("--pairs", type=int, help="Random disjoint pairs to certify.")
    p.add_argument("--dim", type=int, help="Dimension of the random pairs.")
    p.add_argument("--seed", type=int, help="Root seed.")
    p.add_argument("--mode", choices=list(MODES), help="Constant mode.")
    parsers["age"] = p

    return parsers


COMMANDS = {
    "norm": cmd_norm,
    "check-good": cmd_check_good,
    "constants": cmd_constants,
    "delta": cmd_delta,
    "witness": cmd_witness,
    "snap": cmd_snap,
    "align": cmd_align,
    "disjointness": cmd_disjointness,
    "transitivity": cmd_transitivity,
    "boyd": cmd_boyd,
    "age": cmd_age,
}


def _run(args: argparse.Namespace, remaining: List[str]) -> int:
    if args.command == "init":
        parser_init = argparse.ArgumentParser(
            prog="orlicz_kit init",
            usage="%(prog)s",
            description="Initialize a new results database.",
        )
        parser_init.parse_args(remaining)
        create_database(args.db or get_orlicz_kit_db_url())
        return EXIT_OK
    if args.command == "runs":
        parser_runs = argparse.ArgumentParser(
            prog="orlicz_kit runs",
            usage="%(prog)s [--command NAME] [-n N]",
            description="List stored runs.",
        )
        parser_runs.add_argument("--command", help="Only runs of this subcommand.")
        parser_runs.add_argument("-n", type=int, help="Number of runs to list.")
        args_runs = parser_runs.parse_args(remaining)
        db_url = args.db or get_orlicz_kit_db_url()
        create_database(db_url)
        for run in get_runs(get_session(db_url), command=args_runs.command, n=args_runs.n):
            print(f"{run.id}\t{run.command}\t{run.family}\t{run.p:g}\t{run.mode}")
        return EXIT_OK

    parser = _build_subparsers()[args.command]
    sub_args = parser.parse_args(remaining)
    settings = {
        **COMMON_DEFAULTS,
        **COMMAND_DEFAULTS[args.command],
        **_load_config(args.config),
        **vars(sub_args),
    }
    output_dir = Path(args.output_dir or get_output_dir())
    config = RunConfig.from_settings(args.command, settings, output_dir, args.db)
    return COMMANDS[args.command](config)


def main(argv: Optional[List[str]] = None):
    usage_str = "%(prog)s [-h/--help,-v/--version] [--db URL] [--config FILE] [--output-dir DIR] <subcommand>"
    description_str = (
        "subcommands:\n"
        "  init         \tInitialize a new results database.\n"
        "  runs         \tList runs stored in the results database.\n"
        "  norm         \tLuxemburg norm and modular of a vector.\n"
        "  check-good   \tCheck that an Orlicz function is good.\n"
        "  constants    \tGrowth constants and the C0..C3 chain.\n"
        "  delta        \tExplicit delta(eps) budgets (rigidity-report.json, basis-report.json).\n"
        "  witness      \tDisjoint witnesses for a pair of vectors.\n"
        "  snap         \tSnap a unit vector to a signed basis vector.\n"
        "  align        \tAlign two embeddings by a signed permutation.\n"
        "  disjointness \tSeeded disjointness experiment.\n"
        "  transitivity \tSeeded approximate-transitivity experiment.\n"
        "  boyd         \tBoyd indices.\n"
        "  age          \tNon-closed age experiment.\n"
        "\nexit codes: 0 ok, 2 bad input, 3 hypothesis or numerical failure, 4 I/O error\n"
    )

    parser = argparse.ArgumentParser(
        prog="orlicz_kit",
        usage=usage_str,
        description=description_str,
        epilog="",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        add_help=False,
        allow_abbrev=False,
    )

    parser.add_argument("command", help=argparse.SUPPRESS, nargs="?")
    parser.add_argument(
        "-v",
        "--version",
        action="version",
        version=__version__,
    )
    parser.add_argument(
        "--db",
        help="Results database URL; runs are stored only when given",
        default=None,
    )
    parser.add_argument("--config", help="JSON config file; flags override it", default=None)
    parser.add_argument(
        "--output-dir",
        help="Report directory instead of ORLICZ_KIT_OUTPUT_DIR",
        default=None,
    )

    args, remaining = parser.parse_known_args(argv)

    if args.command not in {"init", "runs", *COMMANDS}:
        parser.print_help()
        sys.stderr.write("Unrecognized command.\n")
        sys.exit(EXIT_PARSE)

    try:
        code = _run(args, remaining)
    except HypothesisViolation as e:
        sys.stderr.write(f"{e}\n")
        for violation in e.violations:
            sys.stderr.write(f"  - {violation}\n")
        code = EXIT_HYPOTHESIS
    except HYPOTHESIS_ERRORS as e:
        sys.stderr.write(f"{e}\n")
        code = EXIT_HYPOTHESIS
    except OrliczKitError as e:
        sys.stderr.write(f"{e}\n")
        code = EXIT_PARSE
    except OSError as e:
        sys.stderr.write(f"{e}\n")
        code = EXIT_IO
    sys.exit(code)


if __name__ == "__main__":
    main()
