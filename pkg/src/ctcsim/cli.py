"""Command-line front end with reproducible, canonically formatted reports.

Reports go to stdout as canonical JSON (sorted keys, floats at 15
significant digits) so that identical invocations with identical seeds
produce byte-identical output; timing and diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import serialize
from .consistency import (
    check_deutsch,
    check_strong,
    scan_admissible_inputs,
    solve_deutsch_fixed_point,
)
from .gates import GATE_NAMES, GateSpec, UnitaryGate, build_gate
from .protocol import (
    ProtocolConfig,
    run_beam,
    run_ebit_distribution,
    run_session,
    run_teleportation_baseline,
)
from .resources import STANDARD_RELATIONS, tally, verify_conversion
from .states import DensityOperator, StateVector, trace_distance
from .topology import TopologySpace, build_line_splitting, is_hausdorff, validate_topology

SCHEMA_VERSION = "1"

#: Scenarios whose collapse is the expected outcome; they exit 0 with the
#: flag in the payload.
EXPECTED_COLLAPSE = ("bob_skips", "self_signal")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNEXPECTED_COLLAPSE = 3


@dataclass
class Report:
    schema_version: str
    command: list
    seed: int
    results: dict
    wall_time_ms: float

    def to_payload(self) -> dict:
        # wall_time_ms is intentionally absent: it would break the
        # byte-identical reproducibility contract (it goes to stderr)
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "seed": self.seed,
            "results": self.results,
        }


def canonical_json(value) -> str:
    """Deterministic JSON: sorted keys, floats at 15 significant digits."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value) + 0.0
        if not math.isfinite(v):
            raise ValueError(f"non-finite value in report: {value!r}")
        return format(v, ".15g")
    if isinstance(value, str):
        return json.dumps(str(value))
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in value) + "]"
    if isinstance(value, dict):
        items = sorted((str(k), v) for k, v in value.items())
        return "{" + ",".join(json.dumps(k) + ":" + canonical_json(v) for k, v in items) + "}"
    raise TypeError(f"cannot serialize {type(value).__name__} in a report")


def _flatten(prefix: str, value, rows: list) -> None:
    if isinstance(value, dict):
        for key in sorted(str(k) for k in value):
            _flatten(f"{prefix}.{key}" if prefix else key, value[key], rows)
    elif isinstance(value, (list, tuple)):
        rows.append((prefix, "|".join(canonical_json(v) for v in value)))
    elif isinstance(value, (bool, int, float, str)) or value is None:
        rows.append((prefix, canonical_json(value)))


def emit_report(report: Report, output: str = "json") -> str:
    """Serialize a report; CSV is a flat numeric summary (beam reports get
    one row per trial)."""
    if output == "json":
        return canonical_json(report.to_payload())
    if output != "csv":
        raise ValueError(f"unknown output format {output!r}")
    results = report.results
    if "records" in results and isinstance(results["records"], list):
        columns = ["trial", "prep_basis", "meas_basis", "outcome", "matched", "action"]
        lines = [",".join(columns)]
        for record in results["records"]:
            lines.append(",".join(str(record.get(c, "")) for c in columns))
        return "\n".join(lines)
    rows: list = []
    _flatten("", report.to_payload(), rows)
    return "\n".join(["key,value"] + [f"{k},{v}" for k, v in rows])


def _parse_state(text: str) -> StateVector:
    """Inline 'a_re,a_im,b_re,b_im' amplitudes or a JSON vector file."""
    if "," in text:
        parts = text.split(",")
        if len(parts) != 4:
            raise ValueError(
                f"inline state needs 4 comma-separated numbers (a_re,a_im,b_re,b_im), got {len(parts)}"
            )
        try:
            a_re, a_im, b_re, b_im = (float(p) for p in parts)
        except ValueError as exc:
            raise ValueError(f"invalid inline state {text!r}: {exc}") from exc
        amps = np.array([complex(a_re, a_im), complex(b_re, b_im)])
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > 1e-9:
            raise ValueError(
                f"state is not normalized: |a|^2 + |b|^2 = {norm_sq!r} (tolerance 1e-9)"
            )
        return StateVector(amps)
    if not Path(text).exists():
        raise ValueError(f"state file not found: {text}")
    arr = serialize.load_array(text)
    if arr.ndim != 1:
        raise ValueError(f"state file {text} holds a matrix; expected a vector")
    return StateVector(arr)


def _parse_density(text: str) -> DensityOperator:
    """A state flag interpreted as a density operator; matrix files allowed."""
    if "," in text or not Path(text).exists():
        return _parse_state(text).density()
    arr = serialize.load_array(text)
    return DensityOperator(arr) if arr.ndim == 2 else StateVector(arr).density()


def _parse_gate(text: str) -> UnitaryGate:
    if text in GATE_NAMES and text != "custom":
        return build_gate(GateSpec(text))
    if Path(text).exists():
        return build_gate(GateSpec("custom", custom_path=text))
    raise ValueError(f"--unitary must be one of {GATE_NAMES[:-1]} or an existing file, got {text!r}")


def _gate_spec(text: str) -> GateSpec:
    if text in GATE_NAMES and text != "custom":
        return GateSpec(text)
    if Path(text).exists():
        return GateSpec("custom", custom_path=text)
    raise ValueError(f"--unitary must be one of {GATE_NAMES[:-1]} or an existing file, got {text!r}")


def _default_seed() -> int:
    env = os.environ.get("CTC_SIM_SEED")
    return int(env) if env else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctcsim",
        description="CTC qubit protocol simulator and consistency toolkit",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, state=False, unitary=False):
        p.add_argument("--seed", type=int, default=None, help="RNG seed (env CTC_SIM_SEED)")
        p.add_argument("--output", choices=("json", "csv"), default="json")
        if state:
            p.add_argument("--state", default="0.6,0,0.8,0", help="amplitudes a_re,a_im,b_re,b_im or a JSON file")
        if unitary:
            p.add_argument("--unitary", default="swap", help="gate name or JSON matrix file")

    p = sub.add_parser("run-protocol", help="execute one Alice/Bob session")
    common(p, state=True, unitary=True)
    p.add_argument("--ctc", default="1,0,0,0", help="initial CTC state (same format as --state)")
    p.add_argument("--formalism", choices=("wavefunction", "density"), default="wavefunction")
    p.add_argument(
        "--scenario",
        choices=("nominal", "bob_skips", "self_signal", "storage"),
        default="nominal",
    )
    p.add_argument("--bob-measures", action="store_true")
    p.add_argument("--storage-cycles", type=int, default=5)
    p.add_argument("--config", default=None, help="JSON file mirroring ProtocolConfig fields")

    p = sub.add_parser("fixed-point", help="solve the Deutsch condition for a coupling")
    common(p, state=True, unitary=True)
    p.add_argument("--tolerance", type=float, default=1e-12)

    p = sub.add_parser("classify-consistency", help="strong/Deutsch/weak verdicts for a coupling")
    common(p, state=True, unitary=True)
    p.add_argument("--ctc", default="1,0,0,0")
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.add_argument("--grid", type=int, default=None, help="also scan admissible inputs on a Bloch grid")

    p = sub.add_parser("beam", help="random-basis beam of CTC qubits")
    common(p)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--policy", choices=("collapse", "discard", "noise"), default="collapse")

    p = sub.add_parser("teleport-baseline", help="standard teleportation with resource accounting")
    common(p, state=True)

    p = sub.add_parser("topology-check", help="validate a finite topology and test separation")
    common(p)
    p.add_argument("--space", default=None, help="JSON file {points: [...], opens: [[...], ...]}")
    p.add_argument("--copies", type=int, default=None, help="build a line-splitting model instead")

    p = sub.add_parser("resources", help="tallies and conversion-relation verdicts")
    common(p, state=True)
    return parser


def _run_protocol(args) -> tuple[dict, int, int]:
    if args.config:
        config = ProtocolConfig.from_json_file(args.config)
        if args.seed is not None:
            raise ValueError("--config and --seed are mutually exclusive; set seed in the file")
    else:
        config = ProtocolConfig(
            input_state=_parse_state(args.state),
            ctc_initial=_parse_state(args.ctc),
            gate=_gate_spec(args.unitary),
            formalism=args.formalism,
            scenario=args.scenario,
            bob_measures=args.bob_measures,
            seed=args.seed if args.seed is not None else _default_seed(),
            storage_cycles=args.storage_cycles,
        )
    transcript = run_session(config)
    code = EXIT_OK
    if transcript.collapse_flag and config.scenario not in EXPECTED_COLLAPSE:
        code = EXIT_UNEXPECTED_COLLAPSE
    return transcript.to_json(), code, config.seed


def _fixed_point(args, seed) -> dict:
    gate = _parse_gate(args.unitary)
    rho_in = _parse_density(args.state)
    iterative = solve_deutsch_fixed_point(gate, rho_in, "iterative", tolerance=args.tolerance)
    spectral = solve_deutsch_fixed_point(gate, rho_in, "spectral", tolerance=args.tolerance)
    agreement = trace_distance(iterative.rho, spectral.rho)
    return {
        "iterative": iterative.to_json(),
        "spectral": spectral.to_json(),
        "methods_agree": bool(agreement <= 1e-9),
        "agreement_trace_distance": float(agreement),
    }


def _classify(args, seed) -> dict:
    gate_spec = _gate_spec(args.unitary)
    gate = build_gate(gate_spec)
    state = _parse_state(args.state)
    ctc = _parse_state(args.ctc)
    strong = check_strong(gate, state, ctc, tolerance=args.tolerance)
    deutsch = check_deutsch(gate, state.density(), ctc.density(), tolerance=args.tolerance)
    config = ProtocolConfig(input_state=state, ctc_initial=ctc, gate=gate_spec, seed=seed)
    weak = run_session(config).final_verdicts["weak"]
    results = {
        "strong": strong.to_json(),
        "deutsch": deutsch.to_json(),
        "weak": weak.to_json(),
    }
    if args.grid is not None:
        admissible = scan_admissible_inputs(gate, ctc.density(), args.grid)
        results["admissible_scan"] = {
            "grid_resolution": args.grid,
            "admissible_count": len(admissible),
            "max_residual": max((r for _, r in admissible), default=None),
        }
    return results


def _topology(args) -> dict:
    if (args.space is None) == (args.copies is None):
        raise ValueError("topology-check needs exactly one of --space or --copies")
    if args.space is not None:
        with open(args.space, "r", encoding="utf-8") as handle:
            space = TopologySpace.from_json(json.load(handle))
    else:
        space = build_line_splitting(args.copies)
    ok, violations = validate_topology(space)
    results = {"valid": ok, "violations": violations, "points": list(space.points)}
    if ok:
        hausdorff, witness = is_hausdorff(space)
        results["hausdorff"] = hausdorff
        results["witness"] = list(witness) if witness else None
    return results


def _resources(args, seed) -> dict:
    state = _parse_state(args.state)
    ctc_run = run_session(ProtocolConfig(input_state=state, seed=seed))
    teleport_run = run_teleportation_baseline(state, seed=seed)
    ebit_run = run_ebit_distribution(seed=seed)
    transcripts = [ctc_run, teleport_run, ebit_run]
    tallies = {
        t.protocol: {kind.value: delta for kind, delta in sorted(tally(t).items())}
        for t in transcripts
    }
    relations = {
        rel.relation_id: verify_conversion(rel, transcripts).to_json()
        for rel in STANDARD_RELATIONS
    }
    return {"tallies": tallies, "relations": relations}


def parse_and_dispatch(argv) -> Report:
    """Parse arguments, run the named subcommand, and build its report."""
    report, _, _ = dispatch(argv)
    return report


def dispatch(argv) -> tuple[Report, int, str]:
    parser = _build_parser()
    args = parser.parse_args(argv)
    seed = args.seed if args.seed is not None else _default_seed()
    code = EXIT_OK
    started = time.perf_counter()
    if args.subcommand == "run-protocol":
        results, code, seed = _run_protocol(args)
    elif args.subcommand == "fixed-point":
        results = _fixed_point(args, seed)
    elif args.subcommand == "classify-consistency":
        results = _classify(args, seed)
    elif args.subcommand == "beam":
        results = run_beam(args.trials, args.policy, seed).to_json()
    elif args.subcommand == "teleport-baseline":
        transcript = run_teleportation_baseline(_parse_state(args.state), seed)
        results = transcript.to_json()
    elif args.subcommand == "topology-check":
        results = _topology(args)
    else:
        results = _resources(args, seed)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    report = Report(SCHEMA_VERSION, list(argv), seed, results, elapsed_ms)
    return report, code, args.output


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        report, code, output = dispatch(argv)
        text = emit_report(report, output)
    except SystemExit:
        raise
    except (ValueError, TypeError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(text + "\n")
    print(f"wall_time_ms={report.wall_time_ms:.3f}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
