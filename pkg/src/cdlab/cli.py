"""Batch front door: JSON analysis requests in, JSON verdicts and CSV out.

One command per request.  Mathematical verdicts (a failed hypothesis, a
non-contraction) still exit 0; nonzero exits mean the tool itself failed:

    2  request violates the schema (message names the field path)
    3  request is well-formed but semantically invalid
    4  numerical failure (singular block, truncation too small)
    5  output could not be written

The environment variable ``CDLAB_DEFAULT_N`` overrides the default
truncation order for requests that omit ``N``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np
from jsonschema import Draft202012Validator, ValidationError

from . import blockops, rkhs, shifts, similarity
from .errors import (
    CdlabError,
    ConfigurationError,
    DimensionError,
    DomainError,
    SingularityError,
    StructureError,
    TruncationError,
)
from .rules import RationalRule

COMMANDS = ("hypercontract", "shields", "curvature", "contraction", "reduce", "simdiag", "ex-commutator")

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_SEMANTIC = 3
EXIT_NUMERICAL = 4
EXIT_IO = 5

_NUMBER = {"type": "number"}
_N_FIELD = {"type": "integer", "minimum": 8, "maximum": 4096}
_TOL_FIELD = {"type": "number", "minimum": 1e-14, "maximum": 1e-2}

_TAIL_SCHEMA = {
    "type": "object",
    "properties": {
        "p": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
        "q": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
        "offset": {"type": "integer", "minimum": 0},
    },
    "required": ["p"],
    "additionalProperties": False,
}

_WEIGHTS_SCHEMA = {
    "type": "object",
    "properties": {
        "preset": {"enum": ["szego", "hardy", "bergman"]},
        "power": {"type": "integer", "minimum": 1},
        "prefix": {"type": "array", "items": _NUMBER},
        "tail": _TAIL_SCHEMA,
    },
    "additionalProperties": False,
}

_KERNEL_SCHEMA = {
    "type": "object",
    "properties": {
        "preset": {"enum": ["szego"]},
        "power": {"type": "integer", "minimum": 1},
        "prefix": {"type": "array", "items": _NUMBER},
        "tail": _TAIL_SCHEMA,
    },
    "additionalProperties": False,
}

_RADII_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["boundary_dyadic", "linear", "explicit"]},
        "k_min": {"type": "integer", "minimum": 1},
        "k_max": {"type": "integer", "minimum": 1},
        "start": _NUMBER,
        "stop": _NUMBER,
        "count": {"type": "integer", "minimum": 1},
        "values": {"type": "array", "items": _NUMBER, "minItems": 1},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_BLOCK_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["shift", "diagonal", "zero", "matrix"]},
        "weights": _WEIGHTS_SCHEMA,
        "scale": _NUMBER,
        "values": {"type": "array", "items": _NUMBER},
        "real": {"type": "array", "items": {"type": "array", "items": _NUMBER}},
        "imag": {"type": "array", "items": {"type": "array", "items": _NUMBER}},
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_OPERATOR_SCHEMA = {
    "type": "object",
    "properties": {
        "grid": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "minItems": 1, "items": {"oneOf": [_BLOCK_SCHEMA, {"type": "null"}]}},
        },
        "N": _N_FIELD,
    },
    "required": ["grid"],
    "additionalProperties": False,
}

_COMMON = {
    "command": {"enum": list(COMMANDS)},
    "seed": {"type": "integer"},
    "out": {"type": "string"},
    "csv": {"type": "string"},
}

_SCHEMAS = {
    "hypercontract": {
        "type": "object",
        "properties": {**_COMMON, "shift": _WEIGHTS_SCHEMA, "order": {"type": "integer", "minimum": 1},
                       "N": _N_FIELD, "tol": _TOL_FIELD},
        "required": ["command", "shift", "order"],
        "additionalProperties": False,
    },
    "shields": {
        "type": "object",
        "properties": {**_COMMON, "a": _WEIGHTS_SCHEMA, "b": _WEIGHTS_SCHEMA,
                       "horizon": {"type": "integer", "minimum": 2},
                       "horizons": {"type": "array", "items": {"type": "integer", "minimum": 2},
                                    "minItems": 3, "maxItems": 3},
                       "threshold": {"type": "number", "exclusiveMinimum": 1.0}},
        "required": ["command", "a", "b", "horizon"],
        "additionalProperties": False,
    },
    "curvature": {
        "type": "object",
        "properties": {**_COMMON, "kernel": _KERNEL_SCHEMA, "radii": _RADII_SCHEMA,
                       "method": {"enum": ["series", "finite-difference"]},
                       "step": {"type": "number", "exclusiveMinimum": 0.0}, "tol": _TOL_FIELD},
        "required": ["command", "kernel", "radii"],
        "additionalProperties": False,
    },
    "contraction": {
        "type": "object",
        "properties": {**_COMMON, "operator": _OPERATOR_SCHEMA, "tol": _TOL_FIELD, "N": _N_FIELD},
        "required": ["command", "operator"],
        "additionalProperties": False,
    },
    "reduce": {
        "type": "object",
        "properties": {**_COMMON, "operator": _OPERATOR_SCHEMA,
                       "detector": {"enum": ["unit-norm-block", "cascade", "rank-one-defect"]},
                       "order": {"type": "integer", "minimum": 1},
                       "radii": _RADII_SCHEMA, "tol": _TOL_FIELD, "N": _N_FIELD},
        "required": ["command", "operator", "detector"],
        "additionalProperties": False,
    },
    "simdiag": {
        "type": "object",
        "properties": {**_COMMON,
                       "source": {
                           "type": "object",
                           "properties": {
                               "kind": {"enum": ["kernels", "block"]},
                               "kernels": {"type": "array", "items": _KERNEL_SCHEMA, "minItems": 1},
                               "operator": _OPERATOR_SCHEMA,
                           },
                           "required": ["kind"],
                           "additionalProperties": False,
                       },
                       "kernel": _KERNEL_SCHEMA,
                       "multiplicity": {"type": "integer", "minimum": 1},
                       "radii": _RADII_SCHEMA,
                       "bound": {"type": "number", "exclusiveMinimum": 0.0},
                       "N": _N_FIELD},
        "required": ["command", "source", "kernel", "multiplicity", "radii"],
        "additionalProperties": False,
    },
    "ex-commutator": {
        "type": "object",
        "properties": {**_COMMON, "x_diag": {"type": "array", "items": _NUMBER, "minItems": 1},
                       "N": _N_FIELD, "radii": _RADII_SCHEMA},
        "required": ["command", "x_diag"],
        "additionalProperties": False,
    },
}

_VALIDATORS = {cmd: Draft202012Validator(schema) for cmd, schema in _SCHEMAS.items()}


@dataclass(frozen=True)
class AnalysisRequest:
    """A schema-validated request: one command plus its payload."""

    command: str
    payload: dict


class SchemaViolation(ValueError):
    """Request rejected at the schema layer (exit code 2)."""


def parse_request(document) -> AnalysisRequest:
    """Validate a JSON document (text or parsed dict) into a request.

    Unknown fields are rejected; violations name the offending field path.
    """
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as e:
            raise SchemaViolation(f"invalid JSON: {e}") from e
    else:
        data = document
    if not isinstance(data, dict):
        raise SchemaViolation("$: request must be a JSON object")
    command = data.get("command")
    if command not in COMMANDS:
        raise SchemaViolation(f"$.command: expected one of {COMMANDS}, got {command!r}")
    try:
        _VALIDATORS[command].validate(data)
    except ValidationError as e:
        raise SchemaViolation(f"{e.json_path}: {e.message}") from e
    return AnalysisRequest(command, data)


# ---------------------------------------------------------------------------
# JSON -> domain objects

def weights_from_json(spec: dict) -> shifts.WeightSequence:
    if "preset" in spec:
        if "prefix" in spec or "tail" in spec:
            raise DomainError("weight description mixes a preset with explicit data")
        preset = spec["preset"]
        if preset == "szego":
            if "power" not in spec:
                raise DomainError("szego preset needs a power")
            return shifts.szego(spec["power"])
        if "power" in spec:
            raise DomainError(f"preset {preset!r} does not take a power")
        return shifts.hardy() if preset == "hardy" else shifts.bergman()
    if "prefix" not in spec and "tail" not in spec:
        raise DomainError("weight description needs a preset, a prefix, or a tail rule")
    tail = None
    offset = None
    if "tail" in spec:
        t = spec["tail"]
        tail = RationalRule(tuple(t["p"]), tuple(t.get("q", (1,))))
        offset = t.get("offset")
    return shifts.WeightSequence(prefix=tuple(spec.get("prefix", ())), tail=tail, offset=offset)


def kernel_from_json(spec: dict) -> rkhs.DiagonalKernel:
    if "preset" in spec:
        if "prefix" in spec or "tail" in spec:
            raise DomainError("kernel description mixes a preset with explicit data")
        if "power" not in spec:
            raise DomainError("szego preset needs a power")
        return rkhs.szego_power_coeffs(spec["power"])
    if "prefix" not in spec and "tail" not in spec:
        raise DomainError("kernel description needs a preset, a prefix, or a tail rule")
    tail = None
    offset = None
    if "tail" in spec:
        t = spec["tail"]
        tail = RationalRule(tuple(t["p"]), tuple(t.get("q", (1,))))
        offset = t.get("offset")
    return rkhs.DiagonalKernel(prefix=tuple(spec.get("prefix", ())), tail=tail, offset=offset)


def radii_from_json(spec: dict) -> np.ndarray:
    kind = spec["kind"]
    if kind == "boundary_dyadic":
        return rkhs.boundary_radii(spec.get("k_min", 3), spec.get("k_max", 12))
    if kind == "linear":
        for field in ("start", "stop", "count"):
            if field not in spec:
                raise DomainError(f"linear radii need {field!r}")
        return np.linspace(spec["start"], spec["stop"], spec["count"])
    return np.asarray(spec["values"], dtype=float)


def block_from_json(spec: dict | None) -> blockops.Block | None:
    if spec is None:
        return None
    kind = spec["kind"]
    if kind == "zero":
        return blockops.ZeroBlock()
    if kind == "shift":
        if "weights" not in spec:
            raise DomainError("shift block needs weights")
        return blockops.ShiftBlock(weights_from_json(spec["weights"]), spec.get("scale", 1.0))
    if kind == "diagonal":
        return blockops.DiagonalBlock(tuple(spec.get("values", ())))
    if "real" not in spec:
        raise DomainError("matrix block needs a 'real' part")
    real = np.asarray(spec["real"], dtype=float)
    imag = np.asarray(spec["imag"], dtype=float) if "imag" in spec else np.zeros_like(real)
    if real.shape != imag.shape:
        raise DomainError("matrix block real and imaginary parts must share a shape")
    return blockops.MatrixBlock(real + 1j * imag)


def operator_from_json(spec: dict, default_order: int) -> blockops.BlockOperator:
    grid = tuple(tuple(block_from_json(b) for b in row) for row in spec["grid"])
    return blockops.BlockOperator(grid, order=spec.get("N", default_order))


# ---------------------------------------------------------------------------
# domain objects -> JSON (inverse of the builders above, same schema)

def weights_to_json(w: shifts.WeightSequence) -> dict:
    if w.name == "hardy":
        return {"preset": "hardy"}
    if w.name == "bergman":
        return {"preset": "bergman"}
    if w.name and w.name.startswith("szego:"):
        return {"preset": "szego", "power": int(w.name.split(":", 1)[1])}
    out: dict = {}
    if w.prefix:
        out["prefix"] = list(w.prefix)
    if w.tail is not None:
        out["tail"] = {"p": list(w.tail.p), "q": list(w.tail.q), "offset": w.offset}
    return out


def kernel_to_json(K: rkhs.DiagonalKernel) -> dict:
    if K.label and K.label.startswith("szego:"):
        return {"preset": "szego", "power": int(K.label.split(":", 1)[1])}
    out: dict = {}
    if K.prefix:
        out["prefix"] = list(K.prefix)
    if K.tail is not None:
        out["tail"] = {"p": list(K.tail.p), "q": list(K.tail.q), "offset": K.offset}
    return out


def _real_values(values, what: str) -> list[float]:
    out = []
    for v in values:
        c = complex(v)
        if c.imag != 0.0:
            raise DomainError(f"the JSON schema carries real {what}; got {v!r}")
        out.append(c.real)
    return out


def block_to_json(block: blockops.Block | None) -> dict | None:
    if block is None:
        return None
    if isinstance(block, blockops.ZeroBlock):
        return {"kind": "zero"}
    if isinstance(block, blockops.ShiftBlock):
        out = {"kind": "shift", "weights": weights_to_json(block.weights)}
        if block.scale != 1.0:
            out["scale"] = _real_values([block.scale], "scales")[0]
        return out
    if isinstance(block, blockops.DiagonalBlock):
        return {"kind": "diagonal", "values": _real_values(block.values, "diagonals")}
    out = {"kind": "matrix", "real": block.array.real.tolist()}
    if np.any(block.array.imag != 0.0):
        out["imag"] = block.array.imag.tolist()
    return out


def operator_to_json(B: blockops.BlockOperator) -> dict:
    return {"grid": [[block_to_json(b) for b in row] for row in B.blocks], "N": B.order}


def default_order(payload: dict) -> int:
    if "N" in payload:
        return payload["N"]
    env = os.environ.get("CDLAB_DEFAULT_N")
    if env is not None:
        try:
            n = int(env)
        except ValueError as e:
            raise DomainError(f"CDLAB_DEFAULT_N must be an integer, got {env!r}") from e
        if not 8 <= n <= 4096:
            raise DomainError(f"CDLAB_DEFAULT_N must lie in [8, 4096], got {n}")
        return n
    return shifts.DEFAULT_ORDER


# ---------------------------------------------------------------------------
# command execution

def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return 1e308 if v > 0 else -1e308
        return v
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def _run_hypercontract(p: dict):
    w = weights_from_json(p["shift"])
    report = shifts.hypercontractivity_report(w, p["order"], default_order(p), p.get("tol", 1e-10))
    return {
        "command": "hypercontract",
        "order": p["order"],
        "N": default_order(p),
        "orders": report.orders,
        "min_eigenvalues": report.min_eigenvalues,
        "verdicts": report.verdicts,
        "window": report.window,
        "passed": report.passed,
        "first_failure": report.first_failure(),
    }, None


def _run_shields(p: dict):
    a = weights_from_json(p["a"])
    b = weights_from_json(p["b"])
    horizons = tuple(p["horizons"]) if "horizons" in p else None
    rep = shifts.shields_similarity(a, b, p["horizon"], horizons=horizons,
                                    divergence_threshold=p.get("threshold", 1e3))
    return {
        "command": "shields",
        "verdict": rep.verdict,
        "sup_ratio": rep.sup_ratio,
        "inf_ratio": rep.inf_ratio,
        "horizons": rep.horizons,
        "sup_ratio_at_horizons": rep.sup_at_horizons,
        "inf_ratio_at_horizons": rep.inf_at_horizons,
        "log_sup_at_horizons": rep.log_sup_at_horizons,
        "log_inf_at_horizons": rep.log_inf_at_horizons,
    }, None


def _run_curvature(p: dict):
    kernel = kernel_from_json(p["kernel"])
    radii = radii_from_json(p["radii"])
    method = p.get("method", "series")
    profile = rkhs.curvature_profile(kernel, radii, method, p.get("step", 1e-3))
    closed_match = None
    if p["kernel"].get("preset") == "szego":
        power = p["kernel"]["power"]
        exact = -power / (1.0 - profile.radii ** 2) ** 2
        rel = np.abs(profile.values - exact) / np.abs(exact)
        closed_match = bool(np.max(rel) <= (1e-10 if method == "series" else 1e-5))
    csv_lines = ["r,value,method"]
    for r, v in zip(profile.radii, profile.values):
        csv_lines.append(f"{r:.17g},{v:.17g},{profile.method}")
    return {
        "command": "curvature",
        "method": profile.method,
        "samples": len(profile.radii),
        "closed_form_match": closed_match,
        "min_value": float(np.min(profile.values)),
        "max_value": float(np.max(profile.values)),
    }, "\n".join(csv_lines) + "\n"


def _run_contraction(p: dict):
    B = operator_from_json(p["operator"], default_order(p))
    scan = blockops.blockwise_contraction_scan(B, p.get("tol", 1e-8))
    return {
        "command": "contraction",
        "is_contraction": scan.assembled.is_psd,
        "min_eigenvalue": scan.assembled.min_eigenvalue,
        "threshold": scan.assembled.threshold,
        "block_norms": scan.norms,
        "window_norms": scan.window_norms,
        "blocks_contractive": scan.contractions,
        "unit_norm_flags": scan.unit_norm_flags,
        "row_squared_sums": scan.row_sums,
        "col_squared_sums": scan.col_sums,
        "violations": scan.violations,
    }, None


def _run_reduce(p: dict):
    B = operator_from_json(p["operator"], default_order(p))
    detector = p["detector"]
    tol = p.get("tol")
    extra: dict = {}
    if detector == "unit-norm-block":
        verdict = blockops.unit_norm_reducibility(B, tol if tol is not None else 1e-8)
    elif detector == "cascade":
        if "order" not in p:
            raise DomainError("cascade detector needs an order")
        verdict = blockops.cascade_reducibility(B, p["order"], tol if tol is not None else 1e-10)
    else:
        if "order" not in p:
            raise DomainError("rank-one-defect detector needs an order")
        if B.grid_size != 1:
            raise DomainError("rank-one-defect detector takes a single-block operator")
        radii = radii_from_json(p["radii"]) if "radii" in p else None
        rep = blockops.rank_one_defect_check(blockops.assemble(B), p["order"], radii,
                                             tol if tol is not None else 1e-8)
        verdict = rep.verdict
        extra = {
            "top_singular_values": rep.top_singular_values,
            "radii": rep.radii,
            "metric_samples": rep.metric_samples,
            "expected_metric": rep.expected_metric,
            "curvature_samples": rep.curvature_samples,
        }
    return {
        "command": "reduce",
        "detector": verdict.detector,
        "reducible": verdict.reducible,
        "witness": verdict.witness,
        **extra,
    }, None


def _run_simdiag(p: dict):
    kernel = kernel_from_json(p["kernel"])
    n = p["multiplicity"]
    radii = radii_from_json(p["radii"])
    src = p["source"]
    if src["kind"] == "kernels":
        if "kernels" not in src:
            raise DomainError("kernel source needs 'kernels'")
        kernels = [kernel_from_json(k) for k in src["kernels"]]
        source = kernels if len(kernels) > 1 else kernels[0]
    else:
        if "operator" not in src:
            raise DomainError("block source needs 'operator'")
        source = operator_from_json(src["operator"], default_order(p))
        if source.grid_size != 2:
            raise DomainError("block similarity sources must be 2x2")
    D = similarity.det_ratio_profile(source, kernel, n, radii)
    witness = None
    if p["radii"]["kind"] == "boundary_dyadic" and not isinstance(source, blockops.BlockOperator):
        D = similarity.boundedness_verdict(D, p.get("bound", 1e6))
    if not isinstance(source, blockops.BlockOperator):
        kernels = source if isinstance(source, list) else [source]
        model = lambda r: n * rkhs.curvature_series(kernel, r)
        oper = lambda r: sum(rkhs.curvature_series(k, r) for k in kernels)
        witness = similarity.subharmonic_witness_check(
            D, model, oper, ratio_fn=similarity.det_ratio_fn(source, kernel, n)
        )
        D = witness.diagnostic
    csv_text = _similarity_csv(D, witness)
    return {
        "command": "simdiag",
        "multiplicity": n,
        "samples": len(D.radii),
        "verdicts": similarity.diagnostic_verdicts(D, witness),
    }, csv_text


def _similarity_csv(D, witness) -> str:
    import io

    buf = io.StringIO()
    n = len(D.radii)
    lap = witness.quarter_laplacian * 4.0 if witness is not None else np.full(n, np.nan)
    diff = witness.trace_difference if witness is not None else np.full(n, np.nan)
    res = witness.residuals if witness is not None else np.full(n, np.nan)
    phi = D.phi
    buf.write("r,ratio,phi,laplacian_phi,trace_curv_diff,residual\n")
    for i in range(n):
        buf.write(
            f"{D.radii[i]:.17g},{D.ratio[i]:.17g},{phi[i]:.17g},"
            f"{lap[i]:.17g},{diff[i]:.17g},{res[i]:.17g}\n"
        )
    return buf.getvalue()


def _run_ex_commutator(p: dict):
    radii = radii_from_json(p["radii"]) if "radii" in p else None
    N = p.get("N", max(default_order(p), 160))
    rep = similarity.commutator_example(p["x_diag"], N=N, radii=radii)
    model = lambda r: 2.0 * rkhs.curvature_series(rkhs.szego_power_coeffs(1), r)
    oper = similarity.commutator_trace_curvature(p["x_diag"])
    witness = similarity.subharmonic_witness_check(
        rep.profile, model, oper, ratio_fn=similarity.commutator_ratio_fn(p["x_diag"])
    )
    return {
        "command": "ex-commutator",
        "closed_form_check": rep.closed_form_check,
        "pinch_ok": rep.pinch_ok,
        "max_relative_error": rep.max_rel_err,
        "x_norm": rep.x_norm,
        "witness_residual": witness.max_residual,
        "witness_tolerance": witness.tolerance,
        "witness_passed": witness.passed,
    }, _similarity_csv(witness.diagnostic, witness)


_RUNNERS = {
    "hypercontract": _run_hypercontract,
    "shields": _run_shields,
    "curvature": _run_curvature,
    "contraction": _run_contraction,
    "reduce": _run_reduce,
    "simdiag": _run_simdiag,
    "ex-commutator": _run_ex_commutator,
}


def run(request: AnalysisRequest) -> tuple[dict, str | None]:
    """Execute a validated request; returns the JSON report and optional CSV text."""
    report, csv_text = _RUNNERS[request.command](request.payload)
    if "seed" in request.payload:
        report["seed"] = request.payload["seed"]
    return _jsonable(report), csv_text


def render_report(report: dict) -> str:
    """Deterministic JSON rendering: sorted keys, repr floats, newline-terminated."""
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cdlab",
        description="Run one JSON-described operator analysis and emit JSON/CSV reports.",
    )
    parser.add_argument("request", nargs="?", default="-",
                        help="path to the JSON request document, or '-' for stdin")
    parser.add_argument("--out", help="write the JSON report here instead of stdout")
    parser.add_argument("--csv", help="write the CSV profile here (commands that produce one)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for grid evaluation (reserved; evaluation is deterministic)")
    parser.add_argument("--quiet", action="store_true", help="suppress the stdout report echo")
    args = parser.parse_args(argv)

    try:
        if args.request == "-":
            text = sys.stdin.read()
        else:
            with open(args.request, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as e:
        print(f"cdlab: cannot read request: {e}", file=sys.stderr)
        return EXIT_IO

    try:
        request = parse_request(text)
    except SchemaViolation as e:
        print(f"cdlab: schema violation: {e}", file=sys.stderr)
        return EXIT_SCHEMA

    out_path = args.out or request.payload.get("out")
    csv_path = args.csv or request.payload.get("csv")

    try:
        report, csv_text = run(request)
    except (SingularityError, TruncationError) as e:
        print(f"cdlab: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DomainError, DimensionError, StructureError, ConfigurationError) as e:
        print(f"cdlab: invalid request: {e}", file=sys.stderr)
        return EXIT_SEMANTIC
    except CdlabError as e:
        print(f"cdlab: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    rendered = render_report(report)
    try:
        if out_path:
            with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(rendered)
        if csv_path and csv_text is not None:
            with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(csv_text)
    except OSError as e:
        print(f"cdlab: cannot write output: {e}", file=sys.stderr)
        return EXIT_IO
    if not args.quiet and not out_path:
        sys.stdout.write(rendered)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
