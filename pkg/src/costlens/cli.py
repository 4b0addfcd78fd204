"""Command line interface: profile, compare, pareto.

All commands are deterministic: the same inputs produce byte-identical
output (no timestamps, sorted keys, fixed float formatting). Exit codes:
0 success, 1 analysis-level insufficiency (e.g. too few comparable
models), 2 malformed input.

File formats
------------

Spec file (JSON): ``schema_version``, exactly one of ``arch`` (an inline
architecture document) or ``builder`` (``{"family": ..., **kwargs}``),
optional ``hardware`` (preset name or inline object) and ``batch``.

Records file (CSV): header ``name,family,quality,<indicator columns...>``;
empty cells mean a missing indicator. Canonical indicator columns are
params, flops, latency, throughput, activation, mac, memory, carbon,
cost; extra numeric columns are accepted and treated as lower-is-better.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .analysis import (
    AnalysisError,
    CoverageError,
    InsufficientDataError,
    MisnomerReport,
    ModelRecord,
    indicators_present,
    misnomer_report,
    pareto_frontier,
)
from .archlib import build_from_reference
from .archspec import ArchSpec, InvalidSpecError, spec_from_dict, validate
from .footprint import EnergyProfile, PricingProfile
from .indicators import OptimizerKind
from .latency import HardwareModel, load_hardware
from .profiles import compute_profile


class CliError(Exception):
    """Input-level failure; rendered as machine-readable JSON on stderr."""

    def __init__(self, message: str, code: int = 2, **detail):
        super().__init__(message)
        self.code = code
        self.detail = detail


def format_fixed(x, sig: int = 6) -> str:
    """Fixed-notation rendering with up to ``sig`` significant digits."""
    if isinstance(x, bool):
        return str(x)
    if x is None:
        return ""
    if isinstance(x, int):
        x = float(x)
    if x == 0:
        return "0"
    if not math.isfinite(x):
        return str(x)
    digits = sig - 1 - math.floor(math.log10(abs(x)))
    y = round(x, digits)
    if digits <= 0:
        return str(int(y))
    text = f"{y:.{digits}f}".rstrip("0").rstrip(".")
    return text if text not in ("", "-") else "0"


# ---------------------------------------------------------------------------
# Input loading


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}", file=path)
    except json.JSONDecodeError as exc:
        raise CliError(
            f"malformed JSON in {path}: {exc.msg} (byte offset {exc.pos})",
            file=path, offset=exc.pos,
        )


def load_spec_file(path: str) -> tuple[ArchSpec, HardwareModel | None, int | None]:
    """Parse a spec file into (architecture, optional hardware, batch)."""
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise CliError(f"{path}: spec file must be a JSON object", file=path)
    version = doc.get("schema_version")
    if version != 1:
        raise CliError(f"{path}: unsupported schema_version {version!r}", file=path)
    has_arch = "arch" in doc
    has_builder = "builder" in doc
    if has_arch == has_builder:
        raise CliError(
            f"{path}: exactly one of 'arch' or 'builder' is required", file=path
        )
    try:
        if has_arch:
            spec = spec_from_dict(doc["arch"])
        else:
            builder = dict(doc["builder"])
            family = builder.pop("family", None)
            if family is None:
                raise ValueError("builder reference requires a 'family' field")
            spec = build_from_reference(family, builder)
    except (ValueError, TypeError) as exc:
        raise CliError(f"{path}: {exc}", file=path)
    if isinstance(doc.get("name"), str):
        spec = ArchSpec(doc["name"], spec.input, spec.layers, spec.metadata,
                        spec.element_bytes)
    result = validate(spec)
    if not result.ok:
        raise CliError(
            f"{path}: invalid architecture: "
            + "; ".join(f"{v.path}: {v.message}" for v in result.violations),
            file=path,
            violations=[[v.path, v.message] for v in result.violations],
        )
    hardware = None
    if doc.get("hardware") is not None:
        hw_field = doc["hardware"]
        try:
            if isinstance(hw_field, str):
                hardware = load_hardware(hw_field)
            else:
                hardware = HardwareModel.from_dict(hw_field)
        except (FileNotFoundError, KeyError, ValueError) as exc:
            raise CliError(f"{path}: bad hardware field: {exc}", file=path)
    batch = doc.get("batch")
    if batch is not None and (not isinstance(batch, int) or batch < 1):
        raise CliError(f"{path}: batch must be a positive integer", file=path)
    return spec, hardware, batch


def read_records_csv(path: str) -> list[ModelRecord]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            rows = [row for row in reader if row]
    except FileNotFoundError:
        raise CliError(f"no such file: {path}", file=path)
    if not rows:
        raise CliError(f"{path}: empty records file", file=path)
    header = [h.strip() for h in rows[0]]
    if "name" not in header or "quality" not in header:
        missing = [c for c in ("name", "quality") if c not in header]
        raise CliError(
            f"{path}: records header must contain 'name' and 'quality' "
            f"(missing: {', '.join(missing)})",
            file=path,
        )
    indicator_cols = [c for c in header if c not in ("name", "family", "quality")]
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CliError(
                f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}",
                file=path, line=lineno,
            )
        cells = dict(zip(header, (c.strip() for c in row)))
        indicators = {}
        for col in indicator_cols:
            if cells[col] == "":
                continue
            try:
                value = float(cells[col])
            except ValueError:
                raise CliError(
                    f"{path}:{lineno}: cell {col!r} is not numeric: {cells[col]!r}",
                    file=path, line=lineno,
                )
            if not math.isfinite(value):
                raise CliError(
                    f"{path}:{lineno}: cell {col!r} must be finite", file=path,
                    line=lineno,
                )
            indicators[col] = value
        if cells["quality"] == "":
            raise CliError(f"{path}:{lineno}: quality cell is empty",
                           file=path, line=lineno)
        try:
            quality = float(cells["quality"])
            record = ModelRecord(
                name=cells["name"],
                indicators=indicators,
                quality=quality,
                family=cells.get("family") or None,
            )
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: {exc}", file=path, line=lineno)
        records.append(record)
    if not records:
        raise CliError(f"{path}: no data rows", file=path)
    return records


# ---------------------------------------------------------------------------
# SVG scatter


def svg_scatter(records, cost_key: str, frontier_names, quality_label="quality",
                width=640, height=480) -> str:
    """Minimal deterministic SVG 1.1 scatter with a frontier polyline."""
    margin = 56.0
    xs = [r.indicators[cost_key] for r in records]
    ys = [r.quality for r in records]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)

    def sx(v):
        if xmax == xmin:
            return width / 2.0
        return margin + (v - xmin) / (xmax - xmin) * (width - 2 * margin)

    def sy(v):
        if ymax == ymin:
            return height / 2.0
        return height - margin - (v - ymin) / (ymax - ymin) * (height - 2 * margin)

    def f(v):
        return f"{v:.2f}"

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{f(margin)}" y1="{f(height - margin)}" x2="{f(width - margin)}" '
        f'y2="{f(height - margin)}" stroke="black" stroke-width="1"/>',
        f'<line x1="{f(margin)}" y1="{f(margin)}" x2="{f(margin)}" '
        f'y2="{f(height - margin)}" stroke="black" stroke-width="1"/>',
        f'<text x="{f(width / 2)}" y="{f(height - margin / 4)}" font-size="13" '
        f'text-anchor="middle">{cost_key}</text>',
        f'<text x="{f(margin / 4)}" y="{f(height / 2)}" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 {f(margin / 4)} '
        f'{f(height / 2)})">{quality_label}</text>',
        f'<text x="{f(margin)}" y="{f(height - margin / 2)}" font-size="11" '
        f'text-anchor="middle">{format_fixed(xmin)}</text>',
        f'<text x="{f(width - margin)}" y="{f(height - margin / 2)}" font-size="11" '
        f'text-anchor="middle">{format_fixed(xmax)}</text>',
        f'<text x="{f(margin / 2)}" y="{f(height - margin)}" font-size="11" '
        f'text-anchor="middle">{format_fixed(ymin)}</text>',
        f'<text x="{f(margin / 2)}" y="{f(margin)}" font-size="11" '
        f'text-anchor="middle">{format_fixed(ymax)}</text>',
    ]
    frontier = [r for r in records if r.name in frontier_names]
    frontier.sort(key=lambda r: (r.indicators[cost_key], r.name))
    if len(frontier) >= 2:
        points = " ".join(
            f"{f(sx(r.indicators[cost_key]))},{f(sy(r.quality))}" for r in frontier
        )
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="#d62728" '
            f'stroke-width="1.5" stroke-dasharray="4 3"/>'
        )
    for r in records:
        on_frontier = r.name in frontier_names
        fill = "#d62728" if on_frontier else "#1f77b4"
        parts.append(
            f'<circle cx="{f(sx(r.indicators[cost_key]))}" '
            f'cy="{f(sy(r.quality))}" r="4" fill="{fill}">'
            f"<title>{r.name}</title></circle>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# Output rendering


def _profile_lines(d: dict, fmt: str) -> str:
    keys = sorted(d)
    if fmt == "json":
        return json.dumps(d, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(keys)
        writer.writerow([
            d[k] if isinstance(d[k], str) else format_fixed(d[k]) for k in keys
        ])
        return buf.getvalue()
    width = max(len(k) for k in keys)
    lines = [f"{k:<{width}}  "
             f"{d[k] if isinstance(d[k], str) else format_fixed(d[k])}"
             for k in keys]
    return "\n".join(lines) + "\n"


def _render_misnomer(report: MisnomerReport) -> list[str]:
    lines = ["", "rank agreement (kendall tau-b, tie-corrected):"]
    if not report.indicator_pairs_examined:
        lines.append("  (no indicator pair carried by >= 2 models)")
    for pair in report.indicator_pairs_examined:
        tau = report.kendall_tau[pair]
        lines.append(f"  {pair[0]} vs {pair[1]}: tau = {format_fixed(tau)}")
    lines.append("inverted pairs (cheaper under the first indicator, "
                 "costlier under the second):")
    if not report.inverted_pairs:
        lines.append("  none")
    for p in report.inverted_pairs:
        lines.append(
            f"  {p.model_a} < {p.model_b} on {p.indicator_a} but "
            f"{p.model_a} > {p.model_b} on {p.indicator_b}"
        )
    if report.frontier_analysis_ran:
        lines.append("pareto instability (frontier under some indicators, "
                     "dominated under others):")
        if not report.pareto_instability:
            lines.append("  none")
        for entry in report.pareto_instability:
            lines.append(
                f"  {entry.name}: frontier under "
                f"{', '.join(entry.frontier_under)}; dominated under "
                f"{', '.join(entry.dominated_under)}"
            )
    else:
        lines.append("pareto instability: skipped (no quality scores)")
    if report.coverage_warnings:
        lines.append("coverage warnings:")
        for w in report.coverage_warnings:
            lines.append(f"  {w.name} is missing {w.indicator}")
    return lines


def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    fmt_row = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    return [fmt_row(header)] + [fmt_row(r) for r in rows]


# ---------------------------------------------------------------------------
# Commands


def _add_builder_flags(parser):
    group = parser.add_argument_group("builder flags (instead of a spec file)")
    group.add_argument("--family", choices=["vit", "universal_transformer", "moe", "lm"])
    group.add_argument("--patch", type=int)
    group.add_argument("--depth", type=int)
    group.add_argument("--model-dim", type=int)
    group.add_argument("--num-heads", type=int)
    group.add_argument("--ffn-dim", type=int)
    group.add_argument("--image", type=int, nargs=3, metavar=("H", "W", "C"))
    group.add_argument("--classes", type=int)
    group.add_argument("--steps", type=int, help="shared-repeat count (universal_transformer)")
    group.add_argument("--num-experts", type=int)
    group.add_argument("--experts-per-token", type=int)
    group.add_argument("--moe-every", type=int)
    group.add_argument("--arrangement", choices=["decoder_only", "encoder_decoder"])
    group.add_argument("--layers", type=int, help="layers per stack (lm)")
    group.add_argument("--heads", type=int, help="attention heads (lm)")
    group.add_argument("--vocab", type=int)
    group.add_argument("--input-len", type=int)
    group.add_argument("--output-len", type=int)


_BUILDER_FLAG_FIELDS = {
    "vit": ["patch", "depth", "model_dim", "num_heads", "ffn_dim", "image", "classes"],
    "universal_transformer": ["patch", "depth", "model_dim", "num_heads",
                              "ffn_dim", "image", "classes", "steps"],
    "moe": ["patch", "depth", "model_dim", "num_heads", "ffn_dim", "image",
            "classes", "num_experts", "experts_per_token", "moe_every"],
    "lm": ["arrangement", "layers", "model_dim", "ffn_dim", "heads", "vocab",
           "input_len", "output_len"],
}


def _spec_from_args(args) -> ArchSpec:
    kwargs = {}
    for field_name in _BUILDER_FLAG_FIELDS[args.family]:
        value = getattr(args, field_name)
        if value is not None:
            key = "layers_per_stack" if field_name == "layers" else field_name
            kwargs[key] = tuple(value) if field_name == "image" else value
    try:
        return build_from_reference(args.family, kwargs)
    except ValueError as exc:
        raise CliError(str(exc))


def cmd_profile(args) -> int:
    hardware = None
    batch = None
    if args.spec is not None:
        spec, hardware, batch = load_spec_file(args.spec)
    elif args.family is not None:
        spec = _spec_from_args(args)
    else:
        raise CliError("profile requires a spec file or --family")
    if args.hw is not None:
        try:
            hardware = load_hardware(args.hw)
        except (FileNotFoundError, KeyError, ValueError) as exc:
            raise CliError(str(exc))
    if args.batch is not None:
        batch = args.batch
    batch = batch or 1
    energy = pricing = None
    if args.energy is not None:
        try:
            energy = EnergyProfile.from_dict(_load_json(args.energy))
        except (KeyError, ValueError) as exc:
            raise CliError(f"{args.energy}: bad energy profile: {exc}")
    if args.pricing is not None:
        try:
            pricing = PricingProfile.from_dict(_load_json(args.pricing))
        except (KeyError, ValueError) as exc:
            raise CliError(f"{args.pricing}: bad pricing profile: {exc}")
    if hardware is None:
        print("warning: no hardware model given; latency and throughput "
              "are omitted", file=sys.stderr)
    try:
        profile = compute_profile(
            spec, batch=batch, hardware=hardware,
            optimizer=OptimizerKind(args.optimizer),
            energy=energy, pricing=pricing,
        )
    except (InvalidSpecError, OverflowError, ValueError) as exc:
        raise CliError(str(exc))
    sys.stdout.write(_profile_lines(profile.to_dict(), args.format))
    return 0


def _records_from_specs(paths, hw_name, batch) -> list[ModelRecord]:
    hardware = None
    if hw_name is not None:
        try:
            hardware = load_hardware(hw_name)
        except (FileNotFoundError, KeyError, ValueError) as exc:
            raise CliError(str(exc))
    records = []
    for path in paths:
        spec, file_hw, file_batch = load_spec_file(path)
        profile = compute_profile(
            spec,
            batch=batch or file_batch or 1,
            hardware=hardware or file_hw,
        )
        from .profiles import record_from_profile

        records.append(record_from_profile(profile.to_dict()))
    return records


def cmd_compare(args) -> int:
    if args.records is not None:
        records = read_records_csv(args.records)
    elif args.specs:
        records = _records_from_specs(args.specs, args.hw, args.batch)
    else:
        raise CliError("compare requires spec files or --records")
    if len(records) < 2:
        raise CliError("compare requires at least 2 models", code=1)

    if args.indicators:
        wanted = [s.strip() for s in args.indicators.split(",") if s.strip()]
        present = indicators_present(records)
        unknown = [w for w in wanted if w not in present]
        if unknown:
            raise CliError(
                f"indicator(s) not present in any record: {', '.join(unknown)}"
            )
        records = [
            ModelRecord(
                name=r.name,
                indicators={k: v for k, v in r.indicators.items() if k in wanted},
                quality=r.quality,
                family=r.family,
            )
            for r in records
            if any(k in r.indicators for k in wanted)
        ]
        if len(records) < 2:
            raise CliError("fewer than 2 models carry the requested indicators",
                           code=1)
    columns = indicators_present(records)
    sort_key = columns[0]
    ordered = sorted(
        records,
        key=lambda r: (r.indicators.get(sort_key, math.inf), r.name),
    )
    header = ["name", "quality"] + columns
    rows = []
    for r in ordered:
        cells = [r.name, "" if r.quality is None else format_fixed(r.quality)]
        cells += [
            format_fixed(r.indicators[c]) if c in r.indicators else ""
            for c in columns
        ]
        rows.append(cells)
    lines = _table(header, rows)
    try:
        report = misnomer_report(records)
    except InsufficientDataError as exc:
        raise CliError(str(exc), code=1)
    lines += _render_misnomer(report)
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_pareto(args) -> int:
    records = read_records_csv(args.records)
    if args.quality != "quality":
        raise CliError(
            f"column {args.quality!r} is not the quality column; records "
            f"files carry quality in the 'quality' column"
        )
    try:
        frontier = pareto_frontier(records, args.quality, args.cost)
    except CoverageError as exc:
        raise CliError(str(exc))
    except InsufficientDataError as exc:
        raise CliError(str(exc), code=1)
    names = {r.name for r in frontier}
    lines = [f"frontier ({args.quality} vs {args.cost}): "
             f"{len(frontier)} of {len(records)} records"]
    rows = [
        [r.name, format_fixed(r.quality), format_fixed(r.indicators[args.cost])]
        for r in frontier
    ]
    lines += _table(["name", "quality", args.cost], rows)
    dominated = [r.name for r in records if r.name not in names]
    lines.append("dominated: " + (", ".join(sorted(dominated)) if dominated else "none"))
    sys.stdout.write("\n".join(lines) + "\n")
    if args.svg is not None:
        drawable = [r for r in records if args.cost in r.indicators]
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg_scatter(drawable, args.cost, names))
    return 0


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="costlens",
        description="Analytical cost indicators and cross-indicator "
                    "disagreement analysis for neural architectures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="compute every indicator for one architecture")
    p.add_argument("spec", nargs="?", help="spec file (JSON)")
    p.add_argument("--hw", help="hardware preset name or JSON path")
    p.add_argument("--batch", type=int)
    p.add_argument("--optimizer", choices=[o.value for o in OptimizerKind],
                   default="adam")
    p.add_argument("--energy", help="energy profile JSON (enables carbon)")
    p.add_argument("--pricing", help="pricing profile JSON (enables monetary cost)")
    p.add_argument("--format", choices=["json", "csv", "table"], default="table")
    _add_builder_flags(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("compare", help="compare models across indicators")
    p.add_argument("specs", nargs="*", help="spec files (JSON)")
    p.add_argument("--records", help="records CSV instead of spec files")
    p.add_argument("--indicators", help="comma-separated indicator subset")
    p.add_argument("--hw", help="hardware preset for spec-file profiling")
    p.add_argument("--batch", type=int)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("pareto", help="frontier of quality versus one cost indicator")
    p.add_argument("records", help="records CSV")
    p.add_argument("--quality", default="quality")
    p.add_argument("--cost", required=True)
    p.add_argument("--svg", help="write an SVG scatter to this path")
    p.set_defaults(func=cmd_pareto)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        payload = {"error": str(exc), **exc.detail}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return exc.code
    except AnalysisError as exc:
        print(json.dumps({"error": str(exc)}, sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
