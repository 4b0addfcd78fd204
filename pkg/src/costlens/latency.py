"""Roofline-style latency and throughput estimates.

The hardware model is deliberately small: a peak compute rate, a memory
bandwidth, a fixed dispatch overhead per sequential op, a device count,
and an optional sequence-length padding rule. Each executed layer costs

    per_op_overhead + max(flops / (peak * devices), bytes / bandwidth)

and sequential layers add up while parallel branches take the slowest
branch. That is enough to capture the effects the pure FLOP count hides:
a deep narrow stack and a shallow wide stack with identical FLOPs get
different latencies because they dispatch different numbers of sequential
ops.

Absolute numbers from any real machine are not reproduction targets; the
model is for orderings and what-if comparisons under a documented preset.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources

from .archspec import ArchSpec, Parallel, Repeat, TokenSequence, ensure_valid
from .indicators import layer_mac_bytes
from .trace import Step, expand_layer


@dataclass(frozen=True)
class HardwareModel:
    """Parameterized device abstraction for the roofline estimates."""

    peak_flops_per_sec: float
    mem_bandwidth_bytes_per_sec: float
    per_op_overhead_sec: float
    num_devices: int = 1
    length_pad_multiple: int | None = None
    name: str = "custom"
    notes: str = ""

    def __post_init__(self):
        if self.peak_flops_per_sec <= 0:
            raise ValueError("peak_flops_per_sec must be > 0")
        if self.mem_bandwidth_bytes_per_sec <= 0:
            raise ValueError("mem_bandwidth_bytes_per_sec must be > 0")
        if self.per_op_overhead_sec < 0:
            raise ValueError("per_op_overhead_sec must be >= 0")
        if self.num_devices < 1:
            raise ValueError("num_devices must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "HardwareModel":
        return cls(
            peak_flops_per_sec=float(d["peak_flops_per_sec"]),
            mem_bandwidth_bytes_per_sec=float(d["mem_bandwidth_bytes_per_sec"]),
            per_op_overhead_sec=float(d["per_op_overhead_sec"]),
            num_devices=int(d.get("num_devices", 1)),
            length_pad_multiple=(
                int(d["length_pad_multiple"])
                if d.get("length_pad_multiple") is not None else None
            ),
            name=str(d.get("name", "custom")),
            notes=str(d.get("notes", "")),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "peak_flops_per_sec": self.peak_flops_per_sec,
            "mem_bandwidth_bytes_per_sec": self.mem_bandwidth_bytes_per_sec,
            "per_op_overhead_sec": self.per_op_overhead_sec,
            "num_devices": self.num_devices,
            "length_pad_multiple": self.length_pad_multiple,
            "notes": self.notes,
        }


#: Environment variable naming a directory of extra hardware preset JSONs.
HW_PRESET_DIR_ENV = "COSTLENS_HW_DIR"


def preset_names() -> list[str]:
    """Names of the hardware presets shipped with the package."""
    root = resources.files("costlens").joinpath("data/hardware")
    return sorted(
        p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json")
    )


def load_hardware(name_or_path: str) -> HardwareModel:
    """Load a hardware model by preset name or JSON file path.

    Lookup order: an explicit existing path, then ``$COSTLENS_HW_DIR``,
    then the presets shipped with the package.
    """
    if os.path.exists(name_or_path):
        with open(name_or_path, "r", encoding="utf-8") as fh:
            return HardwareModel.from_dict(json.load(fh))
    env_dir = os.environ.get(HW_PRESET_DIR_ENV)
    if env_dir:
        candidate = os.path.join(env_dir, name_or_path + ".json")
        if os.path.exists(candidate):
            with open(candidate, "r", encoding="utf-8") as fh:
                return HardwareModel.from_dict(json.load(fh))
    builtin = resources.files("costlens").joinpath(
        f"data/hardware/{name_or_path}.json"
    )
    if builtin.is_file():
        return HardwareModel.from_dict(json.loads(builtin.read_text("utf-8")))
    raise FileNotFoundError(
        f"no hardware preset or file named {name_or_path!r} "
        f"(shipped presets: {', '.join(preset_names())})"
    )


@dataclass(frozen=True)
class LayerTiming:
    path: str
    seconds: float
    bound: str          # "compute" or "memory"
    flops: int
    mac_bytes: int


@dataclass(frozen=True)
class PipelineBubble:
    """Idle device time at batch boundaries: a fixed setup cost amortized
    over a run of back-to-back batches."""

    setup_sec: float
    steady_batches: int

    def __post_init__(self):
        if self.setup_sec < 0:
            raise ValueError("setup_sec must be >= 0")
        if self.steady_batches < 1:
            raise ValueError("steady_batches must be >= 1")


@dataclass(frozen=True)
class SpeedEstimate:
    latency_sec: float
    throughput_examples_per_sec: float
    per_layer: tuple[LayerTiming, ...]
    pipeline_bubble_fraction: float | None = None


def _leaf_time(step: Step, hw: HardwareModel, batch: int, eb: int):
    flops = step.flops * batch
    mac_bytes = layer_mac_bytes(step, eb, batch)
    compute = flops / (hw.peak_flops_per_sec * hw.num_devices)
    memory = mac_bytes / hw.mem_bandwidth_bytes_per_sec
    seconds = hw.per_op_overhead_sec + max(compute, memory)
    bound = "compute" if compute >= memory else "memory"
    return seconds, LayerTiming(step.path, seconds, bound, flops, mac_bytes)


def _time_layers(layers, prefix, L, spec, hw, batch, timings):
    """Sum of per-op times; parallel branches contribute their max."""
    total = 0.0
    for i, layer in enumerate(layers):
        path = f"{prefix}[{i}]" if prefix else f"layers[{i}]"
        if isinstance(layer, Repeat):
            for t in range(layer.times):
                dt, L = _time_layers(layer.body, f"{path}.body@{t}", L, spec,
                                     hw, batch, timings)
                total += dt
        elif isinstance(layer, Parallel):
            slowest = 0.0
            merged = L
            for b, branch in enumerate(layer.branches):
                dt, merged = _time_layers(branch, f"{path}.branches[{b}]", L,
                                          spec, hw, batch, timings)
                slowest = max(slowest, dt)
            total += slowest
            L = merged
        else:
            steps: list[Step] = []
            L = expand_layer(layer, path, L, spec, hw.length_pad_multiple, steps)
            for step in steps:
                seconds, timing = _leaf_time(step, hw, batch, spec.element_bytes)
                total += seconds
                timings.append(timing)
    return total, L


def estimate_latency(spec: ArchSpec, hw: HardwareModel, batch: int = 1) -> SpeedEstimate:
    """Forward-pass time for one batch under the roofline model.

    With ``length_pad_multiple`` set on the hardware, all shape-dependent
    costs are evaluated at the padded sequence length.
    """
    ensure_valid(spec)
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    if isinstance(spec.input, TokenSequence):
        L = spec.input.length
        if hw.length_pad_multiple and hw.length_pad_multiple > 1:
            m = hw.length_pad_multiple
            L = -(-L // m) * m
    else:
        L = 0
    timings: list[LayerTiming] = []
    latency, _ = _time_layers(spec.layers, "", L, spec, hw, batch, timings)
    return SpeedEstimate(
        latency_sec=latency,
        throughput_examples_per_sec=batch / latency if latency > 0 else float("inf"),
        per_layer=tuple(timings),
    )


def estimate_throughput(spec: ArchSpec, hw: HardwareModel, batch: int = 1,
                        bubble: PipelineBubble | None = None) -> SpeedEstimate:
    """Examples per second; ``throughput * latency == batch`` exactly
    unless a pipeline bubble discounts the steady-state rate."""
    est = estimate_latency(spec, hw, batch)
    if bubble is None:
        return est
    busy = bubble.steady_batches * est.latency_sec
    scale = busy / (bubble.setup_sec + busy) if busy > 0 else 0.0
    return SpeedEstimate(
        latency_sec=est.latency_sec,
        throughput_examples_per_sec=est.throughput_examples_per_sec * scale,
        per_layer=est.per_layer,
        pipeline_bubble_fraction=1.0 - scale,
    )
