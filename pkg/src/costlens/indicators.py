"""Analytical cost indicators computed from an architecture spec.

Everything here is a pure function of the spec (plus batch size), so the
numbers are hardware independent: parameter counts, FLOPs/MACs, activation
sizes, memory-access volume, and training/inference memory estimates.

All accumulators are checked against the 64-bit unsigned range and raise
:class:`OverflowError` beyond it, mirroring what a native implementation
could actually hold.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .archspec import (
    ArchSpec,
    MoE,
    Parallel,
    Repeat,
    UINT64_MAX,
    ensure_valid,
)
from .trace import Step, execution_steps, leaf_params


def _checked(value: int, what: str) -> int:
    if value > UINT64_MAX:
        raise OverflowError(f"{what} exceeds the 64-bit unsigned range")
    return value


@dataclass(frozen=True)
class ParamCount:
    """Parameter totals with a per-layer breakdown.

    ``total`` counts each shared parameter group once; ``shared_savings``
    is how many parameters sharing avoided relative to the same stack with
    every repeat materialized separately.
    """

    total: int
    trainable: int
    by_layer: tuple[tuple[str, int], ...]
    shared_savings: int

    @property
    def millions(self) -> float:
        return self.total / 1e6


@dataclass(frozen=True)
class FlopCount:
    """Forward-pass floating point work.

    ``flops`` counts multiplies and adds separately (one fused
    multiply-add = 2 FLOPs) and includes elementwise work; ``macs`` is the
    exact multiply-accumulate count of the matmul terms, which is the
    quantity most published "GFLOPs" tables actually report.
    """

    flops: int
    macs: int
    by_layer: tuple[tuple[str, int], ...]

    @property
    def gflops(self) -> float:
        """Matmul MAC count in units of 1e9 (decimal), the table convention."""
        return self.macs / 1e9


class OptimizerKind(enum.Enum):
    """Optimizer families, distinguished only by per-parameter state size."""

    SGD = "sgd"
    MOMENTUM = "momentum"
    ADAM = "adam"
    SAM = "sam"


#: Optimizer state in units of parameter copies. SAM keeps one momentum
#: state plus one extra transient gradient for the perturbation step.
OPTIMIZER_STATE_COPIES = {
    OptimizerKind.SGD: 0,
    OptimizerKind.MOMENTUM: 1,
    OptimizerKind.ADAM: 2,
    OptimizerKind.SAM: 2,
}


@dataclass(frozen=True)
class MemoryEstimate:
    parameter_bytes: int
    gradient_bytes: int
    optimizer_state_bytes: int
    activation_bytes: int
    peak_training_bytes: int
    peak_inference_bytes: int


# ---------------------------------------------------------------------------
# Parameters


def patch_embed_weight_params(patch: int, in_channels: int, embed_dim: int) -> int:
    """Closed form for the patch-embedding projection matrix alone:
    patch * patch * channels * embed_dim (bias, CLS and positional tables
    are counted separately)."""
    return patch * patch * in_channels * embed_dim


def count_params(spec: ArchSpec) -> ParamCount:
    """Parameter count; bodies of parameter-shared repeats count once."""
    ensure_valid(spec)

    def rec(layers, prefix):
        unique = 0
        unrolled = 0
        breakdown = []
        for i, layer in enumerate(layers):
            path = f"{prefix}[{i}]" if prefix else f"layers[{i}]"
            if isinstance(layer, Repeat):
                u, r, sub = rec(layer.body, f"{path}.body")
                copies = 1 if layer.share_params else layer.times
                unique += u * copies
                unrolled += r * layer.times
                breakdown.extend((p, c * copies) for p, c in sub)
            elif isinstance(layer, Parallel):
                for b, branch in enumerate(layer.branches):
                    u, r, sub = rec(branch, f"{path}.branches[{b}]")
                    unique += u
                    unrolled += r
                    breakdown.extend(sub)
            elif isinstance(layer, MoE):
                eu, er, _ = rec([layer.expert], f"{path}.expert")
                router = layer.router_dim * layer.num_experts
                u = router + layer.num_experts * eu
                r = router + layer.num_experts * er
                unique += u
                unrolled += r
                breakdown.append((path, u))
            else:
                p = leaf_params(layer, spec)
                unique += p
                unrolled += p
                breakdown.append((path, p))
        return unique, unrolled, breakdown

    unique, unrolled, breakdown = rec(spec.layers, "")
    total = _checked(unique, "parameter count")
    return ParamCount(
        total=total,
        trainable=total,
        by_layer=tuple(breakdown),
        shared_savings=_checked(unrolled, "parameter count") - total,
    )


# ---------------------------------------------------------------------------
# FLOPs


def count_flops(spec: ArchSpec, batch: int = 1, *,
                weight_sparsity: float = 0.0) -> FlopCount:
    """Forward-pass FLOPs for one batch; exactly linear in ``batch``.

    Parameter sharing never changes FLOPs: a shared repeat runs its body
    just as many times. ``weight_sparsity`` scales only the matmul terms
    (the fraction of weights that are zero and skippable in principle);
    elementwise work is unaffected, and no speedup claim is implied.
    """
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    if not 0.0 <= weight_sparsity < 1.0:
        raise ValueError("weight_sparsity must be in [0, 1)")
    steps = execution_steps(spec)
    keep = 1.0 - weight_sparsity
    total_flops = 0
    total_macs = 0
    breakdown = []
    for s in steps:
        macs = s.matmul_macs if weight_sparsity == 0.0 else int(round(s.matmul_macs * keep))
        flops = 2 * macs + (s.flops - 2 * s.matmul_macs)
        total_macs += macs
        total_flops += flops
        breakdown.append((s.path, flops * batch))
    return FlopCount(
        flops=_checked(total_flops * batch, "FLOP count"),
        macs=_checked(total_macs * batch, "MAC count"),
        by_layer=tuple(breakdown),
    )


def backward_flops(spec: ArchSpec, batch: int = 1) -> int:
    """Backward-pass FLOPs, modeled as twice the forward pass."""
    return _checked(2 * count_flops(spec, batch).flops, "FLOP count")


# ---------------------------------------------------------------------------
# Activations and memory traffic


def activation_size(spec: ArchSpec, batch: int = 1) -> int:
    """Total elements in every building-block output tensor, per batch."""
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    steps = execution_steps(spec)
    per_example = sum(s.out_elements for s in steps)
    return _checked(per_example * batch, "activation element count")


def memory_access_cost(spec: ArchSpec, batch: int = 1) -> int:
    """Bytes moved between memory and compute for one forward batch.

    Per executed layer and per example: parameters read once, input
    activations read, output activations written. Shared parameters are
    re-read on every repeat iteration -- sharing saves storage, not
    accesses -- so the total is exactly linear in batch and identical for
    shared and unshared repeats.
    """
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    steps = execution_steps(spec)
    eb = spec.element_bytes
    per_example = sum(
        (s.params + s.in_elements + s.out_elements) * eb for s in steps
    )
    return _checked(per_example * batch, "memory access volume")


def layer_mac_bytes(step: Step, element_bytes: int, batch: int) -> int:
    """Memory traffic of one executed layer, same accounting as above."""
    return (step.params + step.in_elements + step.out_elements) * element_bytes * batch


# ---------------------------------------------------------------------------
# Memory estimates


def training_memory(spec: ArchSpec, batch: int = 1,
                    optimizer: OptimizerKind = OptimizerKind.ADAM) -> MemoryEstimate:
    """Peak device memory while training.

    Activations kept for the backward pass cover every building-block
    output, and they ignore parameter sharing entirely: a shared stack
    stores the same activations as its unshared twin, which is why sharing
    helps inference memory far more than training memory.
    """
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    eb = spec.element_bytes
    param_bytes = _checked(count_params(spec).total * eb, "parameter bytes")
    grad_bytes = param_bytes
    opt_bytes = OPTIMIZER_STATE_COPIES[optimizer] * param_bytes
    act_bytes = _checked(activation_size(spec, batch) * eb, "activation bytes")
    peak_train = _checked(param_bytes + grad_bytes + opt_bytes + act_bytes,
                          "peak training bytes")
    return MemoryEstimate(
        parameter_bytes=param_bytes,
        gradient_bytes=grad_bytes,
        optimizer_state_bytes=opt_bytes,
        activation_bytes=act_bytes,
        peak_training_bytes=peak_train,
        peak_inference_bytes=_inference_peak(spec, batch, param_bytes),
    )


def inference_memory(spec: ArchSpec, batch: int = 1) -> MemoryEstimate:
    """Peak device memory for a forward pass: weights plus the largest
    single-layer output working set. Gradient and optimizer fields are
    zero by construction."""
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    param_bytes = _checked(count_params(spec).total * spec.element_bytes,
                           "parameter bytes")
    working = _inference_peak(spec, batch, param_bytes) - param_bytes
    return MemoryEstimate(
        parameter_bytes=param_bytes,
        gradient_bytes=0,
        optimizer_state_bytes=0,
        activation_bytes=working,
        peak_training_bytes=param_bytes + working,
        peak_inference_bytes=param_bytes + working,
    )


def _inference_peak(spec: ArchSpec, batch: int, param_bytes: int) -> int:
    steps = execution_steps(spec)
    eb = spec.element_bytes
    largest = max((s.out_elements for s in steps), default=0)
    return _checked(param_bytes + largest * eb * batch, "peak inference bytes")
