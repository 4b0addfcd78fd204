"""Per-layer execution trace: shapes, parameters, FLOPs, element counts.

One walk of the spec tree produces a :class:`Step` for every *executed*
leaf layer (so a ``Repeat(times=k)`` body appears k times). Every cost
estimator is a fold over these steps; the parameter-uniqueness logic for
shared repeats lives in :mod:`costlens.indicators` instead, since it is
about storage rather than execution.

FLOP conventions (shared by everything downstream):

* one fused multiply-add counts as 2 FLOPs; ``matmul_macs`` carries the
  exact multiply-accumulate count of the matmul terms, so
  ``flops >= 2 * matmul_macs`` always holds;
* softmax and layer normalization cost 5 FLOPs per element, GELU-like
  activations 4, plain adds (biases, residuals, positional) 1;
* attention charges both quadratic terms (logits and value mixing) in
  full, causal or not;
* the classifier head runs once per example on a pooled token.
"""

from __future__ import annotations

from dataclasses import dataclass

from .archspec import (
    ArchSpec,
    Attention,
    ClassifierHead,
    Dense,
    FeedForward,
    LayerNorm,
    LayerSpec,
    MoE,
    Parallel,
    PatchEmbed,
    Repeat,
    TokenEmbedding,
    TokenSequence,
    ensure_valid,
)

SOFTMAX_FLOPS_PER_ELEMENT = 5
LAYERNORM_FLOPS_PER_ELEMENT = 5
ACTIVATION_FLOPS_PER_ELEMENT = 4
ADD_FLOPS_PER_ELEMENT = 1


@dataclass(frozen=True)
class Step:
    """One executed leaf layer with its per-example costs."""

    path: str
    layer: LayerSpec
    seq_len: int          # token count at this layer (after any padding)
    params: int           # parameters of this instance (sharing ignored)
    matmul_macs: int      # per example
    flops: int            # per example, includes 2 * matmul_macs
    in_elements: int      # per example
    out_elements: int     # per example


def _pad_length(length: int, multiple: int | None) -> int:
    if multiple is None or multiple <= 1:
        return length
    return -(-length // multiple) * multiple


def leaf_params(layer, spec: ArchSpec) -> int:
    """Parameters of one primitive layer.

    Only the patch embedding needs the spec: its learned positional table
    is sized by the real (unpadded) token count of the input image.
    """
    if isinstance(layer, PatchEmbed):
        inp = spec.input
        patch_in = layer.patch * layer.patch * layer.in_channels
        params = patch_in * layer.embed_dim + layer.embed_dim
        if layer.add_cls_token:
            params += layer.embed_dim
        if layer.positional:
            patches = (inp.height // layer.patch) * (inp.width // layer.patch)
            raw_len = patches + (1 if layer.add_cls_token else 0)
            params += raw_len * layer.embed_dim
        return params
    if isinstance(layer, Attention):
        return 4 * layer.model_dim * layer.qkv_dim + 4 * layer.qkv_dim
    if isinstance(layer, FeedForward):
        d, h = layer.model_dim, layer.hidden_dim
        return d * h + h + h * d + d
    if isinstance(layer, LayerNorm):
        return 2 * layer.model_dim
    if isinstance(layer, Dense):
        return layer.in_dim * layer.out_dim + (layer.out_dim if layer.bias else 0)
    if isinstance(layer, TokenEmbedding):
        v, d = layer.vocab, layer.embed_dim
        return v * d if layer.tied_output else 2 * v * d
    if isinstance(layer, ClassifierHead):
        return layer.model_dim * layer.classes + layer.classes
    raise TypeError(f"unexpected layer type {type(layer).__name__}")


def _leaf_step(layer, path, seq_len, spec, pad_multiple):
    """Costs for one non-container layer at sequence length ``seq_len``."""
    L = seq_len
    params = leaf_params(layer, spec)
    if isinstance(layer, PatchEmbed):
        inp = spec.input
        patches = (inp.height // layer.patch) * (inp.width // layer.patch)
        raw_len = patches + (1 if layer.add_cls_token else 0)
        L = _pad_length(raw_len, pad_multiple)
        d = layer.embed_dim
        patch_in = layer.patch * layer.patch * layer.in_channels
        macs = patches * patch_in * d
        flops = 2 * macs + patches * d * ADD_FLOPS_PER_ELEMENT  # projection bias
        if layer.positional:
            flops += L * d * ADD_FLOPS_PER_ELEMENT
        return Step(path, layer, L, params, macs, flops,
                    inp.height * inp.width * inp.channels, L * d), L

    if isinstance(layer, Attention):
        d, dq = layer.model_dim, layer.qkv_dim
        proj_macs = 4 * L * d * dq                 # Q, K, V, output
        quad_macs = 2 * L * L * dq                 # logits + value mixing
        macs = proj_macs + quad_macs
        flops = 2 * macs
        flops += SOFTMAX_FLOPS_PER_ELEMENT * layer.num_heads * L * L
        flops += (3 * L * dq + L * d) * ADD_FLOPS_PER_ELEMENT   # biases
        flops += L * d * ADD_FLOPS_PER_ELEMENT                  # residual
        return Step(path, layer, L, params, macs, flops, L * d, L * d), L

    if isinstance(layer, FeedForward):
        d, h = layer.model_dim, layer.hidden_dim
        macs = 2 * L * d * h
        flops = 2 * macs
        flops += (L * h + L * d) * ADD_FLOPS_PER_ELEMENT        # biases
        flops += ACTIVATION_FLOPS_PER_ELEMENT * L * h
        flops += L * d * ADD_FLOPS_PER_ELEMENT                  # residual
        return Step(path, layer, L, params, macs, flops, L * d, L * d), L

    if isinstance(layer, LayerNorm):
        d = layer.model_dim
        flops = LAYERNORM_FLOPS_PER_ELEMENT * L * d
        return Step(path, layer, L, params, 0, flops, L * d, L * d), L

    if isinstance(layer, Dense):
        a, b = layer.in_dim, layer.out_dim
        macs = L * a * b
        flops = 2 * macs + (L * b * ADD_FLOPS_PER_ELEMENT if layer.bias else 0)
        return Step(path, layer, L, params, macs, flops, L * a, L * b), L

    if isinstance(layer, TokenEmbedding):
        v, d = layer.vocab, layer.embed_dim
        macs = L * d * v                        # output logit projection
        flops = 2 * macs                        # the lookup itself is free
        # Two output tensors: the embedded sequence and the logits.
        return Step(path, layer, L, params, macs, flops, L, L * d + L * v), L

    if isinstance(layer, ClassifierHead):
        d, k = layer.model_dim, layer.classes
        macs = d * k
        flops = 2 * macs + k * ADD_FLOPS_PER_ELEMENT
        return Step(path, layer, L, params, macs, flops, d, k), L

    raise TypeError(f"unexpected layer type {type(layer).__name__} at {path}")


def expand_layer(layer, path, seq_len, spec, pad_multiple, out) -> int:
    """Append the step(s) for one non-container layer; returns the new
    sequence length. MoE counts as a single composite step."""
    L = seq_len
    if isinstance(layer, MoE):
        expert_steps: list[Step] = []
        _walk([layer.expert], f"{path}.expert", L, spec, pad_multiple,
              expert_steps)
        e_params = sum(s.params for s in expert_steps)
        e_macs = sum(s.matmul_macs for s in expert_steps)
        e_flops = sum(s.flops for s in expert_steps)
        dr, E, K = layer.router_dim, layer.num_experts, layer.experts_per_token
        router_macs = L * dr * E
        router_flops = 2 * router_macs + SOFTMAX_FLOPS_PER_ELEMENT * L * E
        out.append(Step(
            path, layer, L,
            params=dr * E + E * e_params,
            matmul_macs=router_macs + K * e_macs,
            flops=router_flops + K * e_flops,
            in_elements=expert_steps[0].in_elements,
            out_elements=expert_steps[-1].out_elements,
        ))
        return L
    step, L = _leaf_step(layer, path, L, spec, pad_multiple)
    out.append(step)
    return L


def _walk(layers, prefix, seq_len, spec, pad_multiple, out):
    L = seq_len
    for i, layer in enumerate(layers):
        path = f"{prefix}[{i}]" if prefix else f"layers[{i}]"
        if isinstance(layer, Repeat):
            for t in range(layer.times):
                L = _walk(layer.body, f"{path}.body@{t}", L, spec, pad_multiple, out)
        elif isinstance(layer, Parallel):
            merged = L
            for b, branch in enumerate(layer.branches):
                merged = _walk(branch, f"{path}.branches[{b}]", L, spec,
                               pad_multiple, out)
            L = merged
        else:
            L = expand_layer(layer, path, L, spec, pad_multiple, out)
    return L


def execution_steps(spec: ArchSpec, pad_multiple: int | None = None) -> list[Step]:
    """Flat trace of every executed leaf layer, in execution order.

    ``pad_multiple`` rounds the token-stream length up to the next multiple
    before any shape-dependent cost (hardware length padding); parameter
    counts are never affected by padding.
    """
    ensure_valid(spec)
    if isinstance(spec.input, TokenSequence):
        L = _pad_length(spec.input.length, pad_multiple)
    else:
        L = 0  # set by the leading PatchEmbed
    steps: list[Step] = []
    _walk(spec.layers, "", L, spec, pad_multiple, steps)
    return steps
