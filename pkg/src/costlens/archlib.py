"""Canonical architecture builders.

These construct the model families whose indicator relationships the
toolkit is built to expose: patch-size sweeps of a vision transformer
(parameters up, FLOPs down), depth-shared stacks (parameters down, FLOPs
flat), expert-routed stacks (parameters up, FLOPs flat), and
encoder-decoder versus decoder-only language model arrangements
(parameters flat, FLOPs roughly halved).

Every builder output passes :func:`costlens.archspec.validate`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .archspec import (
    ArchSpec,
    Attention,
    ClassifierHead,
    FeedForward,
    Image,
    LayerNorm,
    LayerSpec,
    MoE,
    PatchEmbed,
    Repeat,
    TokenEmbedding,
    TokenSequence,
)


@dataclass(frozen=True)
class VitConfig:
    """Vision-transformer shape. QKV width equals ``model_dim``."""

    patch: int
    depth: int
    model_dim: int
    num_heads: int
    ffn_dim: int
    image: tuple[int, int, int] = (224, 224, 3)
    classes: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(self.image))
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        for name in ("patch", "model_dim", "num_heads", "ffn_dim", "classes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.model_dim % self.num_heads:
            raise ValueError("num_heads must divide model_dim")
        h, w, _c = self.image
        if h % self.patch or w % self.patch:
            raise ValueError(
                f"patch {self.patch} must divide image extents {h}x{w}"
            )


def _encoder_block(d: int, heads: int, ffn_dim: int, *,
                   causal: bool = False, cross: bool = False) -> tuple[LayerSpec, ...]:
    block: list[LayerSpec] = [LayerNorm(d), Attention(d, d, heads, is_causal=causal)]
    if cross:
        block += [LayerNorm(d), Attention(d, d, heads, cross_attention=True)]
    block += [LayerNorm(d), FeedForward(d, ffn_dim)]
    return tuple(block)


def build_vit(cfg: VitConfig) -> ArchSpec:
    """Patch embedding (CLS + learned positions), ``depth`` pre-norm
    encoder blocks, final norm, linear classifier over the CLS token."""
    h, w, c = cfg.image
    return ArchSpec(
        name=f"vit_p{cfg.patch}_d{cfg.depth}_w{cfg.model_dim}",
        input=Image(h, w, c),
        layers=(
            PatchEmbed(cfg.patch, c, cfg.model_dim),
            Repeat(_encoder_block(cfg.model_dim, cfg.num_heads, cfg.ffn_dim),
                   times=cfg.depth, share_params=False),
            LayerNorm(cfg.model_dim),
            ClassifierHead(cfg.model_dim, cfg.classes),
        ),
        metadata={"family": "vit", "patch": str(cfg.patch)},
    )


def build_universal_transformer(cfg: VitConfig, steps: int) -> ArchSpec:
    """Same stack as :func:`build_vit` but one block reused ``steps``
    times with shared parameters: the parameter count of a depth-1 model
    with the compute of a depth-``steps`` model."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    h, w, c = cfg.image
    return ArchSpec(
        name=f"ut_p{cfg.patch}_k{steps}_w{cfg.model_dim}",
        input=Image(h, w, c),
        layers=(
            PatchEmbed(cfg.patch, c, cfg.model_dim),
            Repeat(_encoder_block(cfg.model_dim, cfg.num_heads, cfg.ffn_dim),
                   times=steps, share_params=True),
            LayerNorm(cfg.model_dim),
            ClassifierHead(cfg.model_dim, cfg.classes),
        ),
        metadata={"family": "universal_transformer", "steps": str(steps)},
    )


def build_moe_transformer(cfg: VitConfig, num_experts: int,
                          experts_per_token: int, moe_every: int = 2) -> ArchSpec:
    """Vision transformer with every ``moe_every``-th feed-forward block
    replaced by a mixture of ``num_experts`` expert blocks of the same
    shape, ``experts_per_token`` of which run per token."""
    if num_experts < 1:
        raise ValueError("num_experts must be >= 1")
    if not 1 <= experts_per_token <= num_experts:
        raise ValueError("experts_per_token must be in [1, num_experts]")
    if moe_every < 1:
        raise ValueError("moe_every must be >= 1")
    d = cfg.model_dim
    h, w, c = cfg.image
    layers: list[LayerSpec] = [PatchEmbed(cfg.patch, c, d)]
    for i in range(cfg.depth):
        layers += [LayerNorm(d), Attention(d, d, cfg.num_heads), LayerNorm(d)]
        if (i + 1) % moe_every == 0:
            layers.append(MoE(
                expert=FeedForward(d, cfg.ffn_dim),
                num_experts=num_experts,
                experts_per_token=experts_per_token,
                router_dim=d,
            ))
        else:
            layers.append(FeedForward(d, cfg.ffn_dim))
    layers += [LayerNorm(d), ClassifierHead(d, cfg.classes)]
    return ArchSpec(
        name=f"moe_p{cfg.patch}_d{cfg.depth}_e{num_experts}k{experts_per_token}",
        input=Image(h, w, c),
        layers=tuple(layers),
        metadata={"family": "moe", "num_experts": str(num_experts),
                  "experts_per_token": str(experts_per_token)},
    )


def moe_layer_count(cfg: VitConfig, moe_every: int = 2) -> int:
    """How many feed-forward positions :func:`build_moe_transformer` converts."""
    return cfg.depth // moe_every


@dataclass(frozen=True)
class LmConfig:
    """Language-model shape for arrangement comparisons.

    ``layers_per_stack`` is L: an encoder-decoder gets L encoder plus L
    decoder layers, a decoder-only model gets 2L layers over the
    concatenated input+output stream. The encoder-decoder arrangement is
    modeled at equal input and output lengths (cross-attention key/value
    length equals the query length).
    """

    arrangement: str                  # "decoder_only" | "encoder_decoder"
    layers_per_stack: int
    model_dim: int
    ffn_dim: int
    heads: int
    vocab: int
    input_len: int = 512
    output_len: int = 512

    def __post_init__(self):
        if self.arrangement not in ("decoder_only", "encoder_decoder"):
            raise ValueError(
                f"arrangement must be decoder_only or encoder_decoder, "
                f"got {self.arrangement!r}"
            )
        for name in ("layers_per_stack", "model_dim", "ffn_dim", "heads",
                     "vocab", "input_len", "output_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.model_dim % self.heads:
            raise ValueError("heads must divide model_dim")
        if self.arrangement == "encoder_decoder" and self.input_len != self.output_len:
            raise ValueError(
                "encoder_decoder is modeled at equal input/output lengths"
            )


def build_lm(cfg: LmConfig) -> ArchSpec:
    """Decoder-only: one causal stack of 2L blocks over the full
    input+output length. Encoder-decoder: L encoder blocks then L decoder
    blocks (causal self-attention plus cross-attention) over the shared
    stream length, with one tied embedding/logit matrix."""
    d, L = cfg.model_dim, cfg.layers_per_stack
    if cfg.arrangement == "decoder_only":
        return ArchSpec(
            name=f"lm_dec_{2 * L}x{d}",
            input=TokenSequence(cfg.input_len + cfg.output_len, cfg.vocab),
            layers=(
                TokenEmbedding(cfg.vocab, d, tied_output=True),
                Repeat(_encoder_block(d, cfg.heads, cfg.ffn_dim, causal=True),
                       times=2 * L, share_params=False),
                LayerNorm(d),
            ),
            metadata={"family": "lm", "arrangement": "decoder_only"},
        )
    return ArchSpec(
        name=f"lm_encdec_{L}+{L}x{d}",
        input=TokenSequence(cfg.input_len, cfg.vocab),
        layers=(
            TokenEmbedding(cfg.vocab, d, tied_output=True),
            Repeat(_encoder_block(d, cfg.heads, cfg.ffn_dim),
                   times=L, share_params=False),
            LayerNorm(d),
            Repeat(_encoder_block(d, cfg.heads, cfg.ffn_dim, causal=True, cross=True),
                   times=L, share_params=False),
            LayerNorm(d),
        ),
        metadata={"family": "lm", "arrangement": "encoder_decoder"},
    )


def depth_width_pair(patch: int = 16, image: int = 224) -> tuple[ArchSpec, ArchSpec]:
    """A FLOP-matched deep-narrow / shallow-wide pair.

    The deep model stacks 48 thin blocks, the wide one 12 blocks at twice
    the width; the hidden dimension of the deep feed-forward is chosen so
    total FLOPs agree to within about one percent while the deep model
    dispatches four times as many sequential ops.
    """
    deep = build_vit(VitConfig(patch=patch, depth=48, model_dim=384,
                               num_heads=6, ffn_dim=1440,
                               image=(image, image, 3)))
    wide = build_vit(VitConfig(patch=patch, depth=12, model_dim=768,
                               num_heads=12, ffn_dim=3072,
                               image=(image, image, 3)))
    deep = ArchSpec("deep_48x384", deep.input, deep.layers,
                    {**deep.metadata, "geometry": "deep"}, deep.element_bytes)
    wide = ArchSpec("wide_12x768", wide.input, wide.layers,
                    {**wide.metadata, "geometry": "wide"}, wide.element_bytes)
    return deep, wide


# ---------------------------------------------------------------------------
# Builder registry (spec files and the command line address builders by name)


def _build_vit_args(args: dict) -> ArchSpec:
    return build_vit(VitConfig(**args))


def _build_ut_args(args: dict) -> ArchSpec:
    args = dict(args)
    steps = args.pop("steps")
    return build_universal_transformer(VitConfig(**args), steps)


def _build_moe_args(args: dict) -> ArchSpec:
    args = dict(args)
    num_experts = args.pop("num_experts")
    experts_per_token = args.pop("experts_per_token")
    moe_every = args.pop("moe_every", 2)
    return build_moe_transformer(VitConfig(**args), num_experts,
                                 experts_per_token, moe_every)


def _build_lm_args(args: dict) -> ArchSpec:
    return build_lm(LmConfig(**args))


BUILDERS = {
    "vit": _build_vit_args,
    "universal_transformer": _build_ut_args,
    "moe": _build_moe_args,
    "lm": _build_lm_args,
}


def build_from_reference(family: str, args: dict) -> ArchSpec:
    """Construct a spec from a builder name plus keyword arguments, as
    used by spec files and CLI flags."""
    builder = BUILDERS.get(family)
    if builder is None:
        raise ValueError(
            f"unknown builder family {family!r} (known: {', '.join(sorted(BUILDERS))})"
        )
    if "image" in args and isinstance(args["image"], list):
        args = {**args, "image": tuple(args["image"])}
    try:
        return builder(args)
    except TypeError as exc:
        raise ValueError(f"bad arguments for builder {family!r}: {exc}") from exc
