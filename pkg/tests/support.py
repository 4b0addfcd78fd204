"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own code paths: the
frontier oracle is a quadratic dominance scan, the correlation oracle is
direct pair counting, and the activation/traffic oracles are closed-form
sums written from the layer shapes.
"""

from __future__ import annotations

import math
import random
from contextlib import contextmanager
from importlib import resources

from costlens import (
    ArchSpec,
    Attention,
    Dense,
    FeedForward,
    LayerNorm,
    ModelRecord,
    Repeat,
    TokenSequence,
    VitConfig,
    build_vit,
)

# Published reference numbers for the base-size patch sweep: patch ->
# (image side used to build, million params, gflops, sequence length).
# 64 does not divide 224: the published 95.3M/0.93G correspond to a 3x3
# patch grid (image 192), the published length 17 to a 4x4 grid (image
# 256); both param counts agree to five digits.
TABLE1 = {
    8: (224, 86.5, 78.54, 785),
    16: (224, 86.6, 17.63, 197),
    32: (224, 88.2, 4.42, 50),
    64: (192, 95.3, 0.93, 17),
}

TABLE2_ROWS = [
    # name, layers, ffn, qkv, heads, Mparams, gflops, msec/img, accuracy
    ("D6", 6, 1024, 384, 6, 18.89, 0.61, 0.09, 37.5),
    ("D8", 8, 1024, 384, 6, 22.44, 0.79, 0.11, 42.4),
    ("D16", 16, 1024, 384, 6, 36.63, 1.52, 0.22, 51.5),
    ("D24", 24, 1024, 384, 6, 50.83, 2.25, 0.32, 55.7),
    ("D32", 32, 1024, 384, 6, 65.03, 2.98, 0.43, 58.8),
    ("D48", 48, 1024, 384, 6, 93.42, 4.43, 0.64, 61.8),
    ("W768", 12, 768, 192, 3, 9.47, 0.31, 0.11, 34.4),
    ("W1024", 12, 1024, 384, 6, 24.81, 0.92, 0.16, 45.2),
    ("W1536", 12, 1536, 512, 8, 42.51, 1.70, 0.22, 50.3),
    ("W3072", 12, 3072, 768, 12, 101.52, 4.44, 0.35, 58.3),
    ("W4096", 12, 4096, 1024, 16, 173.10, 7.80, 0.68, 63.3),
]


def vit_base(patch: int, image: int) -> ArchSpec:
    return build_vit(VitConfig(patch=patch, depth=12, model_dim=768,
                               num_heads=12, ffn_dim=3072,
                               image=(image, image, 3)))


@contextmanager
def data_file(rel: str):
    """Filesystem path of a packaged data file."""
    with resources.as_file(resources.files("costlens").joinpath("data", rel)) as p:
        yield str(p)


# ---------------------------------------------------------------------------
# Random spec generation (parameter-sharing property suite)


def random_repeat_pair(rng: random.Random):
    """A (shared, unshared) spec pair identical except for the share flag.

    The repeat body always carries at least one parameterized layer and
    times >= 2, so sharing must strictly reduce the parameter count.
    """
    d = rng.choice([8, 16, 32, 64])
    heads = rng.choice([1, 2, 4])
    length = rng.randint(2, 24)

    def random_leaf():
        kind = rng.randrange(4)
        if kind == 0:
            return LayerNorm(d)
        if kind == 1:
            return FeedForward(d, rng.choice([d, 2 * d, 4 * d]))
        if kind == 2:
            return Attention(d, d, heads, is_causal=rng.random() < 0.5)
        return Dense(d, d, bias=rng.random() < 0.5)

    body = [random_leaf() for _ in range(rng.randint(1, 3))]
    if rng.random() < 0.3:
        body = [Repeat(tuple(body), rng.randint(2, 3),
                       share_params=rng.random() < 0.5)]
    times = rng.randint(2, 5)
    prefix = [random_leaf() for _ in range(rng.randint(0, 2))]
    suffix = [random_leaf() for _ in range(rng.randint(0, 2))]

    def spec(share):
        return ArchSpec(
            name=f"random_{'s' if share else 'u'}",
            input=TokenSequence(length, 64),
            layers=tuple(prefix) + (Repeat(tuple(body), times, share),) + tuple(suffix),
        )

    return spec(True), spec(False)


# ---------------------------------------------------------------------------
# Random records (frontier property suite)


def random_records(rng: random.Random, n: int, *, indicator: str = "flops"):
    records = []
    for i in range(n):
        # One decimal so ties in cost and quality actually happen.
        quality = round(rng.uniform(0, 10), 1)
        cost = round(rng.uniform(0, 10), 1)
        records.append(ModelRecord(
            name=f"m{i}",
            indicators={indicator: cost},
            quality=quality,
        ))
    return records


def brute_force_frontier_names(records, indicator: str) -> set[str]:
    """Quadratic dominance scan; a record survives unless some other
    record is at least as good on both axes and strictly better on one."""
    names = set()
    for r in records:
        dominated = False
        for s in records:
            if s is r:
                continue
            if (s.quality >= r.quality
                    and s.indicators[indicator] <= r.indicators[indicator]
                    and (s.quality > r.quality
                         or s.indicators[indicator] < r.indicators[indicator])):
                dominated = True
                break
        if not dominated:
            names.add(r.name)
    return names


def brute_force_tau(xs, ys) -> float:
    """Tie-corrected Kendall correlation by direct pair counting."""
    n = len(xs)
    concordant = discordant = ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = xs[i] - xs[j]
            dy = ys[i] - ys[j]
            if dx == 0:
                ties_x += 1
            if dy == 0:
                ties_y += 1
            if dx == 0 or dy == 0:
                continue
            if (dx > 0) == (dy > 0):
                concordant += 1
            else:
                discordant += 1
    n0 = n * (n - 1) // 2
    denom = math.sqrt((n0 - ties_x) * (n0 - ties_y))
    if denom == 0:
        return 1.0 if discordant == 0 else 0.0
    return (concordant - discordant) / denom
