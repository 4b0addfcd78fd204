import pytest

from costlens import (
    LmConfig,
    MoE,
    VitConfig,
    build_from_reference,
    build_lm,
    build_moe_transformer,
    build_universal_transformer,
    build_vit,
    count_flops,
    count_params,
    depth_width_pair,
    validate,
)
from costlens.archspec import input_sequence_length

from support import TABLE1, vit_base


BASE = dict(patch=16, depth=12, model_dim=768, num_heads=12, ffn_dim=3072)


class TestVitBuilder:
    @pytest.mark.parametrize("patch", [8, 16, 32, 64])
    def test_outputs_validate(self, patch):
        image = TABLE1[patch][0]
        assert validate(vit_base(patch, image)).ok

    @pytest.mark.parametrize("patch", [8, 16, 32, 64])
    def test_reproduces_published_sweep(self, patch):
        image, million, gflops, _ = TABLE1[patch]
        spec = vit_base(patch, image)
        params = count_params(spec).total
        assert abs(params - million * 1e6) / (million * 1e6) < 0.005
        assert abs(count_flops(spec).gflops - gflops) / gflops < 0.03

    def test_sequence_length_patch32(self):
        assert input_sequence_length(vit_base(32, 224)) == 50

    def test_depth_zero_rejected(self):
        with pytest.raises(ValueError, match="depth"):
            VitConfig(patch=16, depth=0, model_dim=768, num_heads=12, ffn_dim=3072)

    def test_heads_must_divide_dim(self):
        with pytest.raises(ValueError, match="divide"):
            VitConfig(patch=16, depth=1, model_dim=100, num_heads=7, ffn_dim=64)

    def test_patch_must_divide_image(self):
        with pytest.raises(ValueError, match="divide"):
            VitConfig(patch=64, depth=1, model_dim=64, num_heads=4, ffn_dim=64,
                      image=(224, 224, 3))


class TestUniversalTransformer:
    def test_params_equal_depth_one(self):
        cfg = VitConfig(**BASE)
        ut = build_universal_transformer(cfg, steps=12)
        one = build_vit(VitConfig(**{**BASE, "depth": 1}))
        assert count_params(ut).total == count_params(one).total

    def test_flops_equal_full_depth(self):
        cfg = VitConfig(**BASE)
        ut = build_universal_transformer(cfg, steps=12)
        assert count_flops(ut) == count_flops(build_vit(cfg))

    def test_single_step_matches_vanilla_everywhere(self):
        from costlens import activation_size, inference_memory, memory_access_cost

        cfg = VitConfig(**{**BASE, "depth": 1})
        ut = build_universal_transformer(cfg, steps=1)
        vanilla = build_vit(cfg)
        assert count_params(ut).total == count_params(vanilla).total
        assert count_flops(ut).flops == count_flops(vanilla).flops
        assert activation_size(ut) == activation_size(vanilla)
        assert memory_access_cost(ut) == memory_access_cost(vanilla)
        assert (inference_memory(ut).peak_inference_bytes
                == inference_memory(vanilla).peak_inference_bytes)

    def test_steps_validated(self):
        with pytest.raises(ValueError):
            build_universal_transformer(VitConfig(**BASE), steps=0)


class TestMoEBuilder:
    def test_output_validates(self):
        assert validate(build_moe_transformer(VitConfig(**BASE), 8, 2)).ok

    def test_degenerate_single_expert_matches_vanilla_within_router(self):
        cfg = VitConfig(**BASE)
        moe = build_moe_transformer(cfg, num_experts=1, experts_per_token=1)
        vanilla = build_vit(cfg)
        router = 6 * 768 * 1  # 6 converted layers, one router row each
        assert count_params(moe).total - count_params(vanilla).total == router

    def test_moe_every_placement(self):
        spec = build_moe_transformer(VitConfig(**{**BASE, "depth": 6}), 4, 1,
                                     moe_every=3)
        assert sum(isinstance(l, MoE) for l in spec.layers) == 2

    def test_k_bounded_by_e(self):
        with pytest.raises(ValueError):
            build_moe_transformer(VitConfig(**BASE), num_experts=2,
                                  experts_per_token=3)


class TestLmBuilder:
    CFG = dict(model_dim=512, ffn_dim=2048, heads=8, vocab=32000)

    def test_outputs_validate(self):
        for arrangement in ("decoder_only", "encoder_decoder"):
            cfg = LmConfig(arrangement=arrangement, layers_per_stack=2, **self.CFG)
            assert validate(build_lm(cfg)).ok

    def test_decoder_only_processes_full_length(self):
        cfg = LmConfig("decoder_only", 2, input_len=128, output_len=64, **self.CFG)
        assert build_lm(cfg).input.length == 192

    @pytest.mark.parametrize("L", [2, 6, 12])
    def test_param_ratio_band(self, L):
        ed = build_lm(LmConfig("encoder_decoder", L, **self.CFG))
        do = build_lm(LmConfig("decoder_only", L, **self.CFG))
        ratio = count_params(ed).total / count_params(do).total
        assert 0.9 <= ratio <= 1.15

    @pytest.mark.parametrize("L", [2, 6, 12])
    def test_flops_per_token_ratio_band(self, L):
        # equal generated-token counts, so the total-FLOPs ratio is the
        # per-token ratio
        ed = build_lm(LmConfig("encoder_decoder", L, **self.CFG))
        do = build_lm(LmConfig("decoder_only", L, **self.CFG))
        ratio = count_flops(ed).flops / count_flops(do).flops
        assert 0.45 <= ratio <= 0.6

    def test_layers_zero_rejected(self):
        with pytest.raises(ValueError):
            LmConfig("decoder_only", 0, **self.CFG)

    def test_encdec_requires_equal_lengths(self):
        with pytest.raises(ValueError, match="equal input/output"):
            LmConfig("encoder_decoder", 2, input_len=128, output_len=64, **self.CFG)

    def test_unknown_arrangement(self):
        with pytest.raises(ValueError):
            LmConfig("prefix_lm", 2, **self.CFG)


class TestDepthWidthPair:
    def test_flop_matched(self):
        deep, wide = depth_width_pair()
        ratio = count_flops(deep).flops / count_flops(wide).flops
        assert abs(ratio - 1) < 0.01

    def test_deep_has_fewer_params(self):
        deep, wide = depth_width_pair()
        assert count_params(deep).total < count_params(wide).total


class TestBuilderRegistry:
    def test_vit_by_name(self):
        spec = build_from_reference("vit", dict(BASE))
        assert count_params(spec).total == count_params(vit_base(16, 224)).total

    def test_image_list_accepted(self):
        spec = build_from_reference("vit", {**BASE, "image": [224, 224, 3]})
        assert validate(spec).ok

    def test_unknown_family(self):
        with pytest.raises(ValueError, match="unknown builder family"):
            build_from_reference("resnet", {})

    def test_bad_arguments(self):
        with pytest.raises(ValueError, match="bad arguments"):
            build_from_reference("vit", {"patch": 16})
