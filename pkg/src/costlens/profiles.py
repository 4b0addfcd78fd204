"""One-stop cost profile: every indicator a given set of inputs permits.

A :class:`CostProfile` bundles the hardware-independent counts with the
optional hardware-, energy- and pricing-dependent estimates. Count-style
fields (params, flops, macs, activation, memory traffic) are reported per
example so they can be compared across batch settings; memory, latency
and throughput are reported at the requested batch size.
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import ModelRecord
from .archspec import ArchSpec
from .footprint import (
    EnergyProfile,
    PricingProfile,
    carbon_footprint,
    monetary_cost,
)
from .indicators import (
    OptimizerKind,
    activation_size,
    count_flops,
    count_params,
    inference_memory,
    memory_access_cost,
    training_memory,
)
from .latency import HardwareModel, estimate_throughput


@dataclass(frozen=True)
class CostProfile:
    name: str
    batch: int
    element_bytes: int
    optimizer: str
    params: int
    params_million: float
    flops: int
    macs: int
    gflops: float
    activation_elements: int
    mac_bytes: int
    parameter_bytes: int
    activation_bytes: int
    peak_training_bytes: int
    peak_inference_bytes: int
    latency_sec: float | None = None
    throughput_examples_per_sec: float | None = None
    hardware: str | None = None
    carbon_kg_co2e: float | None = None
    monetary_cost: float | None = None

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "batch": self.batch,
            "element_bytes": self.element_bytes,
            "optimizer": self.optimizer,
            "params": self.params,
            "params_million": self.params_million,
            "flops": self.flops,
            "macs": self.macs,
            "gflops": self.gflops,
            "activation_elements": self.activation_elements,
            "mac_bytes": self.mac_bytes,
            "parameter_bytes": self.parameter_bytes,
            "activation_bytes": self.activation_bytes,
            "peak_training_bytes": self.peak_training_bytes,
            "peak_inference_bytes": self.peak_inference_bytes,
        }
        if self.hardware is not None:
            d["hardware"] = self.hardware
            d["latency_sec"] = self.latency_sec
            d["throughput_examples_per_sec"] = self.throughput_examples_per_sec
        if self.carbon_kg_co2e is not None:
            d["carbon_kg_co2e"] = self.carbon_kg_co2e
        if self.monetary_cost is not None:
            d["monetary_cost"] = self.monetary_cost
        return d


def compute_profile(spec: ArchSpec, batch: int = 1,
                    hardware: HardwareModel | None = None,
                    optimizer: OptimizerKind = OptimizerKind.ADAM,
                    energy: EnergyProfile | None = None,
                    pricing: PricingProfile | None = None) -> CostProfile:
    """Evaluate every indicator the inputs permit.

    Latency and throughput require ``hardware``; carbon and monetary cost
    require their respective profiles. Everything else is always computed.
    """
    params = count_params(spec)
    flops = count_flops(spec, 1)
    train = training_memory(spec, batch, optimizer)
    infer = inference_memory(spec, batch)

    latency_sec = None
    throughput = None
    if hardware is not None:
        speed = estimate_throughput(spec, hardware, batch)
        latency_sec = speed.latency_sec
        throughput = speed.throughput_examples_per_sec

    return CostProfile(
        name=spec.name,
        batch=batch,
        element_bytes=spec.element_bytes,
        optimizer=optimizer.value,
        params=params.total,
        params_million=params.millions,
        flops=flops.flops,
        macs=flops.macs,
        gflops=flops.gflops,
        activation_elements=activation_size(spec, 1),
        mac_bytes=memory_access_cost(spec, 1),
        parameter_bytes=train.parameter_bytes,
        activation_bytes=train.activation_bytes,
        peak_training_bytes=train.peak_training_bytes,
        peak_inference_bytes=infer.peak_inference_bytes,
        latency_sec=latency_sec,
        throughput_examples_per_sec=throughput,
        hardware=hardware.name if hardware is not None else None,
        carbon_kg_co2e=carbon_footprint(energy) if energy is not None else None,
        monetary_cost=monetary_cost(pricing) if pricing is not None else None,
    )


def record_from_profile(profile_dict: dict) -> ModelRecord:
    """Re-ingest an emitted profile as an analysis record.

    The indicator values are taken verbatim from the profile fields, so a
    JSON profile round-trips exactly. Quality is not part of a cost
    profile; the record carries ``quality=None``.
    """
    mapping = {
        "params": "params",
        "flops": "flops",
        "activation": "activation_elements",
        "mac": "mac_bytes",
        "memory": "peak_training_bytes",
        "latency": "latency_sec",
        "throughput": "throughput_examples_per_sec",
        "carbon": "carbon_kg_co2e",
        "cost": "monetary_cost",
    }
    indicators = {}
    for indicator, field_name in mapping.items():
        value = profile_dict.get(field_name)
        if value is not None:
            indicators[indicator] = float(value)
    return ModelRecord(
        name=str(profile_dict["name"]),
        indicators=indicators,
        quality=None,
        family=None,
    )
