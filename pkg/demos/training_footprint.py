"""Training-side costs: optimizer state, memory, carbon, and money.

The same architecture can be cheap to serve and expensive to train. Two
levers shown here: the optimizer's per-parameter state (a plain SGD step
stores nothing; adaptive and perturbation-based optimizers store one or
two extra parameter copies) and the activations kept for the backward
pass, which dwarf the weights at realistic batch sizes.

Run: python demos/training_footprint.py
"""

from costlens import (
    EnergyProfile,
    OptimizerKind,
    PricingProfile,
    VitConfig,
    build_vit,
    carbon_footprint,
    monetary_cost,
    train_energy_kwh,
    training_memory,
)

spec = build_vit(VitConfig(patch=16, depth=12, model_dim=768, num_heads=12,
                           ffn_dim=3072))

print("-- peak training memory at batch 64 ---------------------------")
print(f"{'optimizer':>10} {'state (GiB)':>12} {'peak (GiB)':>11}")
for kind in OptimizerKind:
    m = training_memory(spec, batch=64, optimizer=kind)
    print(f"{kind.value:>10} {m.optimizer_state_bytes / 2**30:>12.2f} "
          f"{m.peak_training_bytes / 2**30:>11.2f}")
m = training_memory(spec, batch=64)
print(f"activations alone: {m.activation_bytes / 2**30:.2f} GiB "
      f"vs weights {m.parameter_bytes / 2**30:.2f} GiB")
print()

print("-- carbon and money for one training run ----------------------")
# a week on 64 accelerators drawing ~250 W each, mid-range grid intensity
energy = train_energy_kwh(device_watts=250, wall_clock_hours=168, num_devices=64)
profile = EnergyProfile(ee_train_kwh=energy, ee_inference_kwh=0.0005,
                        queries=10_000_000, co2e_per_kwh=0.4)
bill = PricingProfile(total_train_hours=168, num_chips=64,
                      price_per_chip_hour=2.0)
print(f"training energy       : {energy:,.0f} kWh")
print(f"carbon (train + 10M q): {carbon_footprint(profile):,.0f} kg CO2e")
print(f"cloud bill            : ${monetary_cost(bill):,.0f}")
print()
print("Both estimators are straight products of user-supplied inputs;")
print("they make assumptions visible rather than measuring anything.")
