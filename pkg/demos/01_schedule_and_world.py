"""Schedules and the synthetic embedding world.

Builds a 100-class incremental schedule, then samples one class both as
"real" data and as "synthetic" data with a distribution gap, and shows how
the gap shifts and widens the synthetic cloud.
"""

import numpy as np

from fpcil.protocol import ClassCatalog, build_schedule
from fpcil.samples import REAL, SYNTHETIC
from fpcil.world import GapParams, WorldConfig, build_world, sample_class

catalog = ClassCatalog.generic(100)
schedule = build_schedule(catalog, base_size=0, inc_size=10, order_seed=0)

print(f"{schedule.num_steps} steps over {len(catalog)} classes")
for t in (1, 2, schedule.num_steps):
    ids = sorted(schedule.step_classes(t))
    print(f"  step {t}: {ids[:5]} ... ({len(ids)} classes)")
print(f"  after step 1 the future holds {len(schedule.future_classes(1))} classes")

config = WorldConfig(num_classes=100, dim=64, separation=6.0, intra_sd=1.0, seed=0)
models = build_world(config)
model = models[sorted(schedule.step_classes(1))[0]]

gap = GapParams(delta=2.0, diversity_scale=1.5)
real = np.stack([s.feature for s in sample_class(model, 2000, REAL, gap, seed=0)])
synth = np.stack([s.feature for s in sample_class(model, 2000, SYNTHETIC, gap, seed=0)])

shift = np.linalg.norm(real.mean(axis=0) - synth.mean(axis=0))
print(f"\nclass {model.class_id}:")
print(f"  real cloud sd      {real.std(axis=0).mean():.3f}")
print(f"  synthetic cloud sd {synth.std(axis=0).mean():.3f}  (diversity x{gap.diversity_scale})")
print(f"  mean shift         {shift:.3f}  (delta {gap.delta})")
