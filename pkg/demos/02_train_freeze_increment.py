"""One full incremental run, inspected.

Trains the extractor jointly on the initial step's real data plus synthetic
samples of the (oracle-predicted) future classes, freezes it, drops the
future-class classifier rows, then walks the remaining steps updating only
the head.  Prints the pieces a debugger would want to see.
"""

from fpcil.extractor import TrainConfig
from fpcil.heads import NCM, HeadConfig
from fpcil.runner import (
    ExtractorSpec,
    SamplingSpec,
    ScenarioConfig,
    ScheduleSpec,
    run_with_artifacts,
)
from fpcil.world import AUX_ORACLE, AuxiliarySpec, GapParams, WorldConfig

config = ScenarioConfig(
    world=WorldConfig(num_classes=20, dim=16, separation=6.0, intra_sd=1.0, seed=0),
    schedule=ScheduleSpec(base_size=0, inc_size=5, order_seed=0),
    auxiliary=AuxiliarySpec(mode=AUX_ORACLE, n_per_class=40, gap=GapParams(2.0, 1.5)),
    extractor=ExtractorSpec(layer_dims=(16, 24, 12), train=TrainConfig(epochs=8, batch_size=64)),
    head=HeadConfig(kind=NCM),
    sampling=SamplingSpec(train_per_class=30, test_per_class=25, distractor_classes=20),
)

report, artifacts = run_with_artifacts(config, seed=0)

print("joint training loss per epoch:")
for e, loss in enumerate(artifacts.epoch_losses, start=1):
    print(f"  epoch {e}: {loss:.4f}")

initial = sorted(artifacts.schedule.step_classes(1))
print(f"\nauxiliary classes (oracle): {sorted(artifacts.auxiliary_classes)}")
print(f"classifier rows kept after the freeze: {list(artifacts.restricted_head.class_ids)}")
print(f"  (width {artifacts.restricted_head.matrix.shape[0]} = |initial| {len(initial)})")
print(f"extractor digest at freeze: {artifacts.digest_at_freeze[:16]}...")
print(f"digest constant across steps: {len(set(artifacts.digest_per_step)) == 1}")

print("\nper-step accuracy over all classes seen so far:")
for s in report.per_step:
    print(f"  step {s.step_index}: {100 * s.top1:6.2f}%  ({s.correct}/{s.total})")
print(f"\nAIA  {100 * report.average_incremental_accuracy:.2f}%")
print(f"Last {100 * report.last_accuracy:.2f}%")
