"""How future-class prediction quality shapes the outcome.

Runs the standard auxiliary sweep (no auxiliary data, then partial(k) for
increasing k) on a scaled-down world so the whole comparison takes a few
seconds.  partial(100) selects every future class, i.e. the oracle.
"""

from dataclasses import replace

from fpcil.runner import aux_sweep_matrix, reference_scenario, run_matrix

config = reference_scenario(eval_seeds=(0, 1, 2))
# shrink the reference world so the demo runs in seconds
config = replace(
    config,
    world=replace(config.world, num_classes=40),
    auxiliary=replace(config.auxiliary, n_per_class=120),
    sampling=replace(config.sampling, distractor_classes=40),
)

result = run_matrix(aux_sweep_matrix(config))
print(result.render())

mean = {r.label: 100 * r.aia_mean for r in result.rows}
print(f"\noracle lift over no auxiliary data: {mean['partial-100'] - mean['none']:+.2f} p.p.")
print("knowing even a third of the future classes already pays:",
      f"{mean['partial-33'] - mean['none']:+.2f} p.p.")
