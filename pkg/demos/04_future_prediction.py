"""Predicting future class names from completion transcripts.

Replays the ten transcripts shipped as test fixtures: builds the prompt
from the initial-step class names, parses each completion, tallies names
across transcripts, and applies the three restriction levels.  Ends with
the hit rate against the classes that actually arrive later.
"""

import json
from importlib.resources import files
from pathlib import Path

from fpcil.future import (
    LEVEL_FULL,
    LEVEL_R1,
    LEVEL_R2,
    FixtureReplayer,
    overlap,
    predict_future,
)

fixture_dir = Path(str(files("fpcil.assets"))) / "fixtures" / "gpt_b0inc10"
experiment = json.loads((fixture_dir / "experiment.json").read_text())
initial = experiment["initial_names"]
future = experiment["future_names"]

prediction = predict_future(FixtureReplayer(fixture_dir), initial)

print("prompt sent to the completion service:")
print(f"  {prediction.prompt[:90]}...")

print(f"\n{len(prediction.tally.counts)} distinct names across 10 transcripts; most repeated:")
top = sorted(prediction.tally.counts.items(), key=lambda kv: (-kv[1], kv[0]))[:8]
for name, count in top:
    print(f"  {count:>2}/10  {name}")

print("\nselection size and hit rate per restriction level:")
for level in (LEVEL_FULL, LEVEL_R1, LEVEL_R2):
    names = prediction.selected(level)
    hits, frac = overlap(names, future)
    print(
        f"  {level:<4} keeps {len(names):>3} names, "
        f"{hits}/{len(future)} future classes hit ({100 * float(frac):.1f}%)"
    )
print("\ntighter levels trade recall for precision; the harness consumes any of them")
