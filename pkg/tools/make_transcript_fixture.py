"""Regenerate the completion-transcript fixture set.

Builds 10 synthetic completion transcripts over the built-in catalog with a
planned per-name tally, then renders them with realistic formatting noise
(numbered items, bullets, stray periods, narrative filler lines).  The
golden tally is written from the plan, not from the parser, so tests that
compare parser output against it are checking the parser against an
independent construction.

Planned structure (thresholds full>=1, R1>=4, R2>=7 of 10 transcripts):
  full  150 names, 53 of the 90 future classes  (overlap 58.9%)
  R1     90 names, 43 future
  R2     53 names, 30 future
plus two initial-step class names that appear in transcripts but must never
survive selection.

Run from the repository root:  python3 tools/make_transcript_fixture.py
"""

from __future__ import annotations

import json
from pathlib import Path

from fpcil import rng
from fpcil.bridge import default_catalog
from fpcil.future import parse_transcript, tally_transcripts
from fpcil.protocol import build_schedule

SEED = 20240901
REPEATS = 10
OUT = Path(__file__).resolve().parent.parent / "src" / "fpcil" / "assets" / "fixtures" / "gpt_b0inc10"

# (band, future-class names, junk names): counts 7..10 / 4..6 / 1..3
BANDS = [
    ((7, 10), 30, 23),
    ((4, 6), 13, 24),
    ((1, 3), 10, 50),
]

JUNK_POOL = """
anchor anvil asteroid avocado bagpipe balloon bamboo basket beacon bellows
binoculars biscuit bonfire boomerang broom cannon carousel cathedral cauldron
chandelier chimney cinnamon comet cradle crayon crowbar cupcake cymbal dagger
dinghy dumpling easel envelope espresso fountain funnel gazebo glove gondola
gramophone grapefruit grindstone hairpin hammer harmonica harpoon hatchet
haystack hinge hovercraft hydrant iceberg jackal jigsaw juniper kazoo kiln
kite lasso lathe lectern limousine locket magnet mandolin marble mattress
medal meteor minaret monocle mosaic muffin mule nutcracker obelisk ocelot
oyster paddle pagoda parasol peanut pendulum periscope pickaxe pier pigeon
pitchfork pretzel prism pulley quill raft rake rattle reef ribbon rocket
saddle sandal satchel scarecrow shovel sickle silo skillet sled snorkel
spatula sphinx spindle sprocket stapler stethoscope stool sundial tambourine
tapestry teapot tent thimble torch trampoline trellis tripod trombone trowel
tugboat tunnel turbine tweezers unicycle vault waffle wagon wardrobe
weathervane wheelbarrow whisk wrench yacht zeppelin zither
""".split()

NARRATIVE_LINES = [
    "The full dataset can be downloaded at https://example.com/dataset.html",
    "Here is the complete list of classes included in this benchmark release",
    "These categories were collected from publicly available photo archives worldwide",
]


def plan_counts():
    catalog = default_catalog()
    schedule = build_schedule(catalog, base_size=0, inc_size=10, order_seed=0)
    initial = [catalog.name_of(c) for c in sorted(schedule.step_classes(1))]
    future = [catalog.name_of(c) for c in sorted(schedule.future_classes(1))]

    overlap = sorted(set(JUNK_POOL) & set(catalog.names()))
    if overlap:
        raise SystemExit(f"junk pool collides with the catalog: {overlap}")
    if len(set(JUNK_POOL)) != len(JUNK_POOL):
        raise SystemExit("junk pool has duplicates")

    gen = rng.stream(SEED, "fixture-plan")
    future_left = rng.fisher_yates(future, gen)
    junk_left = rng.fisher_yates(JUNK_POOL, gen)

    counts: dict[str, int] = {}
    for (lo, hi), n_future, n_junk in BANDS:
        for _ in range(n_future):
            counts[future_left.pop()] = int(gen.integers(lo, hi + 1))
        for _ in range(n_junk):
            counts[junk_left.pop()] = int(gen.integers(lo, hi + 1))
    # two initial-step names show up mid-band; selections must drop them
    for name in rng.fisher_yates(initial, gen)[:2]:
        counts[name] = int(gen.integers(4, 7))
    return catalog, initial, future, counts


def assign_transcripts(counts, gen):
    membership: list[list[str]] = [[] for _ in range(REPEATS)]
    for name in sorted(counts):
        picks = rng.fisher_yates(range(REPEATS), gen)[: counts[name]]
        for t in picks:
            membership[t].append(name)
    return membership


def render(names, index, gen) -> str:
    order = rng.fisher_yates(names, gen)
    lines: list[str] = []
    if index % 3 == 0:
        lines.append(NARRATIVE_LINES[(index // 3) % len(NARRATIVE_LINES)])
    current: list[str] = []
    for j, name in enumerate(order):
        token = name
        roll = gen.random()
        if roll < 0.15:
            token = f"{j + 1}. {name}"
        elif roll < 0.25:
            token = f"{name}."
        if gen.random() < 0.08:
            if current:
                lines.append(", ".join(current) + ",")
                current = []
            lines.append(f"- {name}")
            continue
        current.append(token)
        if len(current) >= 12:
            lines.append(", ".join(current) + ",")
            current = []
    if current:
        tail = ", ".join(current)
        lines.append(tail + ("," if index % 2 == 0 else "."))
    return "\n".join(lines) + "\n"


def main():
    catalog, initial, future, counts = plan_counts()
    gen = rng.stream(SEED, "fixture-render")
    membership = assign_transcripts(counts, gen)
    transcripts = [render(names, i, gen) for i, names in enumerate(membership)]

    parsed = [parse_transcript(t) for t in transcripts]
    for i, (want, got) in enumerate(zip(membership, parsed)):
        if set(want) != set(got):
            raise SystemExit(
                f"transcript {i}: parse mismatch\n  missing {sorted(set(want) - set(got))}"
                f"\n  extra {sorted(set(got) - set(want))}"
            )
    if tally_transcripts(parsed).counts != counts:
        raise SystemExit("tally mismatch against the plan")

    future_set = set(future)
    expected = {}
    for level, threshold in (("full", 1), ("R1", 4), ("R2", 7)):
        selected = {n for n, c in counts.items() if c >= threshold} - set(initial)
        expected[level] = {"size": len(selected), "future_hits": len(selected & future_set)}
    print("planned:", expected)
    want = {
        "full": {"size": 150, "future_hits": 53},
        "R1": {"size": 90, "future_hits": 43},
        "R2": {"size": 53, "future_hits": 30},
    }
    if expected != want:
        raise SystemExit(f"plan does not meet the target structure: {expected}")

    OUT.mkdir(parents=True, exist_ok=True)
    for i, text in enumerate(transcripts, start=1):
        (OUT / f"transcript_{i:02d}.txt").write_text(text)
    (OUT / "golden_tally.json").write_text(
        json.dumps({"repeats": REPEATS, "counts": dict(sorted(counts.items()))}, indent=2) + "\n"
    )
    (OUT / "experiment.json").write_text(
        json.dumps(
            {
                "schedule": "B0 Inc10, order_seed 0, built-in catalog",
                "repeats": REPEATS,
                "thresholds": {"full": 1, "R1": 4, "R2": 7},
                "initial_names": initial,
                "future_names": future,
                "expected": expected,
            },
            indent=2,
        )
        + "\n"
    )
    print(f"wrote {len(transcripts)} transcripts -> {OUT}")


if __name__ == "__main__":
    main()
