"""The file formats that connect the harness to external tooling.

An image-generation pipeline consumes a JSON-lines manifest (one prompt per
class) and hands embeddings back in a small binary container.  This demo
round-trips both through a temporary directory.
"""

import tempfile
from pathlib import Path

import numpy as np

from fpcil.bridge import (
    build_prompt_specs,
    default_catalog,
    emit_manifest,
    ingest_embedding_file,
    parse_manifest,
    write_embedding_file,
)
from fpcil.rng import stream
from fpcil.samples import SYNTHETIC, EmbeddingSample

catalog = default_catalog()
specs = build_prompt_specs(catalog, class_ids=range(10, 15), n_samples=500, base_seed=0)

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    manifest = tmp / "generation.jsonl"
    emit_manifest(specs, manifest)
    print(f"manifest ({manifest.stat().st_size} bytes):")
    for line in manifest.read_text().splitlines()[:3]:
        print(f"  {line[:100]}")
    assert parse_manifest(manifest) == specs
    print("  parse(emit(specs)) == specs\n")

    gen = stream(0, "demo-embeddings")
    samples = [
        EmbeddingSample(gen.normal(size=48), spec.class_id, origin=SYNTHETIC)
        for spec in specs
        for _ in range(4)
    ]
    data, meta = tmp / "embeddings.fpeb", tmp / "embeddings.jsonl"
    write_embedding_file(samples, data, meta)
    print(f"container: {data.stat().st_size} bytes for {len(samples)} x 48 float32 + header")

    loaded = ingest_embedding_file(data, meta)
    assert len(loaded) == len(samples)
    assert all(
        np.array_equal(a.feature.astype("<f4"), b.feature.astype("<f4"))
        for a, b in zip(loaded, samples)
    )
    print(f"ingest validated {len(loaded)} samples, classes "
          f"{sorted({s.class_id for s in loaded})}, all float32-exact")
