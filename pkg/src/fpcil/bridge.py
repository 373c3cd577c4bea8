"""Bridge to external generation and embedding pipelines.

Three file formats live here:

- Generation manifest: JSON-lines, one record per class, telling an external
  image-synthesis tool what to generate (prompt, sample count, guidance
  scale, seed).
- Embedding container: a small binary format ("FPEB") holding a float32
  feature matrix, plus a JSON-lines metadata sidecar tagging each row with
  class id, origin and split.  Storage is 32-bit; the harness widens to
  64-bit on ingest.
- Lexicon: UTF-8 tab-separated (name, definition) pairs that supply the
  disambiguating definition appended to each class name in prompts.
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    BadVersionError,
    ConfigurationError,
    DataFormatError,
    MetadataCountError,
    PayloadLengthError,
    PromptError,
)
from .protocol import ClassCatalog, ClassEntry
from .samples import EmbeddingSample

MAGIC = b"FPEB"
VERSION = 1
_HEADER = struct.Struct("<4sHIQ")

PROMPT_TEMPLATE_PLAIN = "{name}, {definition}"
PROMPT_TEMPLATE_PHOTO = "a photo of a {name}, {definition}"

_MANIFEST_FIELDS = ("class_id", "name", "prompt", "n_samples", "guidance_scale", "generation_seed")


class EmptyDefinitionWarning(UserWarning):
    """A generation prompt was built without a disambiguating definition."""


@dataclass(frozen=True)
class GenerationPromptSpec:
    class_id: int
    name: str
    definition: str
    prompt: str
    n_samples: int
    guidance_scale: float
    generation_seed: int

    def __post_init__(self):
        if not self.name:
            raise PromptError("class name must be nonempty")
        if "," in self.name or "\n" in self.name:
            raise PromptError(f"class name may not contain a delimiter: {self.name!r}")
        if self.n_samples < 1:
            raise ConfigurationError(f"n_samples must be >= 1, got {self.n_samples}")


def build_generation_prompt(name: str, definition: str, template: str = PROMPT_TEMPLATE_PLAIN) -> str:
    """Per-class text-to-image prompt: the class name plus its definition.

    An empty definition is allowed but loses the homonym disambiguation the
    definition exists for, so it raises a warning.
    """
    if not name:
        raise PromptError("class name must be nonempty")
    if not definition:
        warnings.warn(
            f"class {name!r} has no definition; prompt is ambiguous for homonyms",
            EmptyDefinitionWarning,
            stacklevel=2,
        )
    return template.format(name=name, definition=definition)


def split_generation_prompt(prompt: str) -> tuple[str, str]:
    """Inverse of the default template: split at the first ', '."""
    head, sep, definition = prompt.partition(", ")
    if not sep:
        return prompt, ""
    return head, definition


def build_prompt_specs(
    catalog: ClassCatalog,
    class_ids,
    n_samples: int,
    guidance_scale: float = 2.0,
    base_seed: int = 0,
    template: str = PROMPT_TEMPLATE_PLAIN,
) -> list[GenerationPromptSpec]:
    """One generation record per requested class, seeds offset by class id."""
    specs = []
    for cid in sorted(class_ids):
        entry = catalog.entries[cid]
        specs.append(
            GenerationPromptSpec(
                class_id=entry.class_id,
                name=entry.name,
                definition=entry.definition,
                prompt=build_generation_prompt(entry.name, entry.definition, template),
                n_samples=n_samples,
                guidance_scale=guidance_scale,
                generation_seed=base_seed + entry.class_id,
            )
        )
    return specs


def emit_manifest(specs, path) -> None:
    """Write a JSON-lines generation manifest with a fixed field order."""
    specs = list(specs)
    if not specs:
        raise ConfigurationError("manifest needs at least one record")
    lines = []
    for s in specs:
        record = {
            "class_id": s.class_id,
            "name": s.name,
            "prompt": s.prompt,
            "n_samples": s.n_samples,
            "guidance_scale": s.guidance_scale,
            "generation_seed": s.generation_seed,
        }
        lines.append(json.dumps(record))
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as err:
        raise DataFormatError(f"cannot write manifest {path}: {err}") from err


def parse_manifest(path) -> list[GenerationPromptSpec]:
    """Read a manifest back; the definition is recovered from the prompt."""
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise DataFormatError(f"cannot read manifest {path}: {err}") from err
    specs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as err:
            raise DataFormatError(f"{path}:{lineno}: not valid JSON: {err}") from err
        missing = [f for f in _MANIFEST_FIELDS if f not in record]
        if missing:
            raise DataFormatError(f"{path}:{lineno}: missing fields {missing}")
        _, definition = split_generation_prompt(record["prompt"])
        specs.append(
            GenerationPromptSpec(
                class_id=int(record["class_id"]),
                name=record["name"],
                definition=definition,
                prompt=record["prompt"],
                n_samples=int(record["n_samples"]),
                guidance_scale=float(record["guidance_scale"]),
                generation_seed=int(record["generation_seed"]),
            )
        )
    if not specs:
        raise DataFormatError(f"manifest {path} holds no records")
    return specs


# ---------------------------------------------------------------------------
# Embedding container


def write_embedding_file(samples, data_path, metadata_path) -> None:
    """Write features as float32 little-endian plus a metadata sidecar."""
    samples = list(samples)
    if not samples:
        raise ConfigurationError("cannot write an empty embedding file")
    dims = {s.feature.shape[0] for s in samples}
    if len(dims) != 1:
        raise ConfigurationError(f"inconsistent feature dims: {sorted(dims)}")
    dim = dims.pop()
    X = np.stack([s.feature for s in samples]).astype("<f4")
    header = _HEADER.pack(MAGIC, VERSION, dim, len(samples))
    meta_lines = [
        json.dumps({"class_id": s.class_id, "origin": s.origin, "split": s.split})
        for s in samples
    ]
    try:
        Path(data_path).write_bytes(header + X.tobytes(order="C"))
        Path(metadata_path).write_text("\n".join(meta_lines) + "\n")
    except OSError as err:
        raise DataFormatError(f"cannot write embedding file: {err}") from err


def ingest_embedding_file(data_path, metadata_path) -> list[EmbeddingSample]:
    """Validate and load an embedding container. Fails atomically.

    Distinct failure modes raise distinct errors: wrong magic, unsupported
    version, payload length mismatch, metadata row-count mismatch.
    """
    try:
        blob = Path(data_path).read_bytes()
        meta_text = Path(metadata_path).read_text()
    except OSError as err:
        raise DataFormatError(f"cannot read embedding file: {err}") from err
    if len(blob) < _HEADER.size:
        raise PayloadLengthError(
            f"{data_path}: {len(blob)} bytes is shorter than the {_HEADER.size}-byte header"
        )
    magic, version, dim, count = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise BadMagicError(f"{data_path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise BadVersionError(f"{data_path}: unsupported version {version}, expected {VERSION}")
    expected = count * dim * 4
    payload = blob[_HEADER.size :]
    if len(payload) != expected:
        raise PayloadLengthError(
            f"{data_path}: payload is {len(payload)} bytes, header implies {expected}"
        )
    X = np.frombuffer(payload, dtype="<f4").reshape(count, dim).astype(np.float64)

    meta = []
    for lineno, line in enumerate(meta_text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as err:
            raise DataFormatError(f"{metadata_path}:{lineno}: not valid JSON: {err}") from err
        for key in ("class_id", "origin", "split"):
            if key not in record:
                raise DataFormatError(f"{metadata_path}:{lineno}: missing {key!r}")
        meta.append(record)
    if len(meta) != count:
        raise MetadataCountError(
            f"{metadata_path}: {len(meta)} metadata rows for {count} samples"
        )
    try:
        return [
            EmbeddingSample(X[i], int(m["class_id"]), origin=m["origin"], split=m["split"])
            for i, m in enumerate(meta)
        ]
    except ValueError as err:
        raise DataFormatError(f"{metadata_path}: {err}") from err


# ---------------------------------------------------------------------------
# Lexicon


def load_lexicon(path) -> dict[str, str]:
    """Read a (name TAB definition) file into an ordered name->definition map."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise DataFormatError(f"cannot read lexicon {path}: {err}") from err
    return parse_lexicon(text, source=str(path))


def parse_lexicon(text: str, source: str = "<lexicon>") -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        if "\t" not in line:
            raise DataFormatError(f"{source}:{lineno}: expected 'name<TAB>definition'")
        name, definition = line.split("\t", 1)
        name = name.strip()
        if not name:
            raise DataFormatError(f"{source}:{lineno}: empty class name")
        if name.lower() in {k.lower() for k in out}:
            raise DataFormatError(f"{source}:{lineno}: duplicate class name {name!r}")
        out[name] = definition.strip()
    if not out:
        raise DataFormatError(f"{source}: no lexicon entries")
    return out


def default_lexicon() -> dict[str, str]:
    text = resources.files("fpcil.assets").joinpath("lexicon.tsv").read_text(encoding="utf-8")
    return parse_lexicon(text, source="fpcil.assets/lexicon.tsv")


def catalog_from_lexicon(lexicon: dict[str, str]) -> ClassCatalog:
    """Catalog whose class ids follow the lexicon's file order."""
    entries = tuple(
        ClassEntry(class_id=i, name=name, definition=definition)
        for i, (name, definition) in enumerate(lexicon.items())
    )
    return ClassCatalog(entries)


def default_catalog() -> ClassCatalog:
    return catalog_from_lexicon(default_lexicon())
