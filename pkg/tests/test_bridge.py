import json
import struct
from pathlib import Path

import numpy as np
import pytest

from fpcil.bridge import (
    MAGIC,
    PROMPT_TEMPLATE_PHOTO,
    VERSION,
    EmptyDefinitionWarning,
    GenerationPromptSpec,
    build_generation_prompt,
    build_prompt_specs,
    catalog_from_lexicon,
    default_catalog,
    default_lexicon,
    emit_manifest,
    ingest_embedding_file,
    parse_lexicon,
    parse_manifest,
    split_generation_prompt,
    write_embedding_file,
)
from fpcil.errors import (
    BadMagicError,
    BadVersionError,
    ConfigurationError,
    DataFormatError,
    MetadataCountError,
    PayloadLengthError,
    PromptError,
)
from fpcil.rng import stream
from fpcil.samples import REAL, SYNTHETIC, TRAIN, EmbeddingSample


def sample_batch(n=12, dim=5, seed=0):
    gen = stream(seed, "bridge")
    return [
        EmbeddingSample(
            feature=gen.normal(size=dim),
            class_id=int(gen.integers(0, 4)),
            origin=SYNTHETIC if i % 2 else REAL,
            split=TRAIN,
        )
        for i in range(n)
    ]


class TestGenerationPrompt:
    def test_name_plus_definition(self):
        got = build_generation_prompt("crane", "large long-necked wading bird")
        assert got == "crane, large long-necked wading bird"

    def test_photo_template(self):
        got = build_generation_prompt("crane", "lifting machine", PROMPT_TEMPLATE_PHOTO)
        assert got == "a photo of a crane, lifting machine"

    def test_empty_definition_warns(self):
        with pytest.warns(EmptyDefinitionWarning, match="homonym"):
            got = build_generation_prompt("crane", "")
        assert got == "crane, "

    def test_empty_name_rejected(self):
        with pytest.raises(PromptError):
            build_generation_prompt("", "anything")

    def test_split_inverts_build(self):
        prompt = build_generation_prompt("snow fox", "white arctic canid")
        assert split_generation_prompt(prompt) == ("snow fox", "white arctic canid")
        assert split_generation_prompt("bare") == ("bare", "")

    def test_spec_validation(self):
        with pytest.raises(PromptError):
            GenerationPromptSpec(1, "a,b", "d", "p", 1, 2.0, 0)
        with pytest.raises(ConfigurationError):
            GenerationPromptSpec(1, "ok", "d", "p", 0, 2.0, 0)


class TestManifest:
    def make_specs(self, ids=(10, 11, 12)):
        return build_prompt_specs(default_catalog(), ids, n_samples=500, base_seed=7)

    def test_seed_offsets_by_class_id(self):
        specs = self.make_specs()
        assert [s.generation_seed for s in specs] == [17, 18, 19]

    def test_round_trip_identical(self, tmp_path):
        path = tmp_path / "gen.jsonl"
        specs = self.make_specs()
        emit_manifest(specs, path)
        assert parse_manifest(path) == specs

    def test_fixed_field_order(self, tmp_path):
        path = tmp_path / "gen.jsonl"
        emit_manifest(self.make_specs(), path)
        first = path.read_text().splitlines()[0]
        keys = list(json.loads(first))
        assert keys == ["class_id", "name", "prompt", "n_samples", "guidance_scale", "generation_seed"]

    def test_byte_deterministic(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        emit_manifest(self.make_specs(), a)
        emit_manifest(self.make_specs(), b)
        assert a.read_bytes() == b.read_bytes()

    def test_parse_errors_carry_line_numbers(self, tmp_path):
        path = tmp_path / "gen.jsonl"
        emit_manifest(self.make_specs(), path)
        lines = path.read_text().splitlines()
        lines[1] = "{broken"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(DataFormatError, match=":2:"):
            parse_manifest(path)

        record = json.loads(lines[0])
        del record["guidance_scale"]
        path.write_text(json.dumps(record) + "\n")
        with pytest.raises(DataFormatError, match="guidance_scale"):
            parse_manifest(path)

    def test_empty_manifest_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError):
            emit_manifest([], tmp_path / "gen.jsonl")
        path = tmp_path / "blank.jsonl"
        path.write_text("\n")
        with pytest.raises(DataFormatError, match="no records"):
            parse_manifest(path)
        with pytest.raises(DataFormatError, match="cannot read"):
            parse_manifest(tmp_path / "missing.jsonl")

    def test_blank_lines_tolerated(self, tmp_path):
        path = tmp_path / "gen.jsonl"
        specs = self.make_specs()
        emit_manifest(specs, path)
        path.write_text(path.read_text() + "\n\n")
        assert parse_manifest(path) == specs


class TestEmbeddingContainer:
    def test_round_trip_bit_exact(self, tmp_path):
        samples = sample_batch()
        data, meta = tmp_path / "e.fpeb", tmp_path / "e.jsonl"
        write_embedding_file(samples, data, meta)
        loaded = ingest_embedding_file(data, meta)
        assert len(loaded) == len(samples)
        for got, want in zip(loaded, samples):
            # float32 storage: exact against the float32 cast of the original
            assert np.array_equal(got.feature, want.feature.astype("<f4").astype(np.float64))
            assert got.class_id == want.class_id
            assert got.origin == want.origin
            assert got.split == want.split

    def test_written_files_stable_across_writes(self, tmp_path):
        samples = sample_batch()
        write_embedding_file(samples, tmp_path / "a.fpeb", tmp_path / "a.jsonl")
        write_embedding_file(samples, tmp_path / "b.fpeb", tmp_path / "b.jsonl")
        assert (tmp_path / "a.fpeb").read_bytes() == (tmp_path / "b.fpeb").read_bytes()
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()

    def test_header_layout(self, tmp_path):
        samples = sample_batch(n=3, dim=7)
        data = tmp_path / "e.fpeb"
        write_embedding_file(samples, data, tmp_path / "e.jsonl")
        blob = data.read_bytes()
        magic, version, dim, count = struct.unpack_from("<4sHIQ", blob)
        assert (magic, version, dim, count) == (MAGIC, VERSION, 7, 3)
        assert len(blob) == struct.calcsize("<4sHIQ") + 3 * 7 * 4

    def test_bad_magic(self, tmp_path):
        data, meta = tmp_path / "e.fpeb", tmp_path / "e.jsonl"
        write_embedding_file(sample_batch(), data, meta)
        blob = bytearray(data.read_bytes())
        blob[:4] = b"NOPE"
        data.write_bytes(bytes(blob))
        with pytest.raises(BadMagicError, match="NOPE"):
            ingest_embedding_file(data, meta)

    def test_bad_version(self, tmp_path):
        data, meta = tmp_path / "e.fpeb", tmp_path / "e.jsonl"
        write_embedding_file(sample_batch(), data, meta)
        blob = bytearray(data.read_bytes())
        blob[4:6] = struct.pack("<H", 9)
        data.write_bytes(bytes(blob))
        with pytest.raises(BadVersionError, match="version 9"):
            ingest_embedding_file(data, meta)

    def test_truncated_payload(self, tmp_path):
        data, meta = tmp_path / "e.fpeb", tmp_path / "e.jsonl"
        write_embedding_file(sample_batch(), data, meta)
        blob = data.read_bytes()
        data.write_bytes(blob[:-4])
        with pytest.raises(PayloadLengthError, match="implies"):
            ingest_embedding_file(data, meta)
        data.write_bytes(blob[:10])
        with pytest.raises(PayloadLengthError, match="header"):
            ingest_embedding_file(data, meta)

    def test_metadata_count_mismatch(self, tmp_path):
        data, meta = tmp_path / "e.fpeb", tmp_path / "e.jsonl"
        write_embedding_file(sample_batch(), data, meta)
        lines = meta.read_text().splitlines()
        meta.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(MetadataCountError, match="11 metadata rows for 12"):
            ingest_embedding_file(data, meta)

    def test_metadata_field_and_json_errors(self, tmp_path):
        data, meta = tmp_path / "e.fpeb", tmp_path / "e.jsonl"
        write_embedding_file(sample_batch(), data, meta)
        lines = meta.read_text().splitlines()
        record = json.loads(lines[0])
        del record["origin"]
        lines[0] = json.dumps(record)
        meta.write_text("\n".join(lines) + "\n")
        with pytest.raises(DataFormatError, match="origin"):
            ingest_embedding_file(data, meta)
        lines[0] = "not json"
        meta.write_text("\n".join(lines) + "\n")
        with pytest.raises(DataFormatError, match=":1:"):
            ingest_embedding_file(data, meta)

    def test_features_widened_to_float64(self, tmp_path):
        data, meta = tmp_path / "e.fpeb", tmp_path / "e.jsonl"
        write_embedding_file(sample_batch(), data, meta)
        loaded = ingest_embedding_file(data, meta)
        assert loaded[0].feature.dtype == np.float64

    def test_write_validation(self, tmp_path):
        with pytest.raises(ConfigurationError, match="empty"):
            write_embedding_file([], tmp_path / "e.fpeb", tmp_path / "e.jsonl")
        mixed = [
            EmbeddingSample(np.zeros(3), 0, origin=REAL),
            EmbeddingSample(np.zeros(4), 0, origin=REAL),
        ]
        with pytest.raises(ConfigurationError, match="dims"):
            write_embedding_file(mixed, tmp_path / "e.fpeb", tmp_path / "e.jsonl")


class TestLexicon:
    def test_parse_simple(self):
        got = parse_lexicon("# comment\nfox\tsmall wild canid\nowl\tnight bird\n")
        assert got == {"fox": "small wild canid", "owl": "night bird"}

    def test_duplicate_and_missing_tab(self):
        with pytest.raises(DataFormatError, match=":3"):
            parse_lexicon("fox\ta\nowl\tb\nfox\tc\n")
        with pytest.raises(DataFormatError, match=":2"):
            parse_lexicon("fox\ta\nno-tab-here\n")

    def test_default_lexicon_is_full_catalog(self):
        lex = default_lexicon()
        assert len(lex) == 100
        assert lex["crane"] == "large long-necked wading bird"
        assert all(n == n.lower() for n in lex)
        assert all("," not in n and "," not in d for n, d in lex.items())

    def test_catalog_from_lexicon(self):
        catalog = catalog_from_lexicon({"fox": "canid", "owl": "bird"})
        assert catalog.class_ids == (0, 1)
        assert catalog.entries[0].name == "fox"
        assert catalog.entries[0].definition == "canid"

    def test_default_catalog_round_trips_ids(self):
        catalog = default_catalog()
        assert len(catalog.entries) == 100
        assert catalog.class_ids == tuple(range(100))


class TestExternalBridgeFixture:
    """Container pair produced by the companion image bridge (bridge/ at the
    repo root) on its 3-image toy folder, committed as a static fixture so
    this suite stays node-free."""

    DATA = Path(__file__).parent / "data" / "bridge_toy.fpeb"
    META = Path(__file__).parent / "data" / "bridge_toy.meta.jsonl"

    def test_validates_and_loads(self):
        samples = ingest_embedding_file(self.DATA, self.META)
        assert len(samples) == 3
        assert samples[0].feature.shape == (64,)
        # badger (1 image) sorts before bucket (2 images) in the toy folder
        assert [s.class_id for s in samples] == [1, 10, 10]
        assert all(s.origin == REAL and s.split == TRAIN for s in samples)
        assert all(np.all(np.isfinite(s.feature)) for s in samples)

    def test_header_matches_contract(self):
        blob = self.DATA.read_bytes()
        magic, version, dim, count = struct.unpack_from("<4sHIQ", blob)
        assert (magic, version, dim, count) == (b"FPEB", 1, 64, 3)
