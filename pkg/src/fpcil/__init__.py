"""Deterministic embedding-space harness for exemplar-free
class-incremental learning with future-class pretraining.

The package simulates the protocol end to end: a Gaussian feature world, a
trainable-then-frozen MLP extractor, three incremental classifier heads,
future-class prediction from text completions, and file bridges to external
generation/embedding pipelines.  Everything is seeded and reproducible.
"""

from .bridge import (
    GenerationPromptSpec,
    build_generation_prompt,
    catalog_from_lexicon,
    default_catalog,
    default_lexicon,
    emit_manifest,
    ingest_embedding_file,
    load_lexicon,
    parse_manifest,
    write_embedding_file,
)
from .errors import (
    ConfigurationError,
    DataFormatError,
    HarnessError,
    NumericalError,
    ProtocolViolationError,
)
from .extractor import (
    LinearHeadWeights,
    MlpExtractor,
    TrainConfig,
    embed,
    embed_batch,
    finalize_initial_step,
    init_extractor,
    loss_and_grads,
    train_initial,
    train_linear_head,
)
from .future import (
    CompletionRequest,
    FixtureReplayer,
    PredictionTally,
    RemoteClient,
    RestrictionLevel,
    aggregate_and_restrict,
    build_future_prompt,
    parse_transcript,
    predict_future,
)
from .heads import (
    ClassPrototype,
    FeCamClassStats,
    HeadConfig,
    HeadState,
    fecam_fit_class,
    fecam_predict,
    fetril_pseudo_features,
    fetril_step,
    ncm_predict,
    predict_fn,
    update_head,
)
from .protocol import (
    ClassCatalog,
    ClassEntry,
    IncrementalSchedule,
    RunReport,
    StepAccuracy,
    average_incremental_accuracy,
    build_schedule,
    evaluate_seen,
)
from .runner import (
    ExperimentMatrix,
    MatrixScenario,
    RunArtifacts,
    ScenarioConfig,
    StepDataGate,
    aux_sweep_matrix,
    head_comparison_matrix,
    reference_scenario,
    run_fpcil_scenario,
    run_matrix,
    run_with_artifacts,
    sample_count_matrix,
    write_report,
)
from .samples import EmbeddingSample
from .world import (
    AuxiliarySpec,
    GapParams,
    GaussianClassModel,
    WorldConfig,
    build_world,
    compose_auxiliary,
    sample_class,
)

__version__ = "0.1.0"
