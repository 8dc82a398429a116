"""pics: caption-driven image renaming, annotation join, and keyword search."""

from .captioner import (
    DEFAULT_PROMPT,
    BackendConfig,
    CaptionJob,
    CaptionResult,
    Readability,
    caption_image,
    classify_name_llm,
    postprocess_caption,
)
from .catalog import Catalog, ImageRecord, load_catalog, save_catalog, upsert
from .pipeline import (
    AnnotationTable,
    PipelineConfig,
    PipelineReport,
    classify_readability,
    join_annotations,
    parse_annotations,
    resolve_collision,
    run_pipeline,
    slugify,
)
from .searchcore import (
    InvertedIndex,
    Query,
    RankedResult,
    build_index,
    load_index,
    normalize_term,
    parse_query,
    save_index,
    search,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationTable",
    "BackendConfig",
    "Catalog",
    "CaptionJob",
    "CaptionResult",
    "DEFAULT_PROMPT",
    "ImageRecord",
    "InvertedIndex",
    "PipelineConfig",
    "PipelineReport",
    "Query",
    "RankedResult",
    "Readability",
    "build_index",
    "caption_image",
    "classify_name_llm",
    "classify_readability",
    "join_annotations",
    "load_catalog",
    "load_index",
    "normalize_term",
    "parse_annotations",
    "parse_query",
    "postprocess_caption",
    "resolve_collision",
    "run_pipeline",
    "save_catalog",
    "save_index",
    "search",
    "slugify",
    "tokenize",
    "upsert",
]
