"""Pattern-based compression for machine-generated records."""

from .model import (
    WILDCARD,
    RAW_ESCAPE_ID,
    EncoderKind,
    FieldEncoder,
    Literal,
    Field,
    Pattern,
    PatternDictionary,
    Cluster,
    CostModel,
    CompressedRecord,
    VARCHAR,
    VARINT,
    char_encoder,
    int_encoder,
    validate_pattern,
    pattern_from_string,
)
from .cluster import (
    MergeCriterion,
    extract_patterns,
    min_el_increment_fast,
    one_gram_distance,
    entropy_of_clustering,
)
from .codec import Codec, CodecStats, HuffmanTable
from .dictio import read_dict, write_dict
from .store import ContainerReader, build_container
from . import errors

__version__ = "0.1.0"

__all__ = [
    "WILDCARD",
    "RAW_ESCAPE_ID",
    "EncoderKind",
    "FieldEncoder",
    "Literal",
    "Field",
    "Pattern",
    "PatternDictionary",
    "Cluster",
    "CostModel",
    "CompressedRecord",
    "VARCHAR",
    "VARINT",
    "char_encoder",
    "int_encoder",
    "validate_pattern",
    "pattern_from_string",
    "MergeCriterion",
    "extract_patterns",
    "min_el_increment_fast",
    "one_gram_distance",
    "entropy_of_clustering",
    "Codec",
    "CodecStats",
    "HuffmanTable",
    "read_dict",
    "write_dict",
    "ContainerReader",
    "build_container",
    "errors",
    "__version__",
]
