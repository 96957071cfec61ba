"""Cross-lingual dependency parser transfer."""

from ._xlparse import (
    DataError,
    Error,
    Model,
    ParseError,
    Sentence,
    Token,
    Treebank,
    UsageError,
    deterministic_treebank,
    evaluate,
    mcnemar_chi2,
    mcnemar_exact,
    parse,
    parse_conllu,
    read_conllu,
    report_text,
    run_pipeline,
    strip_trees,
    train,
    write_conllu,
    write_world,
)

__all__ = [
    "DataError",
    "Error",
    "Model",
    "ParseError",
    "Sentence",
    "Token",
    "Treebank",
    "UsageError",
    "deterministic_treebank",
    "evaluate",
    "mcnemar_chi2",
    "mcnemar_exact",
    "parse",
    "parse_conllu",
    "read_conllu",
    "report_text",
    "run_pipeline",
    "strip_trees",
    "train",
    "write_conllu",
    "write_world",
]
