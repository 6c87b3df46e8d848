"""Python interface to the explanation-evaluation pipeline.

Everything is implemented in the native ``_core`` extension; this package
re-exports the public surface.
"""

from ._core import (
    __version__,
    aspects,
    bleu,
    build_prompt,
    generate_dataset,
    kendall_tau_b,
    load_run_config,
    meta_eval_file,
    parse_scores,
    pearson,
    rouge_l,
    rouge_n,
    run,
    sha256_hex,
    spearman,
    tokenize,
    verify_report_dir,
)

__all__ = [
    "__version__",
    "aspects",
    "bleu",
    "build_prompt",
    "generate_dataset",
    "kendall_tau_b",
    "load_run_config",
    "meta_eval_file",
    "parse_scores",
    "pearson",
    "rouge_l",
    "rouge_n",
    "run",
    "sha256_hex",
    "spearman",
    "tokenize",
    "verify_report_dir",
]
