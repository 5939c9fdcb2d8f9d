"""Python surface of the medforge toolkit.

The heavy lifting lives in the compiled ``_medforge`` extension; this package
re-exports its operations under a stable name. The extension sits inside the
package in an installed wheel and on the path root in a development tree.
"""

try:
    from . import _medforge as _core
except ImportError:
    import _medforge as _core

__version__ = _core.__version__

bleu = _core.bleu
cider = _core.cider
compute_phash = _core.compute_phash
count_tokens = _core.count_tokens
extract_mcq_answer = _core.extract_mcq_answer
format_reward = _core.format_reward
hamming = _core.hamming
meteor_lite = _core.meteor_lite
minhash_jaccard = _core.minhash_jaccard
normalize_text = _core.normalize_text
rouge_l = _core.rouge_l
total_reward = _core.total_reward

__all__ = [
    "__version__",
    "bleu",
    "cider",
    "compute_phash",
    "count_tokens",
    "extract_mcq_answer",
    "format_reward",
    "hamming",
    "meteor_lite",
    "minhash_jaccard",
    "normalize_text",
    "rouge_l",
    "total_reward",
]
