"""Text normalization for the evaluation metrics.

Pipeline: lowercase, read "&" as "and", punctuation to spaces, whitespace
split, stopword removal, then one of the named stemmer rule sets. The exact
stopword inventory and stemmer behavior are load-bearing for the frozen
metric values in the test suite, so they live here as constants and must not
drift.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field

# the classic ~127-word English stopword inventory
STOPWORDS = frozenset("""
i me my myself we our ours ourselves you your yours yourself yourselves he him
his himself she her hers herself it its itself they them their theirs
themselves what which who whom this that these those am is are was were be
been being have has had having do does did doing a an the and but if or
because as until while of at by for with about against between into through
during before after above below to from up down in out on off over under
again further then once here there when where why how all any both each few
more most other some such no nor not only own same so than too very s t can
will just don should now d ll m o re ve y ain aren couldn didn doesn hadn
hasn haven isn ma mightn mustn needn shan shouldn wasn weren won wouldn
""".split())

_PUNCT_TO_SPACE = str.maketrans({c: " " for c in string.punctuation})


def tokenize(text: str) -> list[str]:
    """Lowercase, "&" -> "and", punctuation -> space, split on whitespace."""
    t = text.lower().replace("&", " and ")
    return t.translate(_PUNCT_TO_SPACE).split()


def plural_stem(word: str) -> str:
    """De-pluralize only. Words shorter than 4 characters pass through."""
    w = word
    if len(w) < 4 or not w.endswith("s"):
        return w
    if w.endswith("sses"):
        return w[:-2]
    if w.endswith("ies"):
        return w[:-3] + "y"
    if w.endswith("oes"):
        return w[:-2]
    if w.endswith(("xes", "ches", "shes", "zes")):
        return w[:-2]
    if w.endswith(("ss", "us", "is")):
        return w
    return w[:-1]


def suffix_stem(word: str) -> str:
    """Plural rules plus bare -ing/-ed stripping, no e-restoration."""
    w = plural_stem(word)
    if len(w) >= 5 and w.endswith("ing"):
        return w[:-3]
    if len(w) >= 5 and w.endswith("ed"):
        return w[:-2]
    return w


# ---------------------------------------------------------------------------
# Porter stemmer, the classic 1980 algorithm. Kept dependency-free on purpose;
# the suite freezes several dozen input/output pairs against it.

_VOWELS = "aeiou"


def _cons(w: str, i: int) -> bool:
    ch = w[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return True if i == 0 else not _cons(w, i - 1)
    return True


def _measure(stem: str) -> int:
    # number of vowel->consonant alternations [C](VC)^m[V]
    n = len(stem)
    i = 0
    while i < n and _cons(stem, i):
        i += 1
    m = 0
    while i < n:
        while i < n and not _cons(stem, i):
            i += 1
        if i >= n:
            break
        m += 1
        while i < n and _cons(stem, i):
            i += 1
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _cons(stem, i) for i in range(len(stem)))


def _ends_double_cons(w: str) -> bool:
    return len(w) >= 2 and w[-1] == w[-2] and _cons(w, len(w) - 1)


def _cvc(w: str) -> bool:
    if len(w) < 3:
        return False
    i = len(w) - 1
    return (_cons(w, i) and not _cons(w, i - 1) and _cons(w, i - 2)
            and w[i] not in "wxy")


_STEP2 = (
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
)

_STEP3 = (
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
)

_STEP4 = ("al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
          "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize")


def _step1b2(w: str) -> str:
    if w.endswith(("at", "bl", "iz")):
        return w + "e"
    if _ends_double_cons(w) and not w.endswith(("l", "s", "z")):
        return w[:-1]
    if _measure(w) == 1 and _cvc(w):
        return w + "e"
    return w


def porter_stem(word: str) -> str:
    w = word.lower()
    if len(w) <= 2:
        return w

    # step 1a
    if w.endswith("sses"):
        w = w[:-2]
    elif w.endswith("ies"):
        w = w[:-2]
    elif w.endswith("ss"):
        pass
    elif w.endswith("s"):
        w = w[:-1]

    # step 1b
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
    elif w.endswith("ed") and _has_vowel(w[:-2]):
        w = _step1b2(w[:-2])
    elif w.endswith("ing") and _has_vowel(w[:-3]):
        w = _step1b2(w[:-3])

    # step 1c
    if w.endswith("y") and _has_vowel(w[:-1]):
        w = w[:-1] + "i"

    # step 2
    for suffix, repl in _STEP2:
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if _measure(stem) > 0:
                w = stem + repl
            break

    # step 3
    for suffix, repl in _STEP3:
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if _measure(stem) > 0:
                w = stem + repl
            break

    # step 4
    for suffix in _STEP4:
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            if _measure(stem) > 1:
                if suffix == "ion" and not stem.endswith(("s", "t")):
                    break
                w = stem
            break

    # step 5a
    if w.endswith("e"):
        stem = w[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _cvc(stem)):
            w = stem

    # step 5b
    if w.endswith("l") and _ends_double_cons(w) and _measure(w) > 1:
        w = w[:-1]

    return w


STEMMERS = {
    "none": lambda w: w,
    "plural": plural_stem,
    "suffix": suffix_stem,
    "porter": porter_stem,
}


@dataclass(frozen=True)
class NormalizationConfig:
    """Pinned token pipeline; recorded verbatim in every report."""

    stopword_list: frozenset = STOPWORDS
    lemmatizer: str = "plural"
    lowercase: bool = True
    strip_punctuation: bool = True

    def __post_init__(self):
        if not self.lowercase or not self.strip_punctuation:
            raise ValueError("lowercase and strip_punctuation are fixed true")
        if self.lemmatizer not in STEMMERS:
            raise ValueError(f"unknown lemmatizer rule set '{self.lemmatizer}'")

    def to_dict(self) -> dict:
        return {
            "stopword_list": sorted(self.stopword_list),
            "lemmatizer": self.lemmatizer,
            "lowercase": self.lowercase,
            "strip_punctuation": self.strip_punctuation,
        }


# defaults used by the evaluator: plural-only rules for the accuracy metrics,
# Porter for the rouge family, bare tokens for rouge in its minimal form
DEFAULT_CONFIG = NormalizationConfig()
ROUGE_CONFIG = NormalizationConfig(lemmatizer="porter")
MINIMAL_CONFIG = NormalizationConfig(stopword_list=frozenset(), lemmatizer="none")


def normalize_tokens(text: str, config: NormalizationConfig = DEFAULT_CONFIG) -> list[str]:
    """Tokenize and normalize under the given configuration."""
    stem = STEMMERS[config.lemmatizer]
    return [stem(t) for t in tokenize(text) if t not in config.stopword_list]
