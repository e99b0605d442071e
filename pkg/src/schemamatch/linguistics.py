"""Linguistic preprocessing: tokenization, stemming, term bags.

Names and documentation are reduced to multisets of stemmed lowercase tokens
before any voter sees them. Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

from .model import SchemaElement

# English function words. Deliberately small: schema names are terse and an
# aggressive list would delete real signal (e.g. "all" in All_Event_Vitals
# stays, because concept words like All/Total/First carry meaning here).
DEFAULT_STOPWORDS: frozenset[str] = frozenset(
    """
    a an the and or but nor if then else than that this these those
    of at by for with from into onto over under to in on as is are was
    were be been being have has had do does did will would shall should
    can could may might must it its he she they them his her their our
    your my we you i me us not no so such per via vs etc which who whom
    whose what when where how why there here also any each both few more
    most other some own same too very just about between through during
    before after above below again further once
    """.split()
)

# Word-shape splitter: uppercase runs (acronyms), capitalized words,
# lowercase runs, digit runs. Applied after punctuation splitting.
_WORD_RE = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z]*|[a-z]+|[0-9]+")

_VOWELS = "aeiou"


def load_stopwords(path) -> frozenset[str]:
    """Read a one-token-per-line stopword file (blank lines and # comments
    ignored); tokens are lowercased."""
    words = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            tok = line.strip().lower()
            if tok and not tok.startswith("#"):
                words.append(tok)
    return frozenset(words)


def tokenize(text: str, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> list[str]:
    """Split on underscores/hyphens/whitespace/punctuation, case transitions,
    and letter-digit boundaries; lowercase; drop all-digit tokens and
    stopwords. Returns tokens in source order."""
    out: list[str] = []
    for word in _WORD_RE.findall(text):
        if word.isdigit():
            continue
        low = word.lower()
        if low in stopwords:
            continue
        out.append(low)
    return out


# ---------------------------------------------------------------------------
# Porter-style suffix stripping.
#
# The classic rule set, wrapped in a fixpoint loop: the pass is reapplied
# until the token stops changing, which makes stem() idempotent by
# construction. A pass never lengthens a token, so the loop terminates.
# ---------------------------------------------------------------------------


def _is_cons(word: str, i: int) -> bool:
    c = word[i]
    if c in _VOWELS:
        return False
    if c == "y":
        return i == 0 or not _is_cons(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of vowel->consonant transitions ([C](VC)^m[V])."""
    m = 0
    prev_cons = True
    started = False
    for i in range(len(stem)):
        cons = _is_cons(stem, i)
        if not cons:
            started = True
        elif started and not prev_cons:
            m += 1
        prev_cons = cons
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_cons(stem, i) for i in range(len(stem)))


def _ends_double_cons(word: str) -> bool:
    return len(word) >= 2 and word[-1] == word[-2] and _is_cons(word, len(word) - 1)


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if not (_is_cons(word, len(word) - 3) and not _is_cons(word, len(word) - 2) and _is_cons(word, len(word) - 1)):
        return False
    return word[-1] not in "wxy"


_STEP2 = [
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
]

_STEP3 = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
]

_STEP4 = [
    "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ism",
    "ate", "iti", "ous", "ive", "ize", "ion", "al", "er", "ic", "ou",
]

_STEP2_SORTED = sorted(_STEP2, key=lambda p: -len(p[0]))
_STEP3_SORTED = sorted(_STEP3, key=lambda p: -len(p[0]))
_STEP4_SORTED = sorted(_STEP4, key=len, reverse=True)


def _pass(word: str) -> str:
    w = word

    # step 1a: plurals
    if w.endswith("sses"):
        w = w[:-2]
    elif w.endswith("ies"):
        w = w[:-2]
    elif not w.endswith("ss") and w.endswith("s") and len(w) > 1:
        w = w[:-1]

    # step 1b: -eed / -ed / -ing
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
    else:
        stripped = None
        if w.endswith("ed") and _has_vowel(w[:-2]):
            stripped = w[:-2]
        elif w.endswith("ing") and _has_vowel(w[:-3]):
            stripped = w[:-3]
        if stripped is not None:
            w = stripped
            if w.endswith(("at", "bl", "iz")):
                w += "e"
            elif _ends_double_cons(w) and not w.endswith(("l", "s", "z")):
                w = w[:-1]
            elif _measure(w) == 1 and _ends_cvc(w):
                w += "e"

    # step 1c: terminal y
    if w.endswith("y") and _has_vowel(w[:-1]):
        w = w[:-1] + "i"

    # steps 2 and 3: suffix maps, longest match first
    for table in (_STEP2_SORTED, _STEP3_SORTED):
        for suffix, repl in table:
            if w.endswith(suffix):
                base = w[: -len(suffix)]
                if _measure(base) > 0:
                    w = base + repl
                break

    # step 4: drop residual suffixes when the stem is long enough
    for suffix in _STEP4_SORTED:
        if w.endswith(suffix):
            base = w[: -len(suffix)]
            if _measure(base) > 1:
                if suffix == "ion" and not base.endswith(("s", "t")):
                    break
                w = base
            break

    # step 5a: terminal e
    if w.endswith("e"):
        base = w[:-1]
        m = _measure(base)
        if m > 1 or (m == 1 and not _ends_cvc(base)):
            w = base

    # step 5b: -ll
    if _measure(w) > 1 and _ends_double_cons(w) and w.endswith("l"):
        w = w[:-1]

    return w


def stem(token: str) -> str:
    """Deterministic Porter-style stem of a lowercase token; idempotent."""
    if len(token) <= 2:
        return token
    seen = {token}
    cur = token
    while True:
        nxt = _pass(cur)
        if nxt == cur or nxt in seen:
            # fixpoint, or (vanishingly unlikely) a rewrite cycle: either way
            # nxt maps back into its own orbit, so stem(nxt) == nxt.
            return nxt
        seen.add(nxt)
        cur = nxt


@dataclass(frozen=True)
class TermBag:
    """Multiset of stemmed lowercase tokens from one element field."""

    terms: tuple[str, ...]
    source_kind: str  # "name" | "documentation"
    counts: Counter = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "counts", Counter(self.terms))

    @property
    def size(self) -> int:
        return len(self.terms)

    def __len__(self) -> int:
        return len(self.terms)


def term_bag(
    element: SchemaElement,
    kind: str,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
) -> TermBag:
    """Tokenize + stem one field of an element into a :class:`TermBag`."""
    if kind == "name":
        text = element.name
    elif kind == "documentation":
        text = element.documentation
    else:
        raise ValueError(f"unknown term bag kind {kind!r}")
    terms = tuple(stem(tok) for tok in tokenize(text, stopwords))
    return TermBag(terms=terms, source_kind=kind)
