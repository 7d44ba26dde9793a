"""Porter and Snowball (English) stemmers, plus the fallback rule used here.

Both algorithms are implemented from their published definitions. No
third-party stemmer is available in this environment, and pinning our own
implementation keeps token output reproducible across platforms.

`stem_token` applies the house rule: Porter first; when Porter leaves the
token unchanged and the Snowball stemmer does not, the Snowball output is
used. The rule is iterated to a fixed point so that stemming is idempotent
on its own output.
"""

from __future__ import annotations

_PORTER_VOWELS = "aeiou"


def _p_is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _PORTER_VOWELS:
        return False
    if ch == "y":
        # y is a consonant unless preceded by a consonant
        return True if i == 0 else not _p_is_consonant(word, i - 1)
    return True


def _p_measure(stem: str) -> int:
    """Number of VC sequences in the [C](VC)^m[V] decomposition of stem."""
    n = len(stem)
    i = 0
    while i < n and _p_is_consonant(stem, i):
        i += 1
    m = 0
    while i < n:
        while i < n and not _p_is_consonant(stem, i):
            i += 1
        if i >= n:
            break
        m += 1
        while i < n and _p_is_consonant(stem, i):
            i += 1
    return m


def _p_contains_vowel(stem: str) -> bool:
    return any(not _p_is_consonant(stem, i) for i in range(len(stem)))


def _p_ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _p_is_consonant(word, len(word) - 1)
    )


def _p_ends_cvc(word: str) -> bool:
    # final consonant-vowel-consonant, last consonant not w, x or y
    if len(word) < 3:
        return False
    return (
        _p_is_consonant(word, len(word) - 3)
        and not _p_is_consonant(word, len(word) - 2)
        and _p_is_consonant(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


def _p_apply_rules(word: str, rules, min_measure: int) -> str:
    """Longest-suffix match; only the matched rule's condition is tested."""
    best = None
    for suffix, repl in rules:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best[0])):
            best = (suffix, repl)
    if best is None:
        return word
    suffix, repl = best
    stem = word[: len(word) - len(suffix)]
    if _p_measure(stem) > min_measure:
        return stem + repl
    return word


_P_STEP2 = [
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
]

_P_STEP3 = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
]

_P_STEP4 = [
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
]


def porter_stem(word: str) -> str:
    """Classic Porter stemmer (1980 definition). Expects a lowercase word."""
    if len(word) <= 2:
        return word

    # step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif word.endswith("ss"):
        pass
    elif word.endswith("s"):
        word = word[:-1]

    # step 1b
    cleanup = False
    if word.endswith("eed"):
        if _p_measure(word[:-3]) > 0:
            word = word[:-1]
    elif word.endswith("ed"):
        if _p_contains_vowel(word[:-2]):
            word = word[:-2]
            cleanup = True
    elif word.endswith("ing"):
        if _p_contains_vowel(word[:-3]):
            word = word[:-3]
            cleanup = True
    if cleanup:
        if word.endswith(("at", "bl", "iz")):
            word += "e"
        elif _p_ends_double_consonant(word) and word[-1] not in "lsz":
            word = word[:-1]
        elif _p_measure(word) == 1 and _p_ends_cvc(word):
            word += "e"

    # step 1c
    if word.endswith("y") and _p_contains_vowel(word[:-1]):
        word = word[:-1] + "i"

    word = _p_apply_rules(word, _P_STEP2, 0)
    word = _p_apply_rules(word, _P_STEP3, 0)
    word = _p_apply_rules(word, [(s, "") for s in _P_STEP4 if s != "ion"], 1)
    # step 4 "ion" needs its own stem condition on top of m > 1
    if word.endswith("ion") and word[:-3].endswith(("s", "t")):
        if _p_measure(word[:-3]) > 1:
            word = word[:-3]

    # step 5a
    if word.endswith("e"):
        stem = word[:-1]
        m = _p_measure(stem)
        if m > 1 or (m == 1 and not _p_ends_cvc(stem)):
            word = stem

    # step 5b
    if _p_measure(word) > 1 and _p_ends_double_consonant(word) and word.endswith("l"):
        word = word[:-1]

    return word


_SB_VOWELS = "aeiouy"
_SB_DOUBLES = ("bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt")
_SB_LI_ENDINGS = "cdeghkmnrt"

_SB_EXCEPTIONS = {
    "skis": "ski", "skies": "sky", "dying": "die", "lying": "lie",
    "tying": "tie", "idly": "idl", "gently": "gentl", "ugly": "ugli",
    "early": "earli", "only": "onli", "singly": "singl",
    "sky": "sky", "news": "news", "howe": "howe", "atlas": "atlas",
    "cosmos": "cosmos", "bias": "bias", "andes": "andes",
}

_SB_STOP_AFTER_1A = {
    "inning", "outing", "canning", "herring", "earring",
    "proceed", "exceed", "succeed",
}

_SB_STEP2 = [
    ("ization", "ize"), ("ational", "ate"), ("fulness", "ful"),
    ("ousness", "ous"), ("iveness", "ive"), ("tional", "tion"),
    ("biliti", "ble"), ("lessli", "less"), ("entli", "ent"),
    ("ation", "ate"), ("alism", "al"), ("aliti", "al"), ("ousli", "ous"),
    ("iviti", "ive"), ("fulli", "ful"), ("enci", "ence"), ("anci", "ance"),
    ("abli", "able"), ("izer", "ize"), ("ator", "ate"), ("alli", "al"),
    ("bli", "ble"), ("ogi", "og"), ("li", ""),
]

_SB_STEP3 = [
    ("ational", "ate"), ("tional", "tion"), ("alize", "al"), ("icate", "ic"),
    ("iciti", "ic"), ("ative", ""), ("ical", "ic"), ("ness", ""), ("ful", ""),
]

_SB_STEP4 = [
    "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ism",
    "ate", "iti", "ous", "ive", "ize", "ion", "al", "er", "ic",
]


def _sb_is_vowel(ch: str) -> bool:
    return ch in _SB_VOWELS  # marked 'Y' is a consonant


def _sb_region_after_vc(word: str, start: int) -> int:
    """Position after the first vowel-followed-by-nonvowel at or after start."""
    n = len(word)
    i = start
    while i < n and not _sb_is_vowel(word[i]):
        i += 1
    while i < n and _sb_is_vowel(word[i]):
        i += 1
    return min(i + 1, n) if i < n else n


def _sb_regions(word: str) -> tuple[int, int]:
    r1 = None
    for prefix in ("gener", "commun", "arsen"):
        if word.startswith(prefix):
            r1 = len(prefix)
            break
    if r1 is None:
        r1 = _sb_region_after_vc(word, 0)
    r2 = _sb_region_after_vc(word, r1)
    return r1, r2


def _sb_ends_short_syllable(word: str) -> bool:
    n = len(word)
    if n == 2:
        return _sb_is_vowel(word[0]) and not _sb_is_vowel(word[1])
    if n >= 3:
        return (
            not _sb_is_vowel(word[-3])
            and _sb_is_vowel(word[-2])
            and not _sb_is_vowel(word[-1])
            and word[-1] not in "wx"
            and word[-1] != "Y"
        )
    return False


def snowball_stem(word: str) -> str:
    """Snowball English stemmer (Porter2). Expects a lowercase word."""
    if word in _SB_EXCEPTIONS:
        return _SB_EXCEPTIONS[word]
    if word.startswith("'"):
        word = word[1:]
    if len(word) <= 2:
        return word

    # mark consonant-y as Y: initial y, or y after a vowel
    if word.startswith("y"):
        word = "Y" + word[1:]
    chars = list(word)
    for i in range(1, len(chars)):
        if chars[i] == "y" and _sb_is_vowel(chars[i - 1]):
            chars[i] = "Y"
    word = "".join(chars)

    r1, r2 = _sb_regions(word)

    def in_r1(suffix: str) -> bool:
        return len(word) - len(suffix) >= r1

    def in_r2(suffix: str) -> bool:
        return len(word) - len(suffix) >= r2

    # step 0: possessive endings
    for suffix in ("'s'", "'s", "'"):
        if word.endswith(suffix):
            word = word[: -len(suffix)]
            break

    # step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith(("ied", "ies")):
        word = word[:-2] if len(word) > 4 else word[:-1]
    elif word.endswith(("us", "ss")):
        pass
    elif word.endswith("s"):
        if any(_sb_is_vowel(c) for c in word[:-2]):
            word = word[:-1]

    if word in _SB_STOP_AFTER_1A:
        return word

    # step 1b
    if word.endswith(("eedly", "eed")):
        suffix = "eedly" if word.endswith("eedly") else "eed"
        if in_r1(suffix):
            word = word[: -len(suffix)] + "ee"
    else:
        for suffix in ("ingly", "edly", "ing", "ed"):
            if word.endswith(suffix):
                stem = word[: -len(suffix)]
                if any(_sb_is_vowel(c) for c in stem):
                    word = stem
                    if word.endswith(("at", "bl", "iz")):
                        word += "e"
                    elif word.endswith(_SB_DOUBLES):
                        word = word[:-1]
                    elif _sb_ends_short_syllable(word) and r1 >= len(word):
                        word += "e"
                break

    # step 1c: y -> i after a non-vowel that is not word-initial
    if (
        len(word) > 2
        and word[-1] in "yY"
        and not _sb_is_vowel(word[-2])
    ):
        word = word[:-1] + "i"

    # step 2
    best = None
    for suffix, repl in _SB_STEP2:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best[0])):
            best = (suffix, repl)
    if best is not None:
        suffix, repl = best
        if in_r1(suffix):
            stem = word[: -len(suffix)]
            if suffix == "ogi":
                if stem.endswith("l"):
                    word = stem + repl
            elif suffix == "li":
                if stem and stem[-1] in _SB_LI_ENDINGS:
                    word = stem
            else:
                word = stem + repl

    # step 3
    best = None
    for suffix, repl in _SB_STEP3:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best[0])):
            best = (suffix, repl)
    if best is not None:
        suffix, repl = best
        if in_r1(suffix):
            if suffix == "ative":
                if in_r2(suffix):
                    word = word[: -len(suffix)]
            else:
                word = word[: -len(suffix)] + repl

    # step 4
    best = None
    for suffix in _SB_STEP4:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best)):
            best = suffix
    if best is not None and in_r2(best):
        if best == "ion":
            if word[: -3].endswith(("s", "t")):
                word = word[:-3]
        else:
            word = word[: -len(best)]

    # step 5
    if word.endswith("e"):
        if in_r2("e") or (in_r1("e") and not _sb_ends_short_syllable(word[:-1])):
            word = word[:-1]
    elif word.endswith("l") and in_r2("l") and word[:-1].endswith("l"):
        word = word[:-1]

    return word.replace("Y", "y")


def stem_token(token: str) -> str:
    """Stem a lowercase token: Porter, falling back to Snowball when Porter
    leaves the token unchanged, iterated to a fixed point."""
    seen = {token}
    current = token
    for _ in range(8):
        stemmed = porter_stem(current)
        if stemmed == current:
            alt = snowball_stem(current)
            if alt != current:
                stemmed = alt
        if stemmed == current:
            return current
        if stemmed in seen:  # cycle guard; keep the earlier form
            return current
        seen.add(stemmed)
        current = stemmed
    return current
