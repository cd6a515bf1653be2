"""Words in generators.

A word is a tuple of one-character letters.  Lowercase letters are generators
(base or redundant, plus ``z`` for the central element); the uppercase letter
is the inverse.  The text syntax accepts powers, e.g. ``"z^3 s"``,
``"su^2s"`` or ``"t^-1"``; whitespace is ignored.
"""

from __future__ import annotations

import re

Word = tuple[str, ...]

_TOKEN = re.compile(r"([A-Za-z])(?:\^(-?\d+))?")


def parse_word(text: str) -> Word:
    text = text.replace(" ", "")
    if text in ("", "1"):
        return ()
    out: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse word {text!r} at position {pos}")
        letter, power = m.group(1), m.group(2)
        n = int(power) if power is not None else 1
        if n < 0:
            letter = invert_letter(letter)
            n = -n
        out.extend([letter] * n)
        pos = m.end()
    return tuple(out)


def invert_letter(letter: str) -> str:
    return letter.lower() if letter.isupper() else letter.upper()


def inverse_word(word: Word) -> Word:
    return tuple(invert_letter(x) for x in reversed(word))


def free_reduce(word: Word) -> Word:
    out: list[str] = []
    for x in word:
        if out and out[-1] == invert_letter(x):
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def format_word(word: Word) -> str:
    """Compact display: runs collapse to powers, inverses print as ``x^-1``."""
    if not word:
        return "1"
    parts = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        n = j - i
        x = word[i]
        if x.isupper():
            parts.append(f"{x.lower()}^-{n}" if n > 1 else f"{x.lower()}^-1")
        else:
            parts.append(f"{x}^{n}" if n > 1 else x)
        i = j
    return " ".join(parts)
