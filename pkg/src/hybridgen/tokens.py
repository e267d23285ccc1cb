"""Tokenizer-free token estimate used for compression ratios and transcript meta."""

import re

_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\d+(?:\.\d+)?|\S")


def count_tokens(text: str) -> int:
    """Identifiers, numbers and single punctuation characters each count as one."""
    return len(_TOKEN.findall(text))
