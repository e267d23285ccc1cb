"""Pull code out of a chat response."""

from __future__ import annotations

import logging
import re
from typing import Callable, Optional

log = logging.getLogger(__name__)

_FENCE = re.compile(r"^[ \t]*```[ \t]*([\w+#.-]*)[^\n]*\n(.*?)(?:^[ \t]*```[ \t]*$|\Z)", re.MULTILINE | re.DOTALL)


class NoCodeFound(Exception):
    pass


def extract_code_block(
    text: str,
    expected_tag: Optional[str] = None,
    parses: Optional[Callable[[str], bool]] = None,
) -> str:
    """First fenced block tagged ``expected_tag``, else the first fenced block.

    Without any fence the whole response is returned when ``parses`` accepts it.
    An unterminated final fence runs to the end of the text.
    """
    blocks = [(m.group(1).lower(), m.group(2)) for m in _FENCE.finditer(text)]
    if blocks:
        if expected_tag:
            for tag, body in blocks:
                if tag == expected_tag.lower():
                    return body
        return blocks[0][1]
    if parses is not None and text.strip() and parses(text):
        log.info("unfenced code response accepted")
        return text
    raise NoCodeFound("response contains no code block")
