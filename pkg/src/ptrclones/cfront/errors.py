from __future__ import annotations

from .ast import SourceLocation


class ParseError(Exception):
    def __init__(self, loc: SourceLocation, expected: str):
        self.loc = loc
        self.expected = expected
        super().__init__(f"{loc.file}:{loc.line_begin}:{loc.col_begin}: expected {expected}")


class UnsupportedConstruct(Exception):
    """Recognized C that falls outside the supported subset (goto, do-while ...)."""

    def __init__(self, loc: SourceLocation, construct: str):
        self.loc = loc
        self.construct = construct
        super().__init__(
            f"{loc.file}:{loc.line_begin}:{loc.col_begin}: unsupported construct {construct!r}"
        )
