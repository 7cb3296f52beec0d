"""Tokenizer for preprocessed C source."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import SourceLocation
from .errors import ParseError

KEYWORDS = frozenset(
    """auto break case char const continue default do double else enum extern
    float for goto if inline int long register restrict return short signed
    sizeof static struct switch typedef union unsigned void volatile while
    _Bool""".split()
)

_PUNCT = sorted(
    """... <<= >>= -> ++ -- << >> <= >= == != && || += -= *= /= %= &= ^= |=
    [ ] ( ) { } . & * + - ~ ! / % < > ^ | ? : ; = ,""".split(),
    key=len,
    reverse=True,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<float>(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?[fFlL]?|\d+[eE][+-]?\d+[fFlL]?)
  | (?P<int>0[xX][0-9a-fA-F]+[uUlL]*|\d+[uUlL]*)
  | (?P<char>'(?:\\.|[^'\\\n])+')
  | (?P<string>"(?:\\.|[^"\\\n])*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>"""
    + "|".join(re.escape(p) for p in _PUNCT)
    + r""")
  | (?P<hash>\#)
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, int, float, char, string, punct, eof
    text: str
    line: int
    col: int
    end_line: int
    end_col: int

    def loc(self, filename: str) -> SourceLocation:
        return SourceLocation(filename, self.line, self.end_line, self.col, self.end_col)


def tokenize(text: str, filename: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            loc = SourceLocation(filename, line, line, col, col)
            raise ParseError(loc, f"valid token, found {text[pos]!r}")
        kind = m.lastgroup
        val = m.group()
        if kind == "hash":
            loc = SourceLocation(filename, line, line, col, col)
            raise ParseError(loc, "preprocessed source (no '#' directives)")
        if kind in ("ws",):
            pos = m.end()
            continue
        if kind == "nl":
            line += 1
            line_start = m.end()
            pos = m.end()
            continue
        if kind == "comment":
            nls = val.count("\n")
            if nls:
                line += nls
                line_start = pos + val.rfind("\n") + 1
            pos = m.end()
            continue
        if kind == "ident" and val in KEYWORDS:
            kind = "keyword"
        end_col = col + len(val) - 1
        tokens.append(Token(kind, val, line, col, line, end_col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1, line, pos - line_start + 1))
    return tokens
