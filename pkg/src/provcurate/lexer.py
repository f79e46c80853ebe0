"""Tokenizer shared by the Turtle, N-Quads, delta, and SPARQL parsers.

Produces a flat token list with line/column positions so every parser can
report exact error locations. The token vocabulary is the union of what
the three grammars need; each parser enforces its own restrictions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

__all__ = ["Token", "TokenStream", "tokenize"]

_ECHAR = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}

# kinds: iri, pname, blank, anon, string, langtag, at_word, number, boolean,
#        var, word, punct, eof
@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    value: object
    line: int
    col: int

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        return f"{self.kind} {self.value!r}"


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip_trivia(self):
        while not self.at_end():
            ch = self.peek()
            if ch in " \t\r\n":
                self.advance()
            elif ch == "#":
                while not self.at_end() and self.peek() != "\n":
                    self.advance()
            else:
                return

    def read_unicode_escape(self, digits: int) -> str:
        hexpart = self.text[self.pos : self.pos + digits]
        if len(hexpart) < digits or any(c not in "0123456789abcdefABCDEF" for c in hexpart):
            raise self.error(f"malformed \\u escape: expected {digits} hex digits")
        for _ in range(digits):
            self.advance()
        code = int(hexpart, 16)
        if code > 0x10FFFF:
            raise self.error("unicode escape out of range")
        return chr(code)


_PN_LOCAL_EXTRA = "_-.:%"
_LOCAL_ESCAPABLE = set("_~.-!$&'()*+,;=/?#@%")


def _is_pn_char_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_" or ord(ch) > 0x7F


def _is_pn_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_-" or ord(ch) > 0x7F


def tokenize(text: str) -> list[Token]:
    sc = _Scanner(text)
    tokens: list[Token] = []
    while True:
        sc.skip_trivia()
        line, col = sc.line, sc.col
        if sc.at_end():
            tokens.append(Token("eof", None, line, col))
            return tokens
        ch = sc.peek()

        if ch == "<":
            nxt = sc.peek(1)
            if nxt in " \t\r\n=" or nxt == "":
                sc.advance()
                if sc.peek() == "=":
                    sc.advance()
                    tokens.append(Token("punct", "<=", line, col))
                else:
                    tokens.append(Token("punct", "<", line, col))
            else:
                tokens.append(Token("iri", _scan_iri(sc), line, col))
        elif ch in "\"'":
            lexical = _scan_string(sc)
            tokens.append(Token("string", lexical, line, col))
        elif ch == "@":
            sc.advance()
            word = _scan_bare_word(sc)
            if not word:
                raise sc.error("expected a name after '@'")
            while sc.peek() == "-":
                sc.advance()
                part = _scan_bare_word(sc, allow_digits_first=True)
                if not part:
                    raise sc.error("malformed language tag")
                word += "-" + part
            tokens.append(Token("at_word", word, line, col))
        elif ch == "_" and sc.peek(1) == ":":
            sc.advance()
            sc.advance()
            label = _scan_local(sc)
            if not label:
                raise sc.error("blank node label must be non-empty")
            tokens.append(Token("blank", label, line, col))
        elif ch in "?$":
            sc.advance()
            name = _scan_bare_word(sc, allow_digits_first=True)
            if not name:
                raise sc.error("variable name must be non-empty")
            tokens.append(Token("var", name, line, col))
        elif ch.isdigit() or (
            ch in "+-" and (sc.peek(1).isdigit() or (sc.peek(1) == "." and sc.peek(2).isdigit()))
        ):
            kind, lexical = _scan_number(sc)
            tokens.append(Token("number", (kind, lexical), line, col))
        elif ch == "." and sc.peek(1).isdigit():
            kind, lexical = _scan_number(sc)
            tokens.append(Token("number", (kind, lexical), line, col))
        elif ch == "[" and _peek_anon_close(sc):
            sc.advance()
            while sc.peek() in " \t\r\n":
                sc.advance()
            sc.advance()
            tokens.append(Token("anon", None, line, col))
        elif ch in "{}()[],;":
            sc.advance()
            tokens.append(Token("punct", ch, line, col))
        elif ch == ".":
            sc.advance()
            tokens.append(Token("punct", ".", line, col))
        elif ch == "^":
            sc.advance()
            if sc.peek() == "^":
                sc.advance()
                tokens.append(Token("punct", "^^", line, col))
            else:
                tokens.append(Token("punct", "^", line, col))
        elif ch in "=*/+-":
            sc.advance()
            tokens.append(Token("punct", ch, line, col))
        elif ch == ">":
            sc.advance()
            if sc.peek() == "=":
                sc.advance()
                tokens.append(Token("punct", ">=", line, col))
            else:
                tokens.append(Token("punct", ">", line, col))
        elif ch == "!":
            sc.advance()
            if sc.peek() == "=":
                sc.advance()
                tokens.append(Token("punct", "!=", line, col))
            else:
                tokens.append(Token("punct", "!", line, col))
        elif ch == "&" and sc.peek(1) == "&":
            sc.advance()
            sc.advance()
            tokens.append(Token("punct", "&&", line, col))
        elif ch == "|" and sc.peek(1) == "|":
            sc.advance()
            sc.advance()
            tokens.append(Token("punct", "||", line, col))
        else:
            word = _scan_bare_word(sc)
            if word or sc.peek() == ":":
                if sc.peek() == ":":
                    sc.advance()
                    local = _scan_local(sc)
                    tokens.append(Token("pname", (word, local), line, col))
                elif word in ("true", "false"):
                    tokens.append(Token("boolean", word, line, col))
                else:
                    tokens.append(Token("word", word, line, col))
            else:
                raise sc.error(f"unexpected character {ch!r}")


def _peek_anon_close(sc: _Scanner) -> bool:
    i = sc.pos + 1
    while i < len(sc.text) and sc.text[i] in " \t\r\n":
        i += 1
    return i < len(sc.text) and sc.text[i] == "]"


def _scan_iri(sc: _Scanner) -> str:
    sc.advance()  # '<'
    out = []
    while True:
        if sc.at_end():
            raise sc.error("unterminated IRI")
        ch = sc.advance()
        if ch == ">":
            return "".join(out)
        if ch == "\\":
            esc = sc.advance() if not sc.at_end() else ""
            if esc == "u":
                out.append(sc.read_unicode_escape(4))
            elif esc == "U":
                out.append(sc.read_unicode_escape(8))
            else:
                raise sc.error(f"illegal escape \\{esc} in IRI")
        elif ch in ' <"{}|^`' or ord(ch) <= 0x20:
            raise sc.error(f"illegal character {ch!r} in IRI")
        else:
            out.append(ch)


def _scan_string(sc: _Scanner) -> str:
    quote = sc.advance()
    longform = False
    if sc.peek() == quote and sc.peek(1) == quote:
        sc.advance()
        sc.advance()
        longform = True
    out = []
    while True:
        if sc.at_end():
            raise sc.error("unterminated string literal")
        ch = sc.advance()
        if ch == quote:
            if not longform:
                return "".join(out)
            if sc.peek() == quote and sc.peek(1) == quote:
                sc.advance()
                sc.advance()
                return "".join(out)
            out.append(ch)
        elif ch == "\\":
            esc = sc.advance() if not sc.at_end() else ""
            if esc == "u":
                out.append(sc.read_unicode_escape(4))
            elif esc == "U":
                out.append(sc.read_unicode_escape(8))
            elif esc in _ECHAR:
                out.append(_ECHAR[esc])
            else:
                raise sc.error(f"illegal escape \\{esc} in string")
        elif ch in "\n\r" and not longform:
            raise sc.error("newline in single-line string")
        else:
            out.append(ch)


def _scan_number(sc: _Scanner) -> tuple[str, str]:
    out = []
    if sc.peek() in "+-":
        out.append(sc.advance())
    seen_dot = False
    seen_exp = False
    while not sc.at_end():
        ch = sc.peek()
        if ch.isdigit():
            out.append(sc.advance())
        elif ch == "." and not seen_dot and not seen_exp and sc.peek(1).isdigit():
            seen_dot = True
            out.append(sc.advance())
        elif ch in "eE" and not seen_exp and (sc.peek(1).isdigit() or sc.peek(1) in "+-"):
            seen_exp = True
            out.append(sc.advance())
            if sc.peek() in "+-":
                out.append(sc.advance())
        else:
            break
    lexical = "".join(out)
    if seen_exp:
        return "double", lexical
    if seen_dot:
        return "decimal", lexical
    return "integer", lexical


def _scan_bare_word(sc: _Scanner, allow_digits_first: bool = False) -> str:
    out = []
    first = True
    while not sc.at_end():
        ch = sc.peek()
        ok = ch.isalpha() or ch == "_" or ord(ch) > 0x7F or (ch.isdigit() and (allow_digits_first or not first))
        if not ok:
            break
        out.append(sc.advance())
        first = False
    return "".join(out)


def _scan_local(sc: _Scanner) -> str:
    out = []
    while not sc.at_end():
        ch = sc.peek()
        if ch == "\\":
            sc.advance()
            esc = sc.peek()
            if esc in _LOCAL_ESCAPABLE:
                out.append(sc.advance())
            else:
                raise sc.error(f"illegal local-name escape \\{esc}")
        elif ch == "%":
            sc.advance()
            hexpart = sc.peek() + sc.peek(1)
            if len(hexpart) < 2 or any(c not in "0123456789abcdefABCDEF" for c in hexpart):
                raise sc.error("malformed percent encoding in local name")
            sc.advance()
            sc.advance()
            out.append("%" + hexpart)
        elif _is_pn_char(ch) or ch in ".:":
            out.append(sc.advance())
        else:
            break
    # local names may contain dots but not end with one
    while out and out[-1] == ".":
        out.pop()
        sc.pos -= 1
        sc.col -= 1
    return "".join(out)


class TokenStream:
    """Cursor over a token list with error helpers."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, offset: int = 0) -> Token:
        i = min(self.i + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, kind: str, value: object = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (value is None or tok.value == value)

    def at_word(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == "word" and str(tok.value).upper() in words

    def accept(self, kind: str, value: object = None) -> Token | None:
        if self.at(kind, value):
            return self.next()
        return None

    def expect(self, kind: str, value: object = None, what: str | None = None) -> Token:
        tok = self.peek()
        if not self.at(kind, value):
            wanted = what or (f"{kind} {value!r}" if value is not None else kind)
            raise self.error(f"expected {wanted}, found {tok.describe()}", tok)
        return self.next()

    def error(self, message: str, token: Token | None = None) -> ParseError:
        tok = token or self.peek()
        return ParseError(message, tok.line, tok.col)
