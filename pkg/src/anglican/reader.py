"""Reader for the query language's Clojure-shaped surface syntax."""

import re

from .forms import (Keyword, List, MapForm, Quoted, SetForm, Symbol, Vector,
                    print_form, struct_key)

__all__ = ["ReadError", "read_forms", "read_one", "print_form"]


class ReadError(Exception):
    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{message}{where}")


_INT = re.compile(r"[+-]?\d+\Z")
_REAL = re.compile(r"[+-]?\d+(\.\d*)?([eE][+-]?\d+)?\Z")
_RATIO = re.compile(r"[+-]?\d+/\d+\Z")
_SYMBOL = re.compile(r"[^\d:#][^\s,()\[\]{}\"';@^`~\\]*\Z|[+-]\Z")
_CLOSERS = {")": "(", "]": "[", "}": "{"}
_DELIMS = set("()[]{}\";") | {"'"}
_SPECIAL_REALS = {"##Inf": float("inf"), "##-Inf": float("-inf"), "##NaN": float("nan")}
_STR_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\", "b": "\b", "f": "\f"}


class _Reader:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message, line=None, col=None):
        raise ReadError(message, self.line if line is None else line,
                        self.col if col is None else col)

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self):
        c = self.text[self.pos]
        self.pos += 1
        if c == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return c

    def skip_ws(self):
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c == ";":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self.advance()
            elif c.isspace() or c == ",":
                self.advance()
            else:
                return

    def read_all(self):
        forms = []
        while True:
            self.skip_ws()
            if self.pos >= len(self.text):
                return forms
            forms.append(self.read())

    def read(self):
        self.skip_ws()
        if self.pos >= len(self.text):
            self.error("unexpected end of input")
        line, col = self.line, self.col
        c = self.peek()
        if c in "([{":
            self.advance()
            closer = {"(": ")", "[": "]", "{": "}"}[c]
            items = self.read_until(closer, line, col)
            if c == "(":
                return List(items)
            if c == "[":
                return Vector(items)
            return self.make_map(items, line, col)
        if c in ")]}":
            self.error(f"unbalanced delimiter '{c}'")
        if c == "'":
            self.advance()
            self.skip_ws()
            if self.pos >= len(self.text) or self.peek() in ")]}":
                self.error("quote without a form", line, col)
            return Quoted(self.read())
        if c == '"':
            return self.read_string()
        if c == "#":
            return self.read_dispatch(line, col)
        if c in "\\^@`~":
            what = {"\\": "character literal", "^": "metadata", "@": "deref",
                    "`": "syntax quote", "~": "unquote"}[c]
            self.error(f"unsupported syntax: {what}")
        return self.read_atom(line, col)

    def read_until(self, closer, line, col):
        items = []
        while True:
            self.skip_ws()
            if self.pos >= len(self.text):
                self.error(f"unbalanced delimiter: missing '{closer}' for form opened", line, col)
            c = self.peek()
            if c in ")]}":
                if c != closer:
                    self.error(f"unbalanced delimiter: expected '{closer}' but found '{c}'")
                self.advance()
                return items
            items.append(self.read())

    def make_map(self, items, line, col):
        if len(items) % 2:
            self.error("map literal must contain an even number of forms", line, col)
        pairs = list(zip(items[::2], items[1::2]))
        seen = set()
        for k, _ in pairs:
            key = struct_key(k)
            if key in seen:
                self.error(f"duplicate map key: {print_form(k)}", line, col)
            seen.add(key)
        return MapForm(pairs)

    def read_dispatch(self, line, col):
        nxt = self.text[self.pos + 1:self.pos + 2]
        if nxt == "{":
            self.advance()
            self.advance()
            items = self.read_until("}", line, col)
            seen = set()
            for item in items:
                key = struct_key(item)
                if key in seen:
                    self.error(f"duplicate set element: {print_form(item)}", line, col)
                seen.add(key)
            return SetForm(items)
        if nxt == "#":
            tok = self.read_token()
            if tok in _SPECIAL_REALS:
                return _SPECIAL_REALS[tok]
            self.error(f"invalid token: {tok}", line, col)
        what = {'"': "regex literal", "(": "anonymous function literal",
                "'": "var quote", "_": "discard", "?": "reader conditional",
                ":": "namespaced map"}.get(nxt, "tagged literal")
        self.error(f"unsupported syntax: {what}")

    def read_string(self):
        line, col = self.line, self.col
        self.advance()
        out = []
        while True:
            if self.pos >= len(self.text):
                self.error("unterminated string", line, col)
            c = self.advance()
            if c == '"':
                return "".join(out)
            if c == "\\":
                if self.pos >= len(self.text):
                    self.error("unterminated string", line, col)
                e = self.advance()
                if e in _STR_ESCAPES:
                    out.append(_STR_ESCAPES[e])
                elif e == "u":
                    hexdigits = self.text[self.pos:self.pos + 4]
                    if not re.fullmatch(r"[0-9a-fA-F]{4}", hexdigits):
                        self.error("invalid unicode escape")
                    for _ in range(4):
                        self.advance()
                    out.append(chr(int(hexdigits, 16)))
                else:
                    self.error(f"invalid string escape: \\{e}")
            else:
                out.append(c)

    def read_token(self):
        start = self.pos
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c.isspace() or c == "," or (c in _DELIMS and not (c == "'" and self.pos > start)):
                break
            self.advance()
        return self.text[start:self.pos]

    def read_atom(self, line, col):
        tok = self.read_token()
        if not tok:
            self.error(f"invalid token: {self.peek()!r}", line, col)
        if tok == "nil":
            return None
        if tok == "true":
            return True
        if tok == "false":
            return False
        if _INT.match(tok):
            return int(tok)
        if _REAL.match(tok):
            return float(tok)
        if _RATIO.match(tok):
            self.error(f"unsupported syntax: ratio literal {tok}", line, col)
        if tok.startswith(":"):
            name = tok[1:]
            if not name or name == ":" or name.endswith(":") or name.startswith(":::"):
                self.error(f"invalid token: {tok}", line, col)
            return Keyword(name)
        if _SYMBOL.match(tok) and not tok.endswith("/") or tok == "/":
            return Symbol(tok)
        self.error(f"invalid token: {tok}", line, col)


def read_forms(text):
    """Parse every top-level form in ``text``."""
    return _Reader(text).read_all()


def read_one(text):
    forms = read_forms(text)
    if len(forms) != 1:
        raise ReadError(f"expected exactly one form, found {len(forms)}")
    return forms[0]
