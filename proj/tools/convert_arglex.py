#!/usr/bin/env python3
"""Convert the Arguing Lexicon's regex files into <strategy>.patterns files.

The raw resource ships one `<strategy>.tff` file per arguing strategy, each
starting with a `#class="<strategy>"` line followed by one regular expression
per line, plus macro files defining `@NAME={alt1, alt2, ...}`. propdet reads a
flat format instead: one lowercase token pattern per line, `*` standing for any
single token.

The converter expands macros, alternations `(a|b)` and optional parts `x?`
into every literal variant. `\\w+`, `\\S+`, `\\w*` and `.*` become `*` (the last
one is an approximation: it can span several tokens in the original). Anchors
and `\\b` are dropped. Patterns expanding to more than --max-variants strings
are truncated with a warning.

Usage:
    convert_arglex.py <raw-dir> <out-dir> [--max-variants N]
"""

import argparse
import itertools
import re
import sys
from pathlib import Path

MACRO_DEF = re.compile(r"^\s*@(\w+)\s*=\s*\{(.*)\}\s*$")
CLASS_LINE = re.compile(r'^#class="([^"]+)"')
WILDCARDS = (r"\w+", r"\S+", r"\w*", r"\S*", ".*", ".+")
WILD = "\x00"  # placeholder for a single-token wildcard during expansion


def load_macros(files):
    macros = {}
    for path in files:
        for line in path.read_text(encoding="utf-8", errors="replace").splitlines():
            m = MACRO_DEF.match(line)
            if m:
                alts = [a.strip() for a in m.group(2).split(",") if a.strip()]
                macros[m.group(1)] = "(" + "|".join(alts) + ")"
    return macros


def substitute_macros(pattern, macros, depth=0):
    if depth > 10:
        raise ValueError("macro recursion too deep")
    out = re.sub(r"@(\w+)", lambda m: macros.get(m.group(1), m.group(0)), pattern)
    return out if out == pattern else substitute_macros(out, macros, depth + 1)


class Expander:
    """Recursive descent over the regex subset; yields lists of strings."""

    def __init__(self, text, limit):
        self.s = text
        self.i = 0
        self.limit = limit
        self.truncated = False

    def cap(self, items):
        if len(items) > self.limit:
            self.truncated = True
            return items[: self.limit]
        return items

    def alternation(self):
        options = self.sequence()
        while self.i < len(self.s) and self.s[self.i] == "|":
            self.i += 1
            options = self.cap(options + self.sequence())
        return options

    def sequence(self):
        result = [""]
        while self.i < len(self.s) and self.s[self.i] not in "|)":
            part = self.atom()
            if self.i < len(self.s) and self.s[self.i] == "?":
                self.i += 1
                part = part + [""]
            result = self.cap([a + b for a, b in itertools.product(result, part)])
        return result

    def atom(self):
        for w in WILDCARDS:
            if self.s.startswith(w, self.i):
                self.i += len(w)
                return [WILD]
        c = self.s[self.i]
        if c == "(":
            self.i += 1
            if self.s.startswith("?:", self.i):
                self.i += 2
            inner = self.alternation()
            if self.i >= len(self.s) or self.s[self.i] != ")":
                raise ValueError("unbalanced parenthesis")
            self.i += 1
            return inner
        if c == "\\":
            nxt = self.s[self.i + 1 : self.i + 2]
            self.i += 2
            if nxt in ("b", "B"):
                return [""]
            if nxt == "s":
                return [" "]
            return [nxt]
        if c in "^$":
            self.i += 1
            return [""]
        self.i += 1
        return [c]


def expand(pattern, macros, limit):
    ex = Expander(substitute_macros(pattern, macros), limit)
    variants = ex.alternation()
    if ex.i != len(ex.s):
        raise ValueError("unexpected ')' at %d" % ex.i)
    out = []
    for v in variants:
        tokens = ["*" if t == WILD else t.lower() for t in v.replace(WILD, " " + WILD + " ").split()]
        if tokens and not all(t == "*" for t in tokens):
            out.append(" ".join(tokens))
    return out, ex.truncated


def convert(raw_dir, out_dir, limit):
    files = sorted(raw_dir.glob("*.tff"))
    macros = load_macros(files)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = 0
    for path in files:
        lines = path.read_text(encoding="utf-8", errors="replace").splitlines()
        strategy = None
        for line in lines:
            m = CLASS_LINE.match(line)
            if m:
                strategy = m.group(1)
                break
        if strategy is None:
            continue  # macro file
        patterns = []
        for n, line in enumerate(lines, 1):
            line = line.strip()
            if not line or line.startswith("#") or MACRO_DEF.match(line):
                continue
            try:
                variants, truncated = expand(line, macros, limit)
            except ValueError as e:
                print(f"{path}:{n}: skipped ({e})", file=sys.stderr)
                continue
            if truncated:
                print(f"{path}:{n}: truncated to {limit} variants", file=sys.stderr)
            patterns.extend(variants)
        unique = list(dict.fromkeys(patterns))
        (out_dir / f"{strategy}.patterns").write_text(
            f"# converted from {path.name}\n" + "".join(p + "\n" for p in unique), encoding="utf-8"
        )
        written += len(unique)
    return written


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("raw_dir", type=Path)
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--max-variants", type=int, default=500)
    args = ap.parse_args()
    if not args.raw_dir.is_dir():
        ap.error(f"not a directory: {args.raw_dir}")
    n = convert(args.raw_dir, args.out_dir, args.max_variants)
    print(f"wrote {n} patterns to {args.out_dir}", file=sys.stderr)


if __name__ == "__main__":
    main()
