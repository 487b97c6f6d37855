#!/usr/bin/env python3
# Copyright (c) 2026, The TinyPy Curriculum Authors
# SPDX-License-Identifier: Apache-2.0
#
# Re-executes the code of every snippet in an annotated stream with CPython and
# writes the stream back with CPython's output. Used once to produce
# tests/data/interp_golden.txt:
#
#   build/tools/tpc generate --count 10000 --seed 2024 --out /tmp/golden
#   tools/make_golden.py /tmp/golden/snippets.txt tests/data/interp_golden.txt

import contextlib
import io
import sys

MARKER = "# output\n"


def sources(stream):
    for block in stream.split("\n\n"):
        if not block:
            continue
        code, sep, _ = block.partition(MARKER)
        if not sep:
            raise SystemExit("snippet without output marker")
        yield code


def run(code):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        exec(compile(code, "<snippet>", "exec"), {})
    return buf.getvalue().splitlines()


def main():
    if len(sys.argv) != 3:
        raise SystemExit("usage: make_golden.py IN OUT")
    with open(sys.argv[1], encoding="ascii") as f:
        stream = f.read()
    out = []
    for code in sources(stream):
        lines = run(code)
        out.append(code + MARKER + "".join("# " + v + "\n" for v in lines) + "\n")
    with open(sys.argv[2], "w", encoding="ascii", newline="\n") as f:
        f.write("".join(out))
    print(f"{len(out)} snippets", file=sys.stderr)


if __name__ == "__main__":
    main()
