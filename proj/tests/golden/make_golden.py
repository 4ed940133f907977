#!/usr/bin/env python3
"""Writes the golden files from a straightforward Python model of the
codec, independent of the C++ implementation. Run from this directory."""

import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.join(HERE, "..", "fixtures"))
import make_fixtures  # noqa: E402


def encode(w):
    n = w.bit_length()
    bits = "0" * n + bin(w)[2:] + "1"
    ones = [i + 1 for i, b in enumerate(bits) if b == "1"]
    zeros = [i + 1 for i, b in enumerate(bits) if b == "0"][::-1]
    pb = ones + zeros
    size = len(pb)
    pi = [0] * size
    for i in range(n):
        a, b = pb[i], pb[size - 1 - i]
        pi[a - 1], pi[b - 1] = b, a
    mid = pb[n]
    pi[mid - 1] = mid
    return pi


def dump_sip(pi):
    return "sip n*=%d\n" % len(pi) + "".join("map %d %d\n" % (i + 1, v) for i, v in enumerate(pi))


def dump_1dm(pi):
    n = len(pi)
    out = "1dm length=%d\n" % (n * n)
    for i, v in enumerate(pi):
        out += "mark %d label %d\n" % (i * n + v, v)
    return out


def dump_2dm(pi):
    cells = sorted((i + 1, v) for i, v in enumerate(pi))
    return "2dm size=%d\n" % len(pi) + "".join("cell %d %d\n" % c for c in cells)


def dump_rpg(pi):
    n = len(pi)
    out = "rpg nodes=%d\n" % (n + 2)
    for i in range(n + 1, 0, -1):
        out += "path u%d u%d\n" % (i, i - 1)
    edges = sorted((i, v if v > i else n + 1) for i, v in ((k + 1, pi[k]) for k in range(n)))
    for a, b in edges:
        out += "back u%d u%d\n" % (a, b)
    return out


def paragraph_tj(pi, delta):
    n = len(pi)
    marks = {i * n + v for i, v in enumerate(pi)}
    text = " ".join(make_fixtures.words(50))
    parts, run, gap = [], "", 0
    for ch in text:
        run += ch
        if ch == " ":
            gap += 1
            if gap in marks:
                parts.append("(%s)" % run)
                parts.append("-%d" % delta)
                run = ""
    if run:
        parts.append("(%s)" % run)
    return "[" + " ".join(parts) + "] TJ\n"


def write(name, text):
    with open(os.path.join(HERE, name), "w", newline="\n") as fh:
        fh.write(text)


def main():
    pi4 = encode(4)
    assert pi4 == [4, 7, 6, 1, 5, 3, 2]
    write("sip_w4.txt", dump_sip(pi4))
    write("onedm_w4.txt", dump_1dm(pi4))
    write("twodm_w4.txt", dump_2dm(pi4))
    write("rpg_w4.txt", dump_rpg(pi4))
    write("rpg_45312.txt", dump_rpg([4, 5, 3, 1, 2]))
    write("paragraph_50_w4_tj.txt", paragraph_tj(pi4, 60))
    write("marker_ops.txt", "q\n1 1 1 rg\n304.25 735.25 0.5 0.5 re\nf\nQ\n")
    write("hello_world_objects.txt",
          "pdf 1.4 objects=7\n"
          "1 0 dictionary /Type /Outlines /Pages\n"
          "2 0 dictionary /Type /Count\n"
          "3 0 dictionary /Type /Kids /Count\n"
          "4 0 dictionary /Type /Parent /MediaBox /Contents /Resources\n"
          "5 0 stream /Length\n"
          "6 0 array\n"
          "7 0 dictionary /Type /Subtype /Name /BaseFont /Encoding\n"
          "trailer /Size /Root\n")


if __name__ == "__main__":
    main()
