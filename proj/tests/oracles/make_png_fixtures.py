#!/usr/bin/env python3
"""Writes the PNG fixtures under tests/fixtures/diagrams with Pillow."""
import os
import sys

from PIL import Image

OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures", "diagrams")


def gray(w, h, black):
    im = Image.new("L", (w, h), 255)
    for p in black:
        im.putpixel(p, 0)
    return im


def main():
    os.makedirs(OUT, exist_ok=True)
    # |Gt| = 3, |Rec| = 4, shared = {(0,0), (1,1)}
    gray(4, 4, [(0, 0), (1, 1), (2, 2)]).save(f"{OUT}/pair_gt.png")
    gray(4, 4, [(0, 0), (1, 1), (3, 0), (0, 3)]).save(f"{OUT}/pair_rec.png")
    gray(4, 4, [(1, 2), (2, 1), (3, 3)]).save(f"{OUT}/same.png")
    gray(5, 4, [(0, 0)]).save(f"{OUT}/wide.png")

    Image.new("L", (512, 512), 255).save(f"{OUT}/white512.png")

    bw = Image.new("1", (3, 2), 1)
    bw.putpixel((0, 0), 0)
    bw.putpixel((2, 1), 0)
    bw.save(f"{OUT}/onebit.png")

    rgb = Image.new("RGB", (2, 2), (255, 255, 255))
    rgb.putpixel((1, 0), (255, 0, 0))
    rgb.save(f"{OUT}/red_pixel.png")

    # Mid-gray steps around the threshold: 127 is black, 128 is not.
    g = Image.new("L", (2, 1))
    g.putpixel((0, 0), 127)
    g.putpixel((1, 0), 128)
    g.save(f"{OUT}/threshold_edge.png")

    rgba = Image.new("RGBA", (2, 1), (0, 0, 0, 0))
    rgba.putpixel((1, 0), (0, 0, 0, 255))
    rgba.save(f"{OUT}/transparent.png")
    return 0


if __name__ == "__main__":
    sys.exit(main())
