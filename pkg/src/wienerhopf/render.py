"""Domain-coloring renderer: phase to hue, magnitude to lightness.

Per pixel w = f(z): with theta = arg w, the hue vector is
(|cos theta|, max(sin theta, 0), max(-sin theta, 0)) for (R, B, G) - both
real signs render red, positive imaginary blue, negative imaginary green.
The magnitude value v = |w| / (1 + |w|) darkens small |w| to black and
washes large |w| toward white:

    channel = hue * 2v                     for v <= 1/2
    channel = hue + (1 - hue) * (2v - 1)   for v >  1/2

quantized to round(255 * channel).  Pixels whose evaluation fails render
mid-gray (128, 128, 128).  Branch cuts show up as hue discontinuities.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import GridError


@dataclass(frozen=True)
class ImageBuffer:
    """Row-major 8-bit RGB pixels with the complex window they cover.

    Pixel (0, 0) is the top-left and maps to re_min + i * im_max; the
    mapping of pixel centers is linear along both axes.
    """

    width: int
    height: int
    pixels: np.ndarray = field(repr=False)
    window: tuple

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise GridError("image dimensions must be positive")
        px = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if px.shape != (self.height, self.width, 3):
            raise GridError(
                f"expected pixel shape {(self.height, self.width, 3)}, "
                f"got {px.shape}"
            )
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    if n == 1:
        return np.array([lo])
    return lo + np.arange(n) * ((hi - lo) / (n - 1))


def domain_color(f, window, width: int, height: int, threads: int = 1) -> ImageBuffer:
    """Render f over window = (re_min, re_max, im_min, im_max).

    f maps a complex array to complex values; non-finite results are
    painted gray.  The pixel loop is data-parallel over row blocks and
    the output is byte-identical for any thread count.
    """
    re_min, re_max, im_min, im_max = (float(v) for v in window)
    re = _axis(re_min, re_max, width)
    im = _axis(im_max, im_min, height)  # top row first
    pixels = np.empty((height, width, 3), dtype=np.uint8)

    def paint(rows: slice) -> None:
        z = re[None, :] + 1j * im[rows, None]
        with np.errstate(all="ignore"):
            w = np.asarray(f(z), dtype=complex)
        ok = np.isfinite(w.real) & np.isfinite(w.imag)
        w = np.where(ok, w, 0.0)
        theta = np.angle(w)
        # (R, G, B) hue: red |cos|, green max(-sin, 0), blue max(sin, 0)
        hue = np.stack([
            np.abs(np.cos(theta)),
            np.maximum(-np.sin(theta), 0.0),
            np.maximum(np.sin(theta), 0.0),
        ], axis=-1)
        mag = np.abs(w)
        v = (mag / (1.0 + mag))[..., None]
        low = hue * (2.0 * v)
        high = hue + (1.0 - hue) * (2.0 * v - 1.0)
        rgb = np.where(v <= 0.5, low, high)
        block = np.clip(np.round(255.0 * rgb), 0, 255).astype(np.uint8)
        block[~ok] = 128
        pixels[rows] = block

    threads = max(1, int(threads))
    if threads == 1 or height < 2 * threads:
        paint(slice(0, height))
    else:
        step = (height + threads - 1) // threads
        blocks = [slice(lo, min(lo + step, height)) for lo in range(0, height, step)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(paint, blocks))

    return ImageBuffer(width=width, height=height, pixels=pixels,
                       window=(re_min, re_max, im_min, im_max))


def write_ppm(img: ImageBuffer, path) -> None:
    """Write binary PPM ('P6'): ASCII header, then raw RGB rows."""
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img.pixels.tobytes())


def hue_vector(w) -> np.ndarray:
    """The renderer's (R, G, B) hue triple before lightness, used by the
    branch-cut discontinuity checks."""
    theta = np.angle(np.asarray(w, dtype=complex))
    return np.stack([
        np.abs(np.cos(theta)),
        np.maximum(-np.sin(theta), 0.0),
        np.maximum(np.sin(theta), 0.0),
    ], axis=-1)
