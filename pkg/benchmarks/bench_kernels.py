"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

The NCC case matches one tracking step with the default settings: a 33x33
marker template searched over +/-48 px. The polyline case draws a 3 s trace
at 30 fps across a 320x240 panel.
"""
import argparse
import timeit

import numpy as np

from scopevis import _kernels_py

try:
    from scopevis import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None


def cases():
    rng = np.random.default_rng(0)
    image = rng.integers(0, 256, (240, 320), dtype=np.uint8)
    templ = image[100:133, 140:173].copy()
    xs = np.linspace(0, 319, 90).astype(np.int64)
    ys = (120 + 80 * np.sin(np.linspace(0, 6, 90))).astype(np.int64)
    canvas = np.zeros((240, 320, 3), np.uint8)
    return {
        "ncc_map 33x33 over 97x97": lambda k: k.ncc_map(image, templ, 92, 52, 97, 97),
        "ncc_map 33x33 full frame": lambda k: k.ncc_map(image, templ, 0, 0, 288, 208),
        "draw_polyline 90 pts w=2": lambda k: k.draw_polyline(canvas, xs, ys, (255, 0, 0), 2),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("python", _kernels_py)] + ([("cython", _kernels_cy)] if _kernels_cy else [])
    print(f"{'case':<28}" + "".join(f"{name:>14}" for name, _ in backends) + ("   speedup" if len(backends) > 1 else ""))
    for label, fn in cases().items():
        times = []
        for _, mod in backends:
            number = 3 if mod is _kernels_py and "full" in label else 20
            t = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
            times.append(t)
        row = f"{label:<28}" + "".join(f"{t * 1e3:>11.3f} ms" for t in times)
        if len(times) > 1:
            row += f"   {times[0] / times[1]:>6.1f}x"
        print(row)
    if _kernels_cy is None:
        print("compiled extension not available; only the fallback was timed")


if __name__ == "__main__":
    main()
