"""Compare the compiled kernel core against the pure-numpy fallback.

Run from the repo root:

    python3 benchmarks/bench_backends.py

The engine picks the backend at import time, so each backend runs in a
subprocess with TEXWARP_BACKEND set accordingly.
"""

import json
import os
import subprocess
import sys

WORKLOADS = """
import json, time
import numpy as np
import texwarp
from texwarp import codec, ops
from texwarp import reform as vstr

rng = np.random.default_rng(0)
results = {"backend": texwarp.BACKEND_NAME}

def timed(name, fn, repeat=3):
    fn()  # warm up
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    results[name] = min(times)

x64 = rng.standard_normal((64, 256, 256)).astype(np.float32)
k64 = (0.05 * rng.standard_normal((64, 64, 3, 3))).astype(np.float32)
timed("conv2d 64ch 256px 3x3", lambda: ops.conv2d(x64, k64, padding=1, pad_mode="reflect"))

xt = rng.standard_normal((128, 64, 64)).astype(np.float32)
kt = (0.05 * rng.standard_normal((128, 64, 3, 3))).astype(np.float32)
timed("conv_transpose2d 128f 64px", lambda: ops.conv_transpose2d(xt, kt))

xp = rng.standard_normal((128, 512, 512)).astype(np.float32)
timed("max_pool2d 128ch 512px", lambda: ops.max_pool2d(xp))
timed("upsample_nearest x2 128ch", lambda: ops.upsample_nearest(xp[:, :256, :256], 2))

feat = rng.standard_normal((256, 64, 64)).astype(np.float32)
timed("extract_patches p=3 256ch", lambda: vstr.extract_patches(feat, 3, 1))

bank = vstr.extract_patches(feat, 3, 1)
tgt = rng.standard_normal((256, 64, 64)).astype(np.float32)
timed("sgtw match+reassemble 64px", lambda: vstr.sgtw_reassemble(
    bank, vstr.sgtw_match(bank, tgt)))

store = codec.random_weight_store(0)
img = rng.standard_normal((3, 256, 256)).astype(np.float32) * 0.3
timed("encode level 5 256px", lambda: codec.encode(img, 5, store), repeat=2)

print(json.dumps(results))
"""


def run(backend: str) -> dict:
    env = dict(os.environ, TEXWARP_BACKEND=backend)
    out = subprocess.run(
        [sys.executable, "-c", WORKLOADS], env=env, capture_output=True, text=True
    )
    if out.returncode != 0:
        raise RuntimeError(f"{backend} run failed:\n{out.stderr}")
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    native = run("native")
    fallback = run("python")
    names = [k for k in native if k != "backend"]
    width = max(len(n) for n in names)
    print(f"{'workload':<{width}}  {'native':>9}  {'python':>9}  speedup")
    for name in names:
        a, b = native[name], fallback[name]
        print(f"{name:<{width}}  {a * 1e3:8.1f}ms  {b * 1e3:8.1f}ms  {b / a:6.2f}x")


if __name__ == "__main__":
    main()
