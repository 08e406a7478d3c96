"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Kernel timings call both modules directly.  The end-to-end timing diffs
every corpus pom against a mutated copy; it runs in a child process per
backend because the backend is chosen once, at import.
"""
import argparse
import os
import random
import subprocess
import sys
import timeit
from pathlib import Path

from builddiff import _pykernels

try:
    from builddiff import _ckernels
except ImportError:
    _ckernels = None

ROOT = Path(__file__).resolve().parent.parent

END_TO_END = """
import random, sys, time
sys.path.insert(0, {tests!r})
from builddiff import kernels
from builddiff.classifier import diff_documents
from pomgen import corpus_files, load_tree_root, mutate, render
rng = random.Random(0)
pairs = []
for path in corpus_files():
    root = load_tree_root(path)
    pairs.append((render(root), render(mutate(root, rng, steps=4))))
start = time.perf_counter()
for old, new in pairs:
    diff_documents(old, new)
print(kernels.BACKEND, time.perf_counter() - start)
"""


def cases(rng):
    words = ["".join(rng.choice("abcdefghij.-") for _ in range(rng.randint(8, 40)))
             for _ in range(200)]
    x = [rng.randint(0, 50) for _ in range(20000)]
    y = [rng.randint(0, 60) for _ in range(20000)]
    scores = sorted(rng.randint(2, 120) for _ in range(60))
    return {
        "levenshtein 40x40 words": lambda m: [m.levenshtein(a, b) for a in words[:40]
                                                for b in words[40:80]],
        "dominance 20000x20000": lambda m: m.dominance_counts(x, y),
        "rank-sum distribution n=60 k=30": lambda m: m.rank_sum_distribution(scores, 30),
    }


def end_to_end():
    script = END_TO_END.format(tests=str(ROOT / "tests"))
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("BUILDDIFF_PURE_PYTHON", None)
        if pure:
            env["BUILDDIFF_PURE_PYTHON"] = "1"
        out = subprocess.run([sys.executable, "-c", script], env=env, check=True,
                             capture_output=True, text=True).stdout.split()
        print(f"{'diff corpus pairs':<34}{out[0]:>10}{float(out[1]) * 1000:>12.1f} ms")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'case':<34}{'backend':>10}{'best':>15}")
    for name, fn in cases(random.Random(1)).items():
        best = {}
        for label, mod in backends:
            best[label] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
            print(f"{name:<34}{label:>10}{best[label] * 1000:>12.1f} ms")
        if len(best) == 2:
            print(f"{'':<34}{'speedup':>10}{best['python'] / best['cython']:>13.1f}x")
    end_to_end()


if __name__ == "__main__":
    main()
