"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--no-end-to-end]

Micro-benchmarks call each backend module directly.  The end-to-end
timing runs deli LMH in a subprocess per backend, since the backend is
chosen once at import.
"""

import argparse
import os
import subprocess
import sys
import timeit

from anglican import _kernels as py
from anglican.checkpoints import ResultCP
from anglican.runtime import initial_state

try:
    from anglican import _ckernels as cy
except ImportError:
    cy = None

HERE = os.path.dirname(os.path.abspath(__file__))
DELI = os.path.join(os.path.dirname(HERE), "programs", "deli.anglican")


def _chain(n):
    done = ResultCP(initial_state)
    step = lambda: done
    for _ in range(n):
        step = (lambda nxt: lambda: nxt)(step)
    return step


def cases(k):
    gen = k.Xoshiro256(1)
    ids = ["a", "b", "a", "a", "c", "b"] * 1000
    weights = [1.0 / 1000] * 1000
    lws = [-0.001 * i for i in range(1000)]
    chain = _chain(100_000)

    def cursor():
        c = k.AddressCursor(16)
        for i in ids:
            c.next(i)
    return {
        "rng 1e5 uniforms": lambda: [gen.random() for _ in range(100_000)],
        "trampoline 1e5 thunks": lambda: k.trampoline(chain, None),
        "cursor 6e3 addresses": cursor,
        "log_sum_exp 1e3 x 100": lambda: [k.log_sum_exp(lws) for _ in range(100)],
        "resample 1e3 x 100": lambda: [k.systematic_resample(weights, 0.3) for _ in range(100)],
    }


def micro(repeat):
    backends = [py] + ([cy] if cy is not None else [])
    table = {k.NAME: {name: min(timeit.repeat(fn, number=1, repeat=repeat))
                      for name, fn in cases(k).items()} for k in backends}
    names = list(table[py.NAME])
    print(f"{'kernel':26s}" + "".join(f"{b:>12s}" for b in table) + ("     speedup" if cy else ""))
    for name in names:
        row = [table[b][name] for b in table]
        line = f"{name:26s}" + "".join(f"{t * 1e3:10.2f}ms" for t in row)
        if cy is not None:
            line += f"{row[0] / row[1]:11.1f}x"
        print(line)


END_TO_END = """
import itertools, time
from anglican import BACKEND, load_program, infer
q = load_program(open({path!r}).read()).query()
t = time.perf_counter()
for _ in itertools.islice(infer("lmh", q, seed=7), 10000):
    pass
print(BACKEND, time.perf_counter() - t)
"""


def end_to_end():
    print("\ndeli lmh, 10000 steps")
    for pure in ("1", ""):
        env = dict(os.environ, ANGLICAN_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", END_TO_END.format(path=DELI)], env=env,
                             capture_output=True, text=True, check=True).stdout.split()
        print(f"  {out[0]:8s} {float(out[1]):8.2f}s")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--no-end-to-end", action="store_true")
    args = parser.parse_args()
    if cy is None:
        print("compiled kernels not built; timing the fallback only")
    micro(args.repeat)
    if not args.no_end_to_end:
        end_to_end()


if __name__ == "__main__":
    main()
