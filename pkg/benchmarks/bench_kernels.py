"""Time the compiled and pure-Python kernels on identical inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import random
import timeit

from shiftspec import kernels


def workloads(rng: random.Random) -> dict:
    n = 20_000
    images = [rng.randrange(n) for _ in range(n)]
    values = sorted(rng.sample(range(10**7), 100_000))
    positions = [rng.randrange(14) for _ in range(6)]
    return {
        "functional_graph(20k nodes)": lambda mod: mod.functional_graph(images),
        "refine_residue(100k terms, m=7)": lambda mod: mod.refine_residue(values, 7),
        "first_tracer(2^14 words)": lambda mod: mod.first_tracer(14, 2, positions + [0], [1] * 7),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled extension not built; timing the Python fallback only")
    print(f"{'kernel':<34}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    for label, job in workloads(random.Random(args.seed)).items():
        results = {name: job(mod) for name, mod in backends.items()}
        assert len({repr(r) for r in results.values()}) == 1, f"backends disagree on {label}"
        times = {
            name: min(timeit.repeat(lambda: job(mod), number=1, repeat=args.repeat))
            for name, mod in backends.items()
        }
        speedup = times["python"] / times["cython"] if "cython" in times else 1.0
        print(f"{label:<34}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times.values()) + f"{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
