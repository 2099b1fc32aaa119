"""Compare the full fuzzer configuration against the baseline.

Runs matched campaigns over a family of generated programs and prints a
per-seed table of unique error discoveries. The full configuration adds
value-pool mutations and state-novelty retention on top of the baseline
branch-coverage loop; everything else (budgets, energy, trim) is shared.

Usage:
    python scripts/ablation.py
    python scripts/ablation.py --programs 20 --seeds 5 --budget 20000
"""

from __future__ import annotations

import argparse
import time

from reachfuzz.fuzzer import baseline_config, finalize, fuzz_loop, init_campaign
from reachfuzz.gen import generate_program


def campaign_errors(program, config, seed, budget):
    c = init_campaign(program, config, seed=seed)
    fuzz_loop(c, max_execs=budget)
    return set(finalize(c).errors)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--programs", type=int, default=20,
                    help="family size (generator seeds 0..N-1)")
    ap.add_argument("--seeds", type=int, default=5,
                    help="fuzzer seeds per configuration")
    ap.add_argument("--budget", type=int, default=20_000,
                    help="executions per campaign")
    ap.add_argument("--domain", type=int, default=8)
    ap.add_argument("--alphabet", type=int, default=10)
    args = ap.parse_args()

    programs = [
        generate_program(domain=args.domain, alphabet=args.alphabet, seed=g)
        for g in range(args.programs)
    ]

    t0 = time.perf_counter()
    full_rows = []
    base_rows = []
    for fseed in range(args.seeds):
        full_total = 0
        base_total = 0
        for program in programs:
            full_total += len(campaign_errors(program, None, fseed, args.budget))
            base_total += len(
                campaign_errors(program, baseline_config(), fseed, args.budget))
        full_rows.append(full_total)
        base_rows.append(base_total)
        print(f"seed {fseed}: full={full_total} baseline={base_total} "
              f"margin={full_total - base_total:+d}", flush=True)

    elapsed = time.perf_counter() - t0
    print()
    print(f"unique (program, error-id) discoveries over {args.programs} "
          f"programs, budget {args.budget} execs:")
    print()
    print("seed  full  baseline  margin")
    print("----  ----  --------  ------")
    for i, (f, b) in enumerate(zip(full_rows, base_rows)):
        print(f"{i:>4}  {f:>4}  {b:>8}  {f - b:>+6}")
    print("----  ----  --------  ------")
    print(f" sum  {sum(full_rows):>4}  {sum(base_rows):>8}  "
          f"{sum(full_rows) - sum(base_rows):>+6}")
    print()
    print(f"elapsed: {elapsed:.1f}s")
    return 0 if sum(full_rows) > sum(base_rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
