"""Moments of e(k/m) + e(a_m k/m), a_m = round(phi m), against the torus limit e(x) + e(y)."""
import argparse
from dataclasses import dataclass
from pathlib import Path

from hofa.moments import (all_simple_specs, convergence_report, example1_function, example1_limit,
                          gap_trend_slope, report_to_csv)


@dataclass(frozen=True)
class Config:
    ms: tuple = (250, 500, 1000, 2000)
    samples: int = 10 ** 6
    seed: int = 0
    sampled: bool = False
    workers: int = 1
    out: Path = Path("results/example1.csv")


def run(cfg: Config):
    specs = {s.label(): s for s in all_simple_specs(2)}
    rows = convergence_report(example1_function, cfg.ms, specs, example1_limit(), cfg.samples, cfg.seed,
                              sampled=cfg.sampled or None, workers=cfg.workers)
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    cfg.out.write_text(report_to_csv(rows))
    for m in cfg.ms:
        print(f"m={m:5d}  max gap = {max(r.gap for r in rows if r.m == m):.3e}")
    print(f"gap trend slope = {gap_trend_slope(rows):.3e}; wrote {cfg.out}")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--m", type=int, nargs="+", default=list(Config.ms))
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--sampled", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=Config.out)
    a = p.parse_args()
    run(Config(tuple(a.m), a.samples, a.seed, a.sampled, a.workers, a.out))


if __name__ == "__main__":
    main()
