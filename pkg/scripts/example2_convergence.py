"""Moments of k -> e(k^2 t_m / m^2), t_m = floor(alpha m), against the Heisenberg nilmanifold limit."""
import argparse
from dataclasses import dataclass
from pathlib import Path

from hofa.moments import (MomentSpec, convergence_report, example2_function, example2_limit,
                          gap_trend_slope, report_to_csv)


@dataclass(frozen=True)
class Config:
    ms: tuple = (8, 16, 32, 64)
    samples: int = 10 ** 6
    seed: int = 0
    workers: int = 1
    out: Path = Path("results/example2.csv")


def run(cfg: Config):
    specs = {"u2": MomentSpec.cube(2), "u3": MomentSpec.cube(3), "triangle": MomentSpec.triangle()}
    rows = convergence_report(example2_function, cfg.ms, specs, example2_limit(), cfg.samples, cfg.seed,
                              workers=cfg.workers)
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    cfg.out.write_text(report_to_csv(rows))
    for r in rows:
        print(f"m={r.m:4d} {r.spec_id:9s} value={r.value.real:+.5f} limit={r.limit.real:+.5f} "
              f"(+-{r.limit_stderr:.1e}) gap={r.gap:.4f}")
    for sid in specs:
        print(f"{sid}: gap trend slope {gap_trend_slope(rows, sid):.3e}")
    print(f"wrote {cfg.out}")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--m", type=int, nargs="+", default=list(Config.ms))
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path, default=Config.out)
    a = p.parse_args()
    run(Config(tuple(a.m), a.samples, a.seed, a.workers, a.out))


if __name__ == "__main__":
    main()
