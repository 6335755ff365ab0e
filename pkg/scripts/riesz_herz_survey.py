"""Extremes of (Mf)*(t) / f**(t) over several seeds of the random step suite."""

from dataclasses import dataclass
from fractions import Fraction

from riexact.harness import cmd_property_suite


@dataclass
class Config:
    seeds: tuple = (1, 2, 3)
    count: int = 50


def main(cfg: Config = Config()) -> None:
    lows, highs = [], []
    for seed in cfg.seeds:
        rep = cmd_property_suite(seed, cfg.count)["riesz_herz_ratio"]
        lo, hi = Fraction(rep["min"]), Fraction(rep["max"])
        lows.append(lo)
        highs.append(hi)
        print(f"seed {seed}: min {float(lo):.6f} max {float(hi):.6f}")
    print(f"overall: min {float(min(lows)):.6f} max {float(max(highs)):.6f}")


if __name__ == "__main__":
    main()
