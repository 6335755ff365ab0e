"""Ratio growth of the refined witnesses for power-law profiles g = h ~ t^(-e).

Prints ratio(n_last) / ratio(n_first) per exponent; the built-in profile of
the harness is the e = 1/2 row.
"""

from dataclasses import dataclass
from fractions import Fraction

from riexact.exactfun import StepFunction
from riexact.harness import cmd_optimality


@dataclass
class Config:
    exponents: tuple = (0.0, 0.25, 0.5, 0.75, 0.95)
    cells: int = 64
    n_list: tuple = (4, 8, 16, 32, 64)
    pprime: int = 1
    tol: Fraction = Fraction(1, 10 ** 6)


def profile(e: float, cells: int) -> StepFunction:
    vals = [Fraction(round(1000 * (cells / k) ** e), 1000) for k in range(1, cells + 1)]
    return StepFunction.from_values([Fraction(k, cells) for k in range(cells + 1)], vals)


def main(cfg: Config = Config()) -> None:
    for e in cfg.exponents:
        g = profile(e, cfg.cells)
        rep = cmd_optimality(pprime=cfg.pprime, n_list=cfg.n_list, g=g, h=g, tol=cfg.tol)
        ratios = [float(Fraction(r["ratio"]["lo"])) for r in rep["rows"]]
        growth = float(Fraction(rep["total_growth"]["lo"]))
        print(f"e={e:<5} ratios={['%.5f' % x for x in ratios]} growth>={growth:.5f}")


if __name__ == "__main__":
    main()
