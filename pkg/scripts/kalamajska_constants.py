"""Empirical pointwise constants |u'| / sqrt(M u'' M u) for several bumps."""

from dataclasses import dataclass
from fractions import Fraction

from riexact.harness import cmd_kalamajska


@dataclass
class Config:
    alphas: tuple = (1, Fraction(3, 2), 2, 4, 7)
    samples: int = 64


def main(cfg: Config = Config()) -> None:
    for row in cmd_kalamajska(cfg.alphas, cfg.samples)["rows"]:
        print(f"alpha={row['alpha']:>5}  C<={float(Fraction(row['constant']['hi'])):.6f}")


if __name__ == "__main__":
    main()
