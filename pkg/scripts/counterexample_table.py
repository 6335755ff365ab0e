"""Mount-Filip table at t = 2 over a range of n, as CSV on stdout."""

from dataclasses import dataclass

from riexact.cli import to_csv
from riexact.harness import cmd_counterexample


@dataclass
class Config:
    n_list: tuple = (4, 8, 10, 16, 32, 64, 100, 128, 256)


def main(cfg: Config = Config()) -> None:
    print(to_csv(cmd_counterexample(cfg.n_list)), end="")


if __name__ == "__main__":
    main()
