"""Dilation sweep of the GN ratio at the derived target and at a shifted P'."""

import json
from dataclasses import dataclass
from fractions import Fraction

from riexact.harness import cmd_gn_check


@dataclass
class Config:
    Q: str = "2"
    q: str = "2"
    R: str = "6"
    r: str = "2"
    witness: str = "lan:1"
    dilations: tuple = (Fraction(1, 8), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(8))
    Pprime: str = "2"


def main(cfg: Config = Config()) -> None:
    rep = cmd_gn_check(cfg.Q, cfg.q, cfg.R, cfg.r, cfg.witness, cfg.dilations, Pprime=cfg.Pprime)
    print("lambda  ratio(P)            ratio(P')")
    for row, drow in zip(rep["rows"], rep["drift"]["rows"]):
        r, d = row["ratio"], drow["ratio"]
        print(f"{row['lambda']:>6}  {float(Fraction(r['lo'])):.12f}  {float(Fraction(d['lo'])):.12f}")
    print(json.dumps({"invariance": rep["checks"], "drift_exact": rep["drift"].get("drift_exact"),
                      "drift_exponent": rep["drift"]["exponent"]}, sort_keys=True))


if __name__ == "__main__":
    main()
