#!/usr/bin/env python3
"""Generate data/nasa93.arff: a synthetic stand-in with the PROMISE NASA-93 layout.

The attribute list, nominal domains and row count follow the public file.
Ratings are sampled per attribute, size is log-normal, and effort comes from
the intermediate COCOMO-81 equation with multiplicative noise. The output is
fully determined by --seed.
"""
import argparse

import numpy as np

LEVELS = ["vl", "l", "n", "h", "vh", "xh"]

# Intermediate COCOMO-81 effort multipliers, indexed by LEVELS position.
MULTIPLIERS = {
    "rely": [0.75, 0.88, 1.00, 1.15, 1.40, None],
    "data": [None, 0.94, 1.00, 1.08, 1.16, None],
    "cplx": [0.70, 0.85, 1.00, 1.15, 1.30, 1.65],
    "time": [None, None, 1.00, 1.11, 1.30, 1.66],
    "stor": [None, None, 1.00, 1.06, 1.21, 1.56],
    "virt": [None, 0.87, 1.00, 1.15, 1.30, None],
    "turn": [None, 0.87, 1.00, 1.07, 1.15, None],
    "acap": [1.46, 1.19, 1.00, 0.86, 0.71, None],
    "aexp": [1.29, 1.13, 1.00, 0.91, 0.82, None],
    "pcap": [1.42, 1.17, 1.00, 0.86, 0.70, None],
    "vexp": [1.21, 1.10, 1.00, 0.90, None, None],
    "lexp": [1.14, 1.07, 1.00, 0.95, None, None],
    "modp": [1.24, 1.10, 1.00, 0.91, 0.82, None],
    "tool": [1.24, 1.10, 1.00, 0.91, 0.83, None],
    "sced": [1.23, 1.08, 1.00, 1.04, 1.10, None],
}

MODES = {"organic": (3.2, 1.05), "semidetached": (3.0, 1.12), "embedded": (2.8, 1.20)}
PROJECTS = ["de", "erb", "gal", "X", "hst", "slp", "spl", "Y"]
CATEGORIES = ["Avionics", "application_ground", "avionicsmonitoring", "batchdataprocessing",
              "communications", "data_capture", "launchprocessing", "missionplanning",
              "monitor_control", "operatingsystem", "realdataprocessing", "science",
              "simulation", "utility"]


def sample_level(rng, name):
    allowed = [i for i, m in enumerate(MULTIPLIERS[name]) if m is not None]
    # Mass concentrated around nominal/high, as in the public data.
    weights = np.array([1.0 / (1.0 + abs(i - 2.6)) ** 1.5 for i in allowed])
    return int(rng.choice(allowed, p=weights / weights.sum()))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=93)
    parser.add_argument("--rows", type=int, default=93)
    parser.add_argument("--out", default="data/nasa93.arff")
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    lines = [
        "% Synthetic stand-in for the PROMISE NASA-93 COCOMO-81 data set.",
        "% Same attributes and nominal domains; values generated by",
        f"% tools/make_nasa93_fixture.py --seed {args.seed}.",
        "@relation nasa93",
        "@attribute recordnumber numeric",
        "@attribute projectname {" + ",".join(PROJECTS) + "}",
        "@attribute cat2 {" + ",".join(CATEGORIES) + "}",
        "@attribute forg {f,g}",
        "@attribute center {1,2,3,4,5,6}",
        "@attribute year numeric",
        "@attribute mode {embedded,organic,semidetached}",
    ]
    for name in MULTIPLIERS:
        lines.append(f"@attribute {name} {{{','.join(LEVELS)}}}")
    lines += ["@attribute equivphyskloc numeric", "@attribute act_effort numeric", "", "@data"]

    for row in range(1, args.rows + 1):
        mode = str(rng.choice(list(MODES)))
        a, b = MODES[mode]
        kloc = float(np.round(np.exp(rng.normal(3.2, 1.1)), 1))
        kloc = max(kloc, 0.9)
        em = 1.0
        ratings = []
        for name in MULTIPLIERS:
            idx = sample_level(rng, name)
            em *= MULTIPLIERS[name][idx]
            ratings.append(LEVELS[idx])
        effort = a * kloc ** b * em * float(np.exp(rng.normal(0.0, 0.25)))
        fields = [str(row), str(rng.choice(PROJECTS)), str(rng.choice(CATEGORIES)),
                  str(rng.choice(["f", "g"])), str(int(rng.integers(1, 7))),
                  str(int(rng.integers(1971, 1988))), mode, *ratings,
                  f"{kloc:.1f}", f"{effort:.1f}"]
        lines.append(",".join(fields))

    with open(args.out, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
