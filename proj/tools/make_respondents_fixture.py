#!/usr/bin/env python3
"""Generate synthetic expert judgment matrices for the bundled criteria.

Each respondent rates how strongly criterion i influences criterion j on the
five-level DEMATEL scale. A shared latent influence level per pair is drawn
once, then every respondent perturbs it by at most one level.
"""
import argparse
import json

import numpy as np

LABELS = ["No influence", "Very low", "Low", "High", "Very high"]
CRITERIA = ["SCED", "RELY", "DATA", "SIZE", "CPLX", "TIME", "STOR",
            "ACAP", "AEXP", "LTEX", "PCAP", "VEXP", "TOOL"]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=13)
    parser.add_argument("--respondents", type=int, default=5)
    parser.add_argument("--out", default="data/respondents.json")
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    n = len(CRITERIA)
    latent = rng.choice(len(LABELS), size=(n, n), p=[0.2, 0.25, 0.25, 0.2, 0.1])
    matrices = []
    for _ in range(args.respondents):
        noise = rng.choice([-1, 0, 1], size=(n, n), p=[0.2, 0.6, 0.2])
        levels = np.clip(latent + noise, 0, len(LABELS) - 1)
        m = [["-" if i == j else LABELS[levels[i, j]] for j in range(n)] for i in range(n)]
        matrices.append(m)

    with open(args.out, "w", encoding="utf-8") as fh:
        # One matrix row per line keeps the file reviewable.
        fh.write('{\n "criteria": ' + json.dumps(CRITERIA) + ',\n "respondents": [\n')
        blocks = []
        for m in matrices:
            rows = ",\n".join("   " + json.dumps(r) for r in m)
            blocks.append("  [\n" + rows + "\n  ]")
        fh.write(",\n".join(blocks) + "\n ]\n}\n")


if __name__ == "__main__":
    main()
