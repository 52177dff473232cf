#!/usr/bin/env python3
"""Solve an LP-format binary program with HiGHS and write "name value" lines.

usage: highs_solve.py MODEL.lp SOLUTION.sol [--time-limit SECONDS]
"""
import argparse
import sys

import highspy


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("model")
    ap.add_argument("solution")
    ap.add_argument("--time-limit", type=float, default=None)
    args = ap.parse_args()

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", 1)
    if args.time_limit is not None:
        h.setOptionValue("time_limit", args.time_limit)
    if h.readModel(args.model) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.model}", file=sys.stderr)
        return 2
    h.run()
    status = h.getModelStatus()
    lp = h.getLp()
    with open(args.solution, "w") as out:
        out.write(f"# status {h.modelStatusToString(status)}\n")
        if status == highspy.HighsModelStatus.kModelEmpty:
            return 0
        if status != highspy.HighsModelStatus.kOptimal:
            print(f"solver status {h.modelStatusToString(status)}", file=sys.stderr)
            return 3
        values = h.getSolution().col_value
        for name, value in zip(lp.col_names_, values):
            out.write(f"{name} {value:.6g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
