"""Solve a model.lp written by `meaf export-milp` with HiGHS and print the optimum.

    pip install highspy
    python3 docs/milp_check.py out/model.lp
"""
import sys

import highspy


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 2
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    if h.readModel(sys.argv[1]) != highspy.HighsStatus.kOk:
        print(f"could not read {sys.argv[1]}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        print(h.modelStatusToString(status))
        return 3
    print(round(h.getInfo().objective_function_value))
    return 0


if __name__ == "__main__":
    sys.exit(main())
