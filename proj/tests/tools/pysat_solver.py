#!/usr/bin/env python3
"""Reads a DIMACS file and answers in SAT-competition format using pysat."""
import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main() -> int:
    formula = CNF(from_file=sys.argv[1])
    with Solver(name="cadical153", bootstrap_with=formula.clauses) as solver:
        if solver.solve():
            print("s SATISFIABLE")
            model = solver.get_model() or []
            print("v " + " ".join(str(l) for l in model) + " 0")
            return 10
        print("s UNSATISFIABLE")
        return 20


if __name__ == "__main__":
    sys.exit(main())
