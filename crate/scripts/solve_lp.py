#!/usr/bin/env python3
"""Solve an LP-format model written by `mlst emit-ilp` with scipy's HiGHS.

Usage: solve_lp.py MODEL.lp
Prints the optimal objective value, or exits non-zero.
"""
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp


def parse_expr(tokens):
    terms, sign, coef = [], 1.0, None
    for t in tokens:
        if t in ("+", "-"):
            sign = 1.0 if t == "+" else -1.0
        elif t.lstrip("+-")[:1].isdigit() or t.lstrip("+-")[:1] == ".":
            coef = float(t)
        else:
            if t[0] in "+-" and len(t) > 1:
                sign = -sign if t[0] == "-" else sign
                t = t[1:]
            terms.append((t, sign * (1.0 if coef is None else coef)))
            sign, coef = 1.0, None
    return terms


def read(path):
    section, obj, rows, bounds, binary, general = None, [], [], {}, set(), set()
    order = {}

    def touch(name):
        order.setdefault(name, len(order))

    for raw in open(path):
        if raw.startswith("\\"):
            continue
        toks = raw.split()
        if not toks:
            continue
        key = " ".join(toks).lower()
        if key in ("minimize", "subject to", "bounds", "binary", "general", "end"):
            section = key
            continue
        if section == "minimize":
            body = toks[1:] if toks[0].endswith(":") else toks
            for n, c in parse_expr(body):
                touch(n)
                obj.append((n, c))
        elif section == "subject to":
            body = toks[1:] if toks[0].endswith(":") else toks
            rel = next(i for i, t in enumerate(body) if t in ("<=", ">=", "="))
            terms = parse_expr(body[:rel])
            for n, _ in terms:
                touch(n)
            rows.append((terms, body[rel], float(body[rel + 1])))
        elif section == "bounds":
            if toks[1] == "free":
                touch(toks[0])
                bounds[toks[0]] = (-np.inf, np.inf)
            elif len(toks) == 3:
                touch(toks[0])
                lo, hi = bounds.get(toks[0], (0.0, np.inf))
                v = float(toks[2])
                bounds[toks[0]] = (v, hi) if toks[1] == ">=" else (lo, v)
            else:
                touch(toks[2])
                bounds[toks[2]] = (float(toks[0]), float(toks[4]))
        elif section == "binary":
            for t in toks:
                touch(t)
                binary.add(t)
        elif section == "general":
            for t in toks:
                touch(t)
                general.add(t)
    return order, obj, rows, bounds, binary, general


def main():
    order, obj, rows, bounds, binary, general = read(sys.argv[1])
    n = len(order)
    c = np.zeros(n)
    for name, v in obj:
        c[order[name]] += v
    a = np.zeros((len(rows), n))
    lo = np.full(len(rows), -np.inf)
    hi = np.full(len(rows), np.inf)
    for k, (terms, rel, rhs) in enumerate(rows):
        for name, v in terms:
            a[k, order[name]] += v
        if rel in ("<=", "="):
            hi[k] = rhs
        if rel in (">=", "="):
            lo[k] = rhs
    lb, ub, integrality = np.zeros(n), np.full(n, np.inf), np.zeros(n)
    for name, i in order.items():
        if name in binary:
            lb[i], ub[i], integrality[i] = 0.0, 1.0, 1
        else:
            lb[i], ub[i] = bounds.get(name, (0.0, np.inf))
            integrality[i] = 1 if name in general else 0
    cons = [LinearConstraint(a, lo, hi)] if rows else []
    res = milp(c, constraints=cons, integrality=integrality, bounds=Bounds(lb, ub), options={"mip_rel_gap": 1e-9})
    if res.status != 0:
        print(res.message, file=sys.stderr)
        sys.exit(1)
    print(repr(float(res.fun)))


if __name__ == "__main__":
    main()
