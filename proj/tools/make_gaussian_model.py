#!/usr/bin/env python3
"""Writes models/gaussian.json: the linear-drift additive-noise example on a
9-point grid with drift f = 0.5 x + a + 0.3 xbar, noise sd 0.8, sensor h(x) = x
and quadratic tracking cost."""
import json
import math
import pathlib

xs = [-2.0 + 0.5 * i for i in range(9)]
acts = [-0.5, 0.5]
obs = [-1.0, 1.0]

f = [[[round(0.5 * x + a + 0.3 * xb, 12) for xb in xs] for a in acts] for x in xs]
g = [[0.8 for _ in acts] for _ in xs]
h = [x for x in xs]
d = [[[round(0.25 * (x - 0.5 * xb) ** 2 + 0.1 * a * a, 12) for xb in xs] for a in acts] for x in xs]

w0 = [math.exp(-x * x / (2 * 0.5)) for x in xs]
s = sum(w0)
mu0 = [round(v / s, 15) for v in w0]
mu0[4] = round(1.0 - sum(mu0[:4]) - sum(mu0[5:]), 15)

cfg = {
    "schema_version": 1,
    "family": "gaussian",
    "name": "gaussian",
    "discount": 0.9,
    "states": {"min": -2.0, "max": 2.0, "size": 9},
    "observations": {"coords": obs, "cell_width": 2.0},
    "actions": {"coords": acts, "cell_width": 1.0},
    "initial": mu0,
    "f": f,
    "g": g,
    "h": h,
    "d": d,
    "observation_measure_free": True,
}
out = pathlib.Path(__file__).resolve().parent.parent / "models" / "gaussian.json"
out.write_text(json.dumps(cfg, indent=1) + "\n")
