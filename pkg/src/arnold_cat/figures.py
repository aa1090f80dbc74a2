"""Bundled run configurations for the six reproducible figures."""
from __future__ import annotations

import json

FIGURES = {
    # triple well, heavy particle: Lambda^2 = 1/(2*18)
    "fig1": {
        "schema": 1,
        "potential": {"raw_coefficients": ["-61/25", 0, "36/25", 0], "lambda_sq": "1/36"},
        "grid": {"half_width": 2.2, "points": 8001},
        "states": 7,
        "plot": {"x_range": [-1.6, 1.6],
                 "title": "triple well, lowest 7 levels"},
    },
    "fig2": {
        "schema": 1,
        "potential": {"params": [1, 1, 1]},
        "plot": {"title": "four-well potential, N=3"},
    },
    "fig3": {
        "schema": 1,
        "locus": {"kind": "k5_alpha_beta", "fixed_range": [0.3, 3.0, 0.05],
                  "estimator": "harmonic"},
        "plot": {"title": "central-well dominance bounds beta(alpha)"},
    },
    "fig4": {
        "schema": 1,
        "locus": {"kind": "k7_eta", "fixed_range": [1.0, 4.0, 0.05], "estimator": "harmonic"},
        "plot": {"title": "critical eta(alpha)"},
    },
    "fig5": {
        "schema": 1,
        "potential": {"params_sq": [1, "2/3", "5/6", "1/3"]},
        "plot": {"title": "five-well potential, N=4"},
    },
    "fig6": {
        "schema": 1,
        "potential": {"params_sq": ["15/16", "1/2", "3/8", "3/8", "5/16"]},
        "plot": {"title": "six-well potential, N=5"},
    },
}


def figure_config(name: str) -> str:
    return json.dumps(FIGURES[name], sort_keys=True)
