"""Acceptance: the expansion-remainder figure annotates the slope the data
actually carries.

The fixture CSV is an unmodified output of the simulator's alpha-expansion
study (the same table its acceptance run produces); the figure's annotated
slope must sit within 0.05 of an independent least-squares fit computed
here directly from the file.
"""

import csv
import os

import numpy as np

from kdv5_plots import FigureSpec, render

FIXTURE = os.path.join(os.path.dirname(__file__), "fixtures", "alpha_expansion.csv")


def _independent_slope(path: str) -> float:
    kappas, remainders = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            kappas.append(float(row["kappa"]))
            remainders.append(float(row["remainder"]))
    x = np.log(np.asarray(kappas))
    y = np.log(np.asarray(remainders))
    n = len(x)
    sx, sy, sxx, sxy = x.sum(), y.sum(), (x * x).sum(), (x * y).sum()
    return float((n * sxy - sx * sy) / (n * sxx - sx * sx))


def test_a10_annotated_slope_matches_independent_fit(tmp_path):
    out = render(FigureSpec((FIXTURE,), "kappa_decay", str(tmp_path / "alpha.png")))
    annotated = out.annotations["slope"]
    independent = _independent_slope(FIXTURE)
    ok = abs(annotated - independent) <= 0.05
    print(f"A10 {'PASS' if ok else 'FAIL'}: annotated slope {annotated:.4f} vs "
          f"independent fit {independent:.4f} (|diff| <= 0.05)")
    assert ok
    # and the study's physics comes through: the decay rate is the ninth power
    assert abs(annotated + 9.0) <= 0.5
    assert os.path.exists(out.path)
