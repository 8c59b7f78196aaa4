"""OLS count-sensitivity report.

A one-feature scenario with a fixed anchor bin and fixed per-bin black-box
outputs: only the number of samples landing in each off-bin varies between
rows. The numeric OLS coefficient is tabulated against the closed-form
weighted-mean identity, making it explicit that explanations move when the
sampling distribution moves, even though the model's behaviour is unchanged.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from irkit.errors import ParameterError
from irkit.rng import RngStream
from irkit.surrogate import analytic_binary_coefficient, fit_ols


@dataclass
class OlsScenario:
    off_means: tuple = (0.0, 1.0)     # black-box output inside each off-bin
    on_mean: float = 1.0              # output inside the anchor's bin
    on_count: int = 10
    ratios: tuple = ((1, 1), (3, 1))  # off-bin count ratios to sweep
    counts_base: int = 10             # samples per ratio unit

    def __post_init__(self):
        if len(self.off_means) < 2:
            raise ParameterError("the scenario needs at least two off-bins "
                                 "(three bins total)")
        for r in self.ratios:
            if len(r) != len(self.off_means):
                raise ParameterError("each ratio needs one entry per off-bin")
            if any(int(v) < 1 for v in r):
                raise ParameterError("ratio entries must be positive integers")
        if self.on_count < 1 or self.counts_base < 1:
            raise ParameterError("counts must be positive")


@dataclass
class OlsReportRow:
    ratio: str
    coefficient: float
    analytic_coefficient: float
    intercept: float
    analytic_intercept: float


def ols_sensitivity_report(scenario: OlsScenario, rng: RngStream) -> list[OlsReportRow]:
    rows = []
    for ratio in scenario.ratios:
        counts = [int(r) * scenario.counts_base for r in ratio]
        x = [1.0] * scenario.on_count
        y = [scenario.on_mean] * scenario.on_count
        for count, mean in zip(counts, scenario.off_means):
            x.extend([0.0] * count)
            y.extend([float(mean)] * count)
        x = np.asarray(x)[:, None]
        y = np.asarray(y)
        order = np.arange(len(y))
        rng.shuffle(order)  # row order must not matter; prove it per row

        fitted = fit_ols(x[order], y[order])
        a_intercept, a_coef = analytic_binary_coefficient(
            [(scenario.on_count, scenario.on_mean)],
            list(zip(counts, scenario.off_means)))
        rows.append(OlsReportRow(
            ":".join(str(int(r)) for r in ratio),
            float(fitted.coefficients[0]),
            float(a_coef),
            float(fitted.intercept),
            float(a_intercept),
        ))
    return rows


def write_ols_report_csv(rows: list[OlsReportRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["off_bin_ratio", "coefficient", "analytic_coefficient",
                         "intercept", "analytic_intercept"])
        for r in rows:
            writer.writerow([r.ratio, repr(r.coefficient), repr(r.analytic_coefficient),
                             repr(r.intercept), repr(r.analytic_intercept)])
