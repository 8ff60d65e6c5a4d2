"""Deterministic CSV and JSON output for distributions and spectra.

All decimal output carries 12 significant digits with a lowercase exponent,
so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import decimal
import json

import numpy as np

from .spectrum import CountDistribution, Spectrum


def fmt12(x) -> str:
    """12 significant digits, lowercase scientific notation.

    Integers format through Decimal, so exact counts beyond the float range
    still print; the exponent is padded to two digits to match float style.
    """
    if isinstance(x, int):
        text = format(decimal.Decimal(x), ".11e")
        mantissa, _, exponent = text.partition("e")
        return f"{mantissa}e{exponent[0]}{exponent[1:].zfill(2)}"
    return format(float(x), ".11e")


def write_countdist_csv(dist: CountDistribution, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    m = len(dist.shape)
    writer.writerow([f"n_{j + 1}" for j in range(m)] + ["value"])
    for idx in np.ndindex(*dist.shape):
        writer.writerow([str(i) for i in idx] + [fmt12(dist.probabilities[idx])])


def countdist_json(dist: CountDistribution) -> list:
    return [{"index": [int(i) for i in idx], "p": float(dist.probabilities[idx])}
            for idx in np.ndindex(*dist.shape)]


def write_spectrum_csv(spec: Spectrum, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    m = len(spec.shape)
    writer.writerow([f"k_{j + 1}" for j in range(m)] + ["re", "im"])
    for idx in np.ndindex(*spec.shape):
        value = spec.values[idx]
        writer.writerow([str(i) for i in idx]
                        + [fmt12(value.real), fmt12(value.imag)])


def write_fixed_points_csv(engine_probs, analytic_probs, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["k", "probability_engine", "probability_analytic"])
    for k, (pe, pa) in enumerate(zip(engine_probs, analytic_probs)):
        writer.writerow([str(k), fmt12(pe), fmt12(pa)])


def dump_json(payload: dict, handle) -> None:
    json.dump(payload, handle, indent=2, sort_keys=True)
    handle.write("\n")
