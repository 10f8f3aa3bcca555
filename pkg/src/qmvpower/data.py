"""Embedded member-state datasets.

Populations are in units of 100,000 persons (2015, 2020 and 2030
projections); contributions are shares of the baseline budget, stored as
exact fractions over 10000.
"""

from __future__ import annotations

from fractions import Fraction

YEARS = (2015, 2020, 2030)

# name, code, pop 2015, pop 2020, pop 2030, contribution (%)
EU28_ROWS = [
    ("Austria", "AT", 86, 88, 93, "1.22"),
    ("Belgium", "BE", 113, 118, 129, "2.85"),
    ("Bulgaria", "BG", 72, 70, 65, "0.31"),
    ("Croatia", "HR", 42, 42, 41, "0.3"),
    ("Cyprus", "CY", 9, 9, 9, "0.11"),
    ("Czech Republic", "CZ", 105, 106, 108, "1.02"),
    ("Denmark", "DK", 56, 58, 61, "1.72"),
    ("Estonia", "EE", 13, 13, 12, "0.14"),
    ("Finland", "FI", 55, 56, 59, "1.38"),
    ("France", "FR", 662, 677, 704, "15.22"),
    ("Germany", "DE", 807, 806, 798, "20.08"),
    ("Greece", "EL", 110, 107, 101, "1.42"),
    ("Hungary", "HU", 99, 98, 97, "0.69"),
    ("Ireland", "IE", 46, 46, 46, "1.11"),
    ("Italy", "IT", 609, 620, 641, "11.18"),
    ("Latvia", "LV", 20, 19, 16, "0.19"),
    ("Lithuania", "LT", 29, 27, 22, "0.25"),
    ("Luxembourg", "LU", 6, 6, 8, "0.18"),
    ("Malta", "MT", 4, 4, 5, "0.05"),
    ("Netherlands", "NL", 169, 171, 176, "4.97"),
    ("Poland", "PL", 385, 384, 375, "2.74"),
    ("Portugal", "PT", 104, 101, 98, "1.27"),
    ("Romania", "RO", 199, 197, 190, "1.05"),
    ("Slovakia", "SK", 54, 54, 53, "0.49"),
    ("Slovenia", "SI", 21, 21, 21, "0.25"),
    ("Spain", "ES", 464, 458, 445, "7.76"),
    ("Sweden", "SE", 97, 101, 110, "2.98"),
    ("United Kingdom", "UK", 646, 667, 705, "8.82"),
]

# EEC 1958: the Council used fixed weights with an absolute quota of 12.
# The "population" column holds those weights for every year.
EEC1958_ROWS = [
    ("France", "FR", 4, "28"),
    ("Germany", "DE", 4, "28"),
    ("Italy", "IT", 4, "28"),
    ("Belgium", "BE", 2, "7.9"),
    ("Netherlands", "NL", 2, "7.9"),
    ("Luxembourg", "LU", 1, "0.2"),
]
EEC1958_QUOTA = 12


def percent(text: str) -> Fraction:
    """Decimal percentage string -> exact share (``"20.08"`` -> 2008/10000)."""
    return Fraction(text) / 100
