"""Published eigenvalue tables used as the reproduction fixture.

Values are transcribed verbatim (ten states each).  ``tolerances`` holds the
relative tolerance per state; ``None`` marks an informational row that is
reported but never judged.
"""

from __future__ import annotations

from dataclasses import dataclass

from .potential import PotentialParams


@dataclass(frozen=True)
class ReferenceTable:
    label: str
    params: PotentialParams
    values: tuple
    source_column: str
    tolerances: tuple

    def __post_init__(self):
        if len(self.values) != 10 or len(self.tolerances) != 10:
            raise ValueError("reference tables hold exactly ten states")


_T1 = PotentialParams(4, 4, 8, 2)

TABLES = {
    "table1": ReferenceTable(
        "table1", _T1,
        (5.972761814, 11.98341391, 20.37336112, 31.18018354, 44.42201870,
         60.10888564, 78.24675783, 98.83966999, 121.8900467, 147.4004370),
        "AIM", (1e-6,) * 5 + (1e-5,) * 5),
    "table1tra": ReferenceTable(
        "table1tra", _T1,
        (5.9727609687, 11.9834081211, 20.3733437263, 31.1801373896, 44.4219350633,
         60.1087189299, 78.2465191684, 98.8392406127, 121.8895500217, 147.3993465727),
        "TRA", (2e-5,) * 10),
    "table2c1": ReferenceTable(
        "table2c1", PotentialParams(0, 4, 8, 2),
        (4.494939396, 10.29011799, 18.52601977, 29.21393327, 42.35926566,
         57.96507320, 76.03310921, 96.56475520, 119.5604795, 145.0222687),
        "AIM", (1e-5,) * 10),
    "table2c2": ReferenceTable(
        "table2c2", PotentialParams(4, 0, 8, 2),
        (2.145125835, 5.818782893, 11.78962660, 20.14801904, 30.92900187,
         44.14916533, 59.81732164, 77.93893176, 98.51723995, 121.5547638),
        "AIM", (1e-5,) * 10),
    "table2c3": ReferenceTable(
        "table2c3", PotentialParams(4, 4, 0, 2),
        (4.669130036, 9.933633396, 17.55700304, 27.59113939, 40.05865045,
         54.97104983, 72.33491111, 92.15431584, 114.4319637, 139.1697297),
        "AIM", (1e-5,) * 10),
    "table3": ReferenceTable(
        "table3", PotentialParams(-4, -4, -8, 2),
        (-1.434082108e5, -251.9142157, -69.26639048, -3.891328201, -1.133144577,
         5.586514083, 15.34323167, 28.10647416, 43.63009092, 61.99556975),
        "AIM", (None,) * 3 + (1e-4,) * 7),
}

GROUPS = {
    "1": ("table1", "table1tra"),
    "2": ("table2c1", "table2c2", "table2c3"),
    "3": ("table3",),
}
GROUPS["all"] = GROUPS["1"] + GROUPS["2"] + GROUPS["3"]
