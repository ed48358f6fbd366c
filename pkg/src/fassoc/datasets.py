"""Published contingency tables used in the worked examples and tests."""

from __future__ import annotations

import numpy as np

from fassoc.table import ContingencyTable, ProbabilityTable

# educational degree (rows) by family income (columns), 2006 GSS
RACE_BLACK = ((43, 36, 5), (104, 140, 23), (16, 30, 18))
RACE_WHITE = ((114, 97, 12), (410, 658, 221), (97, 259, 287))

# right eye (rows) by left eye (columns) unaided distance vision grades
VISION_UNIVERSITY = (
    (1291, 130, 40, 22),
    (149, 221, 114, 23),
    (64, 124, 660, 185),
    (20, 25, 249, 1429),
)
VISION_ELEMENTARY = (
    (2470, 126, 21, 10),
    (96, 138, 33, 5),
    (10, 42, 75, 15),
    (12, 7, 16, 92),
)

# UK naked-eye acuity, right (rows) by left (columns)
VISION_UK_WOMEN = (
    (1520, 266, 124, 66),
    (234, 1512, 432, 78),
    (117, 362, 1772, 205),
    (36, 82, 179, 492),
)
VISION_UK_MEN = (
    (821, 112, 85, 35),
    (116, 494, 145, 27),
    (72, 151, 583, 87),
    (43, 34, 106, 331),
)

# daily alcohol units (rows) by social rank group (columns)
ALCOHOL = ((98, 338, 484, 484), (235, 406, 588, 385), (123, 144, 191, 137))

# accident type (rows) by severity (columns)
CAR_ACCIDENTS = ((2365, 944, 412), (249, 585, 276))

# artificial 3x3 probability table with a near-empty middle category
SPARSE_ARTIFICIAL = ((0.50, 0.0, 0.20), (0.0, 0.01, 0.01), (0.20, 0.0, 0.08))

COUNT_TABLES = {
    "race-black": RACE_BLACK,
    "race-white": RACE_WHITE,
    "vision-university": VISION_UNIVERSITY,
    "vision-elementary": VISION_ELEMENTARY,
    "vision-uk-women": VISION_UK_WOMEN,
    "vision-uk-men": VISION_UK_MEN,
    "alcohol": ALCOHOL,
    "car": CAR_ACCIDENTS,
}


def load(name: str) -> ContingencyTable:
    return ContingencyTable(np.array(COUNT_TABLES[name], dtype=np.int64))


def sparse_artificial() -> ProbabilityTable:
    return ProbabilityTable(np.array(SPARSE_ARTIFICIAL, dtype=float))
