"""Published convergence tables for the built-in examples, transcribed verbatim.

Each table records the problem, the quadrature level and rows of
(n, K, E, order); missing entries are None.  ``Tab1`` … ``Tab14`` follow the
numbering of the method tables, the remaining ids cover the comparison
tables and the values quoted in running text.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import UnknownTable
from .quadrature import Level


@dataclass(frozen=True)
class ReferenceRow:
    n: int
    K: Optional[int]
    E: float
    order: Optional[float] = None


@dataclass(frozen=True)
class ReferenceTable:
    table_id: str
    problem: str
    level: Level
    rows: tuple
    label: str = ""  # label the table is printed under
    order_tol: float = 0.1
    description: str = ""

    @property
    def ladder(self) -> tuple:
        return tuple(r.n for r in self.rows)

    def row(self, n: int) -> ReferenceRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)


def _rows(*data):
    return tuple(ReferenceRow(*d) for d in data)


M1, M2, M3 = Level.P2, Level.P3, Level.P4

_TABLES = (
    ReferenceTable("Tab1", "ex4_1", M1, _rows(
        (8, 16, 3.5273e-06), (16, 16, 2.2041e-07, 4.0003), (32, 16, 1.3775e-08, 4.0001),
        (64, 17, 8.6093e-10, 4.0000), (128, 17, 5.3808e-11, 4.0000), (256, 17, 3.3631e-12, 4.0000),
        (512, 17, 2.1050e-13, 3.9979),
    ), "Tab1", 0.05, "ex4_1, Method 1"),
    ReferenceTable("Tab2", "ex4_1", M2, _rows(
        (10, 16, 6.1215e-09), (20, 16, 1.5168e-10), (40, 18, 1.2227e-11),
        (80, 17, 8.1268e-13), (100, 16, 3.3529e-13), (200, 17, 2.1760e-14),
    ), "Tab1a", 0.1, "ex4_1, Method 2"),
    ReferenceTable("Tab3", "ex4_2", M1, _rows(
        (8, 16, 9.6622e-05), (16, 16, 6.1678e-06, 3.9695), (32, 16, 3.8756e-07, 3.9923),
        (64, 18, 2.4255e-08, 3.9981), (128, 17, 1.5165e-09, 3.9995), (256, 17, 9.4787e-11, 3.9999),
        (512, 18, 5.9244e-12, 3.9999),
    ), "Tab2", 0.05, "ex4_2, Method 1"),
    ReferenceTable("Tab4", "ex4_2", M2, _rows(
        (10, 16, 5.2823e-06), (20, 16, 1.1847e-07), (40, 16, 2.2197e-09),
        (80, 16, 3.5748e-11), (100, 16, 9.0258e-12), (200, 17, 7.4163e-14),
    ), "Tab2a", 0.1, "ex4_2, Method 2"),
    ReferenceTable("Tab5", "ex4_3", M1, _rows(
        (8, 8, 3.7008e-06), (16, 8, 2.3135e-07, 3.9997), (32, 9, 1.4461e-08, 3.9999),
        (64, 8, 9.0379e-10, 4.0000), (128, 9, 5.6488e-11, 4.0000), (256, 9, 3.5305e-12, 4.0000),
        (512, 9, 2.2071e-13, 3.9996), (1024, 9, 1.4211e-14, 3.9571),
    ), "Tab3", 0.05, "ex4_3, Method 1"),
    ReferenceTable("Tab6", "ex4_3", M2, _rows(
        (10, 5, 6.9414e-09), (20, 5, 6.8387e-11), (40, 4, 6.3052e-12), (80, 4, 4.3388e-13),
        (100, 4, 1.7941e-13), (200, 4, 1.1990e-14), (300, 3, 8.8818e-16),
    ), "Tab3a", 0.1, "ex4_3, Method 2"),
    ReferenceTable("TabExam5", "ex4_4", M2, _rows(
        (8, 12, 5.1727e-07), (16, 12, 1.6924e-08, 4.9338), (64, 12, 1.7049e-11, 4.9855),
        (128, 13, 5.4001e-13, 4.9806),
    ), "TabExam5", 0.3, "ex4_4, Method 2"),
    ReferenceTable("TabExam6", "ex4_5", M2, _rows(
        (8, 13, 2.0640e-06), (16, 13, 5.1231e-08, 5.3323), (32, 13, 9.7636e-10, 5.7135),
        (64, 14, 1.6980e-11, 5.8455),
    ), "TabExam6", 0.3, "ex4_5, Method 2"),
    ReferenceTable("TabExam7", "ex4_6", M2, _rows(
        (8, 10, 3.0241e-08), (16, 11, 1.2083e-09, 4.6454), (32, 11, 4.1760e-11, 4.8547),
        (64, 11, 1.3666e-12, 4.9334),
    ), "TabExam7", 0.3, "ex4_6, Method 2"),
    ReferenceTable("Tab7", "ex5_1", M1, _rows(
        (8, 9, 4.5470e-07), (16, 9, 2.8458e-08, 3.9980), (32, 10, 1.7940e-09, 3.9876),
        (64, 9, 1.1213e-10, 3.9999), (128, 9, 7.0077e-12, 4.0001), (256, 9, 4.3743e-13, 4.0018),
    ), "Tab1.O4", 0.05, "ex5_1, Method 1"),
    ReferenceTable("Tab8", "ex5_1", M2, _rows(
        (8, 7, 1.7910e-09), (16, 7, 2.8827e-11, 5.9572), (32, 8, 3.1861e-13, 6.4995),
        (64, 8, 2.5591e-14, 3.6381), (128, 8, 1.8874e-15, 3.7612),
    ), "Tab2.O4", 0.1, "ex5_1, Method 2"),
    ReferenceTable("Tab9", "ex5_2", M1, _rows(
        (8, 7, 8.5791e-07), (16, 8, 5.4197e-08, 3.9845), (32, 8, 3.4052e-09, 3.9924),
        (64, 8, 2.1285e-10, 3.9998), (128, 8, 1.3310e-11, 3.9993),
    ), "Tab1.O4a", 0.05, "ex5_2, Method 1"),
    ReferenceTable("Tab10", "ex5_2", M2, _rows(
        (8, 9, 6.7167e-10), (16, 9, 9.6914e-12, 6.1149), (32, 9, 2.6068e-13, 5.2163),
        (64, 9, 2.1094e-14, 3.6274), (128, 9, 1.9984e-15, 3.3999),
    ), "Tab3.O4a", 0.1, "ex5_2, Method 2"),
    ReferenceTable("Tab11", "ex7_1", M2, _rows(
        (8, 6, 4.5770e-10), (16, 6, 7.1845e-12, 5.9934), (32, 6, 1.1169e-13, 6.0073),
        (64, 6, 1.7764e-15, 5.9744),
    ), "Tab1.FDE5", 0.1, "ex7_1, Method 2"),
    ReferenceTable("Tab12", "ex7_2", M2, _rows(
        (8, 2, 7.1262e-13), (16, 2, 7.1748e-15, 6.6341), (32, 2, 1.2490e-16, 5.8441),
        (64, 2, 2.7756e-17, 2.1699),
    ), "Tab2.FDE5", 0.1, "ex7_2, Method 2"),
    ReferenceTable("Tab13", "ex7_1", M3, _rows(
        (8, 6, 1.4213e-11), (16, 6, 5.9064e-14, 7.9107), (32, 6, 8.8818e-16, 6.0553),
        (64, 6, 8.8818e-16, 0.0),
    ), "Tab3.FDE5", 0.1, "ex7_1, Method 3"),
    ReferenceTable("Tab14", "ex7_2", M3, _rows(
        (8, 2, 7.0173e-13), (16, 2, 7.1887e-15, 6.6090), (32, 2, 1.2490e-16, 5.8469),
        (64, 2, 2.7756e-17, 2.1699),
    ), "Tab4.FDE5", 0.1, "ex7_2, Method 3"),
    # comparison tables and values quoted in the text (no orders)
    ReferenceTable("Tab1b", "ex4_1", M1, _rows(
        (10, 16, 1.4447e-06), (100, 16, 1.4444e-10), (1000, 17, 1.4655e-14),
    ), "", 0.1, "ex4_1, Method 1, n = 10, 100, 1000"),
    ReferenceTable("Tab3b", "ex4_2", M1, _rows(
        (10, 16, 3.9977e-05), (100, 17, 4.0704e-09), (1000, 18, 4.0723e-13),
    ), "", 0.1, "ex4_2, Method 1, n = 10, 100, 1000"),
    ReferenceTable("Tab5b", "ex4_3", M1, _rows(
        (10, 8, 1.5160e-06), (100, 8, 1.5163e-10), (1000, 9, 1.5099e-14),
    ), "", 0.1, "ex4_3, Method 1, n = 10, 100, 1000"),
    ReferenceTable("TabExam5a", "ex4_4", M2, _rows(
        (10, None, 1.7274e-07), (100, None, 1.8372e-12), (800, None, 6.6613e-16), (1000, None, 4.4409e-16),
    ), "TabExam5a", 0.3, "ex4_4, Method 2, comparison"),
    ReferenceTable("TabExam6a", "ex4_5", M2, _rows(
        (10, None, 6.5312e-07), (100, None, 3.4605e-12), (400, None, 1.5432e-14), (1000, None, 5.5511e-16),
    ), "TabExam6a", 0.3, "ex4_5, Method 2, comparison"),
    ReferenceTable("TabExam7a", "ex4_6", M2, _rows(
        (10, None, 1.1025e-08), (100, None, 1.7941e-13), (500, None, 3.3307e-16), (1000, None, 2.2204e-16),
    ), "TabExam7a", 0.3, "ex4_6, Method 2, comparison"),
    ReferenceTable("Tab7b", "ex5_1", M1, _rows(
        (10, None, 1.8709e-07), (100, None, 1.8813e-11), (1000, None, 1.7764e-15),
    ), "", 0.1, "ex5_1, Method 1, comparison"),
    ReferenceTable("Tab9b", "ex5_2", M1, _rows(
        (10, None, 3.5625e-07), (100, None, 3.5727e-11), (1000, None, 3.6082e-15),
    ), "Tab2.O4a", 0.1, "ex5_2, Method 1, comparison"),
)

TABLES = {t.table_id: t for t in _TABLES}
_ALIASES = {t.label.lower(): t.table_id for t in _TABLES if t.label}
TABLE_IDS = tuple(TABLES)
METHOD_TABLES = tuple(f"Tab{i}" for i in range(1, 15)) + ("TabExam5", "TabExam6", "TabExam7")


def get_table(table_id: str) -> ReferenceTable:
    """Look up by id (``Tab7``) or by source label (``Tab1.O4``), case-insensitively."""
    key = str(table_id).strip()
    for tid in TABLES:
        if tid.lower() == key.lower():
            return TABLES[tid]
    if key.lower() in _ALIASES:
        return TABLES[_ALIASES[key.lower()]]
    raise UnknownTable(f"unknown table {table_id!r}; known: {', '.join(TABLE_IDS)}")
