"""Regenerate the bundled ljb.csv and wbc.csv files.

The two clinical datasets cannot be redistributed here, so the package ships
deterministic stand-ins that keep the documented column layout, row counts and
class balance of the originals (277 rows / 683 rows).  Attribute values are
drawn from class-conditional distributions so that rule mining finds real
structure.  Running this script twice produces byte-identical files.
"""

import csv
import random
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "carm" / "data"

QUADS = ["left_up", "left_low", "right_up", "right_low", "central"]


def weighted(rng, pairs):
    values = [p[0] for p in pairs]
    weights = [p[1] for p in pairs]
    return rng.choices(values, weights=weights, k=1)[0]


def make_ljb(path):
    rng = random.Random(20240811)
    rows = []
    # 196 no-recurrence, 81 recurrence
    for cls, count in (("no-recurrence-events", 196), ("recurrence-events", 81)):
        rec = cls == "recurrence-events"
        for _ in range(count):
            age = rng.randint(24, 42) if rng.random() < (0.18 if not rec else 0.22) else rng.randint(38, 72)
            if age < 40:
                menopause = weighted(rng, [("premeno", 0.9), ("lt40", 0.1)])
            elif age < 50:
                menopause = weighted(rng, [("premeno", 0.6), ("ge40", 0.4)])
            else:
                menopause = weighted(rng, [("ge40", 0.85), ("premeno", 0.1), ("lt40", 0.05)])
            if rec:
                tumor_size = min(54, max(0, int(rng.gauss(31, 11))))
                inv_nodes = weighted(rng, [(0, 0.30), (1, 0.14), (2, 0.10), (3, 0.10),
                                           (5, 0.10), (7, 0.08), (9, 0.07), (12, 0.06),
                                           (15, 0.05), (20, 0.05), (25, 0.05)])
                deg_malig = weighted(rng, [(1, 0.08), (2, 0.28), (3, 0.64)])
                node_caps = "yes" if (inv_nodes > 2 and rng.random() < 0.8) or rng.random() < 0.15 else "no"
                irradiat = weighted(rng, [("yes", 0.45), ("no", 0.55)])
            else:
                tumor_size = min(54, max(0, int(rng.gauss(21, 10))))
                inv_nodes = weighted(rng, [(0, 0.76), (1, 0.10), (2, 0.06), (3, 0.04),
                                           (5, 0.02), (8, 0.01), (12, 0.01)])
                deg_malig = weighted(rng, [(1, 0.32), (2, 0.48), (3, 0.20)])
                node_caps = "yes" if (inv_nodes > 2 and rng.random() < 0.5) or rng.random() < 0.05 else "no"
                irradiat = weighted(rng, [("yes", 0.20), ("no", 0.80)])
            breast = weighted(rng, [("left", 0.53), ("right", 0.47)])
            quad = weighted(rng, [(QUADS[0], 0.22), (QUADS[1], 0.38), (QUADS[2], 0.12),
                                  (QUADS[3], 0.18), (QUADS[4], 0.10)])
            rows.append([age, menopause, tumor_size, inv_nodes, node_caps,
                         deg_malig, breast, quad, irradiat, cls])
    rng.shuffle(rows)
    header = ["age", "menopause", "tumor_size", "inv_nodes", "node_caps",
              "deg_malig", "breast", "breast_quad", "irradiat", "recurrence"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return len(rows)


def clip10(x):
    return min(10, max(1, int(round(x))))


def make_wbc(path):
    rng = random.Random(20240812)
    rows = []
    # 444 benign (class 2), 239 malignant (class 4)
    for cls, count in ((2, 444), (4, 239)):
        for _ in range(count):
            if cls == 2:
                base = rng.gauss(1.3, 0.9)
                row = [
                    clip10(rng.gauss(2.9, 1.6)),          # clump_thickness
                    clip10(base + rng.gauss(0.3, 0.7)),   # cell_size_uniformity
                    clip10(base + rng.gauss(0.4, 0.8)),   # cell_shape_uniformity
                    clip10(rng.gauss(1.4, 0.9)),          # marginal_adhesion
                    clip10(rng.gauss(2.1, 0.8)),          # epithelial_cell_size
                    clip10(rng.gauss(1.4, 1.0)),          # bare_nuclei
                    clip10(rng.gauss(2.1, 1.1)),          # bland_chromatin
                    clip10(rng.gauss(1.3, 0.9)),          # normal_nucleoli
                    clip10(rng.gauss(1.1, 0.5)),          # mitoses
                ]
            else:
                base = rng.gauss(6.6, 2.4)
                row = [
                    clip10(rng.gauss(7.2, 2.4)),
                    clip10(base + rng.gauss(0.0, 1.2)),
                    clip10(base + rng.gauss(0.1, 1.2)),
                    clip10(rng.gauss(5.6, 3.1)),
                    clip10(rng.gauss(5.3, 2.4)),
                    clip10(rng.gauss(7.6, 3.1)),
                    clip10(rng.gauss(6.0, 2.3)),
                    clip10(rng.gauss(5.9, 3.3)),
                    clip10(rng.gauss(2.6, 2.5)),
                ]
            rows.append(row + [cls])
    rng.shuffle(rows)
    header = ["clump_thickness", "cell_size_uniformity", "cell_shape_uniformity",
              "marginal_adhesion", "epithelial_cell_size", "bare_nuclei",
              "bland_chromatin", "normal_nucleoli", "mitoses", "diagnosis"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return len(rows)


if __name__ == "__main__":
    n1 = make_ljb(DATA_DIR / "ljb.csv")
    n2 = make_wbc(DATA_DIR / "wbc.csv")
    print(f"ljb: {n1} rows, wbc: {n2} rows -> {DATA_DIR}")
