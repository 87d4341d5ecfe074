"""Build the shipped curve table from Cremona's tables and PARI.

Usage: python tools/build_fixtures.py CREMONA_DB [--max-conductor 1000]

CREMONA_DB is the sqlite file from the sage elliptic-curve database
(tables t_curve, t_class). Rank and torsion come from the tables; modular
degrees come from PARI's ellmoddegree, for optimal curves only (the first
curve of each class, except 990h where the optimal curve is 990h3). The
curve y^2 + xy + y = x^3 + x^2 - 71x - 196 (3315b2) is appended with its
2-Selmer rank 4.
"""

import argparse
import ast
import sqlite3
import sys
from pathlib import Path

OPTIMAL_EXCEPTIONS = {"990h": "990h3"}
EXTRA = {"3315b2": {"selmer2_rank": 4}}
COLUMNS = "label,a1,a2,a3,a4,a6,conductor,rank,torsion,degree,selmer2_rank"


def is_optimal(label: str, cls: str) -> bool:
    return label == OPTIMAL_EXCEPTIONS.get(cls, cls + "1")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("db")
    ap.add_argument("--max-conductor", type=int, default=1000)
    ap.add_argument("--out", default="src/moddeg/data/curves.csv")
    args = ap.parse_args(argv)

    import cypari

    pari = cypari.pari
    pari.allocatemem(2 * 10**9, silent=True)
    con = sqlite3.connect(args.db)
    query = (
        "select curve, class, tors, eqn, conductor, rank from t_curve "
        "join t_class using(class) where conductor <= ? or curve in ({})"
    ).format(",".join("?" * len(EXTRA)))
    rows = con.execute(query, (args.max_conductor, *EXTRA)).fetchall()
    rows.sort(key=lambda r: (r[4], r[1][len(str(r[4])):], r[0]))

    out = [COLUMNS]
    for label, cls, tors, eqn, N, rank in rows:
        ainvs = ast.literal_eval(eqn)
        degree = ""
        if is_optimal(label, cls) or label in EXTRA:
            deg = pari(f"ellmoddegree(ellinit({list(ainvs)}))")
            degree = str(int(deg))
        selmer = EXTRA.get(label, {}).get("selmer2_rank", "")
        fields = [label, *map(str, ainvs), str(N), str(rank), str(tors), degree, str(selmer)]
        out.append(",".join(fields))
    Path(args.out).write_text("\n".join(out) + "\n")
    print(f"wrote {len(out) - 1} curves to {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
