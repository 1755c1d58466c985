"""Independent re-check of a certificate using decimal strings only.

Reads certificate.json, recomputes min Re over all stored rectangles with
:class:`decimal.Decimal`, checks that the axis pieces tile [0, R_outer] and
the arc pieces tile [0, 1], and compares with the stored verdict.
"""

from __future__ import annotations

import json
import sys
from decimal import Decimal


def validate(path) -> dict:
    with open(path) as fh:
        cert = json.load(fh)
    if cert.get("schema") != "shockcert.certificate":
        raise ValueError("not a shockcert certificate")
    lows = []
    ok_pieces = True
    spans = {"axis": [], "arc": []}
    for p in cert["pieces"]:
        spans[p["kind"]].append((Decimal(p["lo"]), Decimal(p["hi"])))
        if p["status"] != "ok" or not p.get("rects"):
            ok_pieces = False
            continue
        lows.extend(Decimal(r[2]) for r in p["rects"])
    covered = True
    for kind, end in (("axis", Decimal(cert["contour"]["R_outer"])), ("arc", Decimal(1))):
        x = Decimal(0)
        for lo, hi in sorted(spans[kind]):
            if lo > x:
                covered = False
            x = max(x, hi)
        covered = covered and x >= end
    c = min(lows) if lows else None
    positive = c is not None and c > 0
    symmetric = bool(cert.get("symmetry") and cert["symmetry"].get("ok"))
    verdict = "certified" if (positive and ok_pieces and covered and symmetric) else "inconclusive"
    agrees = verdict == cert["verdict"] and (c is None or c == Decimal(cert["c_lower"]))
    return {"min_re": None if c is None else str(c), "rectangles": len(lows), "covered": covered, "verdict": verdict, "agrees": agrees}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: shockcert-validate certificate.json")
        return 3
    r = validate(argv[0])
    print(json.dumps(r))
    return 0 if r["agrees"] else 1


if __name__ == "__main__":
    sys.exit(main())
