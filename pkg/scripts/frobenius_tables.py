"""Frobenius matrix on de Rham cohomology, the mod p table for H^1(O), and block scalars."""
import argparse
import csv
import io
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from artifact.curve import (block_scalar, default_spec, expected_cx, frobenius_matrix,
                            h1O_frobenius_table, _block_cx)


@dataclass
class FrobConfig:
    primes: tuple = (3, 5)
    precision: int = 4
    xi_index: int = 0
    out_dir: str = "results"


def table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "k", "expected", "observed", "other_zero", "ok"])
    for r in rows:
        w.writerow([r.i, r.k, r.expected, r.observed, int(r.other_zero), int(r.ok)])
    return buf.getvalue()


def run(cfg: FrobConfig) -> dict:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for p in cfg.primes:
        spec = default_spec(p, cfg.precision, cfg.xi_index)
        t0 = time.perf_counter()
        data = frobenius_matrix(spec)
        rows = h1O_frobenius_table(spec)
        secs = time.perf_counter() - t0
        (out / f"frobenius_p{p}.json").write_text(data.to_json())
        (out / f"h1O_frobenius_p{p}.csv").write_text(table_csv(rows))
        w2 = spec.w1.reduce_precision(2)
        blocks = []
        for i in range(1, p + 1):
            ok, lam = block_scalar(data, i)
            cx = _block_cx(data, i)
            blocks.append({"i": i, "scalar": ok, "c_x": None if cx is None else str(cx),
                           "matches": cx is not None and cx == expected_cx(p, i, w2)})
        summary[p] = {"seconds": round(secs, 2), "table_ok": all(r.ok for r in rows),
                      "blocks": blocks}
    return {"config": asdict(cfg), "primes": summary}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=[3, 5])
    ap.add_argument("--precision", type=int, default=4)
    ap.add_argument("--xi-index", type=int, default=0)
    ap.add_argument("--out-dir", default="results")
    a = ap.parse_args()
    print(json.dumps(run(FrobConfig(tuple(a.primes), a.precision, a.xi_index, a.out_dir)),
                     indent=1))


if __name__ == "__main__":
    main()
