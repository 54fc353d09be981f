"""Dual graph of the special fibre over balls of growing radius."""
import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from artifact.tree import ball_size_formula, build_special_fibre, connected_components, distance


@dataclass
class GraphConfig:
    p: int = 3
    radii: tuple = (1, 2, 3)
    out_dir: str = "results"


def summarize(g) -> dict:
    curves = [k for k, v in g.nodes.items() if v["kind"] == "curve"]
    rational = [k for k, v in g.nodes.items() if v["kind"] == "rational"]
    centre = g.curve_vertices[0]
    by_id = {v.id: v for v in g.curve_vertices}
    interior = [k for k in curves if distance(centre, by_id[g.nodes[k]["vertex"]]) < g.R]
    return {"radius": g.R, "components": len(connected_components(g)), "ball": ball_size_formula(g.p, g.R),
            "curve_nodes": len(curves), "rational_nodes": len(rational),
            "interior_degrees": sorted({g.degree(k) for k in interior}),
            "rational_degrees": sorted({g.degree(k) for k in rational})}


def run(cfg: GraphConfig) -> dict:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for R in cfg.radii:
        g = build_special_fibre(cfg.p, R)
        (out / f"special_fibre_p{cfg.p}_R{R}.json").write_text(g.to_json())
        rows.append(summarize(g))
    return {"config": asdict(cfg), "radii": rows}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--radii", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--out-dir", default="results")
    a = ap.parse_args()
    print(json.dumps(run(GraphConfig(a.p, tuple(a.radii), a.out_dir)), indent=1))


if __name__ == "__main__":
    main()
