import json, os, sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..")))

from backend import config
from backend.tools.generators import GeneratorSpec, generate
from backend.tools.graph_io import dump_graph

config.setup_logging()
os.makedirs("storage/graphs", exist_ok=True)

SWEEP_FAMILIES = ["path", "cycle", "random-tree", "maximal-outerplanar", "cactus", "fan"]

# reference sweep: validity at every size, oracle checks up to n=40
reference = {
    "generators": (
        [{"family": f, "n": n, "seed": s} for f in SWEEP_FAMILIES for n in (10, 30, 100, 300) for s in range(5)]
        + [{"family": "random-tree", "n": n, "seed": s, "max_degree": d}
           for d in (3, 4) for n in (20, 40) for s in range(3)]
    ),
    "ks": [2, 3, 4],
    "epsilons": [0.1, 0.3],
    "oracle_cap": 40,
    "approx_cap": 40,
    "minor_cap": 14,
    "containment_cap": 30,
    "q_path_samples": 10,
    "bounded_degree": True,
    "seed": 2024,
}
# small enough for a laptop minute
quick = {
    "generators": [{"family": f, "n": n, "seed": s} for f in SWEEP_FAMILIES for n in (10, 14) for s in range(2)],
    "ks": [1, 2],
    "epsilons": [0.3],
    "q_path_samples": 5,
    "bounded_degree": True,
    "seed": 7,
}

for name, cfg in (("reference_config.json", reference), ("quick_config.json", quick)):
    with open(os.path.join("storage", name), "w", encoding="utf-8", newline="\n") as f:
        json.dump(cfg, f, indent=2)
        f.write("\n")

count = 0
for fam in SWEEP_FAMILIES + ["star"]:
    for n in (5, 12, 30):
        spec = GeneratorSpec(family=fam, n=n, seed=1)
        dump_graph(generate(spec), f"storage/graphs/{spec.label}.json")
        count += 1

print(f"Wrote 2 experiment configs and {count} graph fixtures under storage/")
