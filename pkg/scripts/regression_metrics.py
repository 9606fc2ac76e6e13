"""Recompute the pinned regression values and print them next to their expected values.

    python scripts/regression_metrics.py [--json]

Exit status is 1 if any value drifted.
"""
import argparse
import json
import sys
import time

from rainbowfact.factorgen import canonical_one_factorization, count_one_factorizations, xor_factorization
from rainbowfact.planted import planted_instance
from rainbowfact.absorber import absorb, build_absorber
from rainbowfact.resilience import is_robustly_gadget_resilient
from rainbowfact.search import exact_rainbow_hamilton_path, long_rainbow_path
from rainbowfact.template import circulant_template


def metrics():
    out = {}
    out["factorizations_6"] = (count_one_factorizations(6), 6)
    out["factorizations_8"] = (count_one_factorizations(8), 6240)
    r = exact_rainbow_hamilton_path(xor_factorization(8))
    out["xor8_status"] = (r.status, "none")
    out["xor8_nodes"] = (r.nodes, 6784)
    v = is_robustly_gadget_resilient(canonical_one_factorization(20), 0.4)
    out["k20_gadget_resilience_witness"] = (list(v.witness) if v.witness else None, [19, 0])
    lp = long_rainbow_path(canonical_one_factorization(100), seed=1, restarts=20)
    out["k100_long_path_vertices"] = (len(lp.path), 99)
    inst = planted_instance(circulant_template(12, 7), seed=0, path_len=10, leftover_colours=2)
    ab, _ = build_absorber(inst.graph, inst.partition, template=inst.template)
    out["planted_n"] = (inst.graph.n, 1285)
    out["planted_path_len"] = (len(absorb(ab, inst.path, "path").vertices), 1285)
    out["planted_cycle_len"] = (len(absorb(ab, inst.path, "cycle").vertices), 1284)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    t0 = time.perf_counter()
    m = metrics()
    drift = [k for k, (got, want) in m.items() if got != want]
    if args.json:
        print(json.dumps({k: {"got": g, "expected": w} for k, (g, w) in m.items()}, indent=1))
    else:
        for k, (got, want) in m.items():
            print(f"{k:34s} {str(got):>10s}  expected {want}{'  DRIFT' if got != want else ''}")
        print(f"{time.perf_counter() - t0:.1f}s, {len(drift)} drifted")
    sys.exit(1 if drift else 0)


if __name__ == "__main__":
    main()
