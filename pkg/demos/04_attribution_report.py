"""The full sweep: mine at every noise level, attribute every property,
classify nodes, and emit the report files.

Writes report.json, rankings.csv, noise_series.csv, per-configuration
DOT trees and a text summary into demos/out/.
"""

from pathlib import Path

from procshap import Property, PropertySpec, RunConfig, emit_report, run_matrix
from procshap.datasets import running_example_path

out_dir = Path(__file__).parent / "out"

config = RunConfig(
    log_path=str(running_example_path()),
    noise_levels=(0.0, 0.25, 0.5, 1.0),
    properties=(
        PropertySpec(Property.SAT),
        PropertySpec(Property.LIV),
        PropertySpec(
            Property.SAF, safety_pair=("pay compensation", "reject request")
        ),
    ),
    method="mc",
    permutations=2000,
    seed=7,
)

report = run_matrix(config)
print(f"{report.meta['configuration_count']} configurations "
      f"({len(config.noise_levels)} noise x {len(config.properties)} properties)")

for record in report.configurations:
    counts = record["class_counts"]
    cache = record["cache"]
    print(f"  {record['id']:<50} critical={counts['critical']:<2} "
          f"queries={cache['total_queries']}/{cache['distinct_queries']}")

print("\ncross-noise top-5 stability (Jaccard):")
for label, pairs in sorted(report.cross["topk_jaccard_across_noise"].items()):
    for pair, value in sorted(pairs.items()):
        print(f"  {label:<45} {pair}: {value:.2f}")

print("\nnoise correlation of mean |phi| (flat series are flagged):")
for label, corr in sorted(report.cross["noise_correlation"].items()):
    flag = "  [zero variance]" if corr["zero_variance"] else ""
    print(f"  {label:<45} r = {corr['r']:+.3f}{flag}")

print("\nadaptive nodes (shift vs the noise-0 baseline):")
for label, nodes in sorted(report.cross["adaptive_nodes"].items()):
    for entry in nodes[:3]:
        print(f"  {label:<45} {entry['node']}: {entry['reason']}")

paths = emit_report(report, out_dir)
print(f"\nwrote {len(paths)} files to {out_dir}/")
