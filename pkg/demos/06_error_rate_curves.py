"""Small Monte-Carlo sweep: logical error rate vs physical noise.

Writes the harness CSV for a modest shot budget; the companion plotting
package (frontend/) renders these files.  The same sweep is available from
the command line:

  blockbp simulate --decoder blockbp --d 3 --epsilon 0.1 --block-size 2 \
      --chi 16 --shots 2000 --max-failures 20 --seed 1 --out results.csv

Run:  python3 demos/06_error_rate_curves.py
"""

from blockbp import DecoderParams, ExperimentConfig, run_experiment, write_results

rows = []
for decoder in ("blockbp", "bmps"):
    for eps in (0.06, 0.10, 0.14):
        cfg = ExperimentConfig(
            decoder=decoder,
            d=3,
            epsilon=eps,
            params=DecoderParams.for_block_size(2, chi=16),
            shots=400,
            max_failures=10,
            seed=123,
            threads=2,
        )
        stats = run_experiment(cfg)
        rows.append(stats)
        print(
            f"{decoder:>8} d=3 eps={eps:.2f}: shots={stats.shots:>5} "
            f"P_L={stats.p_hat:.4f} +- {stats.stderr:.4f} "
            f"(mean BP rounds {stats.mean_rounds:.1f})"
        )

write_results(rows, "demo_results.csv")
print("\nwrote demo_results.csv (harness CSV schema)")
print("render with:  blockbp-plot --mode pl-vs-epsilon --in demo_results.csv --out demo.png")
