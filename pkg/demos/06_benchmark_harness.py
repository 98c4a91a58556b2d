"""Drive the benchmark suites from Python (the CLI wraps exactly these calls).

Full-scale gates live in tests/test_acceptance.py and `hadaquant bench`;
this demo runs every suite at a reduced scale to show the report format.
"""

from hadaquant import bench

suites = [
    ("mse", lambda: bench.mse_suite(256, 6, 1500, seed=1)),
    ("unbiased", lambda: bench.unbiased_suite(64, 3, 4000, seed=1)),
    ("inner-product", lambda: bench.inner_product_suite(256, 4, 800, seed=1)),
    ("rate", lambda: bench.rate_suite(512, 4, 200, seed=1)),
    ("oracle", lambda: bench.oracle_suite(seed=1)),
]

all_rows = []
for name, run in suites:
    print(f"== {name} ==")
    rows = run()
    all_rows.extend(rows)
    for r in rows:
        verdict = "PASS" if r.passed else "FAIL"
        print(
            f"  {r.experiment}: measured={r.measured:.6g} reference={r.reference:.6g} "
            f"{verdict} ({r.wall_time:.2f}s)"
        )

print("\nCSV form (deterministic for a fixed seed):")
print(bench.rows_to_csv(all_rows[:4]))
print("note: at full scale (d=1024, 2e4 trials) the basis-vector mse row")
print("concentrates near 2.26 by design of that input (its transformed")
print("coordinates are exactly +-1), below the 2.3 lower gate that is")
print("calibrated for spread inputs; the acceptance suite reports that gate")
print("honestly as a failure")
