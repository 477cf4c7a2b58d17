# Benchmark harness
