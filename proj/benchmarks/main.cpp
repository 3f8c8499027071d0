#include <benchmark/benchmark.h>

// The packaged libbenchmark_main archive carries LTO bytecode from another
// compiler release, so the entry point is defined here.
BENCHMARK_MAIN();
