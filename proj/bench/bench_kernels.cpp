#include <benchmark/benchmark.h>

#include <vector>

#include "pbppo/nn/kernels.hpp"
#include "pbppo/rng.hpp"

using namespace pbppo;

namespace {

struct Problem {
  std::size_t rows, in, out;
  std::vector<double> x, w, b, y, dy, dx, dw, db;

  Problem(std::size_t r, std::size_t i, std::size_t o) : rows(r), in(i), out(o) {
    Rng rng(1);
    auto fill = [&](std::vector<double>& v, std::size_t n) {
      v.resize(n);
      for (double& e : v) e = rng.normal();
    };
    fill(x, rows * in);
    fill(w, out * in);
    fill(b, out);
    fill(dy, rows * out);
    y.assign(rows * out, 0.0);
    dx.assign(rows * in, 0.0);
    dw.assign(out * in, 0.0);
    db.assign(out, 0.0);
  }
};

template <nn::Exec E>
void forward(benchmark::State& state) {
  Problem p(static_cast<std::size_t>(state.range(0)), 64, 64);
  for (auto _ : state) {
    nn::affine_forward(E, p.x, p.rows, p.in, p.w, p.b, p.out, p.y);
    benchmark::DoNotOptimize(p.y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.rows));
}

template <nn::Exec E>
void backward(benchmark::State& state) {
  Problem p(static_cast<std::size_t>(state.range(0)), 64, 64);
  for (auto _ : state) {
    nn::affine_backward(E, p.x, p.rows, p.in, p.w, p.out, p.dy, p.dx, p.dw, p.db);
    benchmark::DoNotOptimize(p.dw.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.rows));
}

}  // namespace

BENCHMARK(forward<nn::Exec::kSerial>)->Arg(64)->Arg(512)->Arg(2048);
BENCHMARK(forward<nn::Exec::kParallel>)->Arg(64)->Arg(512)->Arg(2048);
BENCHMARK(backward<nn::Exec::kSerial>)->Arg(64)->Arg(512)->Arg(2048);
BENCHMARK(backward<nn::Exec::kParallel>)->Arg(64)->Arg(512)->Arg(2048);

BENCHMARK_MAIN();
