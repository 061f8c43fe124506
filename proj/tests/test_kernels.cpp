#include <doctest.h>

#ifdef PBPPO_HAVE_OPENMP
#include <omp.h>
#endif

#include <vector>

#include "pbppo/nn/kernels.hpp"
#include "pbppo/nn/tape.hpp"
#include "pbppo/rl/ppo.hpp"
#include "pbppo/rng.hpp"

using namespace pbppo;
using namespace pbppo::nn;

namespace {

std::vector<double> randn(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

struct Case {
  std::size_t rows, in, out;
};

const Case kCases[] = {{1, 1, 1}, {3, 5, 2}, {64, 64, 64}, {257, 17, 33}, {2048, 3, 64}};

}  // namespace

TEST_CASE("serial affine kernels match a naive reference") {
  Rng rng(1);
  for (const auto& c : kCases) {
    const auto x = randn(c.rows * c.in, rng);
    const auto w = randn(c.out * c.in, rng);
    const auto b = randn(c.out, rng);
    std::vector<double> y(c.rows * c.out);
    serial::affine_forward(x, c.rows, c.in, w, b, c.out, y);
    for (std::size_t r = 0; r < c.rows; ++r) {
      for (std::size_t o = 0; o < c.out; ++o) {
        double acc = b[o];
        for (std::size_t i = 0; i < c.in; ++i) acc += w[o * c.in + i] * x[r * c.in + i];
        REQUIRE(y[r * c.out + o] == doctest::Approx(acc).epsilon(1e-13));
      }
    }
    const auto dy = randn(c.rows * c.out, rng);
    std::vector<double> dx(c.rows * c.in, 0.0), dw(c.out * c.in, 0.0), db(c.out, 0.0);
    serial::affine_backward(x, c.rows, c.in, w, c.out, dy, dx, dw, db);
    for (std::size_t o = 0; o < c.out; ++o) {
      double s = 0.0;
      for (std::size_t r = 0; r < c.rows; ++r) s += dy[r * c.out + o];
      REQUIRE(db[o] == doctest::Approx(s).epsilon(1e-12));
      for (std::size_t i = 0; i < c.in; ++i) {
        double a = 0.0;
        for (std::size_t r = 0; r < c.rows; ++r) a += dy[r * c.out + o] * x[r * c.in + i];
        REQUIRE(dw[o * c.in + i] == doctest::Approx(a).epsilon(1e-12));
      }
    }
    for (std::size_t r = 0; r < c.rows; ++r) {
      for (std::size_t i = 0; i < c.in; ++i) {
        double a = 0.0;
        for (std::size_t o = 0; o < c.out; ++o) a += dy[r * c.out + o] * w[o * c.in + i];
        REQUIRE(dx[r * c.in + i] == doctest::Approx(a).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("parallel affine kernels are bit-identical to the serial reference") {
#ifdef PBPPO_HAVE_OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
#endif
  Rng rng(2);
  for (const auto& c : kCases) {
    const auto x = randn(c.rows * c.in, rng);
    const auto w = randn(c.out * c.in, rng);
    const auto b = randn(c.out, rng);
    std::vector<double> ys(c.rows * c.out), yp(c.rows * c.out);
    serial::affine_forward(x, c.rows, c.in, w, b, c.out, ys);
    parallel::affine_forward(x, c.rows, c.in, w, b, c.out, yp);
    CHECK(ys == yp);

    const auto dy = randn(c.rows * c.out, rng);
    // Accumulation into non-zero buffers must agree as well.
    auto dx_s = randn(c.rows * c.in, rng);
    auto dw_s = randn(c.out * c.in, rng);
    auto db_s = randn(c.out, rng);
    auto dx_p = dx_s, dw_p = dw_s, db_p = db_s;
    serial::affine_backward(x, c.rows, c.in, w, c.out, dy, dx_s, dw_s, db_s);
    parallel::affine_backward(x, c.rows, c.in, w, c.out, dy, dx_p, dw_p, db_p);
    CHECK(dx_s == dx_p);
    CHECK(dw_s == dw_p);
    CHECK(db_s == db_p);

    std::vector<double> dw2(c.out * c.in, 0.0), db2(c.out, 0.0);
    std::vector<double> dw3 = dw2, db3 = db2;
    serial::affine_backward(x, c.rows, c.in, w, c.out, dy, {}, dw2, db2);
    parallel::affine_backward(x, c.rows, c.in, w, c.out, dy, {}, dw3, db3);
    CHECK(dw2 == dw3);
    CHECK(db2 == db3);
  }
#ifdef PBPPO_HAVE_OPENMP
  omp_set_num_threads(saved);
#endif
}

TEST_CASE("PPO loss gradients are identical under serial and parallel execution") {
  Rng rng(3);
  envs::ActionSpec spec = envs::ActionSpec::box({-2.0}, {2.0});
  rl::NetworkConfig net;
  rl::ActorCritic ac(3, spec, net, rng);
  rl::Minibatch mb;
  const std::size_t rows = 256;
  mb.observations = Matrix(rows, 3);
  mb.actions = Matrix(rows, 1);
  mb.old_logprobs = Matrix(rows, 1);
  mb.advantages = Matrix(rows, 1);
  mb.returns = Matrix(rows, 1);
  for (double& v : mb.observations.data) v = rng.normal();
  for (double& v : mb.actions.data) v = rng.normal();
  for (double& v : mb.advantages.data) v = rng.normal();
  for (double& v : mb.returns.data) v = rng.normal();
  for (std::size_t r = 0; r < rows; ++r) {
    mb.old_logprobs.data[r] =
        ac.logprob(mb.observations.row_span(r), mb.actions.row_span(r)) + 0.3 * rng.normal();
  }
  rl::PpoHyper hyper;
  hyper.entropy_coef = 0.01;
  const auto gs = rl::ppo_loss_grad(ac, mb, hyper, Exec::kSerial);
  const auto gp = rl::ppo_loss_grad(ac, mb, hyper, Exec::kParallel);
  CHECK(gs.loss == gp.loss);
  CHECK(gs.policy == gp.policy);
  CHECK(gs.value == gp.value);
}

TEST_CASE("kernel availability is reported") {
#ifdef PBPPO_HAVE_OPENMP
  CHECK(parallel_kernels_available());
#else
  CHECK_FALSE(parallel_kernels_available());
#endif
  CHECK(max_threads() >= 1);
}
