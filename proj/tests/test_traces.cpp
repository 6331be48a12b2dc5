#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "tetd/traces.hpp"

using namespace tetd;
using tetd::testing::brute_force_trace;

namespace {

struct Stream {
  std::vector<double> rho, interest;
};

Stream random_stream(long length, std::uint64_t seed, double rho_lo = 0.0, double rho_hi = 2.0) {
  Rng rng(seed);
  Stream s;
  for (long t = 0; t < length; ++t) {
    s.rho.push_back(rng.uniform(rho_lo, rho_hi));
    s.interest.push_back(rng.uniform(0.1, 2.0));
  }
  return s;
}

}  // namespace

TEST_CASE("hard trace with n=0 returns the current interest") {
  for (TraceIndexing idx : {TraceIndexing::Prediction, TraceIndexing::Control}) {
    TraceEngine engine(TraceConfig::hard(0, 0.9, idx));
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
      const double i = rng.uniform(0.1, 3.0);
      CHECK(engine.push(rng.uniform(0.0, 2.0), i) == i);
    }
  }
}

TEST_CASE("hard trace on a unit stream is the geometric sum") {
  const double gamma = 0.9;
  const int n = 5;
  TraceEngine engine(TraceConfig::hard(n, gamma));
  double f = 0.0;
  for (int t = 0; t <= 3 * n; ++t) f = engine.push(1.0, 1.0);
  const double expected = (1.0 - std::pow(gamma, n + 1)) / (1.0 - gamma);
  CHECK(f == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("hard trace with n=2 matches the three-term nested expansion") {
  const double gamma = 0.95;
  TraceEngine engine(TraceConfig::hard(2, gamma));
  const Stream s = random_stream(200, 11);
  for (long t = 0; t < 200; ++t) {
    const double f = engine.push(s.rho[t], s.interest[t]);
    if (t < 2) continue;
    const double expected =
        s.interest[t] +
        gamma * s.rho[t - 1] * (s.interest[t - 1] + gamma * s.rho[t - 2] * s.interest[t - 2]);
    CHECK(f == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("hard trace equals direct summation for random streams and window sizes") {
  for (TraceIndexing idx : {TraceIndexing::Prediction, TraceIndexing::Control}) {
    for (int n : {0, 1, 3, 8, 32}) {
      const Stream s = random_stream(400, 100 + n);
      TraceEngine engine(TraceConfig::hard(n, 0.97, idx));
      for (long t = 0; t < 400; ++t) {
        const double f = engine.push(s.rho[t], s.interest[t]);
        const double oracle = brute_force_trace(s.rho, s.interest, t, n, 0.97, idx);
        CHECK(f == doctest::Approx(oracle).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("full recursion matches the untruncated expansion in both indexings") {
  for (TraceIndexing idx : {TraceIndexing::Prediction, TraceIndexing::Control}) {
    const Stream s = random_stream(60, 42, 0.3, 1.3);
    TraceEngine engine(TraceConfig::full(0.9, idx));
    for (long t = 0; t < 60; ++t) {
      const double f = engine.push(s.rho[t], s.interest[t]);
      const double oracle = brute_force_trace(s.rho, s.interest, t, -1, 0.9, idx);
      CHECK(f == doctest::Approx(oracle).epsilon(1e-10));
    }
  }
}

TEST_CASE("soft trace with beta=gamma equals the hard trace while t <= n") {
  const double gamma = 0.93;
  const int n = 12;
  TraceEngine soft(TraceConfig::soft(gamma));
  TraceEngine hard(TraceConfig::hard(n, gamma));
  const Stream s = random_stream(n + 1, 5);
  for (long t = 0; t <= n; ++t) {
    const double fs = soft.push(s.rho[t], s.interest[t]);
    const double fh = hard.push(s.rho[t], s.interest[t]);
    CHECK(fs == doctest::Approx(fh).epsilon(1e-13));
  }
}

TEST_CASE("combined trace is the windowed sum with beta in place of gamma") {
  const double beta = 0.4;
  const int n = 4;
  TraceEngine engine(TraceConfig::combined(beta, n));
  const Stream s = random_stream(100, 17);
  for (long t = 0; t < 100; ++t) {
    const double f = engine.push(s.rho[t], s.interest[t]);
    const double oracle = brute_force_trace(s.rho, s.interest, t, n, beta, TraceIndexing::Prediction);
    CHECK(f == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("trace value is bounded by (n+1) rho_max^n i_max") {
  for (int n : {1, 4, 9}) {
    const Stream s = random_stream(500, 900 + n);
    double rho_max = 1.0, i_max = 0.0;
    TraceEngine engine(TraceConfig::hard(n, 0.99));
    for (long t = 0; t < 500; ++t) {
      rho_max = std::max(rho_max, s.rho[t]);
      i_max = std::max(i_max, s.interest[t]);
      const double f = engine.push(s.rho[t], s.interest[t]);
      CHECK(f <= (n + 1) * std::pow(rho_max, n) * i_max + 1e-12);
    }
  }
}

TEST_CASE("larger windows dominate on positive streams") {
  const Stream s = random_stream(300, 23, 0.05, 2.0);
  TraceEngine small(TraceConfig::hard(2, 0.95));
  TraceEngine large(TraceConfig::hard(6, 0.95));
  for (long t = 0; t < 300; ++t) {
    const double f_small = small.push(s.rho[t], s.interest[t]);
    const double f_large = large.push(s.rho[t], s.interest[t]);
    CHECK(f_large >= f_small - 1e-12);
  }
}

TEST_CASE("hard trace ignores stream content older than the window") {
  const int n = 3;
  Stream a = random_stream(50, 31);
  Stream b = a;
  // Perturb everything strictly older than the window of the final step.
  for (long t = 0; t < 50 - (n + 1); ++t) {
    b.rho[t] += 5.0;
    b.interest[t] += 7.0;
  }
  TraceEngine ea(TraceConfig::hard(n, 0.9));
  TraceEngine eb(TraceConfig::hard(n, 0.9));
  double fa = 0, fb = 0;
  for (long t = 0; t < 50; ++t) {
    fa = ea.push(a.rho[t], a.interest[t]);
    fb = eb.push(b.rho[t], b.interest[t]);
  }
  CHECK(fa == fb);
}

TEST_CASE("incremental path agrees with the windowed path on constant streams") {
  TraceEngine inc(TraceConfig::hard(4, 0.9, TraceIndexing::Prediction, true));
  TraceEngine win(TraceConfig::hard(4, 0.9, TraceIndexing::Prediction, false));
  for (int t = 0; t < 100; ++t)
    CHECK(inc.push(1.0, 1.0) == doctest::Approx(win.push(1.0, 1.0)).epsilon(1e-14));
}

TEST_CASE("incremental path tracks the windowed path over long random streams") {
  for (TraceIndexing idx : {TraceIndexing::Prediction, TraceIndexing::Control}) {
    for (int n : {0, 1, 4, 11}) {
      const Stream s = random_stream(10000, 1234 + n, 0.01, 2.0);
      TraceEngine inc(TraceConfig::hard(n, 0.99, idx, true));
      TraceEngine win(TraceConfig::hard(n, 0.99, idx, false));
      double worst = 0.0;
      for (long t = 0; t < 10000; ++t) {
        const double fi = inc.push(s.rho[t], s.interest[t]);
        const double fw = win.push(s.rho[t], s.interest[t]);
        worst = std::max(worst, std::abs(fi - fw) / std::max(1.0, std::abs(fw)));
      }
      CHECK(worst < 1e-9);
    }
  }
}

TEST_CASE("incremental path survives exact zeros via the windowed fallback") {
  for (TraceIndexing idx : {TraceIndexing::Prediction, TraceIndexing::Control}) {
    Stream s = random_stream(2000, 77, 0.0, 2.0);
    Rng zeros(555);
    for (long t = 0; t < 2000; ++t)
      if (zeros.uniform01() < 0.05) s.rho[t] = 0.0;
    TraceEngine inc(TraceConfig::hard(3, 0.95, idx, true));
    TraceEngine win(TraceConfig::hard(3, 0.95, idx, false));
    for (long t = 0; t < 2000; ++t) {
      const double fi = inc.push(s.rho[t], s.interest[t]);
      const double fw = win.push(s.rho[t], s.interest[t]);
      CHECK(fi == doctest::Approx(fw).epsilon(1e-10));
    }
  }
}

TEST_CASE("window recompute handles short windows and gamma = 0") {
  CHECK(trace_window_recompute(std::vector<RhoInterest>{{0.7, 1.3}}, 0.9,
                               TraceIndexing::Prediction) == doctest::Approx(1.3));
  const std::vector<RhoInterest> pairs = {{0.5, 1.0}, {2.0, 0.3}, {0.1, 0.8}};
  CHECK(trace_window_recompute(pairs, 0.0, TraceIndexing::Prediction) == doctest::Approx(0.8));
  CHECK(trace_window_recompute(pairs, 0.0, TraceIndexing::Control) == doctest::Approx(0.8));
}

TEST_CASE("window recompute equals the streaming engine on the same window") {
  const int n = 5;
  const Stream s = random_stream(80, 3);
  for (TraceIndexing idx : {TraceIndexing::Prediction, TraceIndexing::Control}) {
    TraceEngine engine(TraceConfig::hard(n, 0.92, idx));
    std::deque<RhoInterest> window;
    for (long t = 0; t < 80; ++t) {
      const double f = engine.push(s.rho[t], s.interest[t]);
      window.push_back({s.rho[t], s.interest[t]});
      if (static_cast<int>(window.size()) > n + 1) window.pop_front();
      const std::vector<RhoInterest> pairs(window.begin(), window.end());
      CHECK(f == doctest::Approx(trace_window_recompute(pairs, 0.92, idx)).epsilon(1e-12));
    }
  }
}

TEST_CASE("config validation rejects bad parameters") {
  CHECK_THROWS(TraceConfig::soft(0.0));
  CHECK_THROWS(TraceConfig::soft(1.0));
  CHECK_THROWS(TraceConfig::hard(-1, 0.9));
  CHECK_THROWS(TraceConfig::full(1.0));
  const TraceConfig soft_incremental{TraceMode::Soft, TraceIndexing::Prediction, 0.5, 0, true};
  CHECK_THROWS_AS(soft_incremental.validate(), std::invalid_argument);
}
