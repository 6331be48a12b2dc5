#include "tetd/traces.hpp"

#include <cmath>
#include <stdexcept>

namespace tetd {

TraceConfig TraceConfig::full(double gamma, TraceIndexing idx) {
  TraceConfig c{TraceMode::Full, idx, gamma, 0, false};
  c.validate();
  return c;
}

TraceConfig TraceConfig::hard(int n, double gamma, TraceIndexing idx, bool incremental) {
  TraceConfig c{TraceMode::Hard, idx, gamma, n, incremental};
  c.validate();
  return c;
}

TraceConfig TraceConfig::soft(double beta, TraceIndexing idx) {
  TraceConfig c{TraceMode::Soft, idx, beta, 0, false};
  c.validate();
  return c;
}

TraceConfig TraceConfig::combined(double beta, int n, TraceIndexing idx) {
  TraceConfig c{TraceMode::Combined, idx, beta, n, false};
  c.validate();
  return c;
}

void TraceConfig::validate() const {
  if (mode == TraceMode::Soft || mode == TraceMode::Combined) {
    if (decay <= 0.0 || decay >= 1.0)
      throw std::invalid_argument("TraceConfig: beta must lie in (0, 1)");
  } else {
    if (decay < 0.0 || decay >= 1.0)
      throw std::invalid_argument("TraceConfig: gamma must lie in [0, 1)");
  }
  if ((mode == TraceMode::Hard || mode == TraceMode::Combined) && window < 0)
    throw std::invalid_argument("TraceConfig: truncation length must be nonnegative");
  if (incremental && mode != TraceMode::Hard)
    throw std::invalid_argument("TraceConfig: incremental path applies to Hard mode only");
}

double trace_window_recompute(std::span<const RhoInterest> pairs, double decay,
                              TraceIndexing indexing) {
  double f = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    // Prediction pairs i_k with the ratio of the previous entry; the oldest
    // entry's predecessor multiplies a zero and never contributes.
    const double rho = indexing == TraceIndexing::Control ? pairs[k].first
                       : (k == 0 ? 0.0 : pairs[k - 1].first);
    f = pairs[k].second + decay * rho * f;
  }
  return f;
}

TraceEngine::TraceEngine(TraceConfig config) : cfg_(config) {
  cfg_.validate();
  const bool windowed = cfg_.mode == TraceMode::Hard || cfg_.mode == TraceMode::Combined;
  ring_.assign(windowed ? static_cast<std::size_t>(cfg_.window) + 1 : 1, {0.0, 0.0});
}

void TraceEngine::reset() {
  for (auto& p : ring_) p = {0.0, 0.0};
  t_ = -1;
  running_f_ = 0.0;
  prev_rho_ = 0.0;
  outgoing_ = {0.0, 0.0};
  pending_correction_ = 0.0;
  pending_valid_ = false;
  windowed_fallback_next_ = false;
}

double TraceEngine::push(double rho, double interest) {
  if (rho < 0.0) throw std::invalid_argument("TraceEngine: negative importance ratio");
  switch (cfg_.mode) {
    case TraceMode::Full:
    case TraceMode::Soft:
      return push_recursive(rho, interest);
    case TraceMode::Hard:
      return cfg_.incremental ? push_incremental(rho, interest) : push_windowed(rho, interest);
    case TraceMode::Combined:
      return push_windowed(rho, interest);
  }
  throw std::logic_error("TraceEngine: unreachable");
}

double TraceEngine::push_recursive(double rho, double interest) {
  const double rho_used = cfg_.indexing == TraceIndexing::Prediction ? prev_rho_ : rho;
  running_f_ = interest + cfg_.decay * rho_used * running_f_;
  prev_rho_ = rho;
  ++t_;
  return running_f_;
}

std::vector<RhoInterest> TraceEngine::window_snapshot() const {
  // Entries u-m+1 .. u of the ring, oldest first; call after inserting step u.
  const long u = t_;
  const long cap = static_cast<long>(ring_.size());
  const long m = std::min<long>(cap, u + 1);
  std::vector<RhoInterest> out;
  out.reserve(m);
  for (long k = u - m + 1; k <= u; ++k) out.push_back(ring_[k % cap]);
  return out;
}

double TraceEngine::push_windowed(double rho, double interest) {
  const long u = t_ + 1;
  const long cap = static_cast<long>(ring_.size());
  ring_[u % cap] = {rho, interest};
  t_ = u;
  const double f = trace_window_recompute(window_snapshot(), cfg_.decay, cfg_.indexing);
  running_f_ = f;
  prev_rho_ = rho;
  return f;
}

double TraceEngine::correction_from_ring() const {
  // gamma^{n+1} * i_{u-n} * prod of window ratios; the control form skips the
  // oldest ratio because its correction carries one fewer factor until the
  // next step's ratio arrives.
  const long u = t_;
  const int n = cfg_.window;
  const long cap = static_cast<long>(ring_.size());
  double p = std::pow(cfg_.decay, n + 1) * ring_interest(u - n);
  const long first = cfg_.indexing == TraceIndexing::Prediction ? u - n : u - n + 1;
  for (long k = first; k <= u; ++k) p *= ring_[k % cap].first;
  return p;
}

double TraceEngine::push_incremental(double rho, double interest) {
  const long u = t_ + 1;
  const int n = cfg_.window;
  const long cap = static_cast<long>(ring_.size());

  if (u >= cap) outgoing_ = ring_[u % cap];  // pair (rho, i) at step u-n-1
  ring_[u % cap] = {rho, interest};
  t_ = u;

  double f;
  if (windowed_fallback_next_) {
    f = trace_window_recompute(window_snapshot(), cfg_.decay, cfg_.indexing);
    windowed_fallback_next_ = false;
  } else {
    double correction = 0.0;
    if (u >= n + 1) {
      correction = cfg_.indexing == TraceIndexing::Prediction ? pending_correction_
                                                              : pending_correction_ * rho;
    }
    const double rho_used = cfg_.indexing == TraceIndexing::Prediction ? prev_rho_ : rho;
    f = interest + cfg_.decay * rho_used * running_f_ - correction;
  }
  running_f_ = f;
  prev_rho_ = rho;

  // Maintain the next step's correction term once the ring covers a full
  // window. The multiplicative shortcut divides by the outgoing pair; when
  // that product is (near) zero the term is rebuilt from the ring and the next
  // trace value is recomputed from the window as well.
  if (u >= n) {
    if (u == n || !pending_valid_) {
      pending_correction_ = correction_from_ring();
      pending_valid_ = true;
    } else {
      const double numer = rho * ring_interest(u - n);
      const double denom = cfg_.indexing == TraceIndexing::Prediction
                               ? outgoing_.first * outgoing_.second
                               : ring_rho(u - n) * outgoing_.second;
      if (std::abs(denom) < kZeroGuard) {
        pending_correction_ = correction_from_ring();
        windowed_fallback_next_ = true;
      } else {
        pending_correction_ *= numer / denom;
      }
    }
  }
  return f;
}

}  // namespace tetd
