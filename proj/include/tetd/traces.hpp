#pragma once

#include <span>
#include <utility>
#include <vector>

namespace tetd {

// Followon-trace variants. Full and Soft share the same recursion and differ
// only in which scalar plays the decay role (gamma vs beta); Hard and Combined
// share the windowed form the same way.
enum class TraceMode { Full, Hard, Soft, Combined };

// Prediction indexing pairs i_t with the ratio one step back (rho_{t-1});
// control indexing pairs i_t with the current ratio (rho_t). The two differ by
// one step and are never inferred from context.
enum class TraceIndexing { Prediction, Control };

struct TraceConfig {
  TraceMode mode = TraceMode::Full;
  TraceIndexing indexing = TraceIndexing::Prediction;
  double decay = 0.0;  // gamma for Full/Hard, beta for Soft/Combined
  int window = 0;      // n, used by Hard/Combined
  bool incremental = false;  // Hard only: O(1) delta path with a zero guard

  static TraceConfig full(double gamma, TraceIndexing idx = TraceIndexing::Prediction);
  static TraceConfig hard(int n, double gamma, TraceIndexing idx = TraceIndexing::Prediction,
                          bool incremental = false);
  static TraceConfig soft(double beta, TraceIndexing idx = TraceIndexing::Prediction);
  static TraceConfig combined(double beta, int n, TraceIndexing idx = TraceIndexing::Prediction);

  void validate() const;
};

using RhoInterest = std::pair<double, double>;  // (rho_k, i_k)

// Stateless kernel: nested Horner evaluation of the truncated trace over an
// explicit window ordered oldest to newest. Used directly by learners that
// must rebuild historical ratios from current weights every step.
double trace_window_recompute(std::span<const RhoInterest> pairs, double decay,
                              TraceIndexing indexing);

// Streaming trace computer. One engine per run; movable, never shared.
class TraceEngine {
 public:
  explicit TraceEngine(TraceConfig config);

  // Feeds (rho_t, interest_t) and returns the trace value F at step t.
  double push(double rho, double interest);

  void reset();

  long step_count() const { return t_ + 1; }
  const TraceConfig& config() const { return cfg_; }

 private:
  double push_windowed(double rho, double interest);
  double push_recursive(double rho, double interest);
  double push_incremental(double rho, double interest);

  // |x| below this is treated as zero in the incremental divisor.
  static constexpr double kZeroGuard = 1e-12;

  double ring_rho(long k) const { return ring_[k % ring_.size()].first; }
  double ring_interest(long k) const { return ring_[k % ring_.size()].second; }
  // Direct O(n) product gamma^{n+1} * i_oldest * prod(window rhos) for the
  // correction term of the next step; exact replacement when the divide
  // shortcut is unavailable.
  double correction_from_ring() const;
  std::vector<RhoInterest> window_snapshot() const;

  TraceConfig cfg_;
  std::vector<RhoInterest> ring_;  // capacity window + 1, absolute slot t % cap
  long t_ = -1;
  double running_f_ = 0.0;
  double prev_rho_ = 0.0;       // rho_{t-1} for prediction-indexed recursions
  RhoInterest outgoing_{0, 0};  // pair evicted by the latest push
  double pending_correction_ = 0.0;
  bool pending_valid_ = false;
  bool windowed_fallback_next_ = false;
};

}  // namespace tetd
