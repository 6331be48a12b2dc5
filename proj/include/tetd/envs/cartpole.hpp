#pragma once

#include <array>
#include <map>
#include <string>

#include "tetd/rng.hpp"

namespace tetd {

// Standard cart-pole physics constants, Euler-integrated. The pole falls at
// 12 degrees, the cart leaves the track at |x| > 2.4, episodes cap at 1000
// steps, reward is +1 per step.
struct CartPoleSpec {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double half_pole_length = 0.5;
  double force_mag = 10.0;
  double timestep = 0.02;
  double theta_threshold = 12.0 * M_PI / 180.0;
  double x_threshold = 2.4;
  int max_steps = 1000;

  std::map<std::string, double> constants() const;
};

inline constexpr int kCartPoleLeft = 0;
inline constexpr int kCartPoleRight = 1;
inline constexpr int kCartPoleActions = 2;
inline constexpr int kCartPoleObsDim = 4;

class CartPole {
 public:
  explicit CartPole(CartPoleSpec spec = {});

  std::array<double, 4> reset(Rng& rng);  // uniform start in [-0.05, 0.05]^4

  struct StepResult {
    std::array<double, 4> obs;
    double reward;
    bool done;
  };
  // One Euler step under the given push direction. Throws if the episode has
  // already terminated.
  StepResult step(int action);

  std::array<double, 4> observation() const { return {x_, x_dot_, theta_, theta_dot_}; }
  bool done() const { return done_; }
  int steps_taken() const { return steps_; }
  const CartPoleSpec& spec() const { return spec_; }

  // Direct state override for tests.
  void set_state(double x, double x_dot, double theta, double theta_dot);

 private:
  CartPoleSpec spec_;
  double x_ = 0, x_dot_ = 0, theta_ = 0, theta_dot_ = 0;
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace tetd
