#include "tetd/envs/cartpole.hpp"

#include <cmath>
#include <stdexcept>

namespace tetd {

std::map<std::string, double> CartPoleSpec::constants() const {
  return {{"gravity", gravity},
          {"cart_mass", cart_mass},
          {"pole_mass", pole_mass},
          {"half_pole_length", half_pole_length},
          {"force_mag", force_mag},
          {"timestep", timestep},
          {"theta_threshold", theta_threshold},
          {"x_threshold", x_threshold},
          {"max_steps", static_cast<double>(max_steps)}};
}

CartPole::CartPole(CartPoleSpec spec) : spec_(spec) {}

std::array<double, 4> CartPole::reset(Rng& rng) {
  x_ = rng.uniform(-0.05, 0.05);
  x_dot_ = rng.uniform(-0.05, 0.05);
  theta_ = rng.uniform(-0.05, 0.05);
  theta_dot_ = rng.uniform(-0.05, 0.05);
  steps_ = 0;
  done_ = false;
  return observation();
}

void CartPole::set_state(double x, double x_dot, double theta, double theta_dot) {
  x_ = x;
  x_dot_ = x_dot;
  theta_ = theta;
  theta_dot_ = theta_dot;
  done_ = std::abs(x_) > spec_.x_threshold || std::abs(theta_) > spec_.theta_threshold;
}

CartPole::StepResult CartPole::step(int action) {
  if (done_) throw std::logic_error("CartPole::step: episode already terminated");
  if (action != kCartPoleLeft && action != kCartPoleRight)
    throw std::invalid_argument("CartPole::step: bad action");

  const double force = action == kCartPoleRight ? spec_.force_mag : -spec_.force_mag;
  const double total_mass = spec_.cart_mass + spec_.pole_mass;
  const double pole_mass_length = spec_.pole_mass * spec_.half_pole_length;
  const double cos_t = std::cos(theta_);
  const double sin_t = std::sin(theta_);

  const double temp = (force + pole_mass_length * theta_dot_ * theta_dot_ * sin_t) / total_mass;
  const double theta_acc =
      (spec_.gravity * sin_t - cos_t * temp) /
      (spec_.half_pole_length * (4.0 / 3.0 - spec_.pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

  x_ += spec_.timestep * x_dot_;
  x_dot_ += spec_.timestep * x_acc;
  theta_ += spec_.timestep * theta_dot_;
  theta_dot_ += spec_.timestep * theta_acc;
  ++steps_;

  done_ = std::abs(x_) > spec_.x_threshold || std::abs(theta_) > spec_.theta_threshold ||
          steps_ >= spec_.max_steps;
  return {observation(), 1.0, done_};
}

}  // namespace tetd
