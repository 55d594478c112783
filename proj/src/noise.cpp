#include <cmath>
#include <random>

#include "mvsis/data.hpp"
#include "mvsis/error.hpp"

namespace mvsis {

Trajectory inject_noise(const Trajectory& traj, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error("data-pipeline.inject_noise", ErrorKind::invalid_argument, "sigma must be finite and non-negative");
  }
  std::mt19937_64 rng(seed);
  std::vector<EpidemicState> states;
  states.reserve(traj.size());
  for (const auto& x : traj) {
    Matrix values = x.values();
    if (sigma > 0.0) {
      std::normal_distribution<double> draw(0.0, sigma);
      // Row-major over (node, virus), states in time order.
      for (Index i = 0; i < values.rows(); ++i) {
        for (Index k = 0; k < values.cols(); ++k) values(i, k) += draw(rng);
      }
      clamp_to_domain(values);
    }
    states.emplace_back(std::move(values));
  }
  Trajectory out(std::move(states), traj.h);
  out.noise_sigma = sigma;
  out.max_excursion = traj.max_excursion;
  return out;
}

}  // namespace mvsis
