#include "kcent/probes.hpp"

#include <cmath>

#include "kcent/error.hpp"

namespace kcent {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <class Sink>
void generate(std::uint64_t seed, std::size_t index, Eigen::Index n, Sink&& sink) {
  std::uint64_t state = mix_seed(seed, static_cast<std::uint64_t>(index));
  std::uint64_t bits = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    if ((r & 63) == 0) bits = splitmix64(state);
    sink(r, (bits & 1ULL) ? 1.0 : -1.0);
    bits >>= 1;
  }
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = a ^ (0x632be59bd9b4e019ULL + (b << 6) + (b >> 2));
  splitmix64(state);
  state ^= b * 0xd1b54a32d192ed03ULL;
  return splitmix64(state);
}

ProbeEnsemble::ProbeEnsemble(std::uint64_t seed, std::size_t count, Eigen::Index dimension)
    : seed_(seed), count_(count), dimension_(dimension) {
  if (count == 0) fail(ErrorCode::InvalidArgument, "probe count must be positive");
}

Eigen::VectorXd ProbeEnsemble::probe(std::size_t i) const {
  Eigen::VectorXd z(dimension_);
  generate(seed_, i, dimension_, [&](Eigen::Index r, double s) { z(r) = s; });
  return z;
}

RowBlock ProbeEnsemble::block(std::size_t first, std::size_t k) const {
  RowBlock out(dimension_, static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    generate(seed_, first + j, dimension_, [&](Eigen::Index r, double s) { out(r, col) = s; });
  }
  return out;
}

std::size_t probe_count(double constant, double epsilon, Eigen::Index n) {
  if (!(epsilon > 0.0)) fail(ErrorCode::EpsilonOutOfRange, "epsilon must be positive");
  const double m = std::ceil(constant * std::log(2.0 * static_cast<double>(n)) / (epsilon * epsilon));
  return static_cast<std::size_t>(std::max(1.0, m));
}

double hutchinson_trace(const std::function<double(const Eigen::VectorXd&)>& quad, std::size_t samples,
                        Eigen::Index n, std::uint64_t seed) {
  const ProbeEnsemble probes(seed, samples, n);
  double sum = 0.0;
  for (std::size_t i = 0; i < samples; ++i) sum += quad(probes.probe(i));
  return sum / static_cast<double>(samples);
}

}  // namespace kcent
