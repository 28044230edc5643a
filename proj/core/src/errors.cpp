#include "lipcausal/errors.hpp"

#include <cmath>

#include "lipcausal/types.hpp"

namespace lipcausal {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::SignatureViolation: return "signature violation";
    case ErrorKind::SingularMetric: return "singular metric";
    case ErrorKind::OnSingularSet: return "on singular set";
    case ErrorKind::DegenerateNeighborhood: return "degenerate neighborhood";
    case ErrorKind::InconsistentSliding: return "inconsistent sliding data";
    case ErrorKind::SlidingAmbiguity: return "sliding-mode ambiguity";
    case ErrorKind::InterfaceIntersection: return "interface intersection";
    case ErrorKind::NotCausal: return "not causal";
    case ErrorKind::NotCausallyRelated: return "not causally related";
    case ErrorKind::NotUniformlyTimelike: return "not uniformly timelike";
    case ErrorKind::NotOriginNormalized: return "field not origin-normalized";
    case ErrorKind::InsufficientSampling: return "insufficient sampling";
    case ErrorKind::NoConvergence: return "no convergence";
  }
  return "unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularMetric:
    case ErrorKind::DegenerateNeighborhood:
    case ErrorKind::InconsistentSliding:
    case ErrorKind::SlidingAmbiguity:
    case ErrorKind::InterfaceIntersection:
    case ErrorKind::NoConvergence:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::string_view name) {
  // FNV-1a over the name, then mixed with the parent seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix(seed ^ mix(h));
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix(seed ^ mix(index + 0x632be59bd9b4e019ULL));
}

Vec uniform_on_sphere(Rng& rng, Eigen::Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec d(dim);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) d[i] = normal(rng);
    norm = d.norm();
  } while (norm < 1e-300);
  return d / norm;
}

Vec uniform_in_ball(Rng& rng, Eigen::Index dim, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
  return r * uniform_on_sphere(rng, dim);
}

}  // namespace lipcausal
