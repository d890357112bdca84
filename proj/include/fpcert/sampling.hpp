#pragma once

// Deterministic coefficient-vector sources and a parallel extreme-ratio scan.
//
// Every coefficient vector is a pure function of (seed, index), so a scan
// gives the same extremes and witnesses for any thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "fpcert/errors.hpp"
#include "fpcert/scalar.hpp"
#include "fpcert/spaces.hpp"

namespace fpcert {

struct SamplingBudget {
  std::size_t samples = 2000;          // random draws on top of any enumeration
  std::uint64_t seed = 0;
  std::size_t exhaustive_limit = 10;   // enumerate {-1,0,1}^M while M <= this
  std::size_t vertex_pair_limit = 64;  // enumerate vertex pairs of the simplex while N <= this
  unsigned threads = 1;
};

// How the evaluated set was produced.
struct SamplingMode {
  std::size_t enumerated = 0;  // deterministic points (sign patterns, vertices)
  bool exhaustive = false;     // the enumeration covered its whole family
  std::size_t sampled = 0;     // random draws
  std::uint64_t seed = 0;

  const char* label() const { return sampled == 0 ? "EXHAUSTIVE" : "SAMPLED"; }

  friend bool operator==(const SamplingMode&, const SamplingMode&) = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Independent generator for draw `index` of stream `stream`.
inline std::mt19937_64 indexed_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return std::mt19937_64(detail::splitmix64(detail::splitmix64(seed ^ detail::splitmix64(stream)) + index));
}

// Uniform point of the probability simplex (normalized exponentials).
template <Scalar S>
CoordinateVector<S> random_simplex_point(std::mt19937_64& rng, std::size_t dim) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<S> t(dim);
  S total(0);
  for (auto& x : t) {
    x = from_double<S>(expo(rng) + 1e-300);
    total += x;
  }
  for (auto& x : t) x /= total;
  return CoordinateVector<S>(std::move(t));
}

// Direction uniform on the Euclidean sphere.
template <Scalar S>
CoordinateVector<S> random_sphere_point(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> g(dim);
  double sq = 0.0;
  for (auto& x : g) {
    x = gauss(rng);
    sq += x * x;
  }
  const double inv = sq > 0.0 ? 1.0 / std::sqrt(sq) : 1.0;
  std::vector<S> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = from_double<S>(g[i] * inv);
  return CoordinateVector<S>(std::move(out));
}

// Coefficient vectors a != 0 of a fixed dimension: every sign pattern in
// {-1,0,1}^dim (when dim is small enough) followed by random draws that
// alternate between sphere directions and simplex points.
template <Scalar S>
class CoefficientSource {
 public:
  enum class Random { Mixed, SimplexOnly, SphereOnly };

  CoefficientSource(std::size_t dim, const SamplingBudget& budget, Random random = Random::Mixed)
      : dim_(dim), budget_(budget), random_(random) {
    if (dim_ >= 1 && dim_ <= budget_.exhaustive_limit && dim_ <= 19) {
      std::size_t n = 1;
      for (std::size_t i = 0; i < dim_; ++i) n *= 3;
      patterns_ = n - 1;  // skip the zero pattern
    }
    samples_ = dim_ == 0 ? 0 : budget_.samples;
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return patterns_ + samples_; }

  SamplingMode mode() const {
    return SamplingMode{patterns_, patterns_ > 0, samples_, budget_.seed};
  }

  CoordinateVector<S> at(std::size_t k) const {
    if (k < patterns_) return pattern(k + 1);
    const std::size_t r = k - patterns_;
    auto rng = indexed_rng(budget_.seed, 0x636f6566 + dim_, r);
    const bool simplex = random_ == Random::SimplexOnly || (random_ == Random::Mixed && (r % 2 == 1));
    return simplex ? random_simplex_point<S>(rng, dim_) : random_sphere_point<S>(rng, dim_);
  }

 private:
  CoordinateVector<S> pattern(std::size_t code) const {
    std::vector<S> a(dim_, S(0));
    for (std::size_t i = 0; i < dim_; ++i) {
      const int digit = static_cast<int>(code % 3);
      a[i] = S(digit == 2 ? -1 : digit);
      code /= 3;
    }
    return CoordinateVector<S>(std::move(a));
  }

  std::size_t dim_;
  SamplingBudget budget_;
  Random random_;
  std::size_t patterns_ = 0;
  std::size_t samples_ = 0;
};

// Running minimum and maximum of a ratio together with the indices attaining them.
template <Scalar S>
struct Extremes {
  std::size_t evaluated = 0;
  std::size_t excluded = 0;
  std::size_t violations = 0;
  std::optional<S> max;
  std::optional<S> min;
  std::size_t argmax = 0;
  std::size_t argmin = 0;

  void add(std::size_t index, const S& value) {
    ++evaluated;
    if (!max || value > *max) {
      max = value;
      argmax = index;
    }
    if (!min || value < *min) {
      min = value;
      argmin = index;
    }
  }

  // `later` must cover indices after every index seen here.
  void merge(const Extremes& later) {
    evaluated += later.evaluated;
    excluded += later.excluded;
    violations += later.violations;
    if (later.max && (!max || *later.max > *max)) {
      max = later.max;
      argmax = later.argmax;
    }
    if (later.min && (!min || *later.min < *min)) {
      min = later.min;
      argmin = later.argmin;
    }
  }
};

// Bounds a ratio is expected to respect; values outside count as violations.
template <Scalar S>
struct RatioBounds {
  std::optional<S> lower;
  std::optional<S> upper;
  double tol = 1e-9;

  bool violated(const S& v) const {
    if (lower && !le_tol(*lower, v, tol)) return true;
    if (upper && !le_tol(v, *upper, tol)) return true;
    return false;
  }
};

// Evaluates fn(k) for k in [0, count). fn returns the ratio or nullopt when the
// point is excluded. Chunks are merged in index order, so ties resolve to the
// smallest index regardless of `threads`.
template <Scalar S, class Fn>
Extremes<S> scan_extremes(std::size_t count, unsigned threads, Fn&& fn, const RatioBounds<S>& bounds = {}) {
  auto run = [&](std::size_t begin, std::size_t end) {
    Extremes<S> ex;
    for (std::size_t k = begin; k < end; ++k) {
      std::optional<S> r = fn(k);
      if (!r) {
        ++ex.excluded;
        continue;
      }
      if (bounds.violated(*r)) ++ex.violations;
      ex.add(k, *r);
    }
    return ex;
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count / 64, 1))));
  if (workers == 1) return run(0, count);

  std::vector<Extremes<S>> parts(workers);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      pool.emplace_back([&, w, begin, end] {
        try {
          parts[w] = run(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Extremes<S> total;
  for (const auto& part : parts) total.merge(part);
  return total;
}

}  // namespace fpcert
