#pragma once

// Norms of the truncated sequence spaces: sup, l_p, Lin's renorming of l_1,
// the James norm of a summing-basis expansion, and the c0 summing-basis norm.
//
// Indices follow the mathematical convention: coordinate i of a vector of
// length N is addressed with 1 <= i <= N.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "fpcert/errors.hpp"
#include "fpcert/scalar.hpp"

namespace fpcert {

// A finite list of real coefficients; an element of c00 truncated at N.
template <Scalar S>
class CoordinateVector {
 public:
  CoordinateVector() = default;

  explicit CoordinateVector(std::vector<S> entries) : entries_(std::move(entries)) {
    for (const auto& x : entries_) {
      if (!is_finite(x)) throw ParameterError("coordinate vector has a non-finite entry");
    }
  }

  CoordinateVector(std::initializer_list<S> entries) : CoordinateVector(std::vector<S>(entries)) {}

  static CoordinateVector zeros(std::size_t n) { return CoordinateVector(std::vector<S>(n, S(0))); }

  // The n-th unit vector of length `size`.
  static CoordinateVector delta(std::size_t n, std::size_t size) {
    if (n < 1 || n > size) throw IndexError("delta index out of range");
    std::vector<S> e(size, S(0));
    e[n - 1] = S(1);
    return CoordinateVector(std::move(e));
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // 1-based access.
  const S& operator()(std::size_t i) const { return entries_.at(i - 1); }

  std::span<const S> entries() const { return entries_; }
  const std::vector<S>& values() const { return entries_; }

  bool is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const S& x) { return x == S(0); });
  }

  // Copy truncated or zero-padded to length n.
  CoordinateVector resized(std::size_t n) const {
    std::vector<S> out(entries_);
    out.resize(n, S(0));
    return CoordinateVector(std::move(out));
  }

  CoordinateVector scaled(const S& lambda) const {
    std::vector<S> out(entries_);
    for (auto& x : out) x *= lambda;
    return CoordinateVector(std::move(out));
  }

  // Coordinate-wise sum; the shorter operand is zero-padded.
  friend CoordinateVector operator+(const CoordinateVector& u, const CoordinateVector& v) {
    std::vector<S> out(std::max(u.size(), v.size()), S(0));
    for (std::size_t i = 0; i < u.size(); ++i) out[i] += u.entries_[i];
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += v.entries_[i];
    return CoordinateVector(std::move(out));
  }

  friend CoordinateVector operator-(const CoordinateVector& u, const CoordinateVector& v) {
    std::vector<S> out(std::max(u.size(), v.size()), S(0));
    for (std::size_t i = 0; i < u.size(); ++i) out[i] += u.entries_[i];
    for (std::size_t i = 0; i < v.size(); ++i) out[i] -= v.entries_[i];
    return CoordinateVector(std::move(out));
  }

  friend bool operator==(const CoordinateVector&, const CoordinateVector&) = default;

 private:
  std::vector<S> entries_;
};

class NormTag {
 public:
  enum class Kind { Sup, EllP, James, Lin };

  static NormTag sup() { return NormTag(Kind::Sup, 0.0); }
  static NormTag lin() { return NormTag(Kind::Lin, 0.0); }

  static NormTag ell_p(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("ell_p norm requires finite p >= 1");
    return NormTag(Kind::EllP, p);
  }

  static NormTag james(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("James norm requires finite p > 1");
    return NormTag(Kind::James, p);
  }

  Kind kind() const { return kind_; }
  double p() const { return p_; }

  // True when the unit ball is a polytope (extremes sit at finitely many directions).
  bool polyhedral() const { return kind_ == Kind::Sup || kind_ == Kind::Lin || (kind_ == Kind::EllP && p_ == 1.0); }

  std::string name() const {
    switch (kind_) {
      case Kind::Sup: return "SUP";
      case Kind::Lin: return "LIN";
      case Kind::EllP: return "ELL_P(" + to_string(p_) + ")";
      case Kind::James: return "JAMES(" + to_string(p_) + ")";
    }
    return "?";
  }

  friend bool operator==(const NormTag&, const NormTag&) = default;

 private:
  NormTag(Kind kind, double p) : kind_(kind), p_(p) {}

  Kind kind_;
  double p_;
};

template <Scalar S>
S sup_norm(const CoordinateVector<S>& v) {
  S best(0);
  for (const auto& x : v.entries()) best = std::max(best, S(abs_of(x)));
  return best;
}

template <Scalar S>
S ell1_norm(const CoordinateVector<S>& v) {
  S sum(0);
  for (const auto& x : v.entries()) sum += abs_of(x);
  return sum;
}

// Scaled by the sup norm before powering to stay clear of overflow.
inline double ell_p_norm(const CoordinateVector<double>& v, double p) {
  if (!(p >= 1.0)) throw ParameterError("ell_p norm requires p >= 1");
  if (p == 1.0) return ell1_norm(v);
  const double scale = sup_norm(v);
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double x : v.entries()) sum += std::pow(std::fabs(x) / scale, p);
  return scale * std::pow(sum, 1.0 / p);
}

// max over k of 8^k/(1+8^k) * sum_{n>=k} |x(n)|, truncated at k = N.
template <Scalar S>
S lin_norm(const CoordinateVector<S>& x) {
  const auto e = x.entries();
  S tail(0);
  S best(0);
  for (std::size_t idx = e.size(); idx-- > 0;) {
    tail += abs_of(e[idx]);
    const unsigned k = static_cast<unsigned>(idx + 1);
    S weight;
    if constexpr (is_exact_v<S>) {
      const BigInt eight_k = BigInt(1) << (3 * k);
      weight = Rational(eight_k, eight_k + 1);
    } else {
      weight = 1.0 / (1.0 + std::pow(8.0, -static_cast<double>(k)));
    }
    best = std::max(best, S(weight * tail));
  }
  return best;
}

// max_k |sum_{i=k..N} a_i|: the c0 norm of sum a_i s_i for the summing basis s_n = e_1 + ... + e_n.
template <Scalar S>
S summing_basis_norm(const CoordinateVector<S>& a) {
  const auto e = a.entries();
  S tail(0);
  S best(0);
  for (std::size_t idx = e.size(); idx-- > 0;) {
    tail += e[idx];
    best = std::max(best, S(abs_of(tail)));
  }
  return best;
}

namespace detail {

// Maximum over blocks 1 <= p0 < p1 < ... < pn <= N+1 of sum_k |sum_{i=p_{k-1}}^{p_k - 1} a_i|^p,
// where `power` maps an interval sum to its p-th power of the absolute value.
//
// best[j] is the largest value over partitions of a contiguous range ending at j
// into consecutive intervals; best[j] = max_i (best[i-1] + |S(i..j)|^p) with
// best[0] = 0. Since best[i-1] >= 0, starting the covered range at i is
// dominated by extending it, and taking the max over all j covers every pn.
template <class T, class Power>
T james_partition_max(const std::vector<T>& e, Power&& power) {
  const std::size_t n = e.size();
  std::vector<T> prefix(n + 1, T(0));
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + e[i];
  std::vector<T> best(n + 1, T(0));
  T answer(0);
  for (std::size_t j = 1; j <= n; ++j) {
    T bj(0);
    for (std::size_t i = 1; i <= j; ++i) {
      T candidate = best[i - 1] + power(T(prefix[j] - prefix[i - 1]));
      if (candidate > bj) bj = candidate;
    }
    best[j] = bj;
    if (bj > answer) answer = bj;
  }
  return answer;
}

// Rational entries scaled to integers over a common denominator D; the
// power sum is then integral and divided by D^p at the end. int64 when
// n * (sum |a_i|)^p < 2^62, big integers otherwise.
inline Rational james_power_exact(const CoordinateVector<Rational>& a, unsigned p) {
  auto int_power = [p](long long s) {
    const long long m = s < 0 ? -s : s;
    long long out = 1;
    for (unsigned k = 0; k < p; ++k) out *= m;
    return out;
  };
  auto fits = [&](long double total) {
    return static_cast<long double>(a.size() + 1) * std::pow(total, static_cast<long double>(p)) < 0x1p62L;
  };
  BigInt den = 1;
  for (const auto& x : a.entries()) {
    const auto& d = boost::multiprecision::denominator(x);
    if (d != 1) den = boost::multiprecision::lcm(den, d);
  }
  std::vector<BigInt> ints;
  ints.reserve(a.size());
  BigInt total = 0;
  for (const auto& x : a.entries()) {
    ints.push_back(den == 1 ? boost::multiprecision::numerator(x)
                            : BigInt(boost::multiprecision::numerator(x) * (den / boost::multiprecision::denominator(x))));
    total += boost::multiprecision::abs(ints.back());
  }
  BigInt sum;
  if (fits(total.convert_to<long double>())) {
    std::vector<long long> small(ints.begin(), ints.end());
    sum = james_partition_max(small, int_power);
  } else {
    sum = james_partition_max(ints, [p](const BigInt& s) { return BigInt(boost::multiprecision::pow(BigInt(boost::multiprecision::abs(s)), p)); });
  }
  if (den == 1) return Rational(sum);
  return Rational(sum) / Rational(boost::multiprecision::pow(den, p));
}

}  // namespace detail

// James p-th power sum for an integer exponent; exact in rational mode.
template <Scalar S>
S james_summing_power(const CoordinateVector<S>& a, unsigned p) {
  if (p < 2) throw ParameterError("James norm requires p > 1");
  if constexpr (is_exact_v<S>) {
    return detail::james_power_exact(a, p);
  } else {
    return detail::james_partition_max(a.values(), [p](double s) { return pow_int(std::fabs(s), p); });
  }
}

// Norm of sum a_i u_i in J_p where (u_n) is the summing basis of J_p.
inline double james_summing_norm(const CoordinateVector<double>& a, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("James norm requires finite p > 1");
  const double scale = sup_norm(a);
  if (scale == 0.0) return 0.0;
  const auto scaled = a.scaled(1.0 / scale);
  const double total = detail::james_partition_max(scaled.values(), [p](double s) { return std::pow(std::fabs(s), p); });
  return scale * std::pow(total, 1.0 / p);
}

template <Scalar S>
S norm(const CoordinateVector<S>& v, const NormTag& tag) {
  switch (tag.kind()) {
    case NormTag::Kind::Sup: return sup_norm(v);
    case NormTag::Kind::Lin: return lin_norm(v);
    case NormTag::Kind::EllP:
      if (tag.p() == 1.0) return ell1_norm(v);
      if constexpr (is_exact_v<S>) {
        throw ParameterError("ell_p norm with p != 1 has no exact rational evaluation");
      } else {
        return ell_p_norm(v, tag.p());
      }
    case NormTag::Kind::James:
      if constexpr (is_exact_v<S>) {
        throw ParameterError("James norm has no exact rational evaluation; use james_summing_power");
      } else {
        return james_summing_norm(v, tag.p());
      }
  }
  throw ParameterError("unknown norm tag");
}

}  // namespace fpcert
