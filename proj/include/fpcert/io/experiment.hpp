#pragma once

// Builds a sequence, maps and checks from an ExperimentConfig and runs them.
// All parameters are validated before the first check runs, so a bad config
// never produces a partial report.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/version.hpp>

#include "fpcert/blocks.hpp"
#include "fpcert/fpmaps.hpp"
#include "fpcert/io/config.hpp"
#include "fpcert/io/csv.hpp"
#include "fpcert/io/report.hpp"
#include "fpcert/io/tags.hpp"
#include "fpcert/perturbation.hpp"
#include "fpcert/sequences.hpp"

namespace fpcert::io {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<Arithmetic> arithmetic;
  unsigned threads = 1;
};

// FPCERT_THREADS, else the hardware concurrency. Results do not depend on it.
inline unsigned threads_from_env() {
  if (const char* env = std::getenv("FPCERT_THREADS")) {
    try {
      const auto n = parse_unsigned(env, "FPCERT_THREADS");
      if (n >= 1) return static_cast<unsigned>(std::min<std::uint64_t>(n, 1024));
    } catch (const ConfigError&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct CertifyResult {
  Json report;
  int exit_code = 0;
};

namespace detail {

template <Scalar S>
S param_scalar(const Section& sec, const std::string& key, const std::string& where) {
  try {
    return parse_scalar<S>(sec.require(key, where));
  } catch (const ParameterError& e) {
    throw ConfigError(where + ": " + key + ": " + e.what());
  }
}

template <Scalar S>
std::optional<S> param_scalar_opt(const Section& sec, const std::string& key, const std::string& where) {
  if (!sec.has(key)) return std::nullopt;
  return param_scalar<S>(sec, key, where);
}

inline std::size_t param_size(const Section& sec, const std::string& key, const std::string& where,
                              std::optional<std::size_t> fallback = std::nullopt) {
  if (!sec.has(key)) {
    if (fallback) return *fallback;
    sec.require(key, where);
  }
  return static_cast<std::size_t>(parse_unsigned(*sec.find(key), where + ": " + key));
}

inline std::vector<std::size_t> param_indices(const std::string& text, const std::string& where) {
  std::vector<std::size_t> out;
  for (const auto& f : split_fields(text)) out.push_back(static_cast<std::size_t>(parse_unsigned(f, where)));
  return out;
}

inline void check_keys(const Section& sec, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, v] : sec.entries) {
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

inline Json section_json(const Section& sec) {
  Json out = Json::object();
  for (const auto& [k, v] : sec.entries) out[k] = v;
  return out;
}

inline Json config_echo(const ExperimentConfig& cfg, std::uint64_t seed, Arithmetic arithmetic) {
  Json out{{"seed", seed}, {"arithmetic", to_string(arithmetic)}};
  if (cfg.space) out["space"] = section_json(*cfg.space);
  out["sequence"] = section_json(cfg.sequence);
  Json maps = Json::array();
  for (const auto& m : cfg.maps) maps.push_back(Json{{"name", m.name}, {"params", section_json(m)}});
  out["maps"] = std::move(maps);
  Json checks = Json::array();
  for (const auto& c : cfg.checks) checks.push_back(Json{{"name", c.name}, {"params", section_json(c)}});
  out["checks"] = std::move(checks);
  if (cfg.orbit) out["orbit"] = section_json(*cfg.orbit);
  return out;
}

inline std::string compiler_id() {
  std::ostringstream out;
#if defined(__clang__)
  out << "clang " << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
  out << "gcc " << __GNUC__ << '.' << __GNUC_MINOR__;
#else
  out << "unknown";
#endif
  return out.str();
}

inline std::string boost_version() {
  return std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
         std::to_string(BOOST_VERSION % 100);
}

}  // namespace detail

template <Scalar S>
class Experiment {
 public:
  struct Check {
    std::string name;
    std::string kind;
    std::function<Certificate<S>()> run;
  };

  Experiment(const ExperimentConfig& cfg, const RunOptions& opt) : cfg_(cfg) {
    if (!opt.seed && !cfg.seed) throw ConfigError("seed is mandatory");
    seed_ = opt.seed ? *opt.seed : *cfg.seed;
    threads_ = std::max(1u, opt.threads);
    build_sequence();
    for (const auto& m : cfg_.maps) build_map(m);
    for (const auto& c : cfg_.checks) build_check(c);
  }

  std::uint64_t seed() const { return seed_; }
  const BasicSequence<S>& sequence() const { return *seq_; }
  const std::vector<Check>& checks() const { return checks_; }

  const AffineMapSpec<S>& map(const std::string& name, const std::string& where) const {
    for (const auto& [n, spec] : maps_) {
      if (n == name) return spec;
    }
    throw ConfigError(where + ": unknown map '" + name + "'");
  }

  // Rows n, ||x - f^n(y)|| for n = 0..n_window.
  std::string orbit_csv() const {
    if (!cfg_.orbit) throw ConfigError("missing [orbit] section");
    const Section& sec = *cfg_.orbit;
    const std::string where = "[orbit]";
    detail::check_keys(sec, {"map", "x", "y", "n_window"}, where);
    const auto& spec = map(sec.require("map", where), where);
    const std::size_t window = detail::param_size(sec, "n_window", where);
    const std::size_t dim = fpcert::detail::support_for(spec, seq_->size(), window);
    const auto x = point(sec.require("x", where), dim, where);
    const auto y = point(sec.require("y", where), dim, where);
    const bool diag = spec.kind() == AffineMapSpec<S>::Kind::DiagShift;

    std::ostringstream out;
    out << "n,distance";
    if (diag) out << ",pair_distance,lower_bound,upper_bound,within_bounds";
    out << '\n';
    ConvexCoefficients<S> fx = x, fy = y;
    std::optional<S> prev_pair;
    for (std::size_t n = 0; n <= window; ++n) {
      if (n > 0) {
        fy = apply_map(spec, fy);
        if (diag) fx = apply_map(spec, fx);
      }
      out << n << ',' << to_string(span_norm(*seq_, x.coords() - fy.coords()));
      if (diag) {
        // Successive pair distances respect (1 - theta) d <= d' <= (1 + theta) d.
        const S pair = span_norm(*seq_, fx.coords() - fy.coords());
        out << ',' << to_string(pair);
        if (prev_pair) {
          const S& theta = spec.schedule().theta();
          const S lo = (S(1) - theta) * *prev_pair;
          const S hi = (S(1) + theta) * *prev_pair;
          const bool ok = le_tol(lo, pair, 1e-9) && le_tol(pair, hi, 1e-9);
          out << ',' << to_string(lo) << ',' << to_string(hi) << ',' << (ok ? 1 : 0);
        } else {
          out << ",,,";
        }
        prev_pair = pair;
      }
      out << '\n';
    }
    return out.str();
  }

 private:
  SamplingBudget budget(const Section& sec, const std::string& where, std::size_t default_samples = 2000) const {
    SamplingBudget b;
    b.seed = seed_;
    b.threads = threads_;
    b.samples = detail::param_size(sec, "samples", where, default_samples);
    b.exhaustive_limit = detail::param_size(sec, "exhaustive_limit", where, b.exhaustive_limit);
    b.vertex_pair_limit = detail::param_size(sec, "vertex_pair_limit", where, b.vertex_pair_limit);
    return b;
  }

  ConvexCoefficients<S> point(const std::string& text, std::size_t dim, const std::string& where) const {
    try {
      if (text == "uniform") return ConvexCoefficients<S>::uniform(dim);
      if (text.rfind("vertex:", 0) == 0) {
        const auto i = static_cast<std::size_t>(parse_unsigned(text.substr(7), where));
        if (i < 1 || i > dim) throw ConfigError(where + ": vertex index out of range 1.." + std::to_string(dim));
        return ConvexCoefficients<S>::vertex(i, dim);
      }
      return ConvexCoefficients<S>(parse_coefficients<S>(text));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(where + ": bad point '" + text + "': " + e.what());
    }
  }

  void build_sequence() {
    const Section& sec = cfg_.sequence;
    const std::string where = "[sequence]";
    detail::check_keys(sec, {"builtin", "n", "ambient", "csv", "samples"}, where);
    std::optional<TagSpec> space;
    if (cfg_.space) {
      detail::check_keys(*cfg_.space, {"tag"}, "[space]");
      space = parse_tag(cfg_.space->require("tag", "[space]"));
      if (space->summing()) throw ConfigError("[space]: 'summing' is not an ambient norm");
    }
    auto require_space = [&](const NormTag& implied) {
      if (space && !(*space->tag == implied)) {
        throw ConfigError("[space]: tag " + space->tag->name() + " does not match the builtin's " + implied.name());
      }
    };
    const bool exact = is_exact_v<S>;
    try {
      if (sec.has("csv") == sec.has("builtin")) throw ConfigError(where + ": give exactly one of 'builtin' or 'csv'");
      if (sec.has("csv")) {
        if (!space) throw ConfigError("[space]: tag is required for csv sequences");
        if (sec.has("n") || sec.has("ambient")) throw ConfigError(where + ": 'n' and 'ambient' only apply to builtins");
        std::filesystem::path path = sec.require("csv", where);
        if (path.is_relative()) path = cfg_.base_dir / path;
        auto rows = read_vectors_csv<S>(path.string());
        seq_ = BasicSequence<S>::estimated(std::move(rows), *space->tag, budget(sec, where));
        return;
      }
      const std::string name = sec.require("builtin", where);
      const std::size_t n = detail::param_size(sec, "n", where);
      if (n < 1) throw ConfigError(where + ": n must be >= 1");
      const std::size_t ambient = detail::param_size(sec, "ambient", where, n);
      if (name == "ell1_canonical") {
        require_space(NormTag::ell_p(1.0));
        seq_ = ell1_canonical<S>(n, ambient);
      } else if (name == "c0_canonical") {
        require_space(NormTag::sup());
        seq_ = c0_canonical<S>(n, ambient);
      } else if (name == "summing_c0") {
        require_space(NormTag::sup());
        seq_ = summing_c0<S>(n, ambient);
      } else if (name == "lin_ell1") {
        require_space(NormTag::lin());
        seq_ = lin_ell1_canonical<S>(n, ambient);
      } else if (name == "james_summing") {
        const double p = space ? space->tag->p() : 2.0;
        if (space && space->tag->kind() != NormTag::Kind::James) {
          throw ConfigError("[space]: james_summing needs a james<p> tag");
        }
        if (ambient != n) throw ConfigError(where + ": james_summing has ambient length n");
        if constexpr (exact) {
          throw ConfigError("james_summing is not available in RATIONAL arithmetic");
        } else {
          seq_ = james_summing(n, p);
        }
      } else {
        throw ConfigError(where + ": unknown builtin '" + name + "'");
      }
      if (sec.has("samples")) throw ConfigError(where + ": 'samples' only applies to csv sequences");
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }

  BasicSequence<S> builtin(const std::string& name, std::size_t n, const std::string& where) const {
    const std::size_t len = std::max(n, seq_->ambient_length());
    if (name == "ell1_canonical") return ell1_canonical<S>(n, len);
    if (name == "c0_canonical") return c0_canonical<S>(n, len);
    if (name == "summing_c0") return summing_c0<S>(n, len);
    if (name == "lin_ell1") return lin_ell1_canonical<S>(n, len);
    if (name == "self") {
      if (n != seq_->size()) throw ConfigError(where + ": target 'self' keeps the sequence length");
      return *seq_;
    }
    throw ConfigError(where + ": unknown target '" + name + "'");
  }

  void build_map(const Section& sec) {
    const std::string where = "[map." + sec.name + "]";
    for (const auto& [n, spec] : maps_) {
      if (n == sec.name) throw ConfigError(where + ": duplicate map name");
    }
    std::string type = sec.require("type", where);
    std::optional<TruncationPolicy> policy;
    if (auto p = sec.find("policy")) {
      if (*p == "grow") policy = TruncationPolicy::Grow;
      else if (*p == "fold_tail") policy = TruncationPolicy::FoldTail;
      else throw ConfigError(where + ": policy must be grow or fold_tail");
    }
    try {
      if (type == "diag_shift") {
        detail::check_keys(sec, {"type", "policy", "theta", "length"}, where);
        const S theta = detail::param_scalar<S>(sec, "theta", where);
        if (!(theta > 0 && theta < 1)) throw ConfigError("theta out of (0,1)");
        if (seq_->size() < 2) throw ConfigError(where + ": diag_shift needs n >= 2");
        const std::size_t len = detail::param_size(sec, "length", where, seq_->size() - 1);
        const auto& s = *seq_;
        auto sched = make_alpha_schedule(theta, s.a(), s.b(), s.kappa().upper, len);
        maps_.emplace_back(sec.name, AffineMapSpec<S>::diag_shift(std::move(sched), policy.value_or(TruncationPolicy::Grow)));
      } else if (type == "right_shift") {
        detail::check_keys(sec, {"type", "policy"}, where);
        maps_.emplace_back(sec.name, AffineMapSpec<S>::right_shift(policy.value_or(TruncationPolicy::Grow)));
      } else if (type == "bilateral") {
        detail::check_keys(sec, {"type"}, where);
        maps_.emplace_back(sec.name, AffineMapSpec<S>::bilateral());
      } else if (type == "geometric") {
        detail::check_keys(sec, {"type", "policy"}, where);
        maps_.emplace_back(sec.name, AffineMapSpec<S>::geometric(policy.value_or(TruncationPolicy::FoldTail)));
      } else {
        throw ConfigError(where + ": unknown map type '" + type + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }

  // The sequence a check runs on: the configured one, or its uniform convex
  // blocks of the given width.
  BasicSequence<S> target_sequence(const Section& sec, const std::string& where) const {
    if (!sec.has("blocks")) return *seq_;
    const std::size_t width = detail::param_size(sec, "blocks", where);
    if (width < 1 || width > seq_->size()) throw ConfigError(where + ": block width out of range");
    auto spec = ConvexBlockSpec<S>::uniform(seq_->size() / width, width);
    return build_convex_blocks(*seq_, spec, budget(sec, where));
  }

  void build_check(const Section& sec) {
    const std::string where = "[check." + sec.name + "]";
    for (const auto& c : checks_) {
      if (c.name == sec.name) throw ConfigError(where + ": duplicate check name");
    }
    const std::string kind = sec.require("kind", where);
    static const std::set<std::string> common{"kind", "samples", "exhaustive_limit", "vertex_pair_limit"};
    // kinds that read the sequence through target_sequence
    static const std::set<std::string> blockable{"basis_constant", "domination", "equivalence", "wide_s", "gap_bound",
                                                 "wuc", "summing_equivalence", "shift_equivalence", "shift_conclusion"};
    auto keys = [&](std::initializer_list<std::string> extra) {
      auto allowed = common;
      allowed.insert(extra.begin(), extra.end());
      if (blockable.count(kind)) allowed.insert("blocks");
      detail::check_keys(sec, allowed, where);
    };
    const SamplingBudget b = budget(sec, where);
    std::function<Certificate<S>()> run;
    try {
      if (kind == "basis_constant") {
        keys({"local_search"});
        const auto s = target_sequence(sec, where);
        const std::size_t evals = detail::param_size(sec, "local_search", where, 4000);
        run = [s, b, evals] {
          const auto est = basis_constant(s, b, evals);
          Certificate<S> c;
          c.kind = "basis_constant";
          c.mode = est.mode;
          c.set("kappa_lower", est.kappa.lower);
          c.set("kappa_upper", est.kappa.upper);
          c.set("witness_n", S(static_cast<long>(est.witness_n)));
          c.witnesses.push_back({"argmax", {est.witness}});
          c.witnesses.push_back({"refined", {est.refined}});
          c.heuristic = true;
          c.holds = true;
          if (s.kappa().certified) {
            c.set("kappa_known", s.kappa().upper);
            c.holds = le_tol(est.kappa.upper, s.kappa().upper, 1e-9);
            c.notes.push_back("known value: " + s.kappa().source);
          }
          c.notes.push_back("lower is attained on the evaluated set; upper comes from local search");
          return c;
        };
      } else if (kind == "domination" || kind == "equivalence") {
        keys({"target", "target_n", "target_indices", "claimed"});
        const auto xs = target_sequence(sec, where);
        auto ys = target_from(sec, where, xs.size());
        if (kind == "domination") {
          const auto claimed = detail::param_scalar_opt<S>(sec, "claimed", where);
          run = [xs, ys, b, claimed] { return domination_constant(xs, ys, b, claimed); };
        } else {
          if (sec.has("claimed")) throw ConfigError(where + ": 'claimed' only applies to domination");
          run = [xs, ys, b] { return equivalence_constants(xs, ys, b); };
        }
      } else if (kind == "wide_s") {
        keys({});
        const auto s = target_sequence(sec, where);
        run = [s, b] { return wide_s_certificate(s, b); };
      } else if (kind == "gap_bound") {
        keys({});
        const auto s = target_sequence(sec, where);
        run = [s, b] { return gap_bound_check(s, b); };
      } else if (kind == "wuc") {
        keys({});
        const auto s = target_sequence(sec, where);
        run = [s, b] { return wuc_constant(s, b); };
      } else if (kind == "summing_equivalence") {
        keys({"c1", "c2"});
        const auto s = target_sequence(sec, where);
        const S c1 = detail::param_scalar<S>(sec, "c1", where);
        const S c2 = detail::param_scalar<S>(sec, "c2", where);
        if (!(c1 > 0 && c1 <= c2)) throw ConfigError(where + ": need 0 < c1 <= c2");
        run = [s, b, c1, c2] { return summing_equivalence_check(s, c1, c2, b); };
      } else if (kind == "shift_equivalence") {
        keys({"p_max"});
        const auto s = target_sequence(sec, where);
        const std::size_t p_max = detail::param_size(sec, "p_max", where);
        if (p_max < 1 || p_max >= s.size()) throw ConfigError(where + ": p_max must lie in [1, n)");
        run = [s, b, p_max] { return shift_equivalence_constants(s, p_max, b); };
      } else if (kind == "shift_conclusion") {
        keys({"L", "p_max", "lower"});
        const auto s = target_sequence(sec, where);
        const S L = detail::param_scalar<S>(sec, "L", where);
        if (!(L > 0)) throw ConfigError(where + ": L must be positive");
        const std::size_t p_max = detail::param_size(sec, "p_max", where);
        if (p_max < 1 || p_max >= s.size()) throw ConfigError(where + ": p_max must lie in [1, n)");
        LowerConvention conv = LowerConvention::Half;
        std::optional<S> custom;
        const std::string lower = sec.find("lower").value_or("half");
        if (lower == "symmetric") {
          conv = LowerConvention::Symmetric;
        } else if (lower != "half") {
          conv = LowerConvention::Custom;
          custom = detail::param_scalar<S>(sec, "lower", where);
        }
        run = [s, b, L, p_max, conv, custom] { return shift_conclusion_check(s, L, p_max, b, conv, custom); };
      } else if (kind == "perturbation_budget") {
        keys({"A", "L", "kappa"});
        const S A = detail::param_scalar<S>(sec, "A", where);
        const S L = detail::param_scalar<S>(sec, "L", where);
        const S kappa = detail::param_scalar_opt<S>(sec, "kappa", where).value_or(seq_->kappa().upper);
        shift_perturbation_budget(A, kappa, L);  // validates
        run = [A, L, kappa] {
          Certificate<S> c;
          c.kind = "perturbation_budget";
          c.set("A", A);
          c.set("kappa", kappa);
          c.set("L", L);
          c.set("first", A / (S(4) * kappa * (S(1) + L)));
          c.set("second", A * L / (S(4) * kappa * (S(2) + L)));
          c.set("budget", shift_perturbation_budget(A, kappa, L));
          c.mode = SamplingMode{1, true, 0, 0};
          c.evaluated = 1;
          c.holds = true;
          return c;
        };
      } else if (kind == "perturbation_chain" || kind == "psp_equivalence") {
        keys({"map"});
        const auto& spec = map(sec.require("map", where), where);
        if (spec.kind() != AffineMapSpec<S>::Kind::DiagShift) throw ConfigError(where + ": map must be diag_shift");
        const auto s = *seq_;
        const auto sched = spec.schedule();
        if (kind == "perturbation_chain") {
          run = [s, sched] { return perturbation_chain(s, sched); };
        } else {
          run = [s, sched, b] {
            const auto z = perturb_toward_next(s, sched);
            return psp_equivalence_check(s, z, psp_theta(s, z), b);
          };
        }
      } else if (kind == "bilipschitz") {
        keys({"map", "p_max"});
        const auto spec = map(sec.require("map", where), where);
        const std::size_t p_max = detail::param_size(sec, "p_max", where, 1);
        if (p_max < 1) throw ConfigError(where + ": p_max must be >= 1");
        detail_support(spec, p_max, where);
        const auto s = *seq_;
        run = [spec, s, b, p_max] { return bilipschitz_estimate(spec, s, b, p_max); };
      } else if (kind == "fixed_point_residual") {
        keys({"map"});
        const auto spec = map(sec.require("map", where), where);
        detail_support(spec, 1, where);
        const auto s = *seq_;
        run = [spec, s, b] { return fixed_point_residual_check(spec, s, b); };
      } else if (kind == "theta_of_map") {
        keys({"map", "n_window"});
        const auto spec = map(sec.require("map", where), where);
        const std::size_t window = detail::param_size(sec, "n_window", where);
        if (window < 1) throw ConfigError(where + ": n_window must be >= 1");
        detail_support(spec, window, where);
        const auto s = *seq_;
        run = [spec, s, b, window] { return theta_of_map(spec, s, b, window); };
      } else if (kind == "theta_lower_bound") {
        keys({"eps", "phi", "map", "n_window"});
        const S eps = detail::param_scalar<S>(sec, "eps", where);
        CoordinateVector<S> phi(std::vector<S>(seq_->ambient_length(), S(1)));
        if (auto text = sec.find("phi"); text && *text != "ones") phi = parse_coefficients<S>(*text);
        const auto s = *seq_;
        const auto f = make_summing_functional(phi, s);
        theta_lower_bound_rightshift(s, f, eps);  // validates eps
        std::optional<AffineMapSpec<S>> spec;
        std::size_t window = 0;
        if (sec.has("map")) {
          spec = map(sec.require("map", where), where);
          if (spec->kind() != AffineMapSpec<S>::Kind::RightShift) throw ConfigError(where + ": map must be right_shift");
          window = detail::param_size(sec, "n_window", where);
          detail_support(*spec, window, where);
        }
        run = [s, f, eps, spec, window, b] {
          Certificate<S> c;
          c.kind = "theta_lower_bound";
          const S bound = theta_lower_bound_rightshift(s, f, eps);
          c.set("gamma", f.gamma);
          c.set("norm_phi", f.norm_phi);
          c.set("beta", f.beta);
          c.set("eps", eps);
          c.set("bound", bound);
          c.heuristic = !s.kappa().certified;
          c.holds = true;
          c.mode = SamplingMode{0, true, 0, b.seed};
          if (spec) {
            const auto est = theta_of_map(*spec, s, b, window);
            c.mode = est.mode;
            c.evaluated = est.evaluated;
            c.set("theta_hat", est.constant("theta_hat"));
            c.witnesses = est.witnesses;
            c.holds = le_tol(bound, est.constant("theta_hat"), 1e-9);
          }
          return c;
        };
      } else if (kind == "mass_affinity" || kind == "permutation_invariance") {
        keys({"map", "dimension"});
        const auto spec = map(sec.require("map", where), where);
        const std::size_t dim = detail::param_size(sec, "dimension", where, seq_->size());
        if (dim < 1) throw ConfigError(where + ": dimension must be >= 1");
        if (kind == "mass_affinity") {
          run = [spec, dim, b] { return mass_affinity_check(spec, dim, b); };
        } else {
          if (spec.kind() != AffineMapSpec<S>::Kind::Bilateral) throw ConfigError(where + ": map must be bilateral");
          run = [spec, dim, b] { return permutation_invariance_check(spec, dim, b); };
        }
      } else {
        throw ConfigError(where + ": unknown check kind '" + kind + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
    checks_.push_back({sec.name, kind, std::move(run)});
  }

  void detail_support(const AffineMapSpec<S>& spec, std::size_t steps, const std::string& where) const {
    try {
      if (fpcert::detail::support_for(spec, seq_->size(), steps) < 1) throw ConfigError(where + ": sequence too short");
    } catch (const ParameterError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }

  BasicSequence<S> target_from(const Section& sec, const std::string& where, std::size_t m) const {
    const std::string name = sec.require("target", where);
    if (sec.has("target_indices")) {
      const auto idx = detail::param_indices(*sec.find("target_indices"), where);
      if (idx.size() != m) throw ConfigError(where + ": target_indices must list one index per vector");
      const std::size_t n = detail::param_size(sec, "target_n", where, idx.empty() ? m : idx.back());
      const auto full = builtin(name, n, where);
      return full.subsequence(idx, full.kappa());
    }
    const std::size_t n = detail::param_size(sec, "target_n", where, m);
    if (n != m) throw ConfigError(where + ": target_n differs from the sequence length; give target_indices");
    return builtin(name, n, where);
  }

  const ExperimentConfig& cfg_;
  std::uint64_t seed_ = 0;
  unsigned threads_ = 1;
  std::optional<BasicSequence<S>> seq_;
  std::vector<std::pair<std::string, AffineMapSpec<S>>> maps_;
  std::vector<Check> checks_;
};

namespace detail {

template <Scalar S>
CertifyResult certify_as(const ExperimentConfig& cfg, const RunOptions& opt, Arithmetic arithmetic) {
  const auto wall_start = std::chrono::steady_clock::now();
  Experiment<S> exp(cfg, opt);

  Json certificates = Json::array();
  Json wall = Json::object();
  bool all_hold = true;
  for (const auto& check : exp.checks()) {
    const auto t0 = std::chrono::steady_clock::now();
    Json entry;
    try {
      const auto cert = check.run();
      entry = Json{{"name", check.name}};
      entry.update(certificate_json(cert));
      all_hold = all_hold && cert.holds;
    } catch (const std::exception& e) {
      entry = Json{{"name", check.name},
                   {"kind", check.kind},
                   {"holds", false},
                   {"arithmetic", to_string(arithmetic)},
                   {"error", e.what()}};
      all_hold = false;
    }
    certificates.push_back(std::move(entry));
    wall[check.name] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }

  const auto& s = exp.sequence();
  Json meta{{"version", kVersion},
            {"versions",
             {{"fpcert", kVersion},
              {"boost", boost_version()},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"compiler", compiler_id()}}},
            {"failed", !all_hold},
            {"threads", opt.threads},
            {"sequence",
             {{"ambient", s.ambient().name()},
              {"truncation", s.ambient_length()},
              {"length", s.size()},
              {"a", scalar_json(s.a())},
              {"b", scalar_json(s.b())},
              {"kappa_lower", scalar_json(s.kappa().lower)},
              {"kappa_upper", scalar_json(s.kappa().upper)},
              {"kappa_certified", s.kappa().certified},
              {"kappa_source", s.kappa().source}}},
            {"wall_time_ms", std::move(wall)},
            {"total_wall_time_ms",
             std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start).count()}};

  CertifyResult out;
  out.report = Json{{"config", config_echo(cfg, exp.seed(), arithmetic)},
                    {"certificates", std::move(certificates)},
                    {"meta", std::move(meta)}};
  out.exit_code = all_hold ? 0 : 1;
  return out;
}

}  // namespace detail

// Throws ConfigError before running anything when the config is invalid.
inline CertifyResult certify(const ExperimentConfig& cfg, const RunOptions& opt) {
  const Arithmetic arithmetic = opt.arithmetic.value_or(cfg.arithmetic);
  if (arithmetic == Arithmetic::Rational) return detail::certify_as<Rational>(cfg, opt, arithmetic);
  return detail::certify_as<double>(cfg, opt, arithmetic);
}

inline std::string orbit(const ExperimentConfig& cfg, const RunOptions& opt) {
  const Arithmetic arithmetic = opt.arithmetic.value_or(cfg.arithmetic);
  if (arithmetic == Arithmetic::Rational) return Experiment<Rational>(cfg, opt).orbit_csv();
  return Experiment<double>(cfg, opt).orbit_csv();
}

}  // namespace fpcert::io
