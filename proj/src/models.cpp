#include "rmflab/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rmflab/errors.hpp"

namespace rmflab {
namespace {

constexpr std::size_t kMaxSidonTerms = 10'000;

std::string normalized(std::string_view name) {
  std::string out(name);
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

/// Smooth harmonic number: log x + gamma + 1/(2x) - 1/(12x^2).
double smooth_harmonic(double x) {
  return std::log(x) + std::numbers::egamma + 0.5 / x - 1.0 / (12.0 * x * x);
}

}  // namespace

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::iid_rademacher:
      return "iid_rademacher";
    case ModelKind::harmonic_rademacher:
      return "harmonic_rademacher";
    case ModelKind::sidon_cosine:
      return "sidon_cosine";
    case ModelKind::bounded_martingale:
      return "bounded_martingale";
  }
  return "unknown";
}

std::string process_name(const ProcessSpec& process) {
  if (const auto* rmf = std::get_if<RmfSpec>(&process)) {
    switch (rmf->oracle) {
      case OracleKind::pseudorandom:
        return "rmf";
      case OracleKind::all_plus:
        return "rmf-all-plus";
      case OracleKind::all_minus:
        return "rmf-all-minus";
    }
  }
  return std::string(model_name(std::get<ModelSpec>(process).kind));
}

ProcessSpec parse_process(std::string_view name) {
  const auto n = normalized(name);
  if (n == "rmf") return RmfSpec{};
  if (n == "rmf-all-plus") return RmfSpec{OracleKind::all_plus};
  if (n == "rmf-all-minus") return RmfSpec{OracleKind::all_minus};
  for (auto kind : {ModelKind::iid_rademacher, ModelKind::harmonic_rademacher,
                    ModelKind::sidon_cosine, ModelKind::bounded_martingale}) {
    if (n == normalized(model_name(kind))) {
      ModelSpec spec;
      spec.kind = kind;
      return spec;
    }
  }
  throw ParameterError("unknown model '" + std::string(name) + "'");
}

VarianceBounds variance_bounds(const ModelSpec& model, std::uint64_t n) {
  switch (model.kind) {
    case ModelKind::iid_rademacher:
    case ModelKind::sidon_cosine:
      return {1.0, 1.0};
    case ModelKind::harmonic_rademacher:
      return {1.0 / static_cast<double>(n), 1.0 / static_cast<double>(n)};
    case ModelKind::bounded_martingale: {
      // M(0) = 0 always selects the upper amplitude for n = 1.
      const double hi2 = model.amplitude_hi * model.amplitude_hi;
      if (n == 1) return {hi2, hi2};
      return {model.amplitude_lo * model.amplitude_lo, hi2};
    }
  }
  return {0.0, 0.0};
}

SidonSet mian_chowla(std::size_t k) {
  if (k < 1 || k > kMaxSidonTerms) {
    throw ParameterError("mian_chowla: k must lie in [1, 10^4]");
  }
  SidonSet set;
  set.elements.reserve(k);
  set.elements.push_back(1);
  // Bit d set when d is a difference of two chosen elements. The set is B2
  // exactly when all positive differences are distinct.
  std::vector<std::uint64_t> used(1, 0);
  auto test = [&](std::uint64_t d) {
    const auto w = d >> 6;
    return w < used.size() && ((used[w] >> (d & 63)) & 1);
  };
  auto mark = [&](std::uint64_t d) {
    const auto w = d >> 6;
    if (w >= used.size()) used.resize(std::max<std::size_t>(w + 1, used.size() * 2), 0);
    used[w] |= std::uint64_t{1} << (d & 63);
  };
  std::vector<std::uint64_t> fresh;
  for (std::uint64_t c = 2; set.elements.size() < k; ++c) {
    bool ok = true;
    fresh.clear();
    for (auto it = set.elements.rbegin(); it != set.elements.rend(); ++it) {
      const auto d = c - *it;
      if (test(d)) {
        ok = false;
        break;
      }
      fresh.push_back(d);
    }
    if (!ok) continue;
    for (auto d : fresh) mark(d);
    set.elements.push_back(c);
  }
  return set;
}

int max_representations(const SidonSet& set) {
  const auto& e = set.elements;
  std::vector<std::uint64_t> values;
  values.reserve(e.size() * (e.size() + 1));
  for (std::size_t j = 0; j < e.size(); ++j) {
    for (std::size_t k = j; k < e.size(); ++k) values.push_back(e[j] + e[k]);
    for (std::size_t k = 0; k < j; ++k) values.push_back(e[j] - e[k]);
  }
  std::sort(values.begin(), values.end());
  int best = 0;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    best = std::max(best, static_cast<int>(j - i));
    i = j;
  }
  return best;
}

ModelContext::ModelContext(const ModelSpec& model, std::uint64_t x) : model_(model), x_(x) {
  if (x < 1) throw ParameterError("model: x must be >= 1");
  if (model.kind == ModelKind::bounded_martingale &&
      !(model.amplitude_lo > 0 && model.amplitude_lo <= model.amplitude_hi)) {
    throw ParameterError("bounded_martingale: need 0 < A <= B");
  }
  if (model.kind == ModelKind::sidon_cosine) sidon_ = mian_chowla(static_cast<std::size_t>(x));
}

namespace {

/// Calls visit(n, X_n) for n = 1..x of one sample.
template <class Visit>
void generate(const ModelContext& ctx, std::uint64_t x, std::uint64_t seed,
              std::uint64_t sample_index, Visit&& visit) {
  if (x > ctx.x()) throw ParameterError("model: x beyond prepared context");
  const auto& model = ctx.model();
  const auto key = stream_key(seed, StreamDomain::model_steps, sample_index / kLanes);
  const auto lane = static_cast<unsigned>(sample_index % kLanes);
  auto rademacher = [&](std::uint64_t n) {
    return ((lane_word(key, n) >> lane) & 1) ? -1.0 : 1.0;
  };

  double m = 0.0;
  switch (model.kind) {
    case ModelKind::iid_rademacher:
      for (std::uint64_t n = 1; n <= x; ++n) {
        const double step = rademacher(n);
        visit(n, step);
        m += step;
      }
      break;
    case ModelKind::harmonic_rademacher:
      for (std::uint64_t n = 1; n <= x; ++n) {
        visit(n, rademacher(n) / std::sqrt(static_cast<double>(n)));
      }
      break;
    case ModelKind::sidon_cosine: {
      double u;
      if (model.fixed_phase) {
        u = *model.fixed_phase;
      } else {
        CounterRng rng(stream_key(seed, StreamDomain::model_phase, sample_index));
        u = 2.0 * std::numbers::pi * rng.uniform();
      }
      const auto freq = ctx.frequencies();
      for (std::uint64_t n = 1; n <= x; ++n) {
        // n_k U reduced mod 2pi in long double keeps cos accurate for large n_k.
        const long double phase =
            std::fmod(static_cast<long double>(freq[n - 1]) * u, 2.0L * std::numbers::pi_v<long double>);
        visit(n, std::numbers::sqrt2 * std::cos(static_cast<double>(phase)));
      }
      break;
    }
    case ModelKind::bounded_martingale:
      for (std::uint64_t n = 1; n <= x; ++n) {
        const double amplitude = m <= 0.0 ? model.amplitude_hi : model.amplitude_lo;
        const double step = rademacher(n) * amplitude;
        visit(n, step);
        m += step;
      }
      break;
  }
}

}  // namespace

PartialSumTrace sample_path(const ModelContext& context, std::uint64_t x, std::uint64_t seed,
                            std::uint64_t sample_index, std::span<const std::uint64_t> checkpoints) {
  CheckpointRecorder recorder(checkpoints, x);
  SignTracker tracker;
  double m = 0.0;
  generate(context, x, seed, sample_index, [&](std::uint64_t n, double step) {
    m += step;
    tracker.observe(m);
    if (n == recorder.next_position()) recorder.record(m, tracker.count(), tracker.last_sign());
  });
  PartialSumTrace trace;
  trace.x_end = x;
  trace.final_value = m;
  trace.sign_change_count = tracker.count();
  trace.model_tag = std::string(model_name(context.model().kind));
  recorder.finish_into(trace);
  return trace;
}

PartialSumTrace sample_path(const ModelSpec& model, std::uint64_t x, std::uint64_t seed,
                            std::uint64_t sample_index, std::span<const std::uint64_t> checkpoints) {
  return sample_path(ModelContext(model, x), x, seed, sample_index, checkpoints);
}

std::vector<double> sample_steps(const ModelContext& context, std::uint64_t x, std::uint64_t seed,
                                 std::uint64_t sample_index) {
  std::vector<double> steps;
  steps.reserve(static_cast<std::size_t>(x));
  generate(context, x, seed, sample_index, [&](std::uint64_t, double step) { steps.push_back(step); });
  return steps;
}

double psi_predictor(const ProcessSpec& process, double x) {
  if (!(x >= 1.0)) throw ParameterError("psi_predictor: x must be >= 1");
  if (std::holds_alternative<RmfSpec>(process)) {
    const double ll = x > std::numbers::e ? std::log(std::log(x)) : 0.0;
    return std::sqrt(1.0 + 0.5 * std::sqrt(ll));
  }
  switch (std::get<ModelSpec>(process).kind) {
    case ModelKind::harmonic_rademacher:
      return std::sqrt(x / smooth_harmonic(x));
    default:
      return 1.0;
  }
}

PsiStabilityReport psi_stability_check(const std::function<double(double)>& psi, double x, int N) {
  if (!(x > 1.0) || N < 1 || static_cast<double>(N) > std::log(x) / 10.0) {
    throw ParameterError("psi_stability_check: need 1 <= N <= log(x)/10");
  }
  PsiStabilityReport report;
  std::ostringstream detail;
  double previous_base = 0.0;
  for (int k = 0; k <= kPsiDoublings; ++k) {
    const double base = x * std::ldexp(1.0, k);
    const double psi_base = psi(base);
    if (!(psi_base >= 1.0) && !report.invariant_violation) {
      report.invariant_violation = true;
      detail << "psi(" << base << ") = " << psi_base << " < 1; ";
    }
    if (k > 0 && psi_base < previous_base && !report.invariant_violation) {
      report.invariant_violation = true;
      detail << "psi decreases between " << base / 2 << " and " << base << "; ";
    }
    previous_base = psi_base;
    double previous = psi_base;
    for (int n = 1; n <= N; ++n) {
      const double value = psi(std::exp(static_cast<double>(n)) * base);
      if (value < previous && !report.invariant_violation) {
        report.invariant_violation = true;
        detail << "psi decreases at e^" << n << " * " << base << "; ";
      }
      previous = value;
      const double deviation = std::fabs(value / psi_base - 1.0) * std::log(base) / n;
      report.max_scaled_deviation = std::max(report.max_scaled_deviation, deviation);
    }
  }
  report.bounded = !report.invariant_violation && report.max_scaled_deviation <= kPsiDeviationBound;
  detail << "max scaled deviation " << report.max_scaled_deviation;
  report.detail = detail.str();
  return report;
}

PsiStabilityReport psi_stability_check(const ProcessSpec& process, double x, int N) {
  return psi_stability_check([&](double t) { return psi_predictor(process, t); }, x, N);
}

}  // namespace rmflab
