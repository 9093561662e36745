#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rmflab/oracle.hpp"
#include "rmflab/trace.hpp"

namespace rmflab {

enum class ModelKind { iid_rademacher, harmonic_rademacher, sidon_cosine, bounded_martingale };

/// Orthogonal-sequence process X_1, X_2, ... with partial sums M(u).
struct ModelSpec {
  ModelKind kind = ModelKind::iid_rademacher;
  /// bounded_martingale amplitude bounds A <= |X_n| <= B.
  double amplitude_lo = 0.5;
  double amplitude_hi = 1.0;
  /// sidon_cosine test hook: fixes the phase U for every sample.
  std::optional<double> fixed_phase;
};

/// The Rademacher random multiplicative function, with its oracle family.
struct RmfSpec {
  OracleKind oracle = OracleKind::pseudorandom;
};

using ProcessSpec = std::variant<RmfSpec, ModelSpec>;

std::string_view model_name(ModelKind kind);
std::string process_name(const ProcessSpec& process);

/// Accepts "rmf", "rmf-all-plus", "rmf-all-minus" and the ModelKind names
/// (with '-' or '_'). Throws ParameterError otherwise.
ProcessSpec parse_process(std::string_view name);

/// Interval [lo, hi] containing E X_n^2; lo == hi when the variance is exact.
struct VarianceBounds {
  double lo;
  double hi;
};
VarianceBounds variance_bounds(const ModelSpec& model, std::uint64_t n);

/// Strictly increasing positive integers with distinct pairwise sums.
struct SidonSet {
  std::vector<std::uint64_t> elements;
  /// Bound on #{unordered {j,k}: m = n_j + n_k} + #{(j,k): m = n_j - n_k > 0}.
  int representation_cap = 2;
};

/// First k terms of the Mian-Chowla sequence (greedy B2 sequence), 1 <= k <= 10^4.
SidonSet mian_chowla(std::size_t k);

/// Largest representation count over m >= 1 (quadratic; for verification).
int max_representations(const SidonSet& set);

/// Precomputed per-model data reused across samples.
class ModelContext {
 public:
  ModelContext(const ModelSpec& model, std::uint64_t x);
  const ModelSpec& model() const { return model_; }
  std::uint64_t x() const { return x_; }
  std::span<const std::uint64_t> frequencies() const { return sidon_.elements; }

 private:
  ModelSpec model_;
  std::uint64_t x_;
  SidonSet sidon_;
};

/*!
 * Partial-sum trace of one sample of the model up to x.
 *
 * The Rademacher signs r_n of sample i are bit (i mod 64) of the
 * model_steps stream word for counter n; the Sidon phase U is uniform on
 * [0, 2pi) from the model_phase stream of sample i.
 */
PartialSumTrace sample_path(const ModelContext& context, std::uint64_t x, std::uint64_t seed,
                            std::uint64_t sample_index,
                            std::span<const std::uint64_t> checkpoints = {});

PartialSumTrace sample_path(const ModelSpec& model, std::uint64_t x, std::uint64_t seed,
                            std::uint64_t sample_index,
                            std::span<const std::uint64_t> checkpoints = {});

/// Full step sequence X_1..X_x of one sample (for verification).
std::vector<double> sample_steps(const ModelContext& context, std::uint64_t x, std::uint64_t seed,
                                 std::uint64_t sample_index);

/*!
 * Declared psi(x) with ||M(x)||_1 ~ sqrt(x) / psi(x).
 *
 * Constant 1 for iid_rademacher, sidon_cosine and bounded_martingale;
 * (1 + sqrt(log log x) / 2)^(1/2) for the RMF (log log x clamped at 0 below
 * x = e); sqrt(x / H_x) for harmonic_rademacher, whose norm is sqrt(H_x).
 */
double psi_predictor(const ProcessSpec& process, double x);

struct PsiStabilityReport {
  /// max over the grid and n <= N of |psi(e^n x')/psi(x') - 1| * log(x') / n.
  double max_scaled_deviation = 0.0;
  bool bounded = false;
  /// psi failed to be >= 1 or non-decreasing on the probed points.
  bool invariant_violation = false;
  std::string detail;
};

/// Number of doublings of x probed by psi_stability_check.
inline constexpr int kPsiDoublings = 10;
/// Bound on the scaled deviation for the check to pass.
inline constexpr double kPsiDeviationBound = 10.0;

/// Throws ParameterError unless 1 <= N <= log(x) / 10.
PsiStabilityReport psi_stability_check(const std::function<double(double)>& psi, double x, int N);
PsiStabilityReport psi_stability_check(const ProcessSpec& process, double x, int N);

}  // namespace rmflab
