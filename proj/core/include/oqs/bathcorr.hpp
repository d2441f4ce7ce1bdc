// bathcorr.hpp — bath correlation functions on the unfolded contour [0, 2t]^2

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "oqs/model.hpp"
#include "oqs/quadrature.hpp"

namespace oqs {

/// Correlation tabulated on a rectangular grid, bilinearly interpolated.
struct TabulatedCorrelation {
  std::vector<double> tau1;   // strictly increasing
  std::vector<double> tau2;   // strictly increasing
  Eigen::MatrixXcd values;    // values(i, j) = B(tau1[i], tau2[j])

  void validate() const;
  [[nodiscard]] cplx operator()(double t1, double t2) const;
};

/// Reads a `tau1,tau2,re,im` CSV. Every grid point must appear exactly once.
TabulatedCorrelation load_tabulated_csv(const std::filesystem::path& path);
void write_tabulated_csv(const std::filesystem::path& path, const TabulatedCorrelation& table);

/// Unfolded spin-boson correlation
///   B(t1, t2) = sum_l c_l^2 / (2 w_l) [coth(beta w_l / 2) cos(w_l g) - i sin(w_l g)],
///   g = |t1 - t| - |t2 - t|.
cplx spin_boson_correlation(const BathSpec& bath, double pivot, double tau1, double tau2);

/// Value-semantic correlation function: discrete modes, tabulated grid, constant, or the
/// pointwise difference of two others. Immutable and safe to evaluate concurrently.
class CorrelationFn {
 public:
  static CorrelationFn constant(cplx value);
  static CorrelationFn discrete_modes(const BathSpec& bath, double pivot);
  static CorrelationFn tabulated(TabulatedCorrelation table);
  /// a - b
  static CorrelationFn difference(const CorrelationFn& a, const CorrelationFn& b);

  [[nodiscard]] cplx operator()(double tau1, double tau2) const;

  /// Rigorous upper bound on sup |B| over the domain. Exact for discrete modes and tables.
  [[nodiscard]] double sup_bound() const;

  /// Points where the function may fail to be smooth (the pivot for discrete modes).
  [[nodiscard]] std::vector<double> breakpoints() const;

  [[nodiscard]] bool is_discrete_modes() const;
  /// Pivot of a discrete-mode function or of a difference whose parts share one.
  [[nodiscard]] std::optional<double> pivot() const;

 private:
  struct Constant {
    cplx value;
  };
  struct Modes {
    double pivot;
    std::vector<double> omega;
    std::vector<double> amplitude;  // c^2 / (2 omega)
    std::vector<double> coth;       // coth(beta omega / 2)
  };
  struct Difference {
    std::shared_ptr<const CorrelationFn> a;
    std::shared_ptr<const CorrelationFn> b;
  };
  using Kind = std::variant<Constant, Modes, TabulatedCorrelation, Difference>;

  explicit CorrelationFn(Kind kind) : kind_(std::move(kind)) {}

  static cplx eval_modes(const Modes& m, double tau1, double tau2);

  Kind kind_;
};

using CorrelationSource = std::variant<BathSpec, TabulatedCorrelation>;

/// Original and perturbed correlation sources; Delta B = perturbed - base.
struct PerturbationSpec {
  CorrelationSource base;
  CorrelationSource perturbed;
};

CorrelationFn make_correlation(const CorrelationSource& source, double pivot);

/// Pointwise difference perturbed - base. Tabulated sources must cover [0, 2t]^2.
CorrelationFn delta_correlation(const PerturbationSpec& p, double pivot);

/// int_0^{2t} int_0^{s_2} |Delta B(s_1, s_2)| ds_1 ds_2, nested Gauss–Legendre with panels split
/// at the pivot. The reported value uses 2 * quad_points; the error is the change from quad_points.
QuadratureEstimate abs_delta_double_integral(const CorrelationFn& db, double pivot, int quad_points);

/// The same integral over the forward-branch triangle 0 < s_1 < s_2 < t.
QuadratureEstimate abs_delta_half_integral(const CorrelationFn& db, double pivot, int quad_points);

/// Largest |B(t1, t2) - B(t1', t2')| over random points and their reflections about the pivot
/// (each reflection preserves |t1 - t| - |t2 - t|).
double unfolded_symmetry_check(const CorrelationFn& b, double pivot, int samples,
                               std::uint64_t seed = 1);

}  // namespace oqs
