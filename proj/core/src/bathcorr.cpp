// bathcorr.cpp

#include "oqs/bathcorr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace oqs {

namespace {

constexpr double kAxisSlack = 1e-12;

std::size_t bracket(const std::vector<double>& axis, double x) {
  // index i with axis[i] <= x <= axis[i+1]
  auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t i = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
  return std::min(i, axis.size() - 2);
}

double parse_double(const std::string& field, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
  if (used == 0 || used != field.size())
    throw std::invalid_argument("tabulated CSV line " + std::to_string(line) + ": bad number '" +
                                field + "'");
  return v;
}

}  // namespace

void TabulatedCorrelation::validate() const {
  if (tau1.size() < 2 || tau2.size() < 2)
    throw std::invalid_argument("tabulated correlation needs at least 2 points per axis");
  for (const auto* axis : {&tau1, &tau2})
    for (std::size_t i = 1; i < axis->size(); ++i)
      if (!((*axis)[i] > (*axis)[i - 1]))
        throw std::invalid_argument("tabulated correlation axes must be strictly increasing");
  if (values.rows() != static_cast<Eigen::Index>(tau1.size()) ||
      values.cols() != static_cast<Eigen::Index>(tau2.size()))
    throw std::invalid_argument("tabulated correlation grid shape does not match its axes");
  if (!values.allFinite()) throw std::invalid_argument("tabulated correlation has non-finite values");
}

cplx TabulatedCorrelation::operator()(double t1, double t2) const {
  if (t1 < tau1.front() - kAxisSlack || t1 > tau1.back() + kAxisSlack ||
      t2 < tau2.front() - kAxisSlack || t2 > tau2.back() + kAxisSlack)
    throw std::out_of_range("tabulated correlation evaluated outside its grid");
  const std::size_t i = bracket(tau1, t1);
  const std::size_t j = bracket(tau2, t2);
  const double u = std::clamp((t1 - tau1[i]) / (tau1[i + 1] - tau1[i]), 0.0, 1.0);
  const double v = std::clamp((t2 - tau2[j]) / (tau2[j + 1] - tau2[j]), 0.0, 1.0);
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  return (1 - u) * (1 - v) * values(ii, jj) + u * (1 - v) * values(ii + 1, jj) +
         (1 - u) * v * values(ii, jj + 1) + u * v * values(ii + 1, jj + 1);
}

TabulatedCorrelation load_tabulated_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open tabulated correlation " + path.string());
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) throw std::invalid_argument(path.string() + ": empty file");
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  if (line != "tau1,tau2,re,im")
    throw std::invalid_argument(path.string() + ": header must be 'tau1,tau2,re,im'");

  std::map<std::pair<double, double>, cplx> points;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 4)
      throw std::invalid_argument(path.string() + " line " + std::to_string(line_no) +
                                  ": expected 4 fields");
    const double t1 = parse_double(fields[0], line_no);
    const double t2 = parse_double(fields[1], line_no);
    const cplx v{parse_double(fields[2], line_no), parse_double(fields[3], line_no)};
    if (!points.emplace(std::make_pair(t1, t2), v).second)
      throw std::invalid_argument(path.string() + " line " + std::to_string(line_no) +
                                  ": duplicate grid point");
  }
  TabulatedCorrelation table;
  for (const auto& [key, v] : points) {
    table.tau1.push_back(key.first);
    table.tau2.push_back(key.second);
  }
  for (auto* axis : {&table.tau1, &table.tau2}) {
    std::sort(axis->begin(), axis->end());
    axis->erase(std::unique(axis->begin(), axis->end()), axis->end());
  }
  if (points.size() != table.tau1.size() * table.tau2.size())
    throw std::invalid_argument(path.string() + ": grid is not rectangular");
  table.values.resize(static_cast<Eigen::Index>(table.tau1.size()),
                      static_cast<Eigen::Index>(table.tau2.size()));
  for (std::size_t i = 0; i < table.tau1.size(); ++i)
    for (std::size_t j = 0; j < table.tau2.size(); ++j)
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          points.at({table.tau1[i], table.tau2[j]});
  table.validate();
  return table;
}

void write_tabulated_csv(const std::filesystem::path& path, const TabulatedCorrelation& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "tau1,tau2,re,im\n" << std::setprecision(17);
  for (std::size_t i = 0; i < table.tau1.size(); ++i)
    for (std::size_t j = 0; j < table.tau2.size(); ++j) {
      const cplx v = table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out << table.tau1[i] << ',' << table.tau2[j] << ',' << v.real() << ',' << v.imag() << '\n';
    }
}

cplx spin_boson_correlation(const BathSpec& bath, double pivot, double tau1, double tau2) {
  const double g = std::abs(tau1 - pivot) - std::abs(tau2 - pivot);
  cplx b{0.0, 0.0};
  for (const auto& mode : bath.modes) {
    const double amp = mode.c * mode.c / (2.0 * mode.omega);
    const double coth = 1.0 / std::tanh(0.5 * bath.beta * mode.omega);
    b += amp * cplx{coth * std::cos(mode.omega * g), -std::sin(mode.omega * g)};
  }
  return b;
}

CorrelationFn CorrelationFn::constant(cplx value) { return CorrelationFn(Constant{value}); }

CorrelationFn CorrelationFn::discrete_modes(const BathSpec& bath, double pivot) {
  bath.validate();
  Modes m;
  m.pivot = pivot;
  for (const auto& mode : bath.modes) {
    m.omega.push_back(mode.omega);
    m.amplitude.push_back(mode.c * mode.c / (2.0 * mode.omega));
    m.coth.push_back(1.0 / std::tanh(0.5 * bath.beta * mode.omega));
  }
  return CorrelationFn(std::move(m));
}

CorrelationFn CorrelationFn::tabulated(TabulatedCorrelation table) {
  table.validate();
  return CorrelationFn(std::move(table));
}

CorrelationFn CorrelationFn::difference(const CorrelationFn& a, const CorrelationFn& b) {
  return CorrelationFn(Difference{std::make_shared<const CorrelationFn>(a),
                                  std::make_shared<const CorrelationFn>(b)});
}

cplx CorrelationFn::eval_modes(const Modes& m, double tau1, double tau2) {
  const double g = std::abs(tau1 - m.pivot) - std::abs(tau2 - m.pivot);
  cplx b{0.0, 0.0};
  for (std::size_t l = 0; l < m.omega.size(); ++l) {
    const double x = m.omega[l] * g;
    b += m.amplitude[l] * cplx{m.coth[l] * std::cos(x), -std::sin(x)};
  }
  return b;
}

cplx CorrelationFn::operator()(double tau1, double tau2) const {
  return std::visit(
      [&](const auto& k) -> cplx {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Constant>) {
          return k.value;
        } else if constexpr (std::is_same_v<K, Modes>) {
          return eval_modes(k, tau1, tau2);
        } else if constexpr (std::is_same_v<K, TabulatedCorrelation>) {
          return k(tau1, tau2);
        } else {
          return (*k.a)(tau1, tau2) - (*k.b)(tau1, tau2);
        }
      },
      kind_);
}

double CorrelationFn::sup_bound() const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Constant>) {
          return std::abs(k.value);
        } else if constexpr (std::is_same_v<K, Modes>) {
          // |coth cos x - i sin x| <= coth, attained at equal times
          double s = 0.0;
          for (std::size_t l = 0; l < k.omega.size(); ++l) s += k.amplitude[l] * k.coth[l];
          return s;
        } else if constexpr (std::is_same_v<K, TabulatedCorrelation>) {
          return k.values.cwiseAbs().maxCoeff();
        } else {
          const auto* ma = std::get_if<Modes>(&k.a->kind_);
          const auto* mb = std::get_if<Modes>(&k.b->kind_);
          if (ma == nullptr || mb == nullptr || ma->pivot != mb->pivot)
            return k.a->sup_bound() + k.b->sup_bound();
          // Both depend only on the lag g in [-t, t]: grid maximum plus a Lipschitz margin.
          // Terms sharing a frequency are merged first, so equal baths have zero margin.
          std::map<double, std::pair<double, double>> merged;  // omega -> (cos, sin) coefficients
          for (std::size_t l = 0; l < ma->omega.size(); ++l) {
            auto& c = merged[ma->omega[l]];
            c.first += ma->amplitude[l] * ma->coth[l];
            c.second += ma->amplitude[l];
          }
          for (std::size_t l = 0; l < mb->omega.size(); ++l) {
            auto& c = merged[mb->omega[l]];
            c.first -= mb->amplitude[l] * mb->coth[l];
            c.second -= mb->amplitude[l];
          }
          double lipschitz = 0.0;
          for (const auto& [w, c] : merged) lipschitz += w * std::max(std::abs(c.first), std::abs(c.second));
          const double t = ma->pivot;
          constexpr int n = 4001;
          const double h = 2.0 * t / (n - 1);
          double best = 0.0;
          for (int i = 0; i < n; ++i) {
            const double g = -t + i * h;
            // tau1 = t + g, tau2 = t realizes lag g
            best = std::max(best, std::abs(eval_modes(*ma, t + g, t) - eval_modes(*mb, t + g, t)));
          }
          return std::min(best + 0.5 * h * lipschitz, k.a->sup_bound() + k.b->sup_bound());
        }
      },
      kind_);
}

std::vector<double> CorrelationFn::breakpoints() const {
  return std::visit(
      [&](const auto& k) -> std::vector<double> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Constant>) {
          return {};
        } else if constexpr (std::is_same_v<K, Modes>) {
          return {k.pivot};
        } else if constexpr (std::is_same_v<K, TabulatedCorrelation>) {
          std::vector<double> b(k.tau1);
          b.insert(b.end(), k.tau2.begin(), k.tau2.end());
          std::sort(b.begin(), b.end());
          b.erase(std::unique(b.begin(), b.end()), b.end());
          // fine grids are integrated without splitting
          if (b.size() > 64) b.clear();
          return b;
        } else {
          auto b = k.a->breakpoints();
          auto c = k.b->breakpoints();
          b.insert(b.end(), c.begin(), c.end());
          std::sort(b.begin(), b.end());
          b.erase(std::unique(b.begin(), b.end()), b.end());
          if (b.size() > 64) b.clear();
          return b;
        }
      },
      kind_);
}

bool CorrelationFn::is_discrete_modes() const { return std::holds_alternative<Modes>(kind_); }

std::optional<double> CorrelationFn::pivot() const {
  if (const auto* m = std::get_if<Modes>(&kind_)) return m->pivot;
  if (const auto* d = std::get_if<Difference>(&kind_)) {
    const auto pa = d->a->pivot();
    const auto pb = d->b->pivot();
    if (pa && pb && *pa == *pb) return pa;
  }
  return std::nullopt;
}

CorrelationFn make_correlation(const CorrelationSource& source, double pivot) {
  if (const auto* bath = std::get_if<BathSpec>(&source))
    return CorrelationFn::discrete_modes(*bath, pivot);
  const auto& table = std::get<TabulatedCorrelation>(source);
  table.validate();
  if (table.tau1.front() > kAxisSlack || table.tau2.front() > kAxisSlack ||
      table.tau1.back() < 2.0 * pivot - kAxisSlack || table.tau2.back() < 2.0 * pivot - kAxisSlack)
    throw std::invalid_argument("tabulated correlation does not cover [0, 2t]^2");
  return CorrelationFn::tabulated(table);
}

CorrelationFn delta_correlation(const PerturbationSpec& p, double pivot) {
  return CorrelationFn::difference(make_correlation(p.perturbed, pivot),
                                   make_correlation(p.base, pivot));
}

namespace {

QuadratureEstimate abs_triangle(const CorrelationFn& db, double lo, double hi, int quad_points) {
  if (quad_points < 2) throw std::invalid_argument("quad_points must be >= 2");
  const auto breaks = db.breakpoints();
  auto integrand = [&](std::span<const double> s) {
    const double v = std::abs(db(s[0], s[1]));
    if (!std::isfinite(v)) throw NumericalError("abs_delta_double_integral: non-finite integrand");
    return v;
  };
  const double coarse = integrate_ordered_gauss(2, lo, hi, breaks, gauss_legendre(quad_points), integrand);
  const double fine =
      integrate_ordered_gauss(2, lo, hi, breaks, gauss_legendre(2 * quad_points), integrand);
  return {fine, std::abs(fine - coarse)};
}

}  // namespace

QuadratureEstimate abs_delta_double_integral(const CorrelationFn& db, double pivot, int quad_points) {
  return abs_triangle(db, 0.0, 2.0 * pivot, quad_points);
}

QuadratureEstimate abs_delta_half_integral(const CorrelationFn& db, double pivot, int quad_points) {
  return abs_triangle(db, 0.0, pivot, quad_points);
}

double unfolded_symmetry_check(const CorrelationFn& b, double pivot, int samples,
                               std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * pivot);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t1 = unif(gen);
    const double t2 = unif(gen);
    const cplx ref = b(t1, t2);
    const double r1 = 2.0 * pivot - t1;
    const double r2 = 2.0 * pivot - t2;
    for (const auto& [a1, a2] : {std::pair{r1, t2}, std::pair{t1, r2}, std::pair{r1, r2}})
      worst = std::max(worst, std::abs(b(a1, a2) - ref));
  }
  return worst;
}

}  // namespace oqs
