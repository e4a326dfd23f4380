#include "resbound/lineshapes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/math/interpolators/makima.hpp>

namespace resbound {

namespace {

void check_levels(double T_res, double T_off) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(T_res) || !in_unit(T_off)) {
    throw std::invalid_argument("T_res and T_off must lie in [0, 1]");
  }
  if (T_res == T_off) {
    throw std::invalid_argument("T_res == T_off describes a flat response with no resonance");
  }
}

}  // namespace

class LineshapeSpec::Table {
 public:
  explicit Table(const Tabulated& t)
      : lo_(t.lambda.front()),
        hi_(t.lambda.back()),
        t_lo_(t.transmission.front()),
        t_hi_(t.transmission.back()),
        spline_(std::vector<double>(t.lambda), std::vector<double>(t.transmission)) {}

  double value(double L) const {
    if (L <= lo_) return t_lo_;
    if (L >= hi_) return t_hi_;
    return spline_(L);
  }
  double slope(double L) const {
    if (L <= lo_ || L >= hi_) return 0.0;
    return spline_.prime(L);
  }

 private:
  double lo_, hi_, t_lo_, t_hi_;
  boost::math::interpolators::makima<std::vector<double>> spline_;
};

LineshapeSpec::LineshapeSpec(LineshapeFamily family, double T_res, double T_off)
    : family_(std::move(family)), T_res_(T_res), T_off_(T_off) {}

LineshapeSpec LineshapeSpec::lorentzian(double T_res, double T_off) {
  check_levels(T_res, T_off);
  return LineshapeSpec(Lorentzian{}, T_res, T_off);
}

LineshapeSpec LineshapeSpec::butterworth(int order, double T_res, double T_off) {
  if (order < 1) throw std::invalid_argument("Butterworth order must be >= 1");
  check_levels(T_res, T_off);
  return LineshapeSpec(Butterworth{order}, T_res, T_off);
}

LineshapeSpec LineshapeSpec::tabulated(std::vector<double> lambda,
                                       std::vector<double> transmission) {
  if (lambda.size() != transmission.size() || lambda.size() < 4) {
    throw std::invalid_argument("tabulated lineshape needs at least four (L, T) pairs");
  }
  for (std::size_t i = 1; i < lambda.size(); ++i) {
    if (!(lambda[i] > lambda[i - 1])) {
      throw std::invalid_argument("tabulated L values must be strictly increasing");
    }
  }
  for (double t : transmission) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::invalid_argument("tabulated transmissions must lie in [0, 1]");
    }
  }
  Tabulated table{std::move(lambda), std::move(transmission)};
  auto impl = std::make_shared<const Table>(table);
  const double T_res = std::clamp(impl->value(0.0), 0.0, 1.0);
  const bool left_far = std::abs(table.lambda.front()) > std::abs(table.lambda.back());
  const double T_off = left_far ? table.transmission.front() : table.transmission.back();
  check_levels(T_res, T_off);
  LineshapeSpec spec(std::move(table), T_res, T_off);
  spec.table_ = std::move(impl);
  return spec;
}

bool LineshapeSpec::is_lorentzian() const { return order() == 1; }

int LineshapeSpec::order() const {
  if (std::holds_alternative<Lorentzian>(family_)) return 1;
  if (const auto* b = std::get_if<Butterworth>(&family_)) return b->order;
  return 0;
}

double LineshapeSpec::transmission(double L) const {
  if (std::holds_alternative<Lorentzian>(family_)) {
    return lorentzian_transmission(L, T_res_, T_off_);
  }
  if (const auto* b = std::get_if<Butterworth>(&family_)) {
    return butterworth_transmission(L, b->order, T_res_, T_off_);
  }
  return table_->value(L);
}

double LineshapeSpec::complement(double L) const {
  const int m = order();
  if (m >= 1) {
    const double p = std::pow(L, 2 * m);
    if (p > 1.0) return ((1.0 - T_res_) / p + (1.0 - T_off_)) / (1.0 / p + 1.0);
    return ((1.0 - T_res_) + p * (1.0 - T_off_)) / (1.0 + p);
  }
  return 1.0 - table_->value(L);
}

double LineshapeSpec::transmission_derivative(double L) const {
  const int m = order();
  if (m >= 1) {
    // -2m (T_res - T_off) L^{2m-1} / (1 + P)^2 with P = L^{2m}, written to
    // stay finite when P overflows.
    if (L == 0.0) return 0.0;
    const double P = std::pow(L, 2 * m);
    return -2.0 * m * (T_res_ - T_off_) / (L * (1.0 + P) * (1.0 + 1.0 / P));
  }
  return table_->slope(L);
}

double LineshapeSpec::log_amplitude_slope(double L, double floor) const {
  const int m = order();
  if (m >= 1) {
    const double t_res = std::max(T_res_, floor);
    if (L == 0.0) return 0.0;
    const double p = std::pow(L, 2 * m);
    // L^{2m-1}/(1 + p) = 1/(L (1 + 1/p)), finite when p overflows.
    return m * (T_off_ - t_res) / (L * (1.0 + 1.0 / p) * (T_off_ * p + t_res));
  }
  return 0.5 * table_->slope(L) / std::max(table_->value(L), floor);
}

std::string LineshapeSpec::describe() const {
  std::ostringstream os;
  if (std::holds_alternative<Lorentzian>(family_)) {
    os << "lorentzian";
  } else if (const auto* b = std::get_if<Butterworth>(&family_)) {
    os << "butterworth(m=" << b->order << ")";
  } else {
    os << "tabulated(" << std::get<Tabulated>(family_).lambda.size() << " samples)";
  }
  os << " T_res=" << T_res_ << " T_off=" << T_off_;
  return os.str();
}

std::complex<double> lorentzian_amplitude(double L, double T_res, double T_off) {
  const double a = std::sqrt(T_res) - std::sqrt(T_off);
  return a / std::complex<double>(1.0, -L) + std::sqrt(T_off);
}

double lorentzian_transmission(double L, double T_res, double T_off) {
  // Weighted mean of the two levels; exact at both ends without cancellation.
  const double x = L * L;
  return (T_res + x * T_off) / (1.0 + x);
}

double lorentzian_phase(double L, double T_res, double T_off) {
  const double r = std::sqrt(T_res);
  const double o = std::sqrt(T_off);
  // Re t >= 0 everywhere, so atan2 never crosses its branch cut.
  const double re = r + L * L * o;
  const double im = L * (r - o);
  if (re == 0.0 && im == 0.0) return 0.0;
  return std::atan2(im, re);
}

double butterworth_transmission(double L, int order, double T_res, double T_off) {
  const double p = std::pow(L, 2 * order);
  if (p > 1.0) return (T_res / p + T_off) / (1.0 / p + 1.0);
  return (T_res + p * T_off) / (1.0 + p);
}

TransferDerivatives lorentzian_derivatives(double L, double T_res, double T_off) {
  const double r = std::sqrt(T_res);
  const double o = std::sqrt(T_off);
  const double q = 1.0 + L * L;
  TransferDerivatives out;
  out.dT = -2.0 * L * (T_res - T_off) / (q * q);
  const double den = q * (T_res + L * L * T_off);
  // Perfect dip at resonance: one-sided limit of the continuous part.
  out.dphi = den == 0.0 ? 1.0 : (r - o) * (r - L * L * o) / den;
  return out;
}

Tabulated load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lineshape table: " + path);
  Tabulated t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double L, T;
    if (!(fields >> L)) continue;
    if (!(fields >> T)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected two columns");
    }
    t.lambda.push_back(L);
    t.transmission.push_back(T);
  }
  return t;
}

}  // namespace resbound
