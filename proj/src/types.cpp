#include "resbound/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace resbound {

std::string_view to_string(Estimand e) {
  return e == Estimand::transmission ? "transmission" : "phase";
}

namespace {

void check_transmission(double eta, const char* name) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must be in (0, 1], got " +
                                std::to_string(eta));
  }
}

}  // namespace

void LossBudget::validate() const {
  check_transmission(eta_p1, "eta_p1");
  check_transmission(eta_p2, "eta_p2");
  check_transmission(eta_r, "eta_r");
}

void Probe::validate() const {
  if (kind == ProbeKind::btmss && !(s >= 0.0 && std::isfinite(s))) {
    throw std::invalid_argument("squeezing parameter must be finite and >= 0, got " +
                                std::to_string(s));
  }
}

}  // namespace resbound
