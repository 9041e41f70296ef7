#include "cnls/error.hpp"

#include <fmt/format.h>

namespace cnls {

StepBoundViolation::StepBoundViolation(double max_modulus, double dt)
    : Error(fmt::format("step bound violated: dt * max|u|^4 = {:.6g} > 0.1 "
                        "(max|u| = {:.6g}, dt = {:.6g})",
                        dt * max_modulus * max_modulus * max_modulus * max_modulus,
                        max_modulus, dt)),
      max_modulus_(max_modulus),
      dt_(dt) {}

NumericalBlowUp::NumericalBlowUp(const std::string& reason, double last_valid_time)
    : Error(fmt::format("numerical blow-up: {} (last valid time {:.17g})", reason,
                        last_valid_time)),
      last_valid_time_(last_valid_time) {}

}  // namespace cnls
