#pragma once

#include <stdexcept>

#include "crankback/approx.hpp"
#include "crankback/grid.hpp"
#include "crankback/quadrature.hpp"

namespace crankback {

/// H(p_tr) = 1 - sum of first-return probabilities over all decision nodes.
inline double success_probability(const Scenario& s, Method method = Method::grid) {
  switch (method) {
    case Method::grid:
      return return_profile_grid(s).success();
    case Method::quadrature:
      return return_profile_quadrature(s, s.n - 1).success();
    default:
      throw std::invalid_argument("success_probability supports grid or quadrature only");
  }
}

}  // namespace crankback
