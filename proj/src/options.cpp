#include "matscale/options.hpp"

#include <cmath>

namespace matscale {

void Constants::validate() const {
  for (double v : {C_diam, C_warm, C_T, C_K, C_S2, C_T3})
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::InvalidInstance, "constants must be positive");
}

}  // namespace matscale
