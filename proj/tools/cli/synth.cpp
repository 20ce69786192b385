#include "cli/synth.hpp"

#include <cmath>

namespace dwkin::cli {

std::vector<std::pair<CornerKey, FittedValues>> synthetic_corners() {
  const double aex[] = {11.0, 31.0};
  const double banis[] = {20.0, 350.0};
  const double alpha[] = {0.01, 0.05};
  const double msat[] = {7.95e5, 1.2e6};
  const double width[] = {50.0, 100.0};

  std::vector<std::pair<CornerKey, FittedValues>> out;
  for (double a : aex)
    for (double b : banis)
      for (double al : alpha)
        for (double m : msat)
          for (double w : width) {
            const double s = std::pow(w / 100.0, 0.5) * std::pow(0.01 / al, 0.25) *
                             std::pow(a / 11.0, 0.2) * std::pow(m / 7.95e5, -0.3) *
                             std::pow(b / 20.0, -0.1);
            FittedValues fv;
            fv.c = {round_significant(2.0 * s, 6), round_significant(5e-9 * s, 6),
                    round_significant(-2e-21 * s, 6), round_significant(2e-33 * s, 6)};
            fv.drift_const_ns = round_significant(5.0 * std::pow(al / 0.01, -0.2), 6);
            fv.d2 = round_significant(2e-12 * std::pow(b / 20.0, 0.15), 6);
            out.emplace_back(CornerKey{a, b, al, m, w}, fv);
          }
  return out;
}

}  // namespace dwkin::cli
