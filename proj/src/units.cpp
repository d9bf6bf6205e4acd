#include "pullin/units.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace pullin::units {

namespace {

std::size_t shortest_length(double x) {
  char buf[32];
  return static_cast<std::size_t>(std::to_chars(buf, buf + sizeof buf, x).ptr - buf);
}

// Among the doubles near `naive` that map back to `si`, the one with the
// shortest decimal form (so 3.845 is preferred over 3.8450000000000006).
template <typename Forward>
double exact_preimage(double si, double naive, Forward forward) {
  if (!std::isfinite(naive)) return naive;
  double best = forward(naive) == si ? naive : std::numeric_limits<double>::quiet_NaN();
  auto consider = [&](double x) {
    if (forward(x) != si) return;
    if (std::isnan(best) || shortest_length(x) < shortest_length(best)) best = x;
  };
  double down = naive;
  double up = naive;
  for (int i = 0; i < 8; ++i) {
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    consider(down);
    consider(up);
  }
  return std::isnan(best) ? naive : best;
}

}  // namespace

double micrometres_exact(double m) {
  return exact_preimage(m, to_micrometres(m), from_micrometres);
}

double megapascals_exact(double pa) {
  return exact_preimage(pa, to_megapascals(pa), from_megapascals);
}

double gigapascals_exact(double pa) {
  return exact_preimage(pa, to_gigapascals(pa), from_gigapascals);
}

double per_micrometre_exact(double per_m) {
  return exact_preimage(per_m, to_per_micrometre(per_m), from_per_micrometre);
}

}  // namespace pullin::units
