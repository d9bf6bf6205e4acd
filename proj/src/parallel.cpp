#include "pullin/parallel.hpp"

#include <cstdlib>

#include "pullin/text.hpp"

namespace pullin {

std::size_t thread_cap() {
  if (const char* env = std::getenv("PULLIN_THREADS")) {
    if (const auto n = text::parse_long(env); n && *n > 0) return static_cast<std::size_t>(*n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace pullin
