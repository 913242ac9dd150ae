#include "dchoice/rng.hpp"

#include <cmath>

namespace dchoice {

double RandomStream::uniform() {
  // 53 random mantissa bits, offset by half an ulp so 0 and 1 never occur.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() { return normal_(engine_); }

double RandomStream::exponential(double rate) { return -std::log(uniform()) / rate; }

double RandomStream::logistic() {
  const double u = uniform();
  return std::log(u) - std::log1p(-u);
}

}  // namespace dchoice
