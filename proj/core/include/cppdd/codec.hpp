#pragma once

#include <cmath>
#include <cstdint>

#include "cppdd/field.hpp"

namespace cppdd {

/// Fixed-point mapping of reals in [0,1] onto field elements: x -> round(x * 2^s).
class FixedPointCodec {
 public:
  explicit FixedPointCodec(unsigned scale_bits = 20, std::uint64_t p = kDefaultModulus)
      : scale_bits_(scale_bits), p_(p) {
    if (scale_bits >= 63 || (std::uint64_t{1} << scale_bits) >= p)
      throw UsageError("codec scale does not fit the field");
  }

  unsigned scale_bits() const { return scale_bits_; }
  std::uint64_t modulus() const { return p_; }

  FieldElement encode(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw UsageError("codec input outside [0,1]");
    const double scaled = std::round(x * static_cast<double>(std::uint64_t{1} << scale_bits_));
    return FieldElement(static_cast<std::uint64_t>(scaled), p_);
  }

  double decode(const FieldElement& e) const {
    return static_cast<double>(e.value()) /
           static_cast<double>(std::uint64_t{1} << scale_bits_);
  }

  FieldVector encode_vector(const std::vector<double>& xs) const {
    std::vector<FieldElement> es;
    es.reserve(xs.size());
    for (double x : xs) es.push_back(encode(x));
    return FieldVector(std::move(es));
  }

  std::vector<double> decode_vector(const FieldVector& v) const {
    std::vector<double> xs;
    xs.reserve(v.size());
    for (const auto& e : v) xs.push_back(decode(e));
    return xs;
  }

 private:
  unsigned scale_bits_;
  std::uint64_t p_;
};

}  // namespace cppdd
