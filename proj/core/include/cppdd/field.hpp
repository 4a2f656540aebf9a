#pragma once

#include <cstdint>
#include <vector>

#include "cppdd/counters.hpp"
#include "cppdd/errors.hpp"
#include "cppdd/opcode.hpp"

namespace cppdd {

/// Default deployment modulus: the Mersenne prime 2^61 - 1.
inline constexpr std::uint64_t kDefaultModulus = (std::uint64_t{1} << 61) - 1;

/// An element of F_p in canonical representative form. The modulus travels with
/// the element so mixed-instance arithmetic is rejected instead of silently wrong.
class FieldElement {
 public:
  FieldElement() : v_(0), p_(kDefaultModulus) {}
  explicit FieldElement(std::uint64_t v, std::uint64_t p = kDefaultModulus) : p_(p) {
    if (p < 2) throw UsageError("modulus must be >= 2");
    v_ = v % p;
  }

  static FieldElement zero(std::uint64_t p = kDefaultModulus) { return FieldElement(0, p); }
  static FieldElement one(std::uint64_t p = kDefaultModulus) { return FieldElement(1, p); }

  std::uint64_t value() const { return v_; }
  std::uint64_t modulus() const { return p_; }
  bool is_zero() const { return v_ == 0; }

  FieldElement& operator+=(const FieldElement& o) {
    check_same(o);
    detail::count_add();
    std::uint64_t x = v_ + o.v_;  // p < 2^62, no overflow
    if (x >= p_) x -= p_;
    v_ = x;
    return *this;
  }
  FieldElement& operator-=(const FieldElement& o) {
    check_same(o);
    detail::count_add();
    v_ = v_ >= o.v_ ? v_ - o.v_ : v_ + p_ - o.v_;
    return *this;
  }
  FieldElement& operator*=(const FieldElement& o) {
    check_same(o);
    detail::count_mul();
    v_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(v_) * o.v_) % p_);
    return *this;
  }
  FieldElement& operator/=(const FieldElement& o) { return *this *= o.inverse(); }

  friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
  friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }
  friend FieldElement operator*(FieldElement a, const FieldElement& b) { return a *= b; }
  friend FieldElement operator/(FieldElement a, const FieldElement& b) { return a /= b; }

  /// a^(p-2) by square-and-multiply; p prime is assumed per deployment contract.
  FieldElement inverse() const;

  FieldElement pow(std::uint64_t e) const;

  bool operator==(const FieldElement& o) const { return v_ == o.v_ && p_ == o.p_; }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }

 private:
  void check_same(const FieldElement& o) const {
    if (p_ != o.p_) throw UsageError("field modulus mismatch");
  }

  std::uint64_t v_;
  std::uint64_t p_;
};

inline FieldElement f_add(const FieldElement& a, const FieldElement& b) { return a + b; }
inline FieldElement f_sub(const FieldElement& a, const FieldElement& b) { return a - b; }
inline FieldElement f_mul(const FieldElement& a, const FieldElement& b) { return a * b; }
inline FieldElement f_inv(const FieldElement& a) { return a.inverse(); }

/// Fixed-length vector over one F_p instance. Length is set at construction.
class FieldVector {
 public:
  FieldVector() = default;
  explicit FieldVector(std::vector<FieldElement> elems);
  FieldVector(std::size_t d, const FieldElement& fill) : elems_(d, fill) {
    if (d == 0) throw UsageError("vector length must be >= 1");
  }
  static FieldVector zeros(std::size_t d, std::uint64_t p = kDefaultModulus) {
    return FieldVector(d, FieldElement::zero(p));
  }
  static FieldVector from_values(const std::vector<std::uint64_t>& vs,
                                 std::uint64_t p = kDefaultModulus);

  std::size_t size() const { return elems_.size(); }
  std::uint64_t modulus() const;
  const FieldElement& operator[](std::size_t i) const { return elems_[i]; }
  FieldElement& operator[](std::size_t i) { return elems_[i]; }
  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }

  /// Scalar sum of all elements mod p. Used by digests; does not report op counters.
  FieldElement sum_uncounted() const;

  bool operator==(const FieldVector& o) const { return elems_ == o.elems_; }
  bool operator!=(const FieldVector& o) const { return !(*this == o); }

 private:
  std::vector<FieldElement> elems_;
};

/// Element-wise chain operation v (op) k. Division multiplies by the modular inverse.
FieldVector vec_apply(const FieldVector& v, const FieldVector& k, OpCode op);

/// Element-wise sum accumulation: acc += v.
void vec_accumulate(FieldVector& acc, const FieldVector& v);

}  // namespace cppdd
