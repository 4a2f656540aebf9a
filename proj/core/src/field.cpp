#include "cppdd/field.hpp"

namespace cppdd {

FieldElement FieldElement::pow(std::uint64_t e) const {
  FieldElement base = *this;
  FieldElement acc = FieldElement::one(p_);
  // bypass counters: exponentiation is an internal primitive, callers count one op
  std::uint64_t b = base.v_, r = 1;
  const std::uint64_t p = p_;
  while (e) {
    if (e & 1) r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(r) * b) % p);
    b = static_cast<std::uint64_t>((static_cast<unsigned __int128>(b) * b) % p);
    e >>= 1;
  }
  acc.v_ = r;
  return acc;
}

FieldElement FieldElement::inverse() const {
  if (v_ == 0) throw ZeroInverseError();
  detail::count_inv();
  return pow(p_ - 2);
}

FieldVector::FieldVector(std::vector<FieldElement> elems) : elems_(std::move(elems)) {
  if (elems_.empty()) throw UsageError("vector length must be >= 1");
  const std::uint64_t p = elems_.front().modulus();
  for (const auto& e : elems_) {
    if (e.modulus() != p) throw UsageError("mixed moduli in vector");
  }
}

FieldVector FieldVector::from_values(const std::vector<std::uint64_t>& vs, std::uint64_t p) {
  std::vector<FieldElement> es;
  es.reserve(vs.size());
  for (auto v : vs) es.emplace_back(v, p);
  return FieldVector(std::move(es));
}

std::uint64_t FieldVector::modulus() const {
  if (elems_.empty()) throw UsageError("empty vector has no modulus");
  return elems_.front().modulus();
}

FieldElement FieldVector::sum_uncounted() const {
  if (elems_.empty()) throw UsageError("sum of empty vector");
  const std::uint64_t p = modulus();
  std::uint64_t s = 0;
  for (const auto& e : elems_) {
    s += e.value();
    if (s >= p) s -= p;
  }
  return FieldElement(s, p);
}

FieldVector vec_apply(const FieldVector& v, const FieldVector& k, OpCode op) {
  if (v.size() != k.size()) throw UsageError("vec_apply length mismatch");
  std::vector<FieldElement> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    switch (op) {
      case OpCode::Add: out.push_back(v[i] + k[i]); break;
      case OpCode::Sub: out.push_back(v[i] - k[i]); break;
      case OpCode::Mul: out.push_back(v[i] * k[i]); break;
      case OpCode::Div: out.push_back(v[i] / k[i]); break;
    }
  }
  return FieldVector(std::move(out));
}

void vec_accumulate(FieldVector& acc, const FieldVector& v) {
  if (acc.size() != v.size()) throw UsageError("accumulate length mismatch");
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
}

}  // namespace cppdd
