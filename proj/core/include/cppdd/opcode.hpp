#pragma once

#include <cstdint>

#include "cppdd/errors.hpp"

namespace cppdd {

/// Element-wise chain operation. Wire encoding: one byte, 0..3 in this order.
enum class OpCode : std::uint8_t {
  Add = 0,
  Sub = 1,
  Mul = 2,
  Div = 3,
};

/// The inverse operation: + <-> -, x <-> /.
inline OpCode complement(OpCode op) {
  switch (op) {
    case OpCode::Add: return OpCode::Sub;
    case OpCode::Sub: return OpCode::Add;
    case OpCode::Mul: return OpCode::Div;
    case OpCode::Div: return OpCode::Mul;
  }
  throw UsageError("invalid op code");
}

inline bool is_multiplicative(OpCode op) {
  return op == OpCode::Mul || op == OpCode::Div;
}

inline char opcode_symbol(OpCode op) {
  switch (op) {
    case OpCode::Add: return '+';
    case OpCode::Sub: return '-';
    case OpCode::Mul: return '*';
    case OpCode::Div: return '/';
  }
  return '?';
}

inline OpCode opcode_from_byte(std::uint8_t b) {
  if (b > 3) throw WireError("invalid op code byte");
  return static_cast<OpCode>(b);
}

}  // namespace cppdd
