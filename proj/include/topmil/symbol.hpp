#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace topmil {

// Interned name. Two symbols compare equal iff their text is equal.
// The intern table is process-wide and safe to use from several threads.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view text);

  static Symbol intern(std::string_view text) { return Symbol(text); }
  // Rebuilds a symbol from id(); the id must come from an existing symbol.
  static Symbol from_id(std::uint32_t id) {
    Symbol s;
    s.id_ = id;
    return s;
  }

  const std::string& str() const;
  std::uint32_t id() const { return id_; }
  bool empty() const { return id_ == 0; }

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }

  // Orders by text, not by interning order, so sorted output is stable across runs.
  friend std::strong_ordering operator<=>(Symbol a, Symbol b);

 private:
  std::uint32_t id_ = 0;  // 0 is the empty string
};

// Returns the integer value if the symbol text is an optionally signed decimal.
bool symbol_integer(Symbol s, long long& out);

}  // namespace topmil

template <>
struct std::hash<topmil::Symbol> {
  std::size_t operator()(topmil::Symbol s) const noexcept { return s.id(); }
};
