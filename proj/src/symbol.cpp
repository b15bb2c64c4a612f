#include "topmil/symbol.hpp"

#include <charconv>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace topmil {
namespace {

struct InternTable {
  std::shared_mutex mutex;
  std::deque<std::string> names{std::string()};
  std::unordered_map<std::string_view, std::uint32_t> ids{{std::string_view(), 0}};
};

InternTable& table() {
  static InternTable t;
  return t;
}

}  // namespace

Symbol::Symbol(std::string_view text) {
  InternTable& t = table();
  {
    std::shared_lock lock(t.mutex);
    auto it = t.ids.find(text);
    if (it != t.ids.end()) {
      id_ = it->second;
      return;
    }
  }
  std::unique_lock lock(t.mutex);
  auto it = t.ids.find(text);
  if (it != t.ids.end()) {
    id_ = it->second;
    return;
  }
  t.names.emplace_back(text);
  id_ = static_cast<std::uint32_t>(t.names.size() - 1);
  t.ids.emplace(std::string_view(t.names.back()), id_);
}

const std::string& Symbol::str() const {
  InternTable& t = table();
  std::shared_lock lock(t.mutex);
  return t.names[id_];
}

std::strong_ordering operator<=>(Symbol a, Symbol b) {
  if (a.id_ == b.id_) return std::strong_ordering::equal;
  int c = a.str().compare(b.str());
  return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}

bool symbol_integer(Symbol s, long long& out) {
  const std::string& text = s.str();
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = first + text.size();
  if (*first == '+') return false;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace topmil
