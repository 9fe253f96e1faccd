#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pita {

// Interned functor / atom name. 0 is reserved as "invalid".
using Sym = uint32_t;

class SymbolTable {
public:
  SymbolTable() { names_.push_back(""); }

  Sym intern(std::string_view name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    names_.emplace_back(name);
    Sym id = static_cast<Sym>(names_.size() - 1);
    index_.emplace(names_.back(), id);
    return id;
  }

  const std::string& name(Sym s) const { return names_[s]; }

  // 0 when the name was never interned
  Sym lookup(std::string_view name) const {
    auto it = index_.find(name);
    return it == index_.end() ? 0 : it->second;
  }

  size_t size() const { return names_.size(); }

private:
  std::vector<std::string> names_;
  struct Hash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  struct Eq {
    using is_transparent = void;
    bool operator()(std::string_view a, std::string_view b) const { return a == b; }
  };
  std::unordered_map<std::string, Sym, Hash, Eq> index_;
};

}  // namespace pita
