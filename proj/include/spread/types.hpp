#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace spread {

/// Index of a type within its TypeSet.
using Symbol = std::uint32_t;

/// Ordered set of distinct, nonempty type names.
class TypeSet {
public:
    TypeSet() = default;
    explicit TypeSet(std::vector<std::string> names);

    std::size_t size() const noexcept { return names_.size(); }
    bool empty() const noexcept { return names_.empty(); }
    const std::string& name(Symbol s) const { return names_.at(s); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    std::optional<Symbol> find(std::string_view name) const;
    /// Like find() but throws ParseError naming the unknown type.
    Symbol at(std::string_view name) const;

    bool operator==(const TypeSet& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, Symbol> index_;
};

} // namespace spread
