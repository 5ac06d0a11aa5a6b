#include "spread/rational.hpp"

#include "spread/error.hpp"
#include "spread/types.hpp"

#include <algorithm>
#include <cctype>

namespace spread {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

} // namespace

Rational parse_rational(std::string_view text) {
    const auto slash = text.find('/');
    const auto num = text.substr(0, slash);
    const auto den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den))
        throw ParseError("malformed rational '" + std::string(text) + "' (expected \"p/q\")");
    const boost::multiprecision::cpp_int d{std::string(den)};
    if (d == 0)
        throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(boost::multiprecision::cpp_int{std::string(num)}, d);
}

std::string format_rational(const Rational& r) {
    const auto num = boost::multiprecision::numerator(r);
    const auto den = boost::multiprecision::denominator(r);
    if (den == 1)
        return num.str();
    return num.str() + "/" + den.str();
}

TypeSet::TypeSet(std::vector<std::string> names) : names_(std::move(names)) {
    for (Symbol i = 0; i < names_.size(); ++i) {
        if (names_[i].empty())
            throw ParseError("empty type name");
        if (!index_.emplace(names_[i], i).second)
            throw ParseError("duplicate type name '" + names_[i] + "'");
    }
}

std::optional<Symbol> TypeSet::find(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

Symbol TypeSet::at(std::string_view name) const {
    if (auto s = find(name))
        return *s;
    throw ParseError("unknown type '" + std::string(name) + "'");
}

} // namespace spread
