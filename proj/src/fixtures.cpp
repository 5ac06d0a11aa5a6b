#include "spread/fixtures.hpp"

#include "spread/error.hpp"

#include <utility>

namespace spread {

namespace detail {
extern const std::pair<std::string_view, std::string_view> embedded_fixtures[];
extern const std::size_t embedded_fixture_count;
} // namespace detail

std::vector<std::string> fixture_ids() {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < detail::embedded_fixture_count; ++i)
        ids.emplace_back(detail::embedded_fixtures[i].first);
    return ids;
}

std::string_view fixture_text(std::string_view id) {
    for (std::size_t i = 0; i < detail::embedded_fixture_count; ++i)
        if (detail::embedded_fixtures[i].first == id)
            return detail::embedded_fixtures[i].second;
    throw OutOfRangeError("no built-in fixture '" + std::string(id) + "'");
}

ModelSpec fixture(std::string_view id) { return parse_model(fixture_text(id)); }

} // namespace spread
