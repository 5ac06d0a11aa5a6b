#include "spread/model_io.hpp"

#include "spread/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace spread {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object())
        schema_error(where, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || key == a;
        if (!ok)
            schema_error(where, "unknown field \"" + key + "\"");
    }
}

const json& required(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end())
        schema_error(where, std::string("missing field \"") + key + "\"");
    return *it;
}

TypeSet type_list(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        schema_error(where, "expected a nonempty array of type names");
    std::vector<std::string> names;
    for (const auto& x : j) {
        if (!x.is_string())
            schema_error(where, "type names must be strings");
        names.push_back(x.get<std::string>());
    }
    return TypeSet(std::move(names));
}

std::uint64_t nonneg_int(const json& j, const std::string& where) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
        schema_error(where, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

Rational rational_field(const json& j, const std::string& where) {
    if (!j.is_string())
        schema_error(where, "rationals must be strings such as \"1/3\"");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const ParseError& e) {
        schema_error(where, e.what());
    }
}

Pattern pattern_from_json(const json& j, const TypeSet& types, const std::string& where) {
    if (j.is_string())
        return Pattern(types.at(j.get<std::string>()));
    if (!j.is_array() || j.empty() || j.size() > 2 || !j[0].is_string())
        schema_error(where, "pattern nodes are \"type\" or [\"type\", [children...]]");
    const Symbol label = types.at(j[0].get<std::string>());
    std::vector<Pattern> kids;
    if (j.size() == 2) {
        if (!j[1].is_array())
            schema_error(where, "children must be an array");
        for (std::size_t i = 0; i < j[1].size(); ++i)
            kids.push_back(pattern_from_json(j[1][i], types, where + "/" + std::to_string(i)));
    }
    return Pattern(label, std::move(kids));
}

json pattern_to_json(const Pattern& p, const TypeSet& types) {
    if (p.is_leaf())
        return types.name(p.label());
    json kids = json::array();
    for (const auto& c : p.children())
        kids.push_back(pattern_to_json(c, types));
    return json::array({types.name(p.label()), kids});
}

std::string code_key(const Pattern& p, int k, const TypeSet& types) {
    return k == 0 ? types.name(p.label()) : to_string(p, types);
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    // nlohmann reports the position after the offending character
    return {line, col > 1 ? col - 1 : col};
}

ModelSpec parse_document(const json& doc) {
    if (!doc.is_object())
        schema_error("document", "expected a JSON object");
    const auto& kind = required(doc, "kind", "document");
    if (!kind.is_string())
        schema_error("kind", "expected a string");
    ModelSpec spec;
    const auto k = kind.get<std::string>();
    if (k == "topological") {
        spec.kind = ModelKind::topological;
        only_keys(doc, "document", {"kind", "name", "types", "explicit_types", "m", "patterns", "block_code", "start"});
    } else if (k == "random") {
        spec.kind = ModelKind::random;
        only_keys(doc, "document",
                  {"kind", "name", "types", "explicit_types", "distribution", "block_code", "start",
                   "mean_matrix_override"});
    } else {
        schema_error("kind", "must be \"topological\" or \"random\", got \"" + k + "\"");
    }
    if (auto it = doc.find("name"); it != doc.end()) {
        if (!it->is_string())
            schema_error("name", "expected a string");
        spec.name = it->get<std::string>();
    }
    spec.types = type_list(required(doc, "types", "document"), "types");
    spec.explicit_types = type_list(required(doc, "explicit_types", "document"), "explicit_types");

    if (spec.kind == ModelKind::topological) {
        spec.topo.m = static_cast<int>(nonneg_int(required(doc, "m", "document"), "m"));
        spec.topo.types = spec.types;
        const auto& pats = required(doc, "patterns", "document");
        if (!pats.is_array())
            schema_error("patterns", "expected an array");
        for (std::size_t i = 0; i < pats.size(); ++i)
            spec.topo.patterns.push_back(pattern_from_json(pats[i], spec.types, "patterns/" + std::to_string(i)));
        if (auto it = doc.find("start"); it != doc.end())
            spec.start = nonneg_int(*it, "start");
    } else {
        const auto& dist = required(doc, "distribution", "document");
        if (!dist.is_object())
            schema_error("distribution", "expected an object keyed by type");
        std::vector<std::vector<OffspringEntry>> laws(spec.types.size());
        std::vector<bool> seen(spec.types.size(), false);
        for (const auto& [tname, entries] : dist.items()) {
            const std::string where = "distribution/" + tname;
            const auto b = spec.types.find(tname);
            if (!b)
                schema_error(where, "unknown type");
            seen[*b] = true;
            if (!entries.is_array())
                schema_error(where, "expected an array of entries");
            for (std::size_t i = 0; i < entries.size(); ++i) {
                const std::string w = where + "/" + std::to_string(i);
                only_keys(entries[i], w, {"offspring", "prob"});
                OffspringEntry e;
                e.counts.assign(spec.types.size(), 0);
                const auto& off = required(entries[i], "offspring", w);
                if (!off.is_object())
                    schema_error(w + "/offspring", "expected an object {type: count}");
                for (const auto& [cname, cnt] : off.items()) {
                    const auto c = spec.types.find(cname);
                    if (!c)
                        schema_error(w + "/offspring", "unknown type \"" + cname + "\"");
                    e.counts[*c] = static_cast<std::uint32_t>(nonneg_int(cnt, w + "/offspring/" + cname));
                }
                e.prob = rational_field(required(entries[i], "prob", w), w + "/prob");
                laws[*b].push_back(std::move(e));
            }
        }
        for (Symbol b = 0; b < seen.size(); ++b)
            if (!seen[b])
                schema_error("distribution", "no entries for type \"" + spec.types.name(b) + "\"");
        try {
            spec.dist = SpreadDistribution(spec.types, std::move(laws));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            schema_error("distribution", e.what());
        }
        if (auto it = doc.find("start"); it != doc.end()) {
            if (!it->is_string())
                schema_error("start", "expected a type name");
            spec.start = spec.types.at(it->get<std::string>());
        }
        if (auto it = doc.find("mean_matrix_override"); it != doc.end()) {
            if (!it->is_array() || it->size() != spec.types.size())
                schema_error("mean_matrix_override", "expected one row per type");
            std::vector<std::vector<Rational>> rows;
            for (std::size_t i = 0; i < it->size(); ++i) {
                const auto& row = (*it)[i];
                if (!row.is_array() || row.size() != spec.types.size())
                    schema_error("mean_matrix_override/" + std::to_string(i), "expected one entry per type");
                std::vector<Rational> r;
                for (std::size_t j = 0; j < row.size(); ++j)
                    r.push_back(rational_field(row[j], "mean_matrix_override/" + std::to_string(i)));
                rows.push_back(std::move(r));
            }
            spec.mean_matrix_override = NonnegMatrix::from_rows(spec.types.names(), rows);
        }
    }

    const auto& bc = required(doc, "block_code", "document");
    only_keys(bc, "block_code", {"k", "map"});
    const int bk = static_cast<int>(nonneg_int(required(bc, "k", "block_code"), "block_code/k"));
    spec.code = BlockCode(bk, spec.explicit_types);
    const auto& map = required(bc, "map", "block_code");
    if (!map.is_object())
        schema_error("block_code/map", "expected an object");
    for (const auto& [key, val] : map.items()) {
        const std::string where = "block_code/map/" + key;
        if (!val.is_string())
            schema_error(where, "expected an explicit type name");
        const Pattern p = bk == 0 ? Pattern(spec.types.at(key)) : parse_pattern(key, spec.types);
        try {
            spec.code.assign(p, spec.explicit_types.at(val.get<std::string>()));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            schema_error(where, e.what());
        }
    }
    return spec;
}

} // namespace

ModelSpec parse_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        throw ParseError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                             e.what(),
                         line, col);
    }
    try {
        return parse_document(doc);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad model document: ") + e.what());
    }
}

ModelSpec load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string serialize_model(const ModelSpec& spec) {
    json doc;
    doc["kind"] = spec.kind == ModelKind::topological ? "topological" : "random";
    if (!spec.name.empty())
        doc["name"] = spec.name;
    doc["types"] = spec.types.names();
    doc["explicit_types"] = spec.explicit_types.names();
    if (spec.kind == ModelKind::topological) {
        doc["m"] = spec.topo.m;
        json pats = json::array();
        for (const auto& p : spec.topo.patterns)
            pats.push_back(pattern_to_json(p, spec.types));
        doc["patterns"] = pats;
        doc["start"] = spec.start;
    } else {
        json dist = json::object();
        for (Symbol b = 0; b < spec.dist.size(); ++b) {
            json entries = json::array();
            for (const auto& e : spec.dist.law(b)) {
                json off = json::object();
                for (Symbol c = 0; c < e.counts.size(); ++c)
                    if (e.counts[c])
                        off[spec.types.name(c)] = e.counts[c];
                entries.push_back({{"offspring", off}, {"prob", format_rational(e.prob)}});
            }
            dist[spec.types.name(b)] = entries;
        }
        doc["distribution"] = dist;
        doc["start"] = spec.types.name(static_cast<Symbol>(spec.start));
        if (spec.mean_matrix_override) {
            json rows = json::array();
            const auto& M = *spec.mean_matrix_override;
            for (std::size_t i = 0; i < M.size(); ++i) {
                json row = json::array();
                for (std::size_t j = 0; j < M.size(); ++j)
                    row.push_back(format_rational(M.at(i, j)));
                rows.push_back(row);
            }
            doc["mean_matrix_override"] = rows;
        }
    }
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& [p, a] : spec.code.entries())
        entries.emplace_back(code_key(p, spec.code.k(), spec.types), spec.explicit_types.name(a));
    std::sort(entries.begin(), entries.end());
    json map = json::object();
    for (const auto& [k, v] : entries)
        map[k] = v;
    doc["block_code"] = {{"k", spec.code.k()}, {"map", map}};
    return doc.dump(2) + "\n";
}

bool semantically_equal(const ModelSpec& a, const ModelSpec& b) {
    if (a.kind != b.kind || a.name != b.name || !(a.types == b.types) || !(a.explicit_types == b.explicit_types) ||
        a.start != b.start)
        return false;
    if (a.kind == ModelKind::topological) {
        if (a.topo.m != b.topo.m || a.topo.patterns != b.topo.patterns)
            return false;
    } else {
        const auto& la = a.dist.laws();
        const auto& lb = b.dist.laws();
        if (la.size() != lb.size())
            return false;
        for (std::size_t i = 0; i < la.size(); ++i) {
            if (la[i].size() != lb[i].size())
                return false;
            for (std::size_t j = 0; j < la[i].size(); ++j)
                if (la[i][j].counts != lb[i][j].counts || la[i][j].prob != lb[i][j].prob)
                    return false;
        }
        if (a.mean_matrix_override.has_value() != b.mean_matrix_override.has_value())
            return false;
        if (a.mean_matrix_override && !a.mean_matrix_override->same_entries(*b.mean_matrix_override))
            return false;
    }
    if (a.code.k() != b.code.k() || a.code.entries().size() != b.code.entries().size())
        return false;
    for (const auto& [p, img] : a.code.entries()) {
        const auto other = b.code.find(p);
        if (!other || *other != img)
            return false;
    }
    return true;
}

std::vector<std::string> validate_spec(const ModelSpec& spec) {
    std::vector<std::string> out;
    try {
        if (spec.kind == ModelKind::topological) {
            for (const auto& v : validate(spec.topo))
                out.push_back(v.message);
            if (!out.empty())
                return out;
            if (spec.start >= spec.topo.patterns.size())
                out.push_back("start pattern index " + std::to_string(spec.start) + " out of range");
            induce(spec.topo, spec.code);
        } else {
            out = validate(spec.dist);
            if (!out.empty())
                return out;
            associated_code(enumerate_potential_patterns(spec.dist, spec.code.k()), spec.code);
        }
    } catch (const CoverageError& e) {
        out.push_back(e.what());
    } catch (const ResourceError& e) {
        out.push_back(e.what());
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void CsvTable::write(std::ostream& os) const {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                os << ',';
            os << cells[i];
        }
        os << '\n';
    };
    line(header);
    for (const auto& r : rows)
        line(r);
}

namespace {

std::vector<std::string> header_with(const char* first, const TypeSet& types, const char* last) {
    std::vector<std::string> h{first};
    for (const auto& n : types.names())
        h.push_back(n);
    h.push_back(last);
    return h;
}

} // namespace

CsvTable ratios_table(const McResult& res, const TypeSet& explicit_types) {
    CsvTable t{header_with("n", explicit_types, "trials_alive"), {}};
    for (std::size_t w = 0; w < res.windows.size(); ++w) {
        std::vector<std::string> row{std::to_string(w + 1)};
        for (double x : res.mean_ratio[w])
            row.push_back(format_number(x));
        row.push_back(std::to_string(res.alive));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable counts_table(const McResult& res, const TypeSet& explicit_types) {
    CsvTable t{header_with("n", explicit_types, "trials_alive"), {}};
    if (res.trials.empty())
        return t;
    const std::size_t N = res.trials.front().projected.size();
    const std::size_t K = explicit_types.size();
    for (std::size_t n = 0; n < N; ++n) {
        std::vector<double> sum(K, 0.0);
        std::size_t alive = 0;
        for (const auto& tr : res.trials) {
            std::uint64_t tot = 0;
            for (auto c : tr.projected[n])
                tot += c;
            if (tot == 0)
                continue;
            ++alive;
            for (std::size_t a = 0; a < K; ++a)
                sum[a] += static_cast<double>(tr.projected[n][a]);
        }
        std::vector<std::string> row{std::to_string(n)};
        for (double s : sum)
            row.push_back(format_number(alive ? s / static_cast<double>(alive) : 0.0));
        row.push_back(std::to_string(alive));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable wdiag_table(const McResult& res, double rho) {
    CsvTable t{{"n", "w_mean", "trials_alive"}, {}};
    if (res.trials.empty())
        return t;
    const std::size_t N = res.trials.front().projected.size();
    std::vector<double> sum(N, 0.0);
    for (const auto& tr : res.trials) {
        if (!tr.alive)
            continue;
        const auto w = w_diagnostic(tr.projected, rho);
        for (std::size_t n = 0; n < N; ++n)
            sum[n] += w[n];
    }
    for (std::size_t n = 0; n < N; ++n)
        t.rows.push_back({std::to_string(n), format_number(res.alive ? sum[n] / static_cast<double>(res.alive) : 0.0),
                          std::to_string(res.alive)});
    return t;
}

CsvTable trials_table(const McResult& res, const TypeSet& explicit_types) {
    CsvTable t{header_with("n", explicit_types, "alive"), {}};
    t.header.insert(t.header.begin() + 1, "trial");
    for (std::size_t i = 0; i < res.trials.size(); ++i) {
        const auto& tr = res.trials[i];
        for (std::size_t n = 0; n < tr.projected.size(); ++n) {
            std::vector<std::string> row{std::to_string(n), std::to_string(i)};
            for (auto c : tr.projected[n])
                row.push_back(std::to_string(c));
            row.push_back(tr.alive ? "1" : "0");
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

CsvTable empirical_table(const std::vector<EmpiricalPoint>& pts, const TypeSet& explicit_types) {
    CsvTable t{header_with("n", explicit_types, "trials_alive"), {}};
    for (const auto& p : pts) {
        std::vector<std::string> row{std::to_string(p.n)};
        for (double x : p.ratios)
            row.push_back(format_number(x));
        row.push_back("1");
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace spread
