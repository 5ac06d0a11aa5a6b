#pragma once

#include "spread/random.hpp"
#include "spread/spectral.hpp"
#include "spread/topo.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace spread {

enum class ModelKind { topological, random };

/// Contents of a model file. Exactly one of `topo` / `dist` is meaningful,
/// according to `kind`.
struct ModelSpec {
    ModelKind kind = ModelKind::topological;
    std::string name;
    TypeSet types;
    TypeSet explicit_types;
    MSpreadModel topo;
    SpreadDistribution dist;
    BlockCode code;
    /// Starting pattern (topological) or type (random); defaults to 0.
    std::size_t start = 0;
    /// Mean matrix to use instead of the one derived from the distribution.
    std::optional<NonnegMatrix> mean_matrix_override;
};

/// Structural parse of a JSON model file. Model invariants are not checked
/// here (see validate); schema problems throw ParseError, with line and
/// column for malformed JSON.
ModelSpec parse_model(std::string_view json_text);
ModelSpec load_model(const std::filesystem::path& path);

/// Canonical JSON: sorted children, reduced rationals, code keys in canonical
/// serialization.
std::string serialize_model(const ModelSpec& spec);

/// Same model, code and override, irrespective of formatting.
bool semantically_equal(const ModelSpec& a, const ModelSpec& b);

/// Invariant violations of the model and code; empty means valid.
std::vector<std::string> validate_spec(const ModelSpec& spec);

/// "%.12g"
std::string format_number(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& os) const;
};

/// n,<explicit types>,trials_alive: mean windowed ratios, one row per window.
CsvTable ratios_table(const McResult& res, const TypeSet& explicit_types);
/// n,<explicit types>,trials_alive: mean projected counts per generation over
/// trials alive at that generation.
CsvTable counts_table(const McResult& res, const TypeSet& explicit_types);
/// n,w_mean,trials_alive: mean of |Z_n| / rho^n over surviving trials.
CsvTable wdiag_table(const McResult& res, double rho);
/// n,trial,<explicit types>,alive: every trial's projected counts.
CsvTable trials_table(const McResult& res, const TypeSet& explicit_types);
/// n,<explicit types>,trials_alive for a deterministic expansion.
CsvTable empirical_table(const std::vector<EmpiricalPoint>& pts, const TypeSet& explicit_types);

} // namespace spread
