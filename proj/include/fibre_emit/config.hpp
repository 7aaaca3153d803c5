#pragma once

#include "fibre_emit/rates.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fibre_emit {

enum class SweepAxis { R, A, N };

// axis:min:max:count[:linear|log]. r is in units of a, a in nm, n is the
// principal number of every requested state.
struct SweepSpec {
    SweepAxis axis = SweepAxis::R;
    double min = 1.0;
    double max = 1.0;
    int count = 1;
    bool log = false;

    static SweepSpec parse(std::string_view text);
    std::vector<double> values() const;
    std::string str() const;
    std::string axis_name() const;  // "r/a", "a_nm", "n"
};

enum class OutputFormat { Csv, Json };

// Key = value run configuration. Unknown keys are errors; '#' starts a
// comment; later assignments replace earlier ones.
//
//   a_nm, r_over_a, n1, n2, default_n1, dispersion, levels, reduced,
//   state (comma separated), sweep, output, format, detail,
//   normalization (total|channel), quad_rel, shell_rel, m_limit, jobs
struct RunConfig {
    double a_nm = 100.0;
    double r_over_a = 1.0;  // atom position when the sweep axis is a or n
    std::optional<double> n1;
    double n2 = 1.0;
    double default_n1 = 1.45;
    std::string dispersion;  // empty: built-in table
    std::string levels;      // empty: built-in table
    std::string reduced;
    std::vector<std::string> states;
    SweepSpec sweep;
    std::string output;  // empty: stdout
    OutputFormat format = OutputFormat::Csv;
    bool detail = false;
    bool per_channel_normalization = false;
    rates::Tolerances tol;
    int jobs = 1;

    static RunConfig parse(std::string_view text, std::string_view source = "<config>");
    static RunConfig load(const std::string& path);

    // Applies one key; throws ConfigError on unknown keys or bad values.
    void set(std::string_view key, std::string_view value);

    // Canonical key = value listing; identical configs give identical text.
    std::string canonical() const;
    std::uint64_t hash() const;  // FNV-1a 64 of canonical()
    std::string hash_hex() const;
};

struct Diagnostic {
    enum class Level { Warning, Error };
    Level level = Level::Warning;
    std::string message;
};

AtomData load_atom_data(const RunConfig& config);
rates::Medium make_medium(const RunConfig& config);

// Data coverage and geometry checks that need no rate computation.
std::vector<Diagnostic> validate(const RunConfig& config);

} // namespace fibre_emit
