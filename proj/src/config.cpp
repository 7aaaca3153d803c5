#include "fibre_emit/config.hpp"

#include "fibre_emit/constants.hpp"
#include "fibre_emit/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fibre_emit {

namespace {

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v)
{
    v = trim(v);
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
    return out;
}

int to_int(std::string_view key, std::string_view v)
{
    v = trim(v);
    int out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) +
                          "'");
    return out;
}

bool to_bool(std::string_view key, std::string_view v)
{
    v = trim(v);
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(sep, start);
        const auto piece = trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
        if (!piece.empty())
            out.emplace_back(piece);
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string with_n(const std::string& label, int n)
{
    std::size_t pos = 0;
    while (pos < label.size() && std::isdigit(static_cast<unsigned char>(label[pos])))
        ++pos;
    return std::to_string(n) + label.substr(pos);
}

} // namespace

SweepSpec SweepSpec::parse(std::string_view text)
{
    const auto parts = split(text, ':');
    if (parts.size() < 4 || parts.size() > 5)
        throw ConfigError("sweep: expected axis:min:max:count[:linear|log], got '" +
                          std::string(text) + "'");
    SweepSpec s;
    if (parts[0] == "r")
        s.axis = SweepAxis::R;
    else if (parts[0] == "a")
        s.axis = SweepAxis::A;
    else if (parts[0] == "n")
        s.axis = SweepAxis::N;
    else
        throw ConfigError("sweep: axis must be r, a or n, got '" + parts[0] + "'");
    s.min = to_double("sweep min", parts[1]);
    s.max = to_double("sweep max", parts[2]);
    s.count = to_int("sweep count", parts[3]);
    if (parts.size() == 5) {
        if (parts[4] == "log")
            s.log = true;
        else if (parts[4] != "linear")
            throw ConfigError("sweep: spacing must be linear or log, got '" + parts[4] + "'");
    }
    if (s.count < 1)
        throw ConfigError("sweep: count must be at least 1");
    if (s.count > 1 && !(s.min < s.max))
        throw ConfigError("sweep: min must be below max");
    if (s.count == 1 && s.max < s.min)
        throw ConfigError("sweep: min must not exceed max");
    if (s.log && !(s.min > 0.0))
        throw ConfigError("sweep: log spacing needs a positive minimum");
    if (s.axis == SweepAxis::N &&
        (s.min != std::floor(s.min) || s.max != std::floor(s.max)))
        throw ConfigError("sweep: principal numbers must be integers");
    return s;
}

std::vector<double> SweepSpec::values() const
{
    std::vector<double> out;
    if (axis == SweepAxis::N) {
        for (int n = static_cast<int>(min); n <= static_cast<int>(max); ++n)
            out.push_back(n);
        return out;
    }
    if (count == 1)
        return {min};
    for (int i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / (count - 1);
        double v = log ? min * std::pow(max / min, t) : min + (max - min) * t;
        if (i == count - 1)
            v = max;
        out.push_back(v);
    }
    return out;
}

std::string SweepSpec::axis_name() const
{
    switch (axis) {
    case SweepAxis::R: return "r/a";
    case SweepAxis::A: return "a_nm";
    case SweepAxis::N: return "n";
    }
    return "?";
}

std::string SweepSpec::str() const
{
    const char* ax = axis == SweepAxis::R ? "r" : axis == SweepAxis::A ? "a" : "n";
    return std::string(ax) + ":" + num(min) + ":" + num(max) + ":" + std::to_string(count) +
           (log ? ":log" : ":linear");
}

void RunConfig::set(std::string_view key_in, std::string_view value_in)
{
    const std::string key(trim(key_in));
    const std::string_view v = trim(value_in);
    if (key == "a_nm") {
        a_nm = to_double(key, v);
        if (!(a_nm > 0.0))
            throw ConfigError("a_nm must be positive");
    } else if (key == "r_over_a") {
        r_over_a = to_double(key, v);
    } else if (key == "n1") {
        if (v.empty() || v == "table")
            n1.reset();
        else
            n1 = to_double(key, v);
    } else if (key == "n2") {
        n2 = to_double(key, v);
    } else if (key == "default_n1") {
        default_n1 = to_double(key, v);
    } else if (key == "dispersion") {
        dispersion = v == "builtin" ? "" : std::string(v);
    } else if (key == "levels") {
        levels = v == "builtin" ? "" : std::string(v);
    } else if (key == "reduced") {
        reduced = v == "builtin" ? "" : std::string(v);
    } else if (key == "state") {
        states = split(v, ',');
        if (states.empty())
            throw ConfigError("state: at least one state label required");
    } else if (key == "sweep") {
        sweep = SweepSpec::parse(v);
    } else if (key == "output") {
        output = std::string(v);
    } else if (key == "format") {
        if (v == "csv")
            format = OutputFormat::Csv;
        else if (v == "json")
            format = OutputFormat::Json;
        else
            throw ConfigError("format must be csv or json, got '" + std::string(v) + "'");
    } else if (key == "detail") {
        detail = to_bool(key, v);
    } else if (key == "normalization") {
        if (v == "total")
            per_channel_normalization = false;
        else if (v == "channel")
            per_channel_normalization = true;
        else
            throw ConfigError("normalization must be total or channel");
    } else if (key == "quad_rel") {
        tol.quad_rel = to_double(key, v);
        if (!(tol.quad_rel > 0.0 && tol.quad_rel < 1.0))
            throw ConfigError("quad_rel must lie in (0, 1)");
    } else if (key == "shell_rel") {
        tol.shell_rel = to_double(key, v);
        if (!(tol.shell_rel > 0.0 && tol.shell_rel < 1.0))
            throw ConfigError("shell_rel must lie in (0, 1)");
    } else if (key == "m_limit") {
        tol.m_limit = to_int(key, v);
        if (tol.m_limit < 1)
            throw ConfigError("m_limit must be positive");
    } else if (key == "jobs") {
        jobs = to_int(key, v);
        if (jobs < 1)
            throw ConfigError("jobs must be at least 1");
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

RunConfig RunConfig::parse(std::string_view text, std::string_view source)
{
    RunConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (trim(line).empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                              ": expected key = value");
        try {
            cfg.set(std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": " +
                              e.what());
        }
    }
    return cfg;
}

RunConfig RunConfig::load(const std::string& path)
{
    return parse(read_text(path), path);
}

std::string RunConfig::canonical() const
{
    std::ostringstream out;
    out << "a_nm = " << num(a_nm) << "\n"
        << "default_n1 = " << num(default_n1) << "\n"
        << "detail = " << (detail ? "true" : "false") << "\n"
        << "dispersion = " << (dispersion.empty() ? "builtin" : dispersion) << "\n"
        << "format = " << (format == OutputFormat::Csv ? "csv" : "json") << "\n"
        << "levels = " << (levels.empty() ? "builtin" : levels) << "\n"
        << "m_limit = " << tol.m_limit << "\n"
        << "n1 = " << (n1 ? num(*n1) : "table") << "\n"
        << "n2 = " << num(n2) << "\n"
        << "normalization = " << (per_channel_normalization ? "channel" : "total") << "\n"
        << "quad_rel = " << num(tol.quad_rel) << "\n"
        << "r_over_a = " << num(r_over_a) << "\n"
        << "reduced = " << (reduced.empty() ? "builtin" : reduced) << "\n"
        << "shell_rel = " << num(tol.shell_rel) << "\n"
        << "state = ";
    for (std::size_t i = 0; i < states.size(); ++i)
        out << (i ? "," : "") << states[i];
    out << "\n"
        << "sweep = " << sweep.str() << "\n";
    return out.str();
}

std::uint64_t RunConfig::hash() const
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string RunConfig::hash_hex() const
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

AtomData load_atom_data(const RunConfig& config)
{
    if (config.levels.empty() && config.reduced.empty())
        return AtomData::sodium();
    return AtomData::load(config.levels, config.reduced);
}

rates::Medium make_medium(const RunConfig& config)
{
    rates::Medium m;
    m.a = config.a_nm * 1e-9;
    m.n2 = config.n2;
    m.dispersion = config.dispersion.empty()
                       ? DispersionTable::silica(config.default_n1)
                       : DispersionTable::load(config.dispersion, config.default_n1);
    m.n1_fixed = config.n1;
    return m;
}

std::vector<Diagnostic> validate(const RunConfig& config)
{
    std::vector<Diagnostic> out;
    auto error = [&](std::string msg) { out.push_back({Diagnostic::Level::Error, std::move(msg)}); };
    auto warn = [&](std::string msg) { out.push_back({Diagnostic::Level::Warning, std::move(msg)}); };

    if (config.states.empty())
        error("no state requested");

    if (config.sweep.axis == SweepAxis::R) {
        if (config.sweep.min < 1.0)
            error("sweep r_min = " + num(config.sweep.min) +
                  "a places the atom inside the fibre (r < a)");
    } else if (config.r_over_a < 1.0) {
        error("r_over_a = " + num(config.r_over_a) + " places the atom inside the fibre (r < a)");
    }
    if (config.sweep.axis == SweepAxis::A && !(config.sweep.min > 0.0))
        error("fibre radius sweep must stay positive");
    if (!(config.n2 >= 1.0))
        error("n2 must be >= 1");
    if (config.n1 && !(*config.n1 >= config.n2))
        error("n1 must be >= n2");

    AtomData data;
    rates::Medium medium;
    try {
        data = load_atom_data(config);
        medium = make_medium(config);
    } catch (const std::exception& e) {
        error(e.what());
        return out;
    }

    std::vector<std::string> labels;
    if (config.sweep.axis == SweepAxis::N) {
        for (double n : config.sweep.values())
            for (const auto& s : config.states)
                labels.push_back(with_n(s, static_cast<int>(n)));
    } else {
        labels = config.states;
    }

    std::vector<std::string> warned;
    for (const auto& label : labels) {
        AtomicState st;
        try {
            st = data.parse_state(label);
        } catch (const std::exception& e) {
            error("state '" + label + "': " + e.what());
            continue;
        }
        for (const auto& ch : list_lower_channels(data, st)) {
            if (!ch.reduced_e_a0) {
                error("state '" + label + "': no reduced element for channel " + ch.label());
                continue;
            }
            if (config.n1)
                continue;
            const auto lk = medium.dispersion.lookup(ch);
            if (lk.fallback) {
                const std::string name = ch.label();
                if (std::find(warned.begin(), warned.end(), name) != warned.end())
                    continue;
                warned.push_back(name);
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "channel %s (%.6g nm) has no dispersion entry for lower n=%d; "
                              "using default n1 = %.6g",
                              name.c_str(), ch.wavelength() * 1e9, ch.lower.n, lk.n1);
                warn(buf);
            }
        }
    }
    return out;
}

} // namespace fibre_emit
