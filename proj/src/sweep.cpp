#include "fibre_emit/sweep.hpp"

#include "fibre_emit/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

namespace fibre_emit {

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string with_n(const std::string& label, int n)
{
    std::size_t pos = 0;
    while (pos < label.size() && std::isdigit(static_cast<unsigned char>(label[pos])))
        ++pos;
    return std::to_string(n) + label.substr(pos);
}

struct Task {
    double value;
    std::string state;
};

std::vector<Task> plan(const RunConfig& config)
{
    std::vector<Task> tasks;
    for (double v : config.sweep.values())
        for (const auto& s : config.states)
            tasks.push_back(
                {v, config.sweep.axis == SweepAxis::N ? with_n(s, static_cast<int>(v)) : s});
    return tasks;
}

std::string point_name(const RunConfig& config, const Task& t)
{
    return config.sweep.axis_name() + "=" + fmt(t.value) + " state=" + t.state;
}

double channel_norm(const RunConfig& config, const rates::RateBreakdown& rb,
                    const rates::ChannelRate& cr)
{
    return config.per_channel_normalization ? cr.gamma0 : rb.Gamma_0;
}

// Detail columns in first-seen order across rows.
std::vector<std::string> detail_columns(const SweepResult& result)
{
    std::vector<std::string> cols;
    std::set<std::string> seen;
    auto add = [&](std::string c) {
        if (seen.insert(c).second)
            cols.push_back(std::move(c));
    };
    for (const auto& row : result.rows)
        for (const auto& cr : row.rates.per_channel) {
            const auto label = cr.channel.label();
            add("g:" + label);
            add("r:" + label);
            for (const auto& br : cr.guided.branches)
                add("g:" + label + ":" + br.name);
        }
    return cols;
}

std::map<std::string, double> detail_values(const RunConfig& config, const SweepRow& row)
{
    std::map<std::string, double> out;
    for (const auto& cr : row.rates.per_channel) {
        const double norm = channel_norm(config, row.rates, cr);
        const auto label = cr.channel.label();
        out["g:" + label] = cr.guided.rate / norm;
        out["r:" + label] = cr.radiative.rate / norm;
        for (const auto& br : cr.guided.branches)
            out["g:" + label + ":" + br.name] = br.rate / norm;
    }
    return out;
}

double achieved(const SweepResult& result)
{
    double worst = 0.0;
    for (const auto& row : result.rows)
        worst = std::max(worst, row.rates.achieved_rel);
    return worst;
}

std::vector<std::string> fallback_channels(const SweepResult& result)
{
    std::vector<std::string> out;
    for (const auto& row : result.rows)
        for (const auto& cr : row.rates.per_channel)
            if (cr.n1_fallback) {
                const auto name = cr.channel.label() + " n1=" + fmt(cr.fibre.n1);
                if (std::find(out.begin(), out.end(), name) == out.end())
                    out.push_back(name);
            }
    return out;
}

std::vector<std::string> unresolved_channels(const SweepResult& result)
{
    std::vector<std::string> out;
    for (const auto& row : result.rows)
        for (const auto& cr : row.rates.per_channel)
            if (cr.guided.fundamental_unresolved) {
                const auto name = cr.channel.label();
                if (std::find(out.begin(), out.end(), name) == out.end())
                    out.push_back(name);
            }
    return out;
}

} // namespace

SweepResult run_sweep(const RunConfig& config, const std::atomic<bool>* stop)
{
    const AtomData data = load_atom_data(config);
    const rates::Medium base = make_medium(config);
    const auto tasks = plan(config);

    SweepResult result;
    result.planned = tasks.size();
    result.dispersion_source = config.n1 ? "fixed n1=" + fmt(*config.n1) : base.dispersion.source();

    std::vector<std::optional<SweepRow>> slots(tasks.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mutex;
    std::size_t err_index = tasks.size();
    std::string err_what;
    rates::ModeCache cache;

    auto worker = [&] {
        for (;;) {
            if (failed.load() || (stop && stop->load()))
                return;
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size())
                return;
            const Task& t = tasks[i];
            try {
                rates::Medium medium = base;
                double r_over_a = config.r_over_a;
                if (config.sweep.axis == SweepAxis::A)
                    medium.a = t.value * 1e-9;
                if (config.sweep.axis == SweepAxis::R)
                    r_over_a = t.value;
                const AtomicState st = data.parse_state(t.state);
                SweepRow row;
                row.sweep_value = t.value;
                row.state = t.state;
                row.rates = rates::total_rates(data, st, medium, {r_over_a * medium.a, 0.0, 0.0},
                                               config.tol, &cache);
                slots[i] = std::move(row);
            } catch (const std::exception& e) {
                std::lock_guard lock(err_mutex);
                if (i < err_index) {
                    err_index = i;
                    err_what = e.what();
                }
                failed = true;
            }
        }
    };

    const int n_threads = std::max(1, std::min<int>(config.jobs, static_cast<int>(tasks.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < n_threads; ++k)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    if (failed)
        throw SweepPointError(point_name(config, tasks[err_index]), err_what);

    for (auto& s : slots)
        if (s)
            result.rows.push_back(std::move(*s));
    result.interrupted = result.rows.size() < tasks.size();
    return result;
}

std::vector<CutoffEvent> find_cutoffs(const RunConfig& config, const SweepResult& result)
{
    std::vector<CutoffEvent> events;
    std::map<std::string, std::pair<double, std::map<std::string, std::set<std::string>>>> last;
    for (const auto& row : result.rows) {
        std::map<std::string, std::set<std::string>> now;
        for (const auto& cr : row.rates.per_channel) {
            auto& names = now[cr.channel.label()];
            for (const auto& br : cr.guided.branches)
                names.insert(br.name);
        }
        // Channel sets differ between principal numbers, so the n axis has no cutoffs.
        if (auto it = last.find(row.state);
            it != last.end() && config.sweep.axis != SweepAxis::N) {
            const double before = it->second.first;
            for (const auto& [channel, names] : now) {
                const auto& prev = it->second.second[channel];
                for (const auto& b : names)
                    if (!prev.count(b))
                        events.push_back({row.state, channel, b, true, before, row.sweep_value});
                for (const auto& b : prev)
                    if (!names.count(b))
                        events.push_back({row.state, channel, b, false, before, row.sweep_value});
            }
        }
        last[row.state] = {row.sweep_value, std::move(now)};
    }
    return events;
}

void write_csv(std::ostream& out, const RunConfig& config, const SweepResult& result)
{
    out << "# fibre-emit " << FIBRE_EMIT_VERSION << "\n";
    out << "# config_hash fnv1a64:" << config.hash_hex() << "\n";
    out << "# sweep " << config.sweep.axis_name() << " " << config.sweep.str() << "\n";
    out << "# fibre a_nm=" << fmt(config.a_nm) << " n2=" << fmt(config.n2)
        << " r_over_a=" << fmt(config.r_over_a) << "\n";
    out << "# dispersion " << result.dispersion_source << " default_n1=" << fmt(config.default_n1)
        << "\n";
    for (const auto& f : fallback_channels(result))
        out << "# n1_fallback " << f << "\n";
    for (const auto& u : unresolved_channels(result))
        out << "# fundamental_unresolved " << u << "\n";
    out << "# tolerances quad_rel=" << fmt(config.tol.quad_rel)
        << " shell_rel=" << fmt(config.tol.shell_rel) << " achieved_rel=" << fmt(achieved(result))
        << "\n";
    out << "# normalization " << (config.per_channel_normalization ? "channel" : "total") << "\n";
    if (result.interrupted)
        out << "# interrupted rows=" << result.rows.size() << "/" << result.planned << "\n";

    const auto cols = config.detail ? detail_columns(result) : std::vector<std::string>{};
    out << "sweep_value,state,Gamma_g_over_Gamma0,Gamma_r_over_Gamma0,guided_fraction";
    for (const auto& c : cols)
        out << "," << c;
    out << "\n";
    for (const auto& row : result.rows) {
        const auto& rb = row.rates;
        out << fmt(row.sweep_value) << "," << row.state << "," << fmt(rb.Gamma_g / rb.Gamma_0)
            << "," << fmt(rb.Gamma_r / rb.Gamma_0) << "," << fmt(rb.guided_fraction);
        if (!cols.empty()) {
            const auto vals = detail_values(config, row);
            for (const auto& c : cols) {
                out << ",";
                if (auto it = vals.find(c); it != vals.end())
                    out << fmt(it->second);
            }
        }
        out << "\n";
    }
}

namespace {

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    return out + "\"";
}

// Minimal pretty printer; numbers use the same 12-digit format as the CSV.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& out) : out_(out) {}

    void open(char bracket, const std::string& key = {})
    {
        prefix(key);
        out_ << bracket;
        first_.push_back(true);
    }
    void close(char bracket)
    {
        const bool empty = first_.back();
        first_.pop_back();
        if (!empty) {
            out_ << "\n";
            indent();
        }
        out_ << bracket;
    }
    void raw(const std::string& key, const std::string& text)
    {
        prefix(key);
        out_ << text;
    }
    void num(const std::string& key, double v) { raw(key, fmt(v)); }
    void str(const std::string& key, const std::string& v) { raw(key, quote(v)); }
    void boolean(const std::string& key, bool v) { raw(key, v ? "true" : "false"); }

private:
    void prefix(const std::string& key)
    {
        if (!first_.empty()) {
            out_ << (first_.back() ? "\n" : ",\n");
            first_.back() = false;
            indent();
        }
        if (!key.empty())
            out_ << quote(key) << ": ";
    }
    void indent()
    {
        for (std::size_t i = 0; i < first_.size(); ++i)
            out_ << "  ";
    }

    std::ostream& out_;
    std::vector<bool> first_;
};

} // namespace

void write_json(std::ostream& out, const RunConfig& config, const SweepResult& result)
{
    JsonWriter j(out);
    j.open('{');
    j.open('{', "meta");
    j.str("tool", "fibre-emit");
    j.str("version", FIBRE_EMIT_VERSION);
    j.str("config_hash", "fnv1a64:" + config.hash_hex());
    j.str("sweep_axis", config.sweep.axis_name());
    j.str("sweep", config.sweep.str());
    j.num("a_nm", config.a_nm);
    j.num("n2", config.n2);
    j.num("r_over_a", config.r_over_a);
    j.str("dispersion", result.dispersion_source);
    j.num("default_n1", config.default_n1);
    j.open('[', "n1_fallback");
    for (const auto& f : fallback_channels(result))
        j.str({}, f);
    j.close(']');
    j.open('[', "fundamental_unresolved");
    for (const auto& u : unresolved_channels(result))
        j.str({}, u);
    j.close(']');
    j.open('{', "tolerances");
    j.num("quad_rel", config.tol.quad_rel);
    j.num("shell_rel", config.tol.shell_rel);
    j.num("achieved_rel", achieved(result));
    j.close('}');
    j.str("normalization", config.per_channel_normalization ? "channel" : "total");
    j.boolean("interrupted", result.interrupted);
    j.raw("rows_planned", std::to_string(result.planned));
    j.close('}');

    j.open('[', "rows");
    for (const auto& row : result.rows) {
        const auto& rb = row.rates;
        j.open('{');
        j.num("sweep_value", row.sweep_value);
        j.str("state", row.state);
        j.num("Gamma_g_over_Gamma0", rb.Gamma_g / rb.Gamma_0);
        j.num("Gamma_r_over_Gamma0", rb.Gamma_r / rb.Gamma_0);
        j.num("guided_fraction", rb.guided_fraction);
        if (config.detail) {
            j.open('[', "channels");
            for (const auto& cr : rb.per_channel) {
                const double norm = channel_norm(config, rb, cr);
                j.open('{');
                j.str("channel", cr.channel.label());
                j.num("wavelength_nm", cr.channel.wavelength() * 1e9);
                j.num("n1", cr.fibre.n1);
                j.boolean("n1_fallback", cr.n1_fallback);
                j.num("gamma0_over_Gamma0", cr.gamma0 / rb.Gamma_0);
                j.num("guided", cr.guided.rate / norm);
                j.num("radiative", cr.radiative.rate / norm);
                j.raw("radiative_m_max", std::to_string(cr.radiative.m_max));
                j.open('{', "branches");
                for (const auto& b : cr.guided.branches)
                    j.num(b.name, b.rate / norm);
                j.close('}');
                j.close('}');
            }
            j.close(']');
        }
        j.close('}');
    }
    j.close(']');
    j.close('}');
    out << "\n";
}

void write_cutoffs(std::ostream& out, const RunConfig& config,
                   const std::vector<CutoffEvent>& events)
{
    out << "# fibre-emit " << FIBRE_EMIT_VERSION << " branch cutoffs\n";
    out << "# config_hash fnv1a64:" << config.hash_hex() << "\n";
    out << "state,channel,branch,event," << config.sweep.axis_name() << "_before,"
        << config.sweep.axis_name() << "_after\n";
    for (const auto& e : events)
        out << e.state << "," << e.channel << "," << e.branch << "," << (e.onset ? "onset" : "loss")
            << "," << fmt(e.before) << "," << fmt(e.after) << "\n";
}

} // namespace fibre_emit
