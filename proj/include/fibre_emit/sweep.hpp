#pragma once

#include "fibre_emit/config.hpp"
#include "fibre_emit/rates.hpp"

#include <atomic>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fibre_emit {

struct SweepRow {
    double sweep_value = 0.0;
    std::string state;
    rates::RateBreakdown rates;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by sweep value, then state order
    std::size_t planned = 0;
    bool interrupted = false;
    std::string dispersion_source;
};

// A guided branch appearing or vanishing between adjacent sweep points.
struct CutoffEvent {
    std::string state;
    std::string channel;
    std::string branch;
    bool onset = true;
    double before = 0.0;
    double after = 0.0;
};

// Physics or numerical failure at one sweep point.
class SweepPointError : public std::runtime_error {
public:
    SweepPointError(const std::string& point, const std::string& what)
        : std::runtime_error("sweep point " + point + ": " + what), point_(point) {}
    const std::string& point() const noexcept { return point_; }

private:
    std::string point_;
};

// Evaluates every (sweep value, state) pair on up to config.jobs threads.
// When *stop becomes true no new points start; finished rows are kept.
SweepResult run_sweep(const RunConfig& config, const std::atomic<bool>* stop = nullptr);

std::vector<CutoffEvent> find_cutoffs(const RunConfig& config, const SweepResult& result);

// Fixed 12-significant-digit formatting; output depends only on the
// config and the computed rows.
void write_csv(std::ostream& out, const RunConfig& config, const SweepResult& result);
void write_json(std::ostream& out, const RunConfig& config, const SweepResult& result);
void write_cutoffs(std::ostream& out, const RunConfig& config,
                   const std::vector<CutoffEvent>& events);

} // namespace fibre_emit
