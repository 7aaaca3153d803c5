#pragma once

#include "fibre_emit/atom.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace fibre_emit {

// Step-index fibre: core radius a (m), core index n1, outer index n2.
// n1 == n2 is accepted and describes an index-matched (invisible) fibre.
struct FibreSpec {
    double a = 100e-9;
    double n1 = 1.45;
    double n2 = 1.0;

    void validate() const;
    double v_parameter(double omega) const;
};

// Core index per transition group, keyed by the principal number of the
// lower level. Missing groups fall back to a default index.
class DispersionTable {
public:
    struct Row {
        int lower_n = 0;
        double n1 = 0.0;
        double reference_wavelength_nm = 0.0;
    };
    struct Lookup {
        double n1 = 0.0;
        bool fallback = false;
    };

    // Records "lower_n n1 [reference_wavelength_nm]", '#' comments.
    static DispersionTable parse(std::string_view text, std::string source,
                                 double default_n1 = 1.45);
    static DispersionTable load(const std::string& path, double default_n1 = 1.45);
    static DispersionTable silica(double default_n1 = 1.45);

    Lookup lookup(int lower_n) const;
    Lookup lookup(const TransitionChannel& channel) const { return lookup(channel.lower.n); }

    double default_n1() const { return default_n1_; }
    const std::string& source() const { return source_; }
    const std::vector<Row>& rows() const { return rows_; }

private:
    std::vector<Row> rows_;
    double default_n1_ = 1.45;
    std::string source_;
};

} // namespace fibre_emit
