#include "fibre_emit/fibre.hpp"

#include "fibre_emit/constants.hpp"
#include "fibre_emit/errors.hpp"
#include "fibre_emit_embedded.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fibre_emit {

void FibreSpec::validate() const
{
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("fibre radius must be positive");
    if (!(n2 >= 1.0) || !std::isfinite(n2))
        throw DomainError("outer index must be >= 1");
    if (!(n1 >= n2) || !std::isfinite(n1))
        throw DomainError("core index must be >= outer index");
}

double FibreSpec::v_parameter(double omega) const
{
    return omega / constants::c * a * std::sqrt(n1 * n1 - n2 * n2);
}

DispersionTable DispersionTable::parse(std::string_view text, std::string source,
                                       double default_n1)
{
    if (!(default_n1 > 1.0))
        throw DataError("default core index must exceed 1");
    DispersionTable t;
    t.default_n1_ = default_n1;
    t.source_ = std::move(source);
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        Row row;
        if (!(fields >> row.lower_n))
            continue;
        if (!(fields >> row.n1) || !(row.n1 >= 1.0))
            throw DataError("dispersion table line " + std::to_string(line_no) +
                            ": expected 'lower_n n1 [wavelength_nm]'");
        fields >> row.reference_wavelength_nm;
        for (const auto& r : t.rows_)
            if (r.lower_n == row.lower_n)
                throw DataError("dispersion table repeats group " + std::to_string(row.lower_n));
        t.rows_.push_back(row);
    }
    return t;
}

DispersionTable DispersionTable::load(const std::string& path, double default_n1)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open dispersion table " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path, default_n1);
}

DispersionTable DispersionTable::silica(double default_n1)
{
    return parse(embedded::silica_n1, "builtin:silica_n1", default_n1);
}

DispersionTable::Lookup DispersionTable::lookup(int lower_n) const
{
    for (const auto& r : rows_)
        if (r.lower_n == lower_n)
            return {r.n1, false};
    return {default_n1_, true};
}

} // namespace fibre_emit
