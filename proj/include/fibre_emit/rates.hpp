#pragma once

#include "fibre_emit/atom.hpp"
#include "fibre_emit/fibre.hpp"
#include "fibre_emit/guided.hpp"
#include "fibre_emit/radiative.hpp"

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fibre_emit::rates {

// Atom position in fibre cylindrical coordinates; m_j is quantised along z.
struct Geometry {
    double r = 0.0;
    double phi = 0.0;
    double z = 0.0;
};

struct Tolerances {
    double quad_rel = 1e-6;    // beta integral per |m| shell
    double shell_rel = 1e-8;   // |m| shell counted as negligible below this
    int shells_below = 3;      // consecutive negligible shells that end the m sum
    int m_limit = 400;         // hard stop, NumericalError when reached
};

// Fibre radius and cladding; the core index comes from the dispersion table
// per channel unless n1_fixed is set.
struct Medium {
    double a = 100e-9;
    double n2 = 1.0;
    DispersionTable dispersion = DispersionTable::silica();
    std::optional<double> n1_fixed;

    struct Resolved {
        FibreSpec fibre;
        bool fallback = false;
    };
    Resolved fibre_for(const TransitionChannel& channel) const;
};

// G for one lower sublevel (component index into channel.components).
std::complex<double> coupling_guided(const TransitionChannel& channel, std::size_t component,
                                     const guided::GuidedMode& mode, int f, int p,
                                     const FibreSpec& fibre, const Geometry& where);

std::complex<double> coupling_radiative(const TransitionChannel& channel, std::size_t component,
                                        const radiative::RadiativeMode& mode,
                                        const FibreSpec& fibre, const Geometry& where);

struct BranchRate {
    std::string name;
    guided::Branch branch = guided::Branch::HE;
    int m = 0;
    int radial_index = 0;
    double rate = 0.0;
};

struct GuidedRate {
    double rate = 0.0;
    std::vector<BranchRate> branches;
    bool fundamental_unresolved = false;
};

struct RadiativeRate {
    double rate = 0.0;
    double achieved_rel = 0.0;  // quadrature error plus truncated tail estimate
    int m_max = 0;
};

// Uses the supplied branches when given (must be solved at channel.omega).
GuidedRate gamma_guided(const TransitionChannel& channel, const FibreSpec& fibre,
                        const Geometry& where,
                        const std::vector<guided::GuidedMode>* modes = nullptr);

RadiativeRate gamma_radiative(const TransitionChannel& channel, const FibreSpec& fibre,
                              const Geometry& where, const Tolerances& tol = {});

// Solved guided branches keyed by (omega, a, n1, n2); safe to share between
// threads. Sweeps over r reuse one solve per channel.
class ModeCache {
public:
    struct Entry {
        std::vector<guided::GuidedMode> modes;
        guided::SolveDiagnostics diag;
    };
    std::shared_ptr<const Entry> get(double omega, const FibreSpec& fibre);

private:
    std::mutex mutex_;
    std::map<std::array<double, 4>, std::shared_ptr<const Entry>> entries_;
};

struct ChannelRate {
    TransitionChannel channel;
    FibreSpec fibre;
    bool n1_fallback = false;
    double gamma0 = 0.0;
    GuidedRate guided;
    RadiativeRate radiative;
};

struct RateBreakdown {
    AtomicState upper;
    std::vector<ChannelRate> per_channel;
    double Gamma_g = 0.0;
    double Gamma_r = 0.0;
    double Gamma_0 = 0.0;
    double guided_fraction = 0.0;
    double achieved_rel = 0.0;

    double total() const { return Gamma_g + Gamma_r; }
};

// Sums every downward channel. r < a throws DomainError.
RateBreakdown total_rates(const AtomData& data, const AtomicState& state, const Medium& medium,
                          const Geometry& where, const Tolerances& tol = {},
                          ModeCache* cache = nullptr);

// (Gamma_M + Gamma_N) / 2.
double decoherence_rate(const AtomData& data, const AtomicState& m_state,
                        const AtomicState& n_state, const Medium& medium, const Geometry& where,
                        const Tolerances& tol = {});

} // namespace fibre_emit::rates
