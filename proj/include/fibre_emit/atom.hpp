#pragma once

#include <array>
#include <complex>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fibre_emit {

// Half-integer stored as twice its value.
class HalfInt {
public:
    constexpr HalfInt() = default;
    static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }
    static constexpr HalfInt integer(int v) { return HalfInt(2 * v); }
    // Accepts "3/2", "-1/2", "+1/2", "2".
    static HalfInt parse(std::string_view text);

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }
    std::string str() const;

    constexpr HalfInt operator-() const { return HalfInt(-twice_); }
    constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
    constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }
    constexpr auto operator<=>(const HalfInt&) const = default;

private:
    constexpr explicit HalfInt(int twice) : twice_(twice) {}
    int twice_ = 0;
};

inline constexpr HalfInt half = HalfInt::from_twice(1);

// Racah formulas in long double. Triangle or sum-rule violations give 0.
// Negative j or mixed integer/half-integer m against j throw DomainError.
double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

struct Level {
    int n = 0;
    int l = 0;
    HalfInt j;
    double energy_cm = 0.0;
    std::string source;

    std::string label() const;  // "3p3/2"
};

struct AtomicState {
    int n = 0;
    int l = 0;
    HalfInt j;
    HalfInt mj;
    double energy_cm = 0.0;

    Level level() const { return {n, l, j, energy_cm, {}}; }
    std::string label() const;  // "10s1/2:+1/2"
};

char orbital_letter(int l);

class AtomData {
public:
    // Level text: "species n l j energy_cm-1 source"; reduced text:
    // "n l n' l' value_e_a0". '#' starts a comment.
    static AtomData parse(std::string_view levels_text, std::string_view reduced_text);
    static AtomData load(const std::string& levels_path, const std::string& reduced_path);
    static const AtomData& sodium();

    const std::vector<Level>& levels() const { return levels_; }
    const Level* find_level(int n, int l, HalfInt j) const;
    std::optional<double> reduced(int n, int l, int n_lower, int l_lower) const;

    AtomicState state(int n, int l, HalfInt j, HalfInt mj) const;
    // "10s1/2:+1/2" or "10s1/2" (m_j = +j).
    AtomicState parse_state(std::string_view label) const;

private:
    struct Reduced {
        int n, l, n_lower, l_lower;
        double value;
    };
    std::vector<Level> levels_;
    std::vector<Reduced> reduced_;
};

// One lower sublevel reached from the upper state through d_q.
struct DipoleComponent {
    HalfInt mj_lower;
    int q = 0;
    double spherical = 0.0;                     // <lower| d_q |upper>, C m
    std::array<std::complex<double>, 3> d_mn{};  // Cartesian <upper| d |lower>
};

struct TransitionChannel {
    AtomicState upper;
    Level lower;
    double omega = 0.0;  // rad/s
    std::optional<double> reduced_e_a0;
    std::vector<DipoleComponent> components;  // empty when reduced element missing

    double wavelength() const;  // m
    std::string label() const;  // "10s1/2->3p3/2"
};

// <lower| d_q |upper> in C m. Throws DataError without a reduced element.
std::complex<double> dipole_component(const AtomData& data, const AtomicState& upper,
                                      const AtomicState& lower, int q);

// Downward, dipole-allowed channels ordered by (l', n', j').
std::vector<TransitionChannel> list_lower_channels(const AtomData& data,
                                                   const AtomicState& state);

// Free-space rate, s^-1. Throws DataError without a reduced element.
double vacuum_rate(const TransitionChannel& channel);
double vacuum_total(const std::vector<TransitionChannel>& channels);

} // namespace fibre_emit
