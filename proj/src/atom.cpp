#include "fibre_emit/atom.hpp"

#include "fibre_emit/constants.hpp"
#include "fibre_emit/errors.hpp"
#include "fibre_emit_embedded.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace fibre_emit {

namespace {

constexpr int kMaxFactorial = 80;

const std::array<long double, kMaxFactorial + 1>& factorials()
{
    static const auto table = [] {
        std::array<long double, kMaxFactorial + 1> t{};
        t[0] = 1.0L;
        for (int i = 1; i <= kMaxFactorial; ++i)
            t[i] = t[i - 1] * i;
        return t;
    }();
    return table;
}

// Factorial of a half-integer combination that must be a nonnegative integer.
long double fact2(int twice)
{
    if (twice < 0 || twice % 2 != 0)
        throw DomainError("factorial of non-integer or negative argument");
    const int n = twice / 2;
    if (n > kMaxFactorial)
        throw DomainError("angular momentum too large for factorial table");
    return factorials()[n];
}

bool triangle(HalfInt a, HalfInt b, HalfInt c)
{
    const int ta = a.twice();
    const int tb = b.twice();
    const int tc = c.twice();
    if ((ta + tb + tc) % 2 != 0)
        return false;
    return tc >= std::abs(ta - tb) && tc <= ta + tb;
}

long double delta(HalfInt a, HalfInt b, HalfInt c)
{
    const int ta = a.twice();
    const int tb = b.twice();
    const int tc = c.twice();
    return std::sqrt(fact2(ta + tb - tc) * fact2(ta - tb + tc) * fact2(-ta + tb + tc) /
                     fact2(ta + tb + tc + 2));
}

void require_j(HalfInt j)
{
    if (j.twice() < 0)
        throw DomainError("negative angular momentum " + j.str());
}

void require_projection(HalfInt j, HalfInt m)
{
    require_j(j);
    if ((j.twice() - m.twice()) % 2 != 0)
        throw DomainError("projection " + m.str() + " incompatible with j=" + j.str());
    if (std::abs(m.twice()) > j.twice())
        throw DomainError("projection " + m.str() + " exceeds j=" + j.str());
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

int parse_int(std::string_view s, const std::string& context)
{
    int v = 0;
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw DataError("bad integer '" + std::string(s) + "' in " + context);
    return v;
}

int orbital_from_letter(char c)
{
    switch (c) {
    case 's': return 0;
    case 'p': return 1;
    case 'd': return 2;
    case 'f': return 3;
    case 'g': return 4;
    case 'h': return 5;
    default: return -1;
    }
}

std::vector<std::vector<std::string>> records(std::string_view text)
{
    std::vector<std::vector<std::string>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        std::vector<std::string> rec;
        std::string f;
        while (fields >> f)
            rec.push_back(f);
        if (!rec.empty())
            out.push_back(std::move(rec));
    }
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open data file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

HalfInt HalfInt::parse(std::string_view text)
{
    text = trim(text);
    const auto slash = text.find('/');
    try {
        if (slash == std::string_view::npos)
            return integer(parse_int(text, "half-integer"));
        const int num = parse_int(text.substr(0, slash), "half-integer");
        const int den = parse_int(text.substr(slash + 1), "half-integer");
        if (den != 2)
            throw DataError("denominator must be 2");
        return from_twice(num);
    } catch (const DataError&) {
        throw DomainError("not a half-integer: '" + std::string(text) + "'");
    }
}

std::string HalfInt::str() const
{
    if (is_integer())
        return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
}

double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6)
{
    for (HalfInt j : {j1, j2, j3, j4, j5, j6})
        require_j(j);
    if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) ||
        !triangle(j4, j5, j3))
        return 0.0;

    const int a1 = (j1 + j2 + j3).twice();
    const int a2 = (j1 + j5 + j6).twice();
    const int a3 = (j4 + j2 + j6).twice();
    const int a4 = (j4 + j5 + j3).twice();
    const int b1 = (j1 + j2 + j4 + j5).twice();
    const int b2 = (j2 + j3 + j5 + j6).twice();
    const int b3 = (j3 + j1 + j6 + j4).twice();
    const int tmin = std::max({a1, a2, a3, a4});
    const int tmax = std::min({b1, b2, b3});

    long double sum = 0.0L;
    for (int t = tmin; t <= tmax; t += 2) {
        const long double sign = ((t / 2) % 2 == 0) ? 1.0L : -1.0L;
        sum += sign * fact2(t + 2) /
               (fact2(t - a1) * fact2(t - a2) * fact2(t - a3) * fact2(t - a4) *
                fact2(b1 - t) * fact2(b2 - t) * fact2(b3 - t));
    }
    const long double pre =
        delta(j1, j2, j3) * delta(j1, j5, j6) * delta(j4, j2, j6) * delta(j4, j5, j3);
    return static_cast<double>(pre * sum);
}

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M)
{
    require_projection(j1, m1);
    require_projection(j2, m2);
    require_projection(J, M);
    if (M != m1 + m2 || !triangle(j1, j2, J))
        return 0.0;

    const int tj1 = j1.twice();
    const int tj2 = j2.twice();
    const int tJ = J.twice();
    const int tm1 = m1.twice();
    const int tm2 = m2.twice();
    const int tM = M.twice();

    const long double pre =
        std::sqrt((tJ + 1) * fact2(tJ + tj1 - tj2) * fact2(tJ - tj1 + tj2) *
                  fact2(tj1 + tj2 - tJ) / fact2(tj1 + tj2 + tJ + 2)) *
        std::sqrt(fact2(tJ + tM) * fact2(tJ - tM) * fact2(tj1 - tm1) * fact2(tj1 + tm1) *
                  fact2(tj2 - tm2) * fact2(tj2 + tm2));

    long double sum = 0.0L;
    for (int k = 0;; k += 2) {
        const int d1 = tj1 + tj2 - tJ - k;
        const int d2 = tj1 - tm1 - k;
        const int d3 = tj2 + tm2 - k;
        if (d1 < 0 || d2 < 0 || d3 < 0)
            break;
        const int d4 = tJ - tj2 + tm1 + k;
        const int d5 = tJ - tj1 - tm2 + k;
        if (d4 < 0 || d5 < 0)
            continue;
        const long double sign = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
        sum += sign / (fact2(k) * fact2(d1) * fact2(d2) * fact2(d3) * fact2(d4) * fact2(d5));
    }
    return static_cast<double>(pre * sum);
}

char orbital_letter(int l)
{
    static constexpr char letters[] = "spdfgh";
    if (l < 0 || l > 5)
        throw DomainError("orbital quantum number out of range");
    return letters[l];
}

std::string Level::label() const
{
    return std::to_string(n) + orbital_letter(l) + j.str();
}

std::string AtomicState::label() const
{
    std::string m = mj.str();
    if (mj.twice() >= 0)
        m = "+" + m;
    return std::to_string(n) + orbital_letter(l) + j.str() + ":" + m;
}

AtomData AtomData::parse(std::string_view levels_text, std::string_view reduced_text)
{
    AtomData data;
    for (const auto& rec : records(levels_text)) {
        if (rec.size() < 5)
            throw DataError("level record needs 'species n l j energy [source]'");
        Level lv;
        lv.n = parse_int(rec[1], "level n");
        lv.l = parse_int(rec[2], "level l");
        try {
            lv.j = HalfInt::parse(rec[3]);
        } catch (const DomainError& e) {
            throw DataError(std::string("level j: ") + e.what());
        }
        try {
            lv.energy_cm = std::stod(rec[4]);
        } catch (const std::exception&) {
            throw DataError("bad level energy '" + rec[4] + "'");
        }
        lv.source = rec.size() > 5 ? rec[5] : "";
        const int twice_l = 2 * lv.l;
        if (lv.n < 1 || lv.l < 0 || lv.l >= lv.n ||
            (lv.j.twice() != twice_l - 1 && lv.j.twice() != twice_l + 1) || lv.j.twice() < 0)
            throw DataError("inconsistent quantum numbers in level " + lv.label());
        if (data.find_level(lv.n, lv.l, lv.j) != nullptr)
            throw DataError("duplicate level " + lv.label());
        data.levels_.push_back(lv);
    }

    std::map<std::pair<int, int>, std::vector<const Level*>> series;
    for (const auto& lv : data.levels_)
        series[{lv.l, lv.j.twice()}].push_back(&lv);
    for (auto& [key, lvls] : series) {
        std::sort(lvls.begin(), lvls.end(),
                  [](const Level* a, const Level* b) { return a->n < b->n; });
        for (std::size_t i = 1; i < lvls.size(); ++i)
            if (lvls[i]->energy_cm <= lvls[i - 1]->energy_cm)
                throw DataError("level energy does not increase with n at " +
                                lvls[i]->label());
    }

    for (const auto& rec : records(reduced_text)) {
        if (rec.size() != 5)
            throw DataError("reduced-element record needs 'n l n' l' value'");
        Reduced r{};
        r.n = parse_int(rec[0], "reduced n");
        r.l = parse_int(rec[1], "reduced l");
        r.n_lower = parse_int(rec[2], "reduced n'");
        r.l_lower = parse_int(rec[3], "reduced l'");
        try {
            r.value = std::stod(rec[4]);
        } catch (const std::exception&) {
            throw DataError("bad reduced element '" + rec[4] + "'");
        }
        if (std::abs(r.l - r.l_lower) != 1)
            throw DataError("reduced element violates |l - l'| = 1");
        data.reduced_.push_back(r);
    }
    return data;
}

AtomData AtomData::load(const std::string& levels_path, const std::string& reduced_path)
{
    const std::string levels =
        levels_path.empty() ? std::string(embedded::na_levels) : read_file(levels_path);
    const std::string reduced =
        reduced_path.empty() ? std::string(embedded::na_reduced) : read_file(reduced_path);
    return parse(levels, reduced);
}

const AtomData& AtomData::sodium()
{
    static const AtomData data = parse(embedded::na_levels, embedded::na_reduced);
    return data;
}

const Level* AtomData::find_level(int n, int l, HalfInt j) const
{
    for (const auto& lv : levels_)
        if (lv.n == n && lv.l == l && lv.j == j)
            return &lv;
    return nullptr;
}

std::optional<double> AtomData::reduced(int n, int l, int n_lower, int l_lower) const
{
    for (const auto& r : reduced_)
        if (r.n == n && r.l == l && r.n_lower == n_lower && r.l_lower == l_lower)
            return r.value;
    return std::nullopt;
}

AtomicState AtomData::state(int n, int l, HalfInt j, HalfInt mj) const
{
    require_projection(j, mj);
    const Level* lv = find_level(n, l, j);
    if (lv == nullptr)
        throw DataError("unknown level " + std::to_string(n) + orbital_letter(l) + j.str());
    return {n, l, j, mj, lv->energy_cm};
}

AtomicState AtomData::parse_state(std::string_view label) const
{
    const std::string text(trim(label));
    std::size_t pos = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
        ++pos;
    if (pos == 0 || pos >= text.size())
        throw DomainError("bad state label '" + text + "'");
    const int n = parse_int(std::string_view(text).substr(0, pos), "state label");
    const int l = orbital_from_letter(text[pos]);
    if (l < 0)
        throw DomainError("bad orbital letter in '" + text + "'");
    const auto colon = text.find(':', pos);
    const HalfInt j = HalfInt::parse(std::string_view(text).substr(pos + 1, colon - pos - 1));
    const HalfInt mj =
        colon == std::string::npos ? j : HalfInt::parse(std::string_view(text).substr(colon + 1));
    if (find_level(n, l, j) == nullptr) {
        bool any_l = false;
        for (const auto& r : reduced_)
            any_l = any_l || r.l == l || r.l_lower == l;
        if (!any_l)
            throw DataError("no reduced elements for l=" + std::to_string(l) + " (state '" +
                            text + "')");
    }
    return state(n, l, j, mj);
}

double TransitionChannel::wavelength() const
{
    return 2.0 * constants::pi * constants::c / omega;
}

std::string TransitionChannel::label() const
{
    return upper.level().label() + "->" + lower.label();
}

std::complex<double> dipole_component(const AtomData& data, const AtomicState& upper,
                                      const AtomicState& lower, int q)
{
    if (q < -1 || q > 1)
        throw DomainError("spherical component q must be -1, 0 or +1");
    const auto red = data.reduced(upper.n, upper.l, lower.n, lower.l);
    if (!red)
        throw DataError("no reduced element for " + std::to_string(upper.n) +
                        orbital_letter(upper.l) + " -> " + std::to_string(lower.n) +
                        orbital_letter(lower.l));
    const HalfInt one = HalfInt::integer(1);
    const HalfInt qq = HalfInt::integer(q);
    const double cg = clebsch_gordan(upper.j, upper.mj, one, qq, lower.j, lower.mj);
    if (cg == 0.0)
        return 0.0;
    const double sixj = wigner_6j(HalfInt::integer(upper.l), half, upper.j, lower.j, one,
                                  HalfInt::integer(lower.l));
    const int phase_twice = upper.j.twice() + 2 * lower.l + 1;
    const double sign = ((phase_twice / 2) % 2 == 0) ? 1.0 : -1.0;
    return constants::e * constants::a0 * sign * std::sqrt(upper.j.twice() + 1.0) * sixj *
           (*red) * cg;
}

std::vector<TransitionChannel> list_lower_channels(const AtomData& data,
                                                   const AtomicState& state)
{
    std::vector<const Level*> lower;
    for (const auto& lv : data.levels())
        if (std::abs(lv.l - state.l) == 1 && lv.energy_cm < state.energy_cm &&
            std::abs(lv.j.twice() - state.j.twice()) <= 2)
            lower.push_back(&lv);
    std::sort(lower.begin(), lower.end(), [](const Level* a, const Level* b) {
        return std::tuple(a->l, a->n, a->j.twice()) < std::tuple(b->l, b->n, b->j.twice());
    });

    const double s2 = 1.0 / std::sqrt(2.0);
    const std::complex<double> i(0.0, 1.0);
    std::vector<TransitionChannel> out;
    for (const Level* lv : lower) {
        TransitionChannel ch;
        ch.upper = state;
        ch.lower = *lv;
        ch.omega = constants::wavenumber_to_omega * (state.energy_cm - lv->energy_cm);
        ch.reduced_e_a0 = data.reduced(state.n, state.l, lv->n, lv->l);
        if (ch.reduced_e_a0) {
            for (int q = -1; q <= 1; ++q) {
                const HalfInt ml = state.mj + HalfInt::integer(q);
                if (std::abs(ml.twice()) > lv->j.twice())
                    continue;
                const AtomicState low{lv->n, lv->l, lv->j, ml, lv->energy_cm};
                const double x = dipole_component(data, state, low, q).real();
                if (x == 0.0)
                    continue;
                DipoleComponent dc;
                dc.mj_lower = ml;
                dc.q = q;
                dc.spherical = x;
                if (q == 1)
                    dc.d_mn = {-x * s2, -i * x * s2, 0.0};
                else if (q == -1)
                    dc.d_mn = {x * s2, -i * x * s2, 0.0};
                else
                    dc.d_mn = {0.0, 0.0, x};
                ch.components.push_back(dc);
            }
        }
        out.push_back(std::move(ch));
    }
    return out;
}

double vacuum_rate(const TransitionChannel& channel)
{
    if (!channel.reduced_e_a0)
        throw DataError("no reduced element for channel " + channel.label());
    double d2 = 0.0;
    for (const auto& dc : channel.components)
        d2 += dc.spherical * dc.spherical;
    const double w = channel.omega;
    using namespace constants;
    return w * w * w * d2 / (3.0 * pi * epsilon0 * hbar * c * c * c);
}

double vacuum_total(const std::vector<TransitionChannel>& channels)
{
    double total = 0.0;
    for (const auto& ch : channels)
        total += vacuum_rate(ch);
    return total;
}

} // namespace fibre_emit
