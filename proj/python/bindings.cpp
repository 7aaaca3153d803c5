#include "fibre_emit/atom.hpp"
#include "fibre_emit/config.hpp"
#include "fibre_emit/constants.hpp"
#include "fibre_emit/errors.hpp"
#include "fibre_emit/fibre.hpp"
#include "fibre_emit/guided.hpp"
#include "fibre_emit/rates.hpp"
#include "fibre_emit/sweep.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace fibre_emit;

namespace {

FibreSpec make_fibre(double a_nm, double n1, double n2)
{
    FibreSpec f{a_nm * 1e-9, n1, n2};
    f.validate();
    return f;
}

py::dict mode_dict(const guided::GuidedMode& m, const FibreSpec& f)
{
    py::dict d;
    d["name"] = m.name();
    d["m"] = m.m;
    d["radial_index"] = m.radial_index;
    d["beta"] = m.beta;
    d["u"] = m.u;
    d["w"] = m.w;
    d["beta_prime"] = m.beta_prime;
    d["residual"] = guided::mode_residual(m, f);
    return d;
}

py::dict breakdown_dict(const rates::RateBreakdown& rb)
{
    py::dict d;
    d["state"] = rb.upper.label();
    d["Gamma_0"] = rb.Gamma_0;
    d["Gamma_g_over_Gamma0"] = rb.Gamma_g / rb.Gamma_0;
    d["Gamma_r_over_Gamma0"] = rb.Gamma_r / rb.Gamma_0;
    d["guided_fraction"] = rb.guided_fraction;
    d["achieved_rel"] = rb.achieved_rel;
    py::dict channels;
    for (const auto& cr : rb.per_channel) {
        py::dict c;
        c["wavelength_nm"] = cr.channel.wavelength() * 1e9;
        c["n1"] = cr.fibre.n1;
        c["gamma0"] = cr.gamma0;
        c["guided"] = cr.guided.rate;
        c["radiative"] = cr.radiative.rate;
        py::dict br;
        for (const auto& b : cr.guided.branches)
            br[py::str(b.name)] = b.rate;
        c["branches"] = br;
        channels[py::str(cr.channel.label())] = c;
    }
    d["channels"] = channels;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Spontaneous emission of a sodium atom near an optical nanofibre";
    m.attr("__version__") = FIBRE_EMIT_VERSION;

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def(
        "lifetime_us",
        [](const std::string& state) {
            const auto& na = AtomData::sodium();
            return 1e6 / vacuum_total(list_lower_channels(na, na.parse_state(state)));
        },
        py::arg("state"), "Free-space radiative lifetime in microseconds.");

    m.def(
        "channels",
        [](const std::string& state) {
            const auto& na = AtomData::sodium();
            py::list out;
            for (const auto& ch : list_lower_channels(na, na.parse_state(state))) {
                py::dict d;
                d["label"] = ch.label();
                d["wavelength_nm"] = ch.wavelength() * 1e9;
                d["gamma0"] = vacuum_rate(ch);
                out.append(d);
            }
            return out;
        },
        py::arg("state"), "Downward channels with wavelength and vacuum rate (1/s).");

    m.def(
        "guided_modes",
        [](double wavelength_nm, double a_nm, double n1, double n2) {
            const FibreSpec f = make_fibre(a_nm, n1, n2);
            const double omega = 2.0 * constants::pi * constants::c / (wavelength_nm * 1e-9);
            py::list out;
            for (const auto& md : guided::solve_branches(omega, f))
                out.append(mode_dict(md, f));
            return out;
        },
        py::arg("wavelength_nm"), py::arg("a_nm"), py::arg("n1"), py::arg("n2") = 1.0,
        "Guided branches at one wavelength, ordered by azimuthal order m.");

    m.def(
        "rates",
        [](const std::string& state, double r_over_a, double a_nm, std::optional<double> n1,
           double n2) {
            const auto& na = AtomData::sodium();
            rates::Medium med;
            med.a = a_nm * 1e-9;
            med.n2 = n2;
            med.n1_fixed = n1;
            py::gil_scoped_release nogil;
            const auto rb =
                rates::total_rates(na, na.parse_state(state), med, {r_over_a * med.a, 0.0, 0.0});
            py::gil_scoped_acquire gil;
            return breakdown_dict(rb);
        },
        py::arg("state"), py::arg("r_over_a") = 1.0, py::arg("a_nm") = 100.0,
        py::arg("n1") = py::none(), py::arg("n2") = 1.0,
        "Guided and radiative rates of one state, normalised to the free-space rate.");

    m.def(
        "run_config",
        [](const std::string& text, const std::string& format) {
            auto cfg = RunConfig::parse(text);
            cfg.set("format", format);
            for (const auto& d : validate(cfg))
                if (d.level == Diagnostic::Level::Error)
                    throw ConfigError(d.message);
            std::ostringstream out;
            {
                py::gil_scoped_release nogil;
                const auto result = run_sweep(cfg);
                if (cfg.format == OutputFormat::Json)
                    write_json(out, cfg, result);
                else
                    write_csv(out, cfg, result);
            }
            return out.str();
        },
        py::arg("text"), py::arg("format") = "csv",
        "Run a key = value configuration and return the CSV or JSON table.");
}
