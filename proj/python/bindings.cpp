// Python bindings for the main operations: engine models, joint
// distributions and moments, CGF evaluation, rate functions, and block
// sampling.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qotto/cgf.hpp"
#include "qotto/engines.hpp"
#include "qotto/joint.hpp"
#include "qotto/ldf.hpp"
#include "qotto/montecarlo.hpp"

namespace py = pybind11;
using namespace qotto;

namespace {

py::object cgf_value_to_py(const CgfValue& v) {
    if (v.is_finite()) return py::float_(v.value);
    return py::none();
}

py::list curve_to_py(const RateFunctionCurve& curve) {
    py::list out;
    for (const RateFunctionPoint& p : curve.points) {
        out.append(py::make_tuple(p.eta, p.j, to_string(p.status)));
    }
    return out;
}

std::vector<double> default_grid() {
    std::vector<double> etas(201);
    for (std::size_t i = 0; i < etas.size(); ++i) etas[i] = -0.5 + 2.0 * i / 200.0;
    return etas;
}

template <typename Engine>
RateFunctionCurve curve_for(const Engine& engine, const BathPair& baths,
                            const std::vector<double>& etas, double eta_th) {
    const Cgf cgf = make_cgf(engine, baths);
    return rate_curve(cgf, etas.empty() ? default_grid() : etas, {}, eta_th, baths.eta_carnot());
}

}  // namespace

PYBIND11_MODULE(_qotto, m) {
    m.doc() = "work-heat statistics and efficiency large deviations of quantum Otto engines";

    py::register_exception<truncation_error>(m, "TruncationError", PyExc_RuntimeError);

    py::class_<BathPair>(m, "BathPair")
        .def(py::init<double, double>(), py::arg("beta_c"), py::arg("beta_h"))
        .def_readonly("beta_c", &BathPair::beta_c)
        .def_readonly("beta_h", &BathPair::beta_h)
        .def("eta_carnot", &BathPair::eta_carnot);

    py::class_<TwoLevelEngine>(m, "TwoLevelEngine")
        .def(py::init<double, double, double>(), py::arg("nu0"), py::arg("nu_tau"), py::arg("u"))
        .def_readonly("nu0", &TwoLevelEngine::nu0)
        .def_readonly("nu_tau", &TwoLevelEngine::nu_tau)
        .def_readonly("u", &TwoLevelEngine::u)
        .def("q_star", &TwoLevelEngine::q_star);

    py::class_<HarmonicEngine>(m, "HarmonicEngine")
        .def(py::init<double, double, double>(), py::arg("omega0"), py::arg("omega_tau"),
             py::arg("q_star"))
        .def_readonly("omega0", &HarmonicEngine::omega0)
        .def_readonly("omega_tau", &HarmonicEngine::omega_tau)
        .def_readonly("q_star", &HarmonicEngine::q_star);

    py::class_<ScaleInvariantEngine>(m, "ScaleInvariantEngine")
        .def(py::init<std::vector<double>, double>(), py::arg("spectrum"), py::arg("eps_tau_sq"))
        .def_readonly("spectrum", &ScaleInvariantEngine::spectrum)
        .def_readonly("eps_tau_sq", &ScaleInvariantEngine::eps_tau_sq);

    m.def("tls_no_transition_prob", &tls_no_transition_prob, py::arg("lambda1"), py::arg("lambda2"),
          py::arg("tau"));

    m.def("macroscopic_efficiencies",
          py::overload_cast<const TwoLevelEngine&, const BathPair&>(&macroscopic_efficiencies));
    m.def("macroscopic_efficiencies",
          py::overload_cast<const HarmonicEngine&, const BathPair&>(&macroscopic_efficiencies));
    m.def("macroscopic_efficiencies",
          py::overload_cast<const ScaleInvariantEngine&, const BathPair&>(&macroscopic_efficiencies));

    py::class_<Atom>(m, "Atom")
        .def_readonly("q2", &Atom::q2)
        .def_readonly("w", &Atom::w)
        .def_readonly("p", &Atom::p)
        .def("__repr__", [](const Atom& a) {
            return "Atom(q2=" + std::to_string(a.q2) + ", w=" + std::to_string(a.w) +
                   ", p=" + std::to_string(a.p) + ")";
        });

    py::class_<JointDistribution>(m, "JointDistribution")
        .def_readonly("atoms", &JointDistribution::atoms)
        .def_readonly("tail_mass", &JointDistribution::tail_mass)
        .def("total_mass", &JointDistribution::total_mass);

    py::class_<MomentSummary>(m, "MomentSummary")
        .def_readonly("mean_q2", &MomentSummary::mean_q2)
        .def_readonly("mean_w", &MomentSummary::mean_w)
        .def_readonly("var_q2", &MomentSummary::var_q2)
        .def_readonly("var_w", &MomentSummary::var_w)
        .def_readonly("cov_qw", &MomentSummary::cov_qw)
        .def_readonly("pearson", &MomentSummary::pearson)
        .def_readonly("eta_macroscopic", &MomentSummary::eta_macroscopic);

    m.def("build_joint_two_level", &build_joint_two_level);
    m.def("build_joint_harmonic", &build_joint_harmonic, py::arg("engine"), py::arg("baths"),
          py::arg("n_levels"), py::arg("tail_tol") = 1e-10, py::arg("prune_floor") = 1e-18);
    m.def("build_joint_adiabatic_scale_invariant", &build_joint_adiabatic_scale_invariant);
    m.def("moments", &moments);

    m.def("harmonic_transitions", [](double q_star, std::size_t n_levels) {
        const TransitionMatrix t = harmonic_transitions(q_star, n_levels);
        std::vector<std::vector<double>> rows(t.dim(), std::vector<double>(t.dim()));
        for (std::size_t n = 0; n < t.dim(); ++n) {
            for (std::size_t mcol = 0; mcol < t.dim(); ++mcol) rows[n][mcol] = t(n, mcol);
        }
        return rows;
    });

    m.def("cgf_two_level", [](double g1, double g2, const TwoLevelEngine& e, const BathPair& b) {
        return cgf_value_to_py(cgf_two_level(g1, g2, e, b));
    });
    m.def("cgf_two_level_linear",
          [](double g1, double g2, const TwoLevelEngine& e, const BathPair& b) {
              return cgf_value_to_py(cgf_two_level_linear(g1, g2, e, b));
          });
    m.def("cgf_harmonic", [](double g1, double g2, const HarmonicEngine& e, const BathPair& b) {
        return cgf_value_to_py(cgf_harmonic(g1, g2, e, b));
    });
    m.def("cgf_harmonic_linear",
          [](double g1, double g2, const HarmonicEngine& e, const BathPair& b) {
              return cgf_value_to_py(cgf_harmonic_linear(g1, g2, e, b));
          });
    m.def("cgf_scale_invariant",
          [](double g1, double g2, const ScaleInvariantEngine& e, const BathPair& b) {
              return cgf_value_to_py(cgf_scale_invariant(g1, g2, e, b));
          });
    m.def("cgf_from_distribution", [](double g1, double g2, const JointDistribution& d) {
        return cgf_value_to_py(cgf_from_distribution(g1, g2, d));
    });

    m.def(
        "rate_curve_two_level",
        [](const TwoLevelEngine& e, const BathPair& b, const std::vector<double>& etas) {
            const double eta_th = *moments(build_joint_two_level(e, b)).eta_macroscopic;
            return curve_to_py(curve_for(e, b, etas, eta_th));
        },
        py::arg("engine"), py::arg("baths"), py::arg("etas") = std::vector<double>{});
    m.def(
        "rate_curve_harmonic",
        [](const HarmonicEngine& e, const BathPair& b, const std::vector<double>& etas,
           std::size_t n_levels) {
            const double eta_th =
                *moments(build_joint_harmonic(e, b, n_levels, 1e-8)).eta_macroscopic;
            return curve_to_py(curve_for(e, b, etas, eta_th));
        },
        py::arg("engine"), py::arg("baths"), py::arg("etas") = std::vector<double>{},
        py::arg("n_levels") = 256);

    m.def("degeneracy_check_two_level",
          [](const TwoLevelEngine& e, const BathPair& b, double eta_th, double tol) {
              return degeneracy_check(make_cgf(e, b), eta_th, tol);
          },
          py::arg("engine"), py::arg("baths"), py::arg("eta_th"), py::arg("tolerance") = 1e-10);
    m.def("degeneracy_check_harmonic",
          [](const HarmonicEngine& e, const BathPair& b, double eta_th, double tol) {
              return degeneracy_check(make_cgf(e, b), eta_th, tol);
          },
          py::arg("engine"), py::arg("baths"), py::arg("eta_th"), py::arg("tolerance") = 1e-10);

    py::class_<CycleSampler>(m, "CycleSampler")
        .def(py::init<const TwoLevelEngine&, const BathPair&>())
        .def(py::init<const HarmonicEngine&, const BathPair&, std::size_t>())
        .def(py::init<const ScaleInvariantEngine&, const BathPair&>());

    py::class_<BlockEstimate>(m, "BlockEstimate")
        .def_readonly("s", &BlockEstimate::s)
        .def_readonly("eta_values", &BlockEstimate::eta_values)
        .def_readonly("counts", &BlockEstimate::counts)
        .def_readonly("excluded", &BlockEstimate::excluded)
        .def_readonly("total_blocks", &BlockEstimate::total_blocks)
        .def_readonly("seed", &BlockEstimate::seed);

    m.def(
        "sample_blocks",
        [](const CycleSampler& sampler, std::size_t s, std::size_t n_blocks, std::uint64_t seed,
           double lo, double hi, std::size_t bins, int threads) {
            return sample_blocks(sampler, s, n_blocks, seed, {lo, hi, bins}, threads);
        },
        py::arg("sampler"), py::arg("s"), py::arg("blocks"), py::arg("seed"),
        py::arg("lo") = -0.5, py::arg("hi") = 1.5, py::arg("bins") = 101, py::arg("threads") = 1);

    m.def("empirical_rate", [](const BlockEstimate& blocks) {
        py::list out;
        for (const EmpiricalRatePoint& p : empirical_rate(blocks)) {
            out.append(py::make_tuple(p.eta_center, p.count, p.rate, p.std_error));
        }
        return out;
    });

    m.attr("__version__") = "0.1.0";
}
