#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "powvar/functionals.hpp"
#include "powvar/functions.hpp"
#include "powvar/harness.hpp"
#include "powvar/limits.hpp"
#include "powvar/model.hpp"
#include "powvar/rng.hpp"
#include "powvar/simulate.hpp"
#include "powvar/stats.hpp"

namespace py = pybind11;
using namespace powvar;

namespace {

Functional make_functional(const std::string& theorem, const std::string& f, double varpi,
                           double alpha, double psi_eta) {
    const auto thm = theorem_from_name(theorem);
    if (!thm) throw std::invalid_argument("unknown theorem '" + theorem + "'");
    Functional fn;
    fn.theorem = *thm;
    if (!f.empty()) fn.f = TestFunction::parse(f);
    if (varpi > 0.0) fn.trunc = TruncationSpec{varpi, alpha};
    fn.psi_eta = psi_eta;
    return fn;
}

}  // namespace

PYBIND11_MODULE(_powvar, m) {
    m.doc() = "Realized power variation laboratory: simulation, functionals, limit theory";

    py::class_<DriftSpec>(m, "DriftSpec")
        .def_static("constant", &DriftSpec::constant, py::arg("b"))
        .def("__call__", &DriftSpec::operator());

    py::class_<VolSpec>(m, "VolSpec")
        .def_static("constant", &VolSpec::constant, py::arg("sigma0"))
        .def_static("exp_ou", &VolSpec::exp_ou, py::arg("sigma0"), py::arg("mean_reversion"),
                    py::arg("vol_of_vol"), py::arg("leverage"))
        .def_static("exp_ou_jump", &VolSpec::exp_ou_jump, py::arg("sigma0"),
                    py::arg("mean_reversion"), py::arg("vol_of_vol"), py::arg("leverage"),
                    py::arg("jump_zeta"));

    py::class_<JumpSizeSpec>(m, "JumpSizeSpec")
        .def_static("fixed", &JumpSizeSpec::fixed, py::arg("a"))
        .def_static("gaussian", &JumpSizeSpec::gaussian, py::arg("mean"), py::arg("variance"))
        .def_static("double_exponential", &JumpSizeSpec::double_exponential, py::arg("eta_plus"),
                    py::arg("eta_minus"));

    py::enum_<SmallJumpPolicy>(m, "SmallJumpPolicy")
        .value("DISCARD", SmallJumpPolicy::Discard)
        .value("GAUSSIAN_SUBSTITUTE", SmallJumpPolicy::GaussianSubstitute);

    py::class_<JumpSpec>(m, "JumpSpec")
        .def_static("none", &JumpSpec::none)
        .def_static("compound_poisson", &JumpSpec::compound_poisson, py::arg("rate"),
                    py::arg("size"))
        .def_static("stable_like", &JumpSpec::stable_like, py::arg("beta"), py::arg("scale"),
                    py::arg("policy") = SmallJumpPolicy::Discard);

    py::class_<ModelSpec>(m, "ModelSpec")
        .def(py::init([](DriftSpec drift, VolSpec vol, JumpSpec jumps, double x0) {
                 ModelSpec spec;
                 spec.drift = drift;
                 spec.vol = vol;
                 spec.jumps = jumps;
                 spec.x0 = x0;
                 return spec;
             }),
             py::arg("drift") = DriftSpec{}, py::arg("vol") = VolSpec{},
             py::arg("jumps") = JumpSpec{}, py::arg("x0") = 0.0)
        .def_readwrite("x0", &ModelSpec::x0);

    py::class_<SamplingSpec>(m, "SamplingSpec")
        .def(py::init([](double horizon, double delta_n, int refine) {
                 SamplingSpec s;
                 s.horizon = horizon;
                 s.delta_n = delta_n;
                 s.refine = refine;
                 return s;
             }),
             py::arg("horizon") = 1.0, py::arg("delta_n") = 1.0 / 256.0, py::arg("refine") = 8)
        .def_readwrite("horizon", &SamplingSpec::horizon)
        .def_readwrite("delta_n", &SamplingSpec::delta_n)
        .def_readwrite("refine", &SamplingSpec::refine)
        .def("validate", &SamplingSpec::validate);

    py::class_<TruncationSpec>(m, "TruncationSpec")
        .def(py::init([](double varpi, double alpha) {
                 return TruncationSpec{varpi, alpha};
             }),
             py::arg("varpi"), py::arg("alpha"))
        .def("threshold", &TruncationSpec::threshold, py::arg("delta_n"));

    py::class_<JumpRecordEntry>(m, "JumpRecordEntry")
        .def_readonly("time", &JumpRecordEntry::time)
        .def_readonly("size", &JumpRecordEntry::size)
        .def_readonly("c_left", &JumpRecordEntry::c_left)
        .def_readonly("c_right", &JumpRecordEntry::c_right);

    py::class_<PathBundle>(m, "PathBundle")
        .def_readonly("grid", &PathBundle::grid)
        .def_readonly("x", &PathBundle::x)
        .def_readonly("c", &PathBundle::c)
        .def_readonly("jumps", &PathBundle::jumps)
        .def_readonly("seed", &PathBundle::seed)
        .def_readonly("jump_record_complete", &PathBundle::jump_record_complete);

    py::class_<FunctionalSeries>(m, "FunctionalSeries")
        .def_readonly("times", &FunctionalSeries::times)
        .def_readonly("values", &FunctionalSeries::values)
        .def_readonly("meta", &FunctionalSeries::meta)
        .def("terminal", &FunctionalSeries::terminal)
        .def("at_time", &FunctionalSeries::at_time, py::arg("t"));

    m.def("validate_model",
          [](const ModelSpec& spec) { return validate_model(spec).all(); }, py::arg("spec"));
    m.def("activity_index", &activity_index, py::arg("spec"));
    m.def("hypothesis_profile", [](const ModelSpec& spec) {
        const HypothesisProfile profile = hypothesis_profile(spec);
        py::dict out;
        out["H"] = profile.h;
        out["K"] = profile.k;
        out["H_prime"] = profile.h_prime;
        out["levy_threshold"] = profile.levy_threshold;
        out["levy_threshold_strict"] = profile.levy_threshold_strict;
        return out;
    });

    m.def("simulate_path", &simulate_path, py::arg("spec"), py::arg("sampling"), py::arg("seed"));
    m.def("simulate_batch", &simulate_batch_collect, py::arg("spec"), py::arg("sampling"),
          py::arg("base_seed"), py::arg("replicates"));
    m.def("restrict_to_observations", &restrict_to_observations, py::arg("path"),
          py::arg("obs_delta"));
    m.def("derive_seed", &derive_seed, py::arg("base"), py::arg("k"));

    m.def("eval_function",
          [](const std::string& name, double x) { return TestFunction::parse(name)(x); },
          py::arg("name"), py::arg("x"));
    m.def("abs_moment", &abs_moment, py::arg("r"));
    m.def("rho", [](const std::string& name, double sigma) {
        return rho(TestFunction::parse(name), sigma);
    }, py::arg("name"), py::arg("sigma"));

    m.def("v_n", [](const std::string& f, const std::vector<double>& incs, double delta) {
        return v_n(TestFunction::parse(f), incs, delta);
    }, py::arg("f"), py::arg("increments"), py::arg("delta_n"));
    m.def("v_prime_n", [](const std::string& f, const std::vector<double>& incs, double delta) {
        return v_prime_n(TestFunction::parse(f), incs, delta);
    }, py::arg("f"), py::arg("increments"), py::arg("delta_n"));
    m.def("v_trunc_n",
          [](double varpi, double alpha, const std::vector<double>& incs, double delta) {
              return v_trunc_n(TruncationSpec{varpi, alpha}, incs, delta);
          },
          py::arg("varpi"), py::arg("alpha"), py::arg("increments"), py::arg("delta_n"));
    m.def("jump_functional",
          [](const std::string& f, const PathBundle& path, double delta) {
              return jump_functional(TestFunction::parse(f), path, delta);
          },
          py::arg("f"), py::arg("path"), py::arg("delta_n"));

    m.def("clt_region_check",
          [](const std::string& theorem, double s, double param, bool continuous) {
              const auto thm = theorem_from_name(theorem);
              if (!thm) throw std::invalid_argument("unknown theorem '" + theorem + "'");
              const RegionCheck check = clt_region_check(*thm, s, param, continuous);
              py::dict out;
              out["clt_holds"] = check.clt_holds;
              out["degenerate_exponent"] = check.degenerate_exponent;
              out["condition"] = check.condition;
              return out;
          },
          py::arg("theorem"), py::arg("s"), py::arg("r_or_varpi"),
          py::arg("continuous_model") = false);

    m.def("lln_limit",
          [](const std::string& theorem, const std::string& f, double varpi, double alpha,
             const ModelSpec& spec, const PathBundle& path, double delta) {
              return lln_limit(make_functional(theorem, f, varpi, alpha,
                                               std::numeric_limits<double>::infinity()),
                               spec, path, delta);
          },
          py::arg("theorem"), py::arg("f"), py::arg("varpi"), py::arg("alpha"), py::arg("spec"),
          py::arg("path"), py::arg("delta_n"));

    m.def("clt_variance",
          [](const std::string& theorem, const std::string& f, double varpi, double alpha,
             const ModelSpec& spec, const PathBundle& path, double t) {
              return clt_variance(make_functional(theorem, f, varpi, alpha,
                                                  std::numeric_limits<double>::infinity()),
                                  spec, path, t);
          },
          py::arg("theorem"), py::arg("f"), py::arg("varpi"), py::arg("alpha"), py::arg("spec"),
          py::arg("path"), py::arg("t"));

    m.def("sample_z_law",
          [](const std::string& f, const PathBundle& path, std::uint64_t seed, double t) {
              return sample_z_law(TestFunction::parse(f).derivative(), path, seed, t).value;
          },
          py::arg("f"), py::arg("path"), py::arg("seed"), py::arg("t"));

    m.def("ks_distance", [](const std::vector<double>& samples) {
        const auto result = stats::ks_distance(samples);
        return py::make_tuple(result.distance, result.p_value);
    }, py::arg("samples"));

    py::register_exception<AdmissibilityError>(m, "AdmissibilityError");
}
