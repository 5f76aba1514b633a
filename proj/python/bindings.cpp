#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "spinwave/em_field.hpp"
#include "spinwave/frw.hpp"
#include "spinwave/symbolic/canonical.hpp"
#include "spinwave/symbolic/identity_file.hpp"
#include "spinwave/symbolic/parser.hpp"
#include "spinwave/symbolic/rewrite.hpp"

namespace py = pybind11;
using namespace spinwave;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

ComponentSpinor from_array(const CArray& a, IndexSignature sig) {
  if (static_cast<std::size_t>(a.size()) != sig.size() || static_cast<std::size_t>(a.ndim()) != sig.rank()) {
    throw py::value_error("expected an array of shape matching " + sig.str());
  }
  return ComponentSpinor(sig, std::vector<Complex>(a.data(), a.data() + a.size()));
}

CArray to_array(const ComponentSpinor& s) {
  std::vector<py::ssize_t> shape;
  for (const auto& slot : s.signature().slots()) shape.push_back(dimension(slot.kind));
  CArray out(shape);
  std::copy(s.data().begin(), s.data().end(), out.mutable_data());
  return out;
}

const IndexSignature kBivector{{IndexKind::World, Variance::Down}, {IndexKind::World, Variance::Down}};
const IndexSignature kPhi{{IndexKind::Unprimed, Variance::Down}, {IndexKind::Unprimed, Variance::Down}};
const IndexSignature kPhibar{{IndexKind::Primed, Variance::Down}, {IndexKind::Primed, Variance::Down}};

py::tuple weight_pair(const std::pair<Rational, Rational>& w) {
  return py::make_tuple(py::make_tuple(w.first.num(), w.first.den()), py::make_tuple(w.second.num(), w.second.den()));
}

py::dict report_dict(const symbolic::VerifyReport& r) {
  py::dict d;
  d["success"] = r.success;
  d["difference"] = r.difference;
  d["residual"] = r.residual;
  d["trace"] = r.trace_text();
  d["steps"] = r.trace.size();
  return d;
}

frw::ModeSolution run_mode(const frw::ScaleFactorModel& m, double k, double eta0, double eta1,
                           const std::vector<double>& samples, std::optional<std::pair<Complex, Complex>> ic,
                           double rel, double abs) {
  frw::ModeSpec spec;
  spec.k = k;
  spec.eta0 = eta0;
  spec.eta1 = eta1;
  spec.samples = samples;
  spec.tol = {rel, abs};
  if (ic) spec.ic = {frw::InitialCondition::Kind::Explicit, ic->first, ic->second};
  return frw::integrate_mode(m, spec);
}

}  // namespace

PYBIND11_MODULE(_spinwave, m) {
  m.doc() = "Two-spinor identity engine, Maxwell spinor utilities and FRW mode solver";

  py::register_exception<Error>(m, "SpinwaveError");

  m.def(
      "canonicalize",
      [](const std::string& expr, const std::string& convention) {
        return symbolic::to_string(symbolic::canonicalize(symbolic::parse(expr), symbolic::convention_named(convention)));
      },
      py::arg("expr"), py::arg("convention") = "standard");
  m.def(
      "weight_of", [](const std::string& expr) { return weight_pair(symbolic::weight_of(symbolic::parse(expr))); },
      py::arg("expr"));
  m.def(
      "verify_identity",
      [](const std::string& lhs, const std::string& rhs,
         const std::vector<std::tuple<std::string, std::string, std::string>>& rules, const std::string& convention) {
        symbolic::KernelTable table = symbolic::KernelTable::builtin();
        std::vector<symbolic::RewriteRule> rs;
        for (const auto& [name, pattern, replacement] : rules) {
          rs.push_back({name, symbolic::parse(pattern, table),
                        replacement == "0" ? symbolic::Expr::zero() : symbolic::parse(replacement, table)});
        }
        const auto l = symbolic::parse(lhs, table);
        const auto r = rhs == "0" ? symbolic::Expr::zero() : symbolic::parse(rhs, table);
        return report_dict(symbolic::verify_identity(l, r, rs, symbolic::convention_named(convention)));
      },
      py::arg("lhs"), py::arg("rhs"), py::arg("rules") = std::vector<std::tuple<std::string, std::string, std::string>>{},
      py::arg("convention") = "standard");
  m.def(
      "verify_file",
      [](const std::string& path) {
        const auto file = symbolic::load_identity_file(path);
        py::list out;
        for (const auto& c : file.claims) {
          py::dict d = report_dict(symbolic::run_claim(c).report);
          d["name"] = c.name;
          d["line"] = c.line;
          d["claim"] = c.text;
          d["refute"] = c.refute;
          d["passed"] = d["success"].cast<bool>() != c.refute;
          out.append(d);
        }
        return out;
      },
      py::arg("path"));

  m.def(
      "spinors_from_bivector",
      [](const CArray& f) {
        const auto w = em::spinors_from_bivector(from_array(f, kBivector));
        return py::make_tuple(to_array(w.phi), to_array(w.phibar));
      },
      py::arg("F"));
  m.def(
      "bivector_from_spinors",
      [](const CArray& phi, const CArray& phibar) {
        return to_array(em::bivector_from_spinors(from_array(phi, kPhi), from_array(phibar, kPhibar)));
      },
      py::arg("phi"), py::arg("phibar"));
  m.def(
      "stress_energy",
      [](const CArray& phi) {
        const auto p = from_array(phi, kPhi);
        return to_array(em::stress_energy(p, conjugate(p)));
      },
      py::arg("phi"));
  m.def(
      "hodge_dual", [](const CArray& f) { return to_array(em::hodge_dual(from_array(f, kBivector))); }, py::arg("F"));

  py::class_<frw::ScaleFactorModel>(m, "ScaleFactorModel")
      .def_static("radiation", &frw::ScaleFactorModel::radiation, py::arg("a0") = 1.0)
      .def_static("matter", &frw::ScaleFactorModel::matter, py::arg("a0") = 1.0)
      .def_static("de_sitter", &frw::ScaleFactorModel::de_sitter, py::arg("H") = 1.0)
      .def_static("tabulated", &frw::ScaleFactorModel::tabulated, py::arg("eta"), py::arg("a"))
      .def_property_readonly("name", &frw::ScaleFactorModel::name)
      .def("contains", &frw::ScaleFactorModel::contains)
      .def("a", &frw::ScaleFactorModel::a)
      .def("da", &frw::ScaleFactorModel::da)
      .def("dda", &frw::ScaleFactorModel::dda)
      .def("ricci_scalar", [](const frw::ScaleFactorModel& self, double eta) { return frw::ricci_scalar(self, eta); });

  m.def(
      "integrate_mode",
      [](const frw::ScaleFactorModel& model, double k, double eta0, double eta1, const std::vector<double>& samples,
         std::optional<std::pair<Complex, Complex>> ic, double rel, double abs) {
        const auto sol = run_mode(model, k, eta0, eta1, samples, ic, rel, abs);
        py::dict d;
        d["eta"] = py::array_t<double>(sol.eta.size(), sol.eta.data());
        d["f"] = py::array_t<Complex>(sol.f.size(), sol.f.data());
        d["df"] = py::array_t<Complex>(sol.df.size(), sol.df.data());
        d["steps"] = sol.steps;
        d["rejected"] = sol.rejected;
        d["wronskian_drift"] = frw::wronskian_drift(sol, frw::conjugate(sol), model);
        return d;
      },
      py::arg("model"), py::arg("k"), py::arg("eta0"), py::arg("eta1"), py::arg("samples") = std::vector<double>{},
      py::arg("ic") = py::none(), py::arg("rel") = 1e-9, py::arg("abs") = 1e-12);
  m.def(
      "spectrum_csv",
      [](const frw::ScaleFactorModel& model, const std::vector<double>& ks, double eta0, double eta_end,
         unsigned jobs) {
        std::ostringstream os;
        frw::write_spectrum_csv(os, frw::spectrum(model, ks, eta0, eta_end, {}, {}, jobs));
        return os.str();
      },
      py::arg("model"), py::arg("ks"), py::arg("eta0"), py::arg("eta_end"), py::arg("jobs") = 1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
  m.attr("DATA_DIR") = SPINWAVE_DATA_DIR;
}
