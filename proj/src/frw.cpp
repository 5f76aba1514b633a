#include "spinwave/frw.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "spinwave/error.hpp"
#include "spinwave/parallel.hpp"

namespace spinwave::frw {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

struct ScaleFactorModel::Table {
  std::vector<double> eta;
  std::vector<double> a;
  gsl_spline* spline = nullptr;

  Table(std::vector<double> e, std::vector<double> v) : eta(std::move(e)), a(std::move(v)) {
    spline = gsl_spline_alloc(gsl_interp_cspline, eta.size());
    gsl_spline_init(spline, eta.data(), a.data(), eta.size());
  }
  ~Table() { gsl_spline_free(spline); }
  Table(const Table&) = delete;
  Table& operator=(const Table&) = delete;
};

ScaleFactorModel ScaleFactorModel::radiation(double a0) {
  if (!(a0 > 0.0)) throw Error(ErrorKind::Domain, "radiation model needs a0 > 0");
  ScaleFactorModel m;
  m.kind_ = ModelKind::Radiation;
  m.param_ = a0;
  return m;
}

ScaleFactorModel ScaleFactorModel::matter(double a0) {
  if (!(a0 > 0.0)) throw Error(ErrorKind::Domain, "matter model needs a0 > 0");
  ScaleFactorModel m;
  m.kind_ = ModelKind::Matter;
  m.param_ = a0;
  return m;
}

ScaleFactorModel ScaleFactorModel::de_sitter(double hubble) {
  if (!(hubble > 0.0)) throw Error(ErrorKind::Domain, "de Sitter model needs H > 0");
  ScaleFactorModel m;
  m.kind_ = ModelKind::DeSitter;
  m.param_ = hubble;
  return m;
}

ScaleFactorModel ScaleFactorModel::tabulated(std::vector<double> eta, std::vector<double> a) {
  if (eta.size() != a.size()) throw Error(ErrorKind::Domain, "tabulated model: eta and a differ in length");
  if (eta.size() < 4) throw Error(ErrorKind::Domain, "tabulated model needs at least 4 samples");
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (!std::isfinite(eta[i]) || !std::isfinite(a[i])) throw Error(ErrorKind::Domain, "tabulated model: non-finite sample");
    if (!(a[i] > 0.0)) throw Error(ErrorKind::Domain, "tabulated model: a must be positive");
    if (i > 0 && !(eta[i] > eta[i - 1])) throw Error(ErrorKind::Domain, "tabulated model: eta must increase strictly");
  }
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;
  ScaleFactorModel m;
  m.kind_ = ModelKind::Tabulated;
  m.table_ = std::make_shared<const Table>(std::move(eta), std::move(a));
  return m;
}

std::string ScaleFactorModel::name() const {
  switch (kind_) {
    case ModelKind::Radiation: return "radiation";
    case ModelKind::Matter: return "matter";
    case ModelKind::DeSitter: return "deSitter";
    case ModelKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

bool ScaleFactorModel::contains(double eta) const {
  if (!std::isfinite(eta)) return false;
  switch (kind_) {
    case ModelKind::Radiation:
    case ModelKind::Matter: return eta > 0.0;
    case ModelKind::DeSitter: return eta < 0.0;
    case ModelKind::Tabulated: return eta >= table_->eta.front() && eta <= table_->eta.back();
  }
  return false;
}

void ScaleFactorModel::require(double eta) const {
  if (!contains(eta)) throw Error(ErrorKind::Domain, "eta = " + num(eta) + " is outside the " + name() + " domain");
}

void ScaleFactorModel::require_range(double lo, double hi) const {
  require(lo);
  require(hi);
}

double ScaleFactorModel::a(double eta) const {
  require(eta);
  switch (kind_) {
    case ModelKind::Radiation: return param_ * eta;
    case ModelKind::Matter: return param_ * eta * eta;
    case ModelKind::DeSitter: return -1.0 / (param_ * eta);
    case ModelKind::Tabulated: {
      const double v = gsl_spline_eval(table_->spline, eta, nullptr);
      if (!(v > 0.0)) throw Error(ErrorKind::Domain, "tabulated a(eta) is not positive at eta = " + num(eta));
      return v;
    }
  }
  return 0.0;
}

double ScaleFactorModel::da(double eta) const {
  require(eta);
  switch (kind_) {
    case ModelKind::Radiation: return param_;
    case ModelKind::Matter: return 2.0 * param_ * eta;
    case ModelKind::DeSitter: return 1.0 / (param_ * eta * eta);
    case ModelKind::Tabulated: return gsl_spline_eval_deriv(table_->spline, eta, nullptr);
  }
  return 0.0;
}

double ScaleFactorModel::dda(double eta) const {
  require(eta);
  switch (kind_) {
    case ModelKind::Radiation: return 0.0;
    case ModelKind::Matter: return 2.0 * param_;
    case ModelKind::DeSitter: return -2.0 / (param_ * eta * eta * eta);
    case ModelKind::Tabulated: return gsl_spline_eval_deriv2(table_->spline, eta, nullptr);
  }
  return 0.0;
}

double ricci_scalar(const ScaleFactorModel& m, double eta) {
  const double a = m.a(eta);
  return 6.0 * m.dda(eta) / (a * a * a);
}

Complex mode_residual(const ScaleFactorModel& m, double k, Complex f, Complex df, Complex ddf, double eta) {
  const double a = m.a(eta);
  return ddf + 2.0 * (m.da(eta) / a) * df + (k * k + 2.0 * m.dda(eta) / a) * f;
}

std::vector<Complex> wave_operator_1p1(const ScaleFactorModel& m, const std::vector<Complex>& psi, double eta0,
                                       double h, std::size_t n_eta, std::size_t n_x) {
  if (n_eta < 3 || n_x < 3) throw Error(ErrorKind::Grid, "the 1+1 stencil needs at least 3 samples per axis");
  if (psi.size() != n_eta * n_x) throw Error(ErrorKind::Grid, "sample count does not match the grid");
  std::vector<Complex> out;
  out.reserve((n_eta - 2) * (n_x - 2));
  auto at = [&](std::size_t i, std::size_t j) { return psi[i * n_x + j]; };
  for (std::size_t i = 1; i + 1 < n_eta; ++i) {
    const double eta = eta0 + static_cast<double>(i) * h;
    const double a = m.a(eta);
    for (std::size_t j = 1; j + 1 < n_x; ++j) {
      const Complex p = at(i, j);
      const Complex pee = (at(i + 1, j) - 2.0 * p + at(i - 1, j)) / (h * h);
      const Complex pe = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
      const Complex pxx = (at(i, j + 1) - 2.0 * p + at(i, j - 1)) / (h * h);
      out.push_back((pee + 2.0 * (m.da(eta) / a) * pe - pxx + 2.0 * (m.dda(eta) / a) * p) / (a * a));
    }
  }
  return out;
}

std::pair<Complex, Complex> initial_data(const ScaleFactorModel& m, const ModeSpec& spec) {
  if (spec.ic.kind == InitialCondition::Kind::Explicit) return {spec.ic.f, spec.ic.df};
  const double a = m.a(spec.eta0);
  const Complex u = std::exp(Complex{0.0, -spec.k * spec.eta0}) / std::sqrt(2.0 * spec.k);
  const Complex du = Complex{0.0, -spec.k} * u;
  const Complex f = u / a;
  return {f, (du - m.da(spec.eta0) * f) / a};
}

namespace {

using State = std::array<Complex, 2>;  // (f, f')

struct Rhs {
  const ScaleFactorModel& m;
  double k2;

  State operator()(double eta, const State& y) const {
    const double a = m.a(eta);
    return {y[1], -2.0 * (m.da(eta) / a) * y[1] - (k2 + 2.0 * m.dda(eta) / a) * y[0]};
  }
};

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (const auto& [c, s] : terms) {
    if (c == 0.0) continue;
    out[0] += h * c * (*s)[0];
    out[1] += h * c * (*s)[1];
  }
  return out;
}

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI controller constants
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kMinShrink = 0.2;
constexpr double kMaxGrow = 10.0;

/// Cubic Hermite through (y0, dy0) at t0 and (y1, dy1) at t1.
Complex hermite(double t0, double t1, Complex y0, Complex dy0, Complex y1, Complex dy1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * y0 + h10 * h * dy0 + h01 * y1 + h11 * h * dy1;
}

}  // namespace

ModeSolution integrate_mode(const ScaleFactorModel& m, const ModeSpec& spec) {
  if (!(spec.k > 0.0) || !std::isfinite(spec.k)) throw Error(ErrorKind::Domain, "k must be positive, got " + num(spec.k));
  if (!(spec.eta1 > spec.eta0)) throw Error(ErrorKind::Domain, "eta range must be increasing");
  if (!(spec.tol.rel > 0.0) || !(spec.tol.abs >= 0.0)) throw Error(ErrorKind::Domain, "tolerances must be positive");
  m.require_range(spec.eta0, spec.eta1);
  std::vector<double> outputs;
  for (double s : spec.samples) {
    if (!(s > spec.eta0 && s <= spec.eta1)) throw Error(ErrorKind::Domain, "sample eta = " + num(s) + " outside the range");
    outputs.push_back(s);
  }
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
  if (outputs.empty() || outputs.back() != spec.eta1) outputs.push_back(spec.eta1);

  const Rhs rhs{m, spec.k * spec.k};
  const auto [f0, df0] = initial_data(m, spec);
  State y{f0, df0};
  double t = spec.eta0;
  State k1 = rhs(t, y);

  ModeSolution sol;
  sol.eta.push_back(t);
  sol.f.push_back(y[0]);
  sol.df.push_back(y[1]);
  sol.node_eta.push_back(t);
  sol.node.push_back({y[0], y[1], k1[1]});

  // initial step from the local frequency scale
  const double a0 = m.a(t);
  const double rate = std::max({1.0, spec.k, std::abs(m.da(t) / a0), std::sqrt(std::abs(m.dda(t) / a0))});
  double h = 1e-2 / rate;
  double err_old = 1e-4;
  std::size_t next_out = 0;

  auto scale = [&](Complex a, Complex b) { return spec.tol.abs + spec.tol.rel * std::max(std::abs(a), std::abs(b)); };

  while (next_out < outputs.size()) {
    if (sol.steps + sol.rejected >= spec.max_steps) {
      throw Error(ErrorKind::IntegrationFailure, "step limit reached; last good eta = " + num(t));
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw Error(ErrorKind::IntegrationFailure, "step size underflow; last good eta = " + num(t));
    }
    // land exactly on the next output; remember the step the controller wanted
    const double target = outputs[next_out];
    const bool lands = t + h >= target;
    const double h_wanted = h;
    if (lands) h = target - t;
    const double t_new = lands ? target : t + h;
    State y_new, k7;
    double err = 0.0;
    try {
      const State k2 = rhs(t + c2 * h, axpy(y, h, {{a21, &k1}}));
      const State k3 = rhs(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
      const State k4 = rhs(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const State k5 = rhs(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const State k6 = rhs(t_new, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      y_new = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      k7 = rhs(t_new, y_new);
      const State e = axpy(State{}, h, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
      double sum = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double sc = scale(y[i], y_new[i]);
        sum += std::norm(e[i]) / (sc * sc);
      }
      err = std::sqrt(sum / 4.0);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Domain) throw;
      err = std::numeric_limits<double>::infinity();
    }
    if (!std::isfinite(err)) {
      h *= kMinShrink;
      ++sol.rejected;
      continue;
    }
    const double fac11 = std::pow(err, kExpo);
    if (err <= 1.0) {
      ++sol.steps;
      t = t_new;
      y = y_new;
      k1 = k7;
      sol.node_eta.push_back(t);
      sol.node.push_back({y[0], y[1], k1[1]});
      if (lands) {
        sol.eta.push_back(t);
        sol.f.push_back(y[0]);
        sol.df.push_back(y[1]);
        ++next_out;
      }
      double fac = fac11 / std::pow(err_old, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kMaxGrow, 1.0 / kMinShrink);
      err_old = std::max(err, 1e-4);
      h /= fac;
      if (lands) h = std::max(h, h_wanted);
    } else {
      ++sol.rejected;
      h /= std::min(1.0 / kMinShrink, fac11 / kSafety);
    }
  }
  return sol;
}

std::pair<Complex, Complex> ModeSolution::at(double eta) const {
  if (node_eta.empty() || !(eta >= node_eta.front() && eta <= node_eta.back())) {
    throw Error(ErrorKind::Domain, "eta = " + num(eta) + " is outside the integrated range");
  }
  const auto it = std::upper_bound(node_eta.begin(), node_eta.end(), eta);
  const std::size_t j = it == node_eta.end() ? node_eta.size() - 1 : static_cast<std::size_t>(it - node_eta.begin());
  if (j == 0) return {node[0][0], node[0][1]};
  const std::size_t i = j - 1;
  const double t0 = node_eta[i];
  const double t1 = node_eta[j];
  return {hermite(t0, t1, node[i][0], node[i][1], node[j][0], node[j][1], eta),
          hermite(t0, t1, node[i][1], node[i][2], node[j][1], node[j][2], eta)};
}

double wronskian_drift(const ModeSolution& s1, const ModeSolution& s2, const ScaleFactorModel& m) {
  if (s1.eta != s2.eta || s1.eta.empty()) throw Error(ErrorKind::Grid, "Wronskian needs solutions on the same samples");
  auto w = [&](std::size_t i) {
    const double eta = s1.eta[i];
    const double a = m.a(eta);
    const double da = m.da(eta);
    const Complex u1 = a * s1.f[i];
    const Complex u2 = a * s2.f[i];
    const Complex du1 = da * s1.f[i] + a * s1.df[i];
    const Complex du2 = da * s2.f[i] + a * s2.df[i];
    return u1 * du2 - u2 * du1;
  };
  const Complex w0 = w(0);
  const double denom = std::abs(w0) > 0.0 ? std::abs(w0) : 1.0;
  double worst = 0.0;
  for (std::size_t i = 1; i < s1.eta.size(); ++i) worst = std::max(worst, std::abs(w(i) - w0) / denom);
  return worst;
}

ModeSolution conjugate(const ModeSolution& s) {
  ModeSolution c = s;
  for (auto& v : c.f) v = std::conj(v);
  for (auto& v : c.df) v = std::conj(v);
  return c;
}

std::vector<double> KGrid::values() const {
  std::vector<double> ks;
  ks.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (count == 1) {
      ks.push_back(min);
      break;
    }
    const double s = static_cast<double>(i) / static_cast<double>(count - 1);
    if (i + 1 == count) {
      ks.push_back(max);
    } else if (log) {
      ks.push_back(min * std::pow(max / min, s));
    } else {
      ks.push_back(min + (max - min) * s);
    }
  }
  return ks;
}

std::vector<SpectrumRow> spectrum(const ScaleFactorModel& m, const std::vector<double>& ks, double eta0,
                                  double eta_end, const InitialCondition& ic, const Tolerances& tol, unsigned jobs) {
  std::vector<SpectrumRow> rows(ks.size());
  parallel_for(ks.size(), jobs, [&](std::size_t i) {
    SpectrumRow& r = rows[i];
    r.k = ks[i];
    r.eta_end = eta_end;
    try {
      ModeSpec spec;
      spec.k = ks[i];
      spec.eta0 = eta0;
      spec.eta1 = eta_end;
      spec.ic = ic;
      spec.tol = tol;
      const ModeSolution sol = integrate_mode(m, spec);
      const double a = m.a(eta_end);
      r.f = sol.f.back();
      r.abs_f2 = std::norm(r.f);
      r.energy_proxy = (std::norm(sol.df.back()) + ks[i] * ks[i] * r.abs_f2) / (2.0 * std::numbers::pi * a * a * a * a);
      r.wronskian_drift = wronskian_drift(sol, conjugate(sol), m);
      r.ok = true;
    } catch (const Error& e) {
      r.ok = false;
      r.message = e.what();
    }
  });
  return rows;
}

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumRow>& rows) {
  out << "k,eta_end,re_f,im_f,abs_f2,energy_proxy,wronskian_drift,status\n";
  for (const auto& r : rows) {
    if (r.ok) {
      out << num(r.k) << ',' << num(r.eta_end) << ',' << num(r.f.real()) << ',' << num(r.f.imag()) << ','
          << num(r.abs_f2) << ',' << num(r.energy_proxy) << ',' << num(r.wronskian_drift) << ",ok\n";
    } else {
      out << num(r.k) << ',' << num(r.eta_end) << ",nan,nan,nan,nan,nan,failed\n";
    }
  }
}

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema(where + " must be an object");
  const auto it = j.find(key);
  if (it == j.end()) schema(where + "." + key + " is required");
  return *it;
}

double number(const json& j, const char* key, const std::string& where) {
  const json& v = member(j, key, where);
  if (!v.is_number()) schema(where + "." + key + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema(where + "." + key + " must be finite");
  return d;
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
      schema(where + ": unknown key '" + it.key() + "'");
    }
  }
}

Complex complex_value(const json& j, const char* key, const std::string& where) {
  const json& v = member(j, key, where);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  schema(where + "." + key + " must be a number or [re, im]");
}

std::vector<double> number_array(const json& j, const char* key, const std::string& where) {
  const json& v = member(j, key, where);
  if (!v.is_array()) schema(where + "." + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) schema(where + "." + key + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

CosmoConfig parse_cosmo_config(const json& j) {
  if (!j.is_object()) schema("config must be a JSON object");
  only_keys(j, {"model", "k_grid", "eta", "ic", "tol"}, "config");
  CosmoConfig c;

  const json& model = member(j, "model", "config");
  only_keys(model, {"kind", "params"}, "model");
  const json& kind = member(model, "kind", "model");
  if (!kind.is_string()) schema("model.kind must be a string");
  const std::string k = kind.get<std::string>();
  const json params = model.contains("params") ? model["params"] : json::object();
  if (!params.is_object()) schema("model.params must be an object");
  if (k == "radiation" || k == "matter") {
    only_keys(params, {"a0"}, "model.params");
    const double a0 = params.contains("a0") ? number(params, "a0", "model.params") : 1.0;
    if (!(a0 > 0.0)) schema("model.params.a0 must be positive");
    c.model = k == "radiation" ? ScaleFactorModel::radiation(a0) : ScaleFactorModel::matter(a0);
  } else if (k == "deSitter") {
    only_keys(params, {"H"}, "model.params");
    const double hubble = params.contains("H") ? number(params, "H", "model.params") : 1.0;
    if (!(hubble > 0.0)) schema("model.params.H must be positive");
    c.model = ScaleFactorModel::de_sitter(hubble);
  } else if (k == "tabulated") {
    only_keys(params, {"eta", "a"}, "model.params");
    try {
      c.model = ScaleFactorModel::tabulated(number_array(params, "eta", "model.params"),
                                            number_array(params, "a", "model.params"));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Domain) schema(e.what());
      throw;
    }
  } else {
    schema("model.kind must be one of radiation, matter, deSitter, tabulated; got '" + k + "'");
  }

  const json& kg = member(j, "k_grid", "config");
  only_keys(kg, {"min", "max", "count", "spacing"}, "k_grid");
  c.k_grid.min = number(kg, "min", "k_grid");
  c.k_grid.max = number(kg, "max", "k_grid");
  const json& count = member(kg, "count", "k_grid");
  if (!count.is_number_integer() || count.get<long long>() < 0) schema("k_grid.count must be a non-negative integer");
  c.k_grid.count = count.get<std::size_t>();
  const std::string spacing = kg.contains("spacing") && kg["spacing"].is_string() ? kg["spacing"].get<std::string>()
                              : kg.contains("spacing")                            ? "?"
                                                                                  : "lin";
  if (spacing != "lin" && spacing != "log") schema("k_grid.spacing must be \"lin\" or \"log\"");
  c.k_grid.log = spacing == "log";
  if (!(c.k_grid.min > 0.0)) schema("k_grid.min must be positive");
  if (c.k_grid.max < c.k_grid.min) schema("k_grid.max must be >= k_grid.min");

  const json& eta = member(j, "eta", "config");
  only_keys(eta, {"start", "end"}, "eta");
  c.eta_start = number(eta, "start", "eta");
  c.eta_end = number(eta, "end", "eta");
  if (!(c.eta_end > c.eta_start)) schema("eta.end must be greater than eta.start");

  if (j.contains("ic")) {
    const json& ic = j["ic"];
    only_keys(ic, {"kind", "f", "df"}, "ic");
    const json& ik = member(ic, "kind", "ic");
    if (!ik.is_string()) schema("ic.kind must be a string");
    const std::string s = ik.get<std::string>();
    if (s == "positive-frequency") {
      c.ic.kind = InitialCondition::Kind::PositiveFrequency;
    } else if (s == "explicit") {
      c.ic.kind = InitialCondition::Kind::Explicit;
      c.ic.f = complex_value(ic, "f", "ic");
      c.ic.df = complex_value(ic, "df", "ic");
    } else {
      schema("ic.kind must be \"positive-frequency\" or \"explicit\"");
    }
  }
  if (j.contains("tol")) {
    const json& tol = j["tol"];
    only_keys(tol, {"rel", "abs"}, "tol");
    if (tol.contains("rel")) c.tol.rel = number(tol, "rel", "tol");
    if (tol.contains("abs")) c.tol.abs = number(tol, "abs", "tol");
    if (!(c.tol.rel > 0.0) || c.tol.abs < 0.0) schema("tol.rel must be positive and tol.abs non-negative");
  }

  c.model.require_range(c.eta_start, c.eta_end);
  return c;
}

}  // namespace spinwave::frw
