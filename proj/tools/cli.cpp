#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "spinwave/connecting.hpp"
#include "spinwave/em_field.hpp"
#include "spinwave/frw.hpp"
#include "spinwave/parallel.hpp"
#include "spinwave/random.hpp"
#include "spinwave/symbolic/identity_file.hpp"

namespace spinwave::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr unsigned long kDefaultSeed = 20240917;

struct Options {
  std::string config;
  std::string out;
  unsigned long seed = kDefaultSeed;
  std::vector<std::string> suites;
  unsigned jobs = 1;
  bool verbose = false;
  bool corrupt_epsilon = false;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Parse:
    case ErrorKind::Domain:
    case ErrorKind::InvalidRule:
      return Usage;
    default:
      return Failed;
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Config, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
}

/// Report to --out/report.json, or to stdout without --out.
void emit_report(const Options& opt, const json& report, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (opt.out.empty()) {
    out << text;
  } else {
    write_text(fs::path(opt.out) / "report.json", text);
  }
}

std::string file_stem_for(std::size_t index, const std::string& name) {
  std::string s = name;
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%03zu_", index + 1);
  return prefix + s;
}

// --- verify ---------------------------------------------------------------

int run_verify(const Options& opt, std::ostream& out, std::ostream& err) {
  const std::string path = opt.config.empty() ? std::string(SPINWAVE_DATA_DIR) + "/identities.txt" : opt.config;
  const symbolic::IdentityFile file = symbolic::load_identity_file(path);

  struct Outcome {
    std::string status;
    std::string residual;
    std::string message;
    std::string trace;
    bool passed = false;
  };
  std::vector<Outcome> outcomes(file.claims.size());
  parallel_for(file.claims.size(), opt.jobs, [&](std::size_t i) {
    const auto& claim = file.claims[i];
    Outcome& o = outcomes[i];
    try {
      const auto r = symbolic::run_claim(claim);
      o.passed = r.passed;
      o.residual = r.report.residual;
      o.trace = r.report.trace_text();
      if (claim.refute) {
        o.status = r.passed ? "refuted" : "failed";
      } else {
        o.status = r.passed ? "verified" : "failed";
      }
    } catch (const Error& e) {
      o.status = "error";
      o.message = e.what();
      o.trace = std::string(e.what()) + "\n";
    }
  });

  json claims = json::array();
  std::size_t failed = 0;
  for (std::size_t i = 0; i < file.claims.size(); ++i) {
    const auto& claim = file.claims[i];
    const Outcome& o = outcomes[i];
    json c{{"name", claim.name},
           {"line", claim.line},
           {"claim", claim.text},
           {"convention", claim.convention},
           {"expect", claim.refute ? "refute" : "verify"},
           {"status", o.status}};
    if (!o.residual.empty()) c["residual"] = o.residual;
    if (!o.message.empty()) c["message"] = o.message;
    if (!opt.out.empty()) {
      const std::string rel = "traces/" + file_stem_for(i, claim.name) + ".txt";
      std::string header = "claim " + claim.name + " (line " + std::to_string(claim.line) + ", " +
                           claim.convention + (claim.refute ? ", refute" : "") + ")\n" + claim.text + "\n";
      write_text(fs::path(opt.out) / rel, header + o.trace);
      c["trace_file"] = rel;
    }
    claims.push_back(std::move(c));
    if (!o.passed) {
      ++failed;
      err << "FAIL " << claim.name << " (line " << claim.line << "): " << claim.text << "\n";
      if (!o.message.empty()) err << "  " << o.message << "\n";
      if (!o.residual.empty()) err << "  residual: " << o.residual << "\n";
    }
    if (opt.verbose) err << "--- " << claim.name << "\n" << o.trace;
  }
  json report{{"command", "verify"},
              {"file", path},
              {"claims", claims},
              {"total", file.claims.size()},
              {"failed", failed},
              {"passed", failed == 0}};
  emit_report(opt, report, out);
  if (!opt.out.empty()) {
    out << "verify: " << (file.claims.size() - failed) << "/" << file.claims.size() << " claims hold\n";
  }
  return failed == 0 ? Ok : Failed;
}

// --- check ----------------------------------------------------------------

struct SuiteResult {
  double max_error = 0.0;
  std::size_t samples = 0;
  std::string note;
};

struct Suite {
  std::string name;
  double tolerance;
  std::function<SuiteResult(Rng&, const MetricSpinorConvention&)> run;
};

const IndexSignature kU1{{IndexKind::Unprimed, Variance::Down}};
const IndexSignature kU2{{IndexKind::Unprimed, Variance::Down}, {IndexKind::Unprimed, Variance::Down}};
const IndexSignature kU3{{IndexKind::Unprimed, Variance::Down},
                         {IndexKind::Unprimed, Variance::Down},
                         {IndexKind::Unprimed, Variance::Down}};

SuiteResult suite_epsilon(Rng& rng, const MetricSpinorConvention& conv) {
  SuiteResult r;
  const auto up = epsilon(IndexKind::Unprimed, Variance::Up, Variance::Up, conv);
  const auto down = epsilon(IndexKind::Unprimed, Variance::Down, Variance::Down, conv);
  const Complex full = contract(contract(outer(up, down), 0, 2), 0, 1).data()[0];
  r.max_error = std::abs(full - 2.0);
  for (int draw = 0; draw < 200; ++draw) {
    for (IndexKind kind : {IndexKind::Unprimed, IndexKind::Primed}) {
      const auto xi = random_spinor(IndexSignature{{kind, Variance::Down}}, rng);
      const auto back = raise_lower(raise_lower(xi, 0, Variance::Up, conv), 0, Variance::Down, conv);
      r.max_error = std::max(r.max_error, max_abs_diff(back, xi));
    }
    // theta_AB = theta_(AB) + 1/2 eps_AB theta^C_C
    const auto theta = random_spinor(kU2, rng);
    const Complex tr = contract(raise_lower(theta, 0, Variance::Up, conv), 0, 1).data()[0];
    const auto rebuilt = symmetrize(theta, {0, 1}, SymmetryMode::Symmetric) + (0.5 * tr) * down;
    r.max_error = std::max(r.max_error, max_abs_diff(rebuilt, theta));
    r.max_error = std::max(r.max_error, max_abs(symmetrize(random_spinor(kU3, rng), {0, 1, 2},
                                                           SymmetryMode::Antisymmetric)));
    r.samples += 4;
  }
  return r;
}

SuiteResult suite_displacement(Rng& rng, const MetricSpinorConvention& conv) {
  SuiteResult r;
  const Slot wD{IndexKind::World, Variance::Down};
  const Slot uD{IndexKind::Unprimed, Variance::Down};
  const Slot uU{IndexKind::Unprimed, Variance::Up};
  for (int draw = 0; draw < 1000; ++draw) {
    const SpinAffinity theta(random_spinor(IndexSignature{wD, uD, uU}, rng));
    const auto phi = raise_lower(random_symmetric_pair(rng), 1, Variance::Up, conv);
    const auto dphi = random_spinor(IndexSignature{wD, uD, uU}, rng);
    const auto [full, sym] = covariant_derivative_forms(phi, theta, dphi, conv);
    r.max_error = std::max(r.max_error, max_abs_diff(full, sym));
    ++r.samples;
  }
  return r;
}

SuiteResult suite_round_trip(Rng& rng, const MetricSpinorConvention&) {
  SuiteResult r;
  for (int draw = 0; draw < 100; ++draw) {
    const auto f = random_bivector(rng);
    const auto w = em::spinors_from_bivector(f);
    r.max_error = std::max(r.max_error, max_abs_diff(em::bivector_from_spinors(w.phi, w.phibar), f));
    ++r.samples;
  }
  return r;
}

SuiteResult suite_trace_free(Rng& rng, const MetricSpinorConvention&) {
  SuiteResult r;
  double min_energy = INFINITY;
  for (int draw = 0; draw < 100; ++draw) {
    const auto phi = random_symmetric_pair(rng);
    const auto t = em::stress_energy(phi, conjugate(phi));
    r.max_error = std::max(r.max_error, std::abs(em::flat_trace(t)));
    const double energy = t.at({0, 0}).real();
    min_energy = std::min(min_energy, energy);
    if (energy < 0.0) r.max_error = std::max(r.max_error, -energy);
    ++r.samples;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "min T00 %.6g", min_energy);
  r.note = buf;
  return r;
}

SuiteResult suite_duality(Rng& rng, const MetricSpinorConvention&) {
  SuiteResult r;
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int draw = 0; draw < 100; ++draw) {
    const auto f = random_bivector(rng);
    const double t = angle(rng);
    const auto rotated = em::spinors_from_bivector(em::duality_rotation(f, t)).phi;
    const auto expected = std::exp(Complex{0.0, -t}) * em::spinors_from_bivector(f).phi;
    r.max_error = std::max(r.max_error, max_abs_diff(rotated, expected));
    ++r.samples;
  }
  return r;
}

SuiteResult suite_massless(Rng& rng, const MetricSpinorConvention&) {
  SuiteResult r;
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  for (int draw = 0; draw < 50; ++draw) {
    const auto alpha = random_spinor(kU1, rng);
    const auto k = em::null_wave_vector(alpha);
    const auto wave = em::plane_wave(alpha, k, random_complex(rng));
    std::vector<em::Point> pts(8);
    for (auto& p : pts) p = {coord(rng), coord(rng), coord(rng), coord(rng)};
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, std::abs(k.at({0})) * max_abs(wave.value(p)));
    r.max_error = std::max(r.max_error, em::massless_residual(wave, pts) / std::max(scale, 1e-300));
    r.samples += pts.size();
  }
  r.note = "relative to k0 |phi|";
  return r;
}

const std::vector<Suite>& suites() {
  static const std::vector<Suite> all{
      {"epsilon", 1e-14, suite_epsilon},
      {"displacement", 1e-12, suite_displacement},
      {"round-trip", 1e-12, suite_round_trip},
      {"trace-free", 1e-12, suite_trace_free},
      {"duality", 1e-12, suite_duality},
      {"massless", 1e-12, suite_massless},
  };
  return all;
}

MetricSpinorConvention corrupted_epsilon() {
  MetricSpinorConvention c = MetricSpinorConvention::standard();
  c.eps_up = {{{0.0, -1.0}, {1.0, 0.0}}};
  return c;
}

int run_check(const Options& opt, std::ostream& out, std::ostream& err) {
  std::vector<std::size_t> selected;
  const auto& all = suites();
  if (opt.suites.empty()) {
    for (std::size_t i = 0; i < all.size(); ++i) selected.push_back(i);
  } else {
    for (const auto& name : opt.suites) {
      const auto it = std::find_if(all.begin(), all.end(), [&](const Suite& s) { return s.name == name; });
      if (it == all.end()) throw Error(ErrorKind::Config, "unknown suite '" + name + "'");
      const std::size_t idx = static_cast<std::size_t>(it - all.begin());
      if (std::find(selected.begin(), selected.end(), idx) == selected.end()) selected.push_back(idx);
    }
    std::sort(selected.begin(), selected.end());
  }
  const MetricSpinorConvention conv = opt.corrupt_epsilon ? corrupted_epsilon() : MetricSpinorConvention::standard();

  std::vector<SuiteResult> results(selected.size());
  parallel_for(selected.size(), opt.jobs, [&](std::size_t i) {
    // each suite draws from its own stream so selection and --jobs do not
    // change the inputs
    std::seed_seq seq{static_cast<unsigned>(opt.seed & 0xffffffffu), static_cast<unsigned>(opt.seed >> 32),
                      static_cast<unsigned>(selected[i])};
    Rng rng(seq);
    results[i] = all[selected[i]].run(rng, conv);
  });

  json list = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const Suite& s = all[selected[i]];
    const SuiteResult& r = results[i];
    const bool pass = r.max_error < s.tolerance;
    ok = ok && pass;
    json entry{{"suite", s.name},
               {"samples", r.samples},
               {"max_error", r.max_error},
               {"tolerance", s.tolerance},
               {"passed", pass}};
    if (!r.note.empty()) entry["note"] = r.note;
    list.push_back(std::move(entry));
    if (!pass) err << "FAIL " << s.name << ": max error " << r.max_error << " >= " << s.tolerance << "\n";
    if (opt.verbose) err << s.name << ": " << r.samples << " samples, max error " << r.max_error << "\n";
  }
  if (!ok) err << "failing seed: " << opt.seed << "\n";
  json report{{"command", "check"}, {"seed", opt.seed}, {"suites", list}, {"passed", ok}};
  emit_report(opt, report, out);
  return ok ? Ok : Failed;
}

// --- em -------------------------------------------------------------------

Complex complex_from(const json& v, const char* what) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw Error(ErrorKind::Config, std::string(what) + " must be a number or [re, im]");
}

template <std::size_t N>
std::array<double, N> reals_from(const json& v, const char* what) {
  std::array<double, N> out{};
  if (!v.is_array() || v.size() != N) throw Error(ErrorKind::Config, std::string(what) + " needs " + std::to_string(N) + " numbers");
  for (std::size_t i = 0; i < N; ++i) {
    if (!v[i].is_number()) throw Error(ErrorKind::Config, std::string(what) + " needs numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

struct EmConfig {
  ComponentSpinor alpha{kU1};
  std::optional<std::array<double, 4>> k;
  Complex amplitude{1.0, 0.0};
  em::Grid grid;
};

EmConfig parse_em_config(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "em config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "alpha" && key != "k" && key != "amplitude" && key != "grid") {
      throw Error(ErrorKind::Config, "unknown key '" + key + "'");
    }
  }
  EmConfig c;
  if (!j.contains("alpha") || !j["alpha"].is_array() || j["alpha"].size() != 2) {
    throw Error(ErrorKind::Config, "alpha must hold two components");
  }
  c.alpha.at({0}) = complex_from(j["alpha"][0], "alpha[0]");
  c.alpha.at({1}) = complex_from(j["alpha"][1], "alpha[1]");
  if (max_abs(c.alpha) == 0.0) throw Error(ErrorKind::Config, "alpha must be nonzero");
  if (j.contains("k")) c.k = reals_from<4>(j["k"], "k");
  if (j.contains("amplitude")) c.amplitude = complex_from(j["amplitude"], "amplitude");
  if (!j.contains("grid") || !j["grid"].is_object()) throw Error(ErrorKind::Config, "grid is required");
  const json& g = j["grid"];
  c.grid.origin = reals_from<4>(g.value("origin", json::array({0, 0, 0, 0})), "grid.origin");
  if (!g.contains("h") || !g["h"].is_number() || !(g["h"].get<double>() > 0.0)) {
    throw Error(ErrorKind::Config, "grid.h must be a positive number");
  }
  c.grid.h = g["h"].get<double>();
  const auto n = reals_from<4>(g.value("n", json()), "grid.n");
  for (std::size_t i = 0; i < 4; ++i) {
    if (n[i] < 3 || n[i] != std::floor(n[i]) || n[i] > 1000) {
      throw Error(ErrorKind::Config, "grid.n entries must be integers in [3, 1000]");
    }
    c.grid.n[i] = static_cast<std::size_t>(n[i]);
  }
  return c;
}

int run_em(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.config.empty()) throw Error(ErrorKind::Config, "em needs --config");
  const EmConfig cfg = parse_em_config(read_json(opt.config));

  ComponentSpinor k = em::null_wave_vector(cfg.alpha);
  if (cfg.k) {
    for (int a = 0; a < 4; ++a) k.at({a}) = (*cfg.k)[a];
  }
  double k_norm = std::abs(k.at({0}).real());
  for (int a = 1; a < 4; ++a) k_norm = std::max(k_norm, std::abs(k.at({a}).real()));
  const double k_square = std::pow(k.at({0}).real(), 2) - std::pow(k.at({1}).real(), 2) -
                          std::pow(k.at({2}).real(), 2) - std::pow(k.at({3}).real(), 2);
  const em::AnalyticField wave = em::plane_wave(cfg.alpha, k, cfg.amplitude);
  const double scale = k_norm * std::abs(cfg.amplitude) *
                       (std::norm(cfg.alpha.at({0})) + std::norm(cfg.alpha.at({1})));

  std::vector<em::Point> points(cfg.grid.size());
  for (std::size_t i = 0; i < points.size(); ++i) points[i] = cfg.grid.point(i);
  const double analytic = em::massless_residual(wave, points) / scale;

  const em::SampledField phi = em::sample(wave.value, cfg.grid, opt.jobs);
  em::Grid fine = cfg.grid;
  fine.h = cfg.grid.h / 2.0;
  for (auto& n : fine.n) n = 2 * n - 1;
  const double coarse_res = em::massless_residual(phi, opt.jobs) / scale;
  const double fine_res = em::massless_residual(em::sample(wave.value, fine, opt.jobs), opt.jobs) / scale;
  const double order = (coarse_res > 0.0 && fine_res > 0.0) ? std::log2(coarse_res / fine_res) : 0.0;

  const bool null_wave = std::abs(k_square) <= 1e-12 * k_norm * k_norm;
  const bool solves = analytic < 1e-12;
  const bool order_ok = !solves || std::abs(order - 2.0) <= 0.3;
  const bool passed = solves && order_ok;

  json report{{"command", "em"},
              {"config", opt.config},
              {"k", {k.at({0}).real(), k.at({1}).real(), k.at({2}).real(), k.at({3}).real()}},
              {"k_squared", k_square},
              {"null", null_wave},
              {"samples", cfg.grid.size()},
              {"analytic_residual", analytic},
              {"grid_residual", {{"h", cfg.grid.h}, {"value", coarse_res}}},
              {"grid_residual_half_h", {{"h", fine.h}, {"value", fine_res}}},
              {"order", order},
              {"residual_scale", "k |amplitude| |alpha|^2"},
              {"passed", passed}};
  if (!opt.out.empty()) {
    em::SampledField bivector{phi.grid, {}};
    bivector.values.reserve(phi.values.size());
    for (const auto& p : phi.values) bivector.values.push_back(em::bivector_from_spinors(p, conjugate(p)));
    std::ostringstream phi_csv;
    std::ostringstream f_csv;
    em::write_field_csv(phi_csv, phi);
    em::write_bivector_csv(f_csv, bivector);
    write_text(fs::path(opt.out) / "phi.csv", phi_csv.str());
    write_text(fs::path(opt.out) / "bivector.csv", f_csv.str());
    report["files"] = {"phi.csv", "bivector.csv"};
  }
  emit_report(opt, report, out);
  if (!solves) err << "FAIL: plane wave does not solve the massless equation (relative residual " << analytic << ")\n";
  if (solves && !order_ok) err << "FAIL: grid residual order " << order << " outside 2 +- 0.3\n";
  if (opt.verbose) err << "grid residual " << coarse_res << " -> " << fine_res << ", order " << order << "\n";
  return passed ? Ok : Failed;
}

// --- cosmo ----------------------------------------------------------------

int run_cosmo(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.config.empty()) throw Error(ErrorKind::Config, "cosmo needs --config");
  const frw::CosmoConfig cfg = frw::parse_cosmo_config(read_json(opt.config));
  const auto ks = cfg.k_grid.values();
  const auto rows = frw::spectrum(cfg.model, ks, cfg.eta_start, cfg.eta_end, cfg.ic, cfg.tol, opt.jobs);

  std::ostringstream csv;
  frw::write_spectrum_csv(csv, rows);
  std::size_t failed = 0;
  double max_drift = 0.0;
  json failures = json::array();
  for (const auto& r : rows) {
    if (!r.ok) {
      ++failed;
      failures.push_back({{"k", r.k}, {"message", r.message}});
      err << "FAIL k=" << r.k << ": " << r.message << "\n";
    } else {
      max_drift = std::max(max_drift, r.wronskian_drift);
    }
    if (opt.verbose) err << "k=" << r.k << (r.ok ? " ok" : " failed") << "\n";
  }
  if (opt.out.empty()) {
    out << csv.str();
  } else {
    write_text(fs::path(opt.out) / "spectrum.csv", csv.str());
    json report{{"command", "cosmo"},
                {"config", opt.config},
                {"model", cfg.model.name()},
                {"modes", rows.size()},
                {"failed", failed},
                {"max_wronskian_drift", max_drift},
                {"failures", failures},
                {"spectrum", "spectrum.csv"},
                {"passed", failed == 0}};
    emit_report(opt, report, out);
  }
  return failed == 0 ? Ok : Failed;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : suites()) v.push_back(s.name);
    return v;
  }();
  return names;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-spinor identity verification and FRW mode solver", "spinwave"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", opt.config, "Input file (identity corpus or JSON config)");
    if (config_required) c->required();
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_flag("--verbose", opt.verbose, "Extra diagnostics on stderr");
  };
  auto* verify = app.add_subcommand("verify", "Verify the identity corpus");
  add_common(verify, false);
  auto* check = app.add_subcommand("check", "Run numerical property suites");
  add_common(check, false);
  check->add_option("--seed", opt.seed, "Seed for randomized inputs");
  check->add_option("--suite", opt.suites, "Run only the named suite (repeatable)");
  check->add_flag("--test-corrupt-epsilon", opt.corrupt_epsilon)->group("");
  auto* emc = app.add_subcommand("em", "Plane-wave Maxwell field checks and CSV export");
  add_common(emc, true);
  auto* cosmo = app.add_subcommand("cosmo", "FRW mode spectrum");
  add_common(cosmo, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return Usage;
  }

  try {
    if (verify->parsed()) return run_verify(opt, out, err);
    if (check->parsed()) return run_check(opt, out, err);
    if (emc->parsed()) return run_em(opt, out, err);
    return run_cosmo(opt, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return Failed;
  }
}

}  // namespace spinwave::cli
