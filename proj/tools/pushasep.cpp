// Command-line front end: one subcommand per library entry point. Output is
// CSV (config echoed as leading "# key=value" lines) or JSON lines (first
// record holds the config).
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <tbb/global_control.h>

#include "pushasep/bethe.hpp"
#include "pushasep/contour.hpp"
#include "pushasep/current_laws.hpp"
#include "pushasep/errors.hpp"
#include "pushasep/limits.hpp"
#include "pushasep/oracle.hpp"
#include "pushasep/simulator.hpp"
#include "pushasep/validation.hpp"

#ifndef PUSHASEP_VERSION
#define PUSHASEP_VERSION "0.0.0"
#endif

namespace {

using namespace pushasep;
using json = nlohmann::json;
using Cell = std::variant<long long, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

std::string config_string(const Configuration& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + std::to_string(x[i]);
  return s;
}

std::string cell_text(const Cell& c) {
  if (auto v = std::get_if<long long>(&c)) return std::to_string(*v);
  if (auto v = std::get_if<double>(&c)) return fmt::format("{:.17g}", *v);
  return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
  if (auto v = std::get_if<long long>(&c)) return *v;
  if (auto v = std::get_if<double>(&c)) return *v;
  return std::get<std::string>(c);
}

// Options shared by every subcommand.
struct Common {
  int L = 5;
  int N = 2;
  double p = 1.0;
  std::string format = "csv";
  std::string output;
  int threads = 0;

  RingParams params() const {
    RingParams P{L, N, p};
    P.validate();
    return P;
  }
};

void add_common(CLI::App* sub, Common& c, bool model = true) {
  if (model) {
    sub->add_option("--L", c.L, "ring length")->capture_default_str();
    sub->add_option("--N", c.N, "number of particles")->capture_default_str();
    sub->add_option("--p", c.p, "right jump rate; q = 1 - p")->capture_default_str();
  }
  sub->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->add_option("-o,--output", c.output, "output file (default stdout)");
  sub->add_option("--threads", c.threads, "worker cap, 0 = all cores")->capture_default_str();
}

json run_config(const CLI::App* sub) {
  json cfg;
  cfg["command"] = sub->get_name();
  // The root only carries --config and --version.
  for (const CLI::App* s = sub; s && s->get_parent(); s = s->get_parent()) {
    for (const CLI::Option* opt : s->get_options()) {
      if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
      const auto res = opt->results();
      std::string v;
      if (res.empty()) {
        v = opt->get_default_str();
      } else {
        for (std::size_t i = 0; i < res.size(); ++i) v += (i ? "," : "") + res[i];
      }
      cfg[opt->get_lnames()[0]] = v;
    }
  }
  return cfg;
}

void emit(const Table& t, const json& cfg, const Common& c) {
  std::ofstream file;
  if (!c.output.empty()) {
    file.open(c.output);
    if (!file) throw ConfigError("cannot open output file: " + c.output);
  }
  std::ostream& out = c.output.empty() ? std::cout : file;
  if (c.format == "csv") {
    out << "# version=" << PUSHASEP_VERSION << '\n';
    for (const auto& [k, v] : cfg.items()) out << "# " << k << '=' << v.get<std::string>() << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
      out << '\n';
    }
  } else {
    out << json{{"version", PUSHASEP_VERSION}, {"config", cfg}}.dump() << '\n';
    for (const auto& row : t.rows) {
      json rec;
      for (std::size_t i = 0; i < row.size(); ++i) rec[t.columns[i]] = cell_json(row[i]);
      out << rec.dump() << '\n';
    }
  }
}

cplx make_zeta(double modulus, double angle) {
  if (std::abs(std::abs(modulus) - 1.0) > 1e-12) throw ConfigError("|zeta| must be 1");
  return std::polar(modulus, angle);
}

Configuration resolve(const std::vector<int>& y, const RingParams& P, const char* name) {
  Configuration x(y.begin(), y.end());
  if (x.empty()) {
    for (int i = 0; i < P.N; ++i) x.push_back(i);
  }
  if (static_cast<int>(x.size()) != P.N || !is_valid(x, P.L))
    throw ConfigError(std::string("invalid configuration for --") + name);
  return x;
}

std::vector<long long> q_range(long long lo, long long hi) {
  if (lo > hi) throw ConfigError("--qmin must not exceed --qmax");
  std::vector<long long> qs;
  for (long long q = lo; q <= hi; ++q) qs.push_back(q);
  return qs;
}

std::vector<double> x_grid(double lo, double hi, double dx) {
  if (!(dx > 0) || lo > hi) throw ConfigError("invalid x grid");
  std::vector<double> xs;
  const auto n = static_cast<long long>(std::floor((hi - lo) / dx + 1e-9));
  for (long long k = 0; k <= n; ++k) xs.push_back(lo + dx * k);
  return xs;
}

Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw ConfigError("not a rational number: " + s);
  }
}

// Expands "--config FILE": every "key=value" line becomes "--key value"
// unless --key already appears on the command line. Keys the selected
// subcommand does not define are skipped, so one file can serve several.
std::vector<std::string> expand_config(int argc, char** argv, CLI::App& app,
                                       std::string& config_path) {
  std::vector<std::string> args(argv, argv + argc);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (config_path.empty()) return out;
  CLI::App* target = &app;
  for (std::size_t i = 1; i < out.size(); ++i)
    if (auto* sub = target->get_subcommand_no_throw(out[i])) target = sub;
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot read config file: " + config_path);
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line without '=': " + line);
    auto trim = [](std::string v) {
      const auto a = v.find_first_not_of(" \t"), b = v.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
    };
    const std::string key = "--" + trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const bool given = std::any_of(out.begin(), out.end(), [&](const std::string& a) {
      return a == key || a.rfind(key + "=", 0) == 0;
    });
    if (!given && target->get_option_no_throw(key) != nullptr) {
      out.push_back(key);
      out.push_back(value);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PushASEP on a ring: exact laws, Fredholm forms, limits and simulation"};
  app.set_version_flag("--version", PUSHASEP_VERSION);
  app.require_subcommand(1);

  Common c;
  std::vector<int> y_in, x_in;
  double t = 1.0, zeta_mod = 1.0, zeta_angle = 0.0;
  long long qmin = -2, qmax = 3;
  double radius = 0.0;
  int nodes = 64;
  std::string method = "oracle";
  std::function<Table()> action;

  auto* oracle_cmd = app.add_subcommand("oracle", "local current law from the master equation");
  add_common(oracle_cmd, c);
  oracle_cmd->add_option("--y", y_in, "initial configuration")->delimiter(',');
  oracle_cmd->add_option("--t", t, "time")->capture_default_str();
  oracle_cmd->callback([&] {
    action = [&] {
      const auto P = c.params();
      const auto y = resolve(y_in, P, "y");
      const auto law = local_current_law(y, t, P);
      Table tab{{"Q", "pmf", "cdf_tail"}};
      for (std::size_t i = 0; i < law.pmf.size(); ++i) {
        const long long q = law.first + static_cast<long long>(i);
        tab.add({q, law.pmf[i], law.cdf_tail(q)});
      }
      return tab;
    };
  });

  auto* transition_cmd = app.add_subcommand("transition", "transition probabilities from Y");
  add_common(transition_cmd, c);
  transition_cmd->add_option("--y", y_in, "initial configuration")->delimiter(',');
  transition_cmd->add_option("--t", t, "time")->capture_default_str();
  transition_cmd->add_option("--zeta", zeta_mod, "zeta = value * exp(i angle), |zeta| = 1")
      ->capture_default_str();
  transition_cmd->add_option("--zeta-angle", zeta_angle, "argument of zeta")->capture_default_str();
  transition_cmd->add_option("--method", method, "oracle, full, onefold, spectral or images")
      ->check(CLI::IsMember({"oracle", "full", "onefold", "spectral", "images"}))
      ->capture_default_str();
  transition_cmd->callback([&] {
    action = [&] {
      const auto P = c.params();
      const auto y = resolve(y_in, P, "y");
      const cplx zeta = make_zeta(zeta_mod, zeta_angle);
      const auto states = enumerate_states(P);
      CVector g(states.size());
      if (method == "oracle") {
        g = evolve_master(y, t, zeta, P);
      } else if (method == "full" || method == "onefold") {
        const auto spec = make_spec(P);
        for (std::size_t a = 0; a < states.size(); ++a)
          g[a] = method == "full" ? gf_full(y, states[a], zeta, t, spec, {}, P)
                                  : gf_onefold(y, states[a], zeta, t, spec, {}, P);
      } else if (method == "spectral") {
        const auto data = prepare_spectral(zeta, P);
        for (std::size_t a = 0; a < states.size(); ++a) g[a] = gf_spectral(data, y, states[a], t);
      } else {
        for (std::size_t a = 0; a < states.size(); ++a)
          g[a] = images_sum(y, states[a], zeta, t, 3, {}, P).value;
      }
      Table tab{{"x", "re", "im"}};
      for (std::size_t a = 0; a < states.size(); ++a)
        tab.add({config_string(states[a]), g[a].real(), g[a].imag()});
      return tab;
    };
  });

  auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues of the deformed generator");
  add_common(spectrum_cmd, c);
  spectrum_cmd->add_option("--zeta", zeta_mod, "zeta = value * exp(i angle), |zeta| = 1")
      ->capture_default_str();
  spectrum_cmd->add_option("--zeta-angle", zeta_angle, "argument of zeta")->capture_default_str();
  spectrum_cmd->add_option("--method", method, "oracle or bethe")
      ->check(CLI::IsMember({"oracle", "bethe"}))
      ->capture_default_str();
  spectrum_cmd->callback([&] {
    action = [&] {
      const auto P = c.params();
      const cplx zeta = make_zeta(zeta_mod, zeta_angle);
      Table tab{{"re", "im"}};
      if (method == "oracle") {
        for (const cplx e : spectrum(zeta, P)) tab.add({e.real(), e.imag()});
      } else {
        const auto data = prepare_spectral(zeta, P);
        if (data.stationary) tab.add({0.0, 0.0});
        for (const auto& tup : data.tuples) tab.add({tup.energy.real(), tup.energy.imag()});
      }
      return tab;
    };
  });

  bool alt = false;
  auto* cdf_cmd = app.add_subcommand("current-cdf", "P(Q_{L-1}(t) >= Q) from the contour formula");
  add_common(cdf_cmd, c);
  cdf_cmd->add_option("--y", y_in, "initial configuration")->delimiter(',');
  cdf_cmd->add_option("--t", t, "time")->capture_default_str();
  cdf_cmd->add_option("--qmin", qmin, "smallest level")->capture_default_str();
  cdf_cmd->add_option("--qmax", qmax, "largest level")->capture_default_str();
  cdf_cmd->add_option("--radius", radius, "z radius (0 = default 0.9)")->capture_default_str();
  cdf_cmd->add_option("--nodes", nodes, "quadrature nodes")->capture_default_str();
  cdf_cmd->add_flag("--alt", alt, "also evaluate the alternative form at multiples of N");
  cdf_cmd->callback([&] {
    action = [&] {
      const auto P = c.params();
      const auto y = resolve(y_in, P, "y");
      const double r = radius > 0 ? radius : kCurrentRadius;
      Table tab{{"Q", "cdf"}};
      if (alt) tab.columns.push_back("cdf_alt");
      for (long long q : q_range(qmin, qmax)) {
        std::vector<Cell> row{q, current_cdf(y, q, t, P, r, nodes)};
        if (alt) {
          if (q % P.N == 0)
            row.emplace_back(current_cdf_alt(y, q, t, P, r, nodes));
          else
            row.emplace_back(std::string());
        }
        tab.add(std::move(row));
      }
      return tab;
    };
  });

  int d = 3, delta = 0, which = 1, shift = 0;
  auto fredholm_row = [&](const RingParams& P, const std::function<double(long long, double)>& f) {
    const double r = radius > 0 ? radius : 0.6 * critical_radius(P);
    Table tab{{"Q", "cdf"}};
    for (long long q : q_range(qmin, qmax)) tab.add({q, f(q, r)});
    return tab;
  };
  QuadratureBudget budget;

  auto* flat_cmd = app.add_subcommand("fredholm-flat", "flat initial data, Fredholm form");
  add_common(flat_cmd, c);
  flat_cmd->add_option("--d", d, "spacing; L = d N")->capture_default_str();
  flat_cmd->add_option("--delta", delta, "offset in [0, d)")->capture_default_str();
  flat_cmd->add_option("--t", t, "time")->capture_default_str();
  flat_cmd->add_option("--qmin", qmin, "smallest level")->capture_default_str();
  flat_cmd->add_option("--qmax", qmax, "largest level")->capture_default_str();
  flat_cmd->add_option("--radius", radius, "z radius in (0, r0); 0 = 0.6 r0")->capture_default_str();
  flat_cmd->add_option("--nodes", budget.nodes_z, "quadrature nodes")->capture_default_str();
  flat_cmd->callback([&] {
    action = [&] {
      const auto P = c.params();
      return fredholm_row(P, [&](long long q, double r) { return flat_cdf(d, delta, q, t, r, budget, P); });
    };
  });

  auto* step_cmd = app.add_subcommand("fredholm-step", "step initial data, Fredholm form");
  add_common(step_cmd, c);
  step_cmd->add_option("--case", which, "1: (0..N-1)+m, 2: (0..k-1, L-N+k..L-1)")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  step_cmd->add_option("--shift", shift, "m for case 1, k for case 2")->capture_default_str();
  step_cmd->add_option("--t", t, "time")->capture_default_str();
  step_cmd->add_option("--qmin", qmin, "smallest level")->capture_default_str();
  step_cmd->add_option("--qmax", qmax, "largest level")->capture_default_str();
  step_cmd->add_option("--radius", radius, "z radius in (0, r0); 0 = 0.6 r0")->capture_default_str();
  step_cmd->add_option("--nodes", budget.nodes_z, "quadrature nodes")->capture_default_str();
  step_cmd->callback([&] {
    action = [&] {
      const auto P = c.params();
      return fredholm_row(P, [&](long long q, double r) { return step_cdf(which, shift, q, t, r, budget, P); });
    };
  });

  int m_trunc = 3;
  auto* images_cmd = app.add_subcommand("images", "ring law from the winding model by images");
  add_common(images_cmd, c);
  images_cmd->add_option("--y", y_in, "initial configuration")->delimiter(',');
  images_cmd->add_option("--x", x_in, "final configuration (all states when omitted)")->delimiter(',');
  images_cmd->add_option("--t", t, "time")->capture_default_str();
  images_cmd->add_option("--zeta", zeta_mod, "zeta = value * exp(i angle), |zeta| = 1")
      ->capture_default_str();
  images_cmd->add_option("--zeta-angle", zeta_angle, "argument of zeta")->capture_default_str();
  images_cmd->add_option("--mtrunc", m_trunc, "images m in [-M, M]")->capture_default_str();
  images_cmd->callback([&] {
    action = [&] {
      const auto P = c.params();
      const auto y = resolve(y_in, P, "y");
      const cplx zeta = make_zeta(zeta_mod, zeta_angle);
      std::vector<Configuration> targets;
      if (x_in.empty())
        targets = enumerate_states(P);
      else
        targets.push_back(resolve(x_in, P, "x"));
      Table tab{{"x", "re", "im", "boundary_increment"}};
      for (const auto& x : targets) {
        const auto res = images_sum(y, x, zeta, t, m_trunc, {}, P);
        tab.add({config_string(x), res.value.real(), res.value.imag(), res.boundary_increment});
      }
      return tab;
    };
  });

  LimitParams lp;
  double tau = 1.0, gamma = 0.0, xlo = -6.0, xhi = 3.0, dx = 0.25;
  std::string plot;
  auto* limit_cmd = app.add_subcommand("limit", "limit distributions F1 and F2");
  limit_cmd->require_subcommand(1);
  auto add_limit = [&](const std::string& name, bool with_gamma) {
    auto* sub = limit_cmd->add_subcommand(name, name == "f1" ? "flat limit law" : "step limit law");
    add_common(sub, c, false);
    sub->add_option("--tau", tau, "scaled time")->capture_default_str();
    sub->add_option("--xmin", xlo, "grid start")->capture_default_str();
    sub->add_option("--xmax", xhi, "grid end")->capture_default_str();
    sub->add_option("--dx", dx, "grid step")->capture_default_str();
    if (with_gamma) sub->add_option("--gamma", gamma, "shock parameter")->capture_default_str();
    sub->add_option("--K", lp.K, "branches per side")->capture_default_str();
    sub->add_option("--Mz", lp.Mz, "outer nodes")->capture_default_str();
    sub->add_option("--rz", lp.rz, "outer radius in (0, 1)")->capture_default_str();
    sub->add_option("--plot", plot, "also write (x, F) pairs to this CSV file");
    sub->callback([&, with_gamma] {
      action = [&, with_gamma] {
        const LimitTables tables{lp};
        Table tab{{"x", "F", "imag_residue", "tail_estimate"}};
        std::ofstream plot_file;
        if (!plot.empty()) {
          plot_file.open(plot);
          if (!plot_file) throw ConfigError("cannot open plot file: " + plot);
        }
        for (double x : x_grid(xlo, xhi, dx)) {
          const auto v = with_gamma ? tables.f2(x, tau, gamma) : tables.f1(x, tau);
          tab.add({x, v.value, v.imag_residue, v.tail_estimate});
          if (plot_file) plot_file << fmt::format("{:.17g},{:.17g}\n", x, v.value);
        }
        return tab;
      };
    });
  };
  add_limit("f1", false);
  add_limit("f2", true);

  long long trials = 10000;
  std::uint64_t seed = 1;
  std::string dump;
  bool current = false;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimates");
  add_common(sim_cmd, c);
  sim_cmd->add_option("--y", y_in, "initial configuration")->delimiter(',');
  sim_cmd->add_option("--t", t, "time")->capture_default_str();
  sim_cmd->add_option("--trials", trials, "number of trajectories")->capture_default_str();
  sim_cmd->add_option("--seed", seed, "base seed")->capture_default_str();
  sim_cmd->add_flag("--current", current, "tabulate P(Q_{L-1}(t) >= Q) instead of X(t)");
  sim_cmd->add_option("--dump", dump, "write the events of trial 0 to this CSV file");
  sim_cmd->callback([&] {
    action = [&] {
      const auto P = c.params();
      const auto y = resolve(y_in, P, "y");
      if (!dump.empty()) {
        std::ofstream f(dump);
        if (!f) throw ConfigError("cannot open dump file: " + dump);
        const auto tr = run(y, t, derive_seed(seed, 0), P);
        f << "time,kind,particle,length,state,global_q\n";
        for (const auto& ev : tr.events)
          f << fmt::format("{:.17g},{},{},{},{},{}\n", ev.time,
                           ev.kind == Event::Kind::Right ? "right" : "push", ev.particle, ev.length,
                           config_string(ev.state), ev.currents.global_q);
      }
      if (current) {
        const auto law = empirical_current_law(y, t, trials, seed, P);
        Table tab{{"Q", "cdf", "stderr"}};
        for (const auto& [q, n] : law.counts) {
          const auto e = law.tail(q);
          tab.add({static_cast<long long>(q), e.value, e.stderr_});
        }
        return tab;
      }
      const auto table = empirical_transition(y, t, trials, seed, P);
      Table tab{{"x", "prob", "stderr"}};
      for (std::size_t s = 0; s < table.states.size(); ++s)
        tab.add({config_string(table.states[s]), table.prob[s], table.stderr_[s]});
      return tab;
    };
  });

  std::string fc_p = "2", fc_r = "2";
  int fc_m = 3;
  auto* fc_cmd = app.add_subcommand("fuss-catalan", "Fuss-Catalan numbers A_m(p, r)");
  add_common(fc_cmd, c, false);
  fc_cmd->add_option("--fc-p", fc_p, "p as an integer or a/b")->capture_default_str();
  fc_cmd->add_option("--fc-r", fc_r, "r as an integer or a/b")->capture_default_str();
  fc_cmd->add_option("--mmax", fc_m, "largest m")->capture_default_str();
  fc_cmd->callback([&] {
    action = [&] {
      if (fc_m < 0) throw ConfigError("--mmax must be >= 0");
      const Rational pr = parse_rational(fc_p), rr = parse_rational(fc_r);
      Table tab{{"m", "numerator", "denominator", "value"}};
      for (int m = 0; m <= fc_m; ++m) {
        const Rational v = fuss_catalan(pr, rr, m);
        tab.add({static_cast<long long>(m), static_cast<long long>(v.numerator()),
                 static_cast<long long>(v.denominator()), boost::rational_cast<double>(v)});
      }
      return tab;
    };
  });

  std::string profile = "desk";
  std::vector<std::string> only;
  bool failed = false;
  auto* validate_cmd = app.add_subcommand("validate", "run the acceptance criteria");
  add_common(validate_cmd, c, false);
  validate_cmd->add_option("--profile", profile, "benchmark profile")->capture_default_str();
  validate_cmd->add_option("--only", only, "subset of criteria, e.g. AC-3,AC-7")->delimiter(',');
  validate_cmd->callback([&] {
    action = [&] {
      if (profile != "desk") throw ConfigError("unknown profile: " + profile);
      Table tab{{"id", "pass", "metric", "tolerance", "detail"}};
      for (const auto& id : only.empty() ? criterion_ids() : only) {
        const auto r = run_acceptance(profile, {id}).front();
        std::cerr << format_result(r) << std::endl;
        failed = failed || !r.pass;
        tab.add({r.id, std::string(r.pass ? "true" : "false"), r.metric, r.tolerance, r.detail});
      }
      return tab;
    };
  });

  std::string config_path;
  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv, app, config_path);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
  std::vector<char*> cargs;
  for (auto& a : args) cargs.push_back(a.data());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }

  const CLI::App* chosen = nullptr;
  for (const CLI::App* s = &app; s && !s->get_subcommands().empty();) {
    s = s->get_subcommands().front();
    chosen = s;
  }
  try {
    std::unique_ptr<tbb::global_control> cap;
    if (c.threads < 0) throw ConfigError("--threads must be >= 0");
    if (c.threads > 0)
      cap = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                  static_cast<std::size_t>(c.threads));
    const Table tab = action();
    json cfg = run_config(chosen);
    if (!config_path.empty()) cfg["config"] = config_path;
    emit(tab, cfg, c);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 1;
  }
  return failed ? 1 : 0;
}
