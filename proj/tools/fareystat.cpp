// fareystat: command-line front end for the farey library.
//
// Exit codes: 0 ok, 2 validation error, 3 integer overflow, 4 acceptance failure.
// Errors go to stderr as a single JSON object.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "farey/acceptance.hpp"
#include "farey/congruence.hpp"
#include "farey/diophantine.hpp"
#include "farey/farey_enum.hpp"
#include "farey/frobenius.hpp"
#include "farey/report_io.hpp"
#include "farey/spacing_stats.hpp"

namespace {

using farey::IntRow;
using farey::ValidationError;
using farey::io::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitOverflow = 3;
constexpr int kExitCriterion = 4;

constexpr const char* kOutDirEnv = "FAREYSTAT_OUT_DIR";

struct Common {
  int n = 1;
  std::int64_t q = 0;
  std::int64_t modulus = 1;
  std::vector<std::string> classes;
  std::string domain;
  std::string out;
  std::string format;
  unsigned threads = 0;
  std::uint64_t seed = 1;
  std::int64_t samples = 10000;
  int kmax = 16;
};

double to_double(const std::string& s, const std::string& field) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e) throw ValidationError(field, "not a number: '" + s + "'");
  return v;
}

std::int64_t to_int(const std::string& s, const std::string& field) {
  std::int64_t v = 0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e) throw ValidationError(field, "not an integer: '" + s + "'");
  return v;
}

IntRow int_list(const std::string& s, const std::string& field) {
  IntRow out;
  for (const auto& part : farey::io::split(s, ',')) out.push_back(to_int(part, field));
  return out;
}

std::vector<double> double_list(const std::string& s, const std::string& field) {
  std::vector<double> out;
  for (const auto& part : farey::io::split(s, ',')) out.push_back(to_double(part, field));
  return out;
}

farey::ResidueSystem residue_system(const Common& c) {
  if (c.modulus == 1 && !c.classes.empty())
    throw ValidationError("--class", "classes need --modulus > 1");
  std::vector<IntRow> rows;
  for (const auto& s : c.classes) rows.push_back(int_list(s, "--class"));
  return farey::ResidueSystem(c.n, c.modulus, std::move(rows));
}

/// "l1,u1;l2,u2;..." as a box.
farey::TestSet parse_box(const std::string& s, const std::string& field) {
  std::vector<double> lo, hi;
  for (const auto& range : farey::io::split(s, ';')) {
    const auto v = double_list(range, field);
    if (v.size() != 2) throw ValidationError(field, "each range needs 'lower,upper'");
    lo.push_back(v[0]);
    hi.push_back(v[1]);
  }
  try {
    return farey::TestSet::box(lo, hi);
  } catch (const ValidationError& e) {
    throw ValidationError(field, e.what());
  }
}

/// "box:l1,u1;..." or "ball:c1,...,cn;r".
farey::TestSet parse_window(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ValidationError("--window", "expected box:... or ball:...");
  const std::string shape = s.substr(0, colon);
  const std::string body = s.substr(colon + 1);
  if (shape == "box") return parse_box(body, "--window");
  if (shape == "ball") {
    const auto parts = farey::io::split(body, ';');
    if (parts.size() != 2) throw ValidationError("--window", "ball needs 'c1,...,cn;r'");
    try {
      return farey::TestSet::ball(double_list(parts[0], "--window"), to_double(parts[1], "--window"));
    } catch (const ValidationError& e) {
      throw ValidationError("--window", e.what());
    }
  }
  throw ValidationError("--window", "unknown window shape '" + shape + "'");
}

farey::TestSet domain_or_torus(const Common& c) {
  if (c.domain.empty()) return farey::torus_domain(c.n, c.modulus);
  auto d = parse_box(c.domain, "--domain");
  if (d.dim() != c.n) throw ValidationError("--domain", "domain dimension must equal n");
  return d;
}

std::filesystem::path output_path(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) p = std::filesystem::path(dir) / p;
  }
  return p;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  const auto path = output_path(c.out);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("--out", "cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw ValidationError("--out", "write to '" + path.string() + "' failed");
}

void check_format(const Common& c, std::initializer_list<const char*> allowed) {
  if (c.format.empty()) return;
  for (const char* a : allowed)
    if (c.format == a) return;
  throw ValidationError("--format", "unsupported format '" + c.format + "' for this command");
}

void add_system_options(CLI::App* app, Common& c) {
  app->add_option("--n", c.n, "dimension n")->required();
  app->add_option("--modulus", c.modulus, "modulus m (default 1: no restriction)");
  app->add_option("--class", c.classes, "residue class 'a1,...,a_{n+1}' (repeatable)");
  app->add_option("--threads", c.threads, "worker threads (0: hardware concurrency)");
}

void add_output_options(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "output file (relative paths resolve under $FAREYSTAT_OUT_DIR)");
  app->add_option("--format", c.format, "csv or json");
}

int run_farey(const std::string& action, const Common& c) {
  const auto sys = residue_system(c);
  if (action == "count") {
    check_format(c, {"json", "text"});
    const auto count = farey::count_points(c.n, c.q, sys, c.threads);
    if (c.format == "json") {
      const auto g = farey::growth_check(count, c.n, c.q, sys);
      emit(c, farey::io::dump(json{{"schema_version", farey::io::kSchemaVersion},
                                   {"n", c.n},
                                   {"Q", c.q},
                                   {"modulus", sys.modulus()},
                                   {"classes", sys.classes()},
                                   {"count", count},
                                   {"sigma", g.sigma},
                                   {"ratio", g.ratio}}));
    } else {
      emit(c, std::to_string(count) + "\n");
    }
    return kExitOk;
  }
  check_format(c, {"csv"});
  const auto set = farey::materialize(c.n, c.q, sys);
  std::ostringstream out;
  out << "q";
  for (int i = 1; i <= c.n; ++i) out << ",p" << i;
  out << "\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << set.q(i);
    for (auto v : set.p(i)) out << ',' << v;
    out << '\n';
  }
  emit(c, out.str());
  return kExitOk;
}

int run_stats(const std::string& action, const Common& c, const std::string& window_text) {
  check_format(c, {"json"});
  if (c.q < 1) throw ValidationError("--q", "Q must be >= 1");
  if (c.samples < 1 && action == "p") throw ValidationError("--samples", "samples must be >= 1");
  if (c.kmax < 0) throw ValidationError("--kmax", "kmax must be >= 0");
  const auto sys = residue_system(c);
  const auto window = parse_window(window_text);
  if (window.dim() != c.n) throw ValidationError("--window", "window dimension must equal n");
  const auto domain = domain_or_torus(c);
  const auto set = farey::materialize(c.n, c.q, sys);
  const auto report = action == "p"
                          ? farey::p_stat(set, domain, window, c.kmax, c.samples, c.seed, c.threads)
                          : farey::p0_stat(set, domain, window, c.kmax, c.threads);
  emit(c, farey::io::dump(farey::io::to_json(report)));
  return kExitOk;
}

int run_dio(const std::string& action, const Common& c, double alpha, double ratio) {
  check_format(c, {"json"});
  if (c.samples < 1) throw ValidationError("--samples", "samples must be >= 1");
  if (c.kmax < 0) throw ValidationError("--kmax", "kmax must be >= 0");
  const auto kind = action == "est" ? farey::DioKind::EST : farey::DioKind::Kesten;
  farey::DioParams prm;
  prm.alpha = alpha;
  prm.c = ratio;
  prm.Q = c.q;
  prm.validate(kind);
  prm.sys = residue_system(c);
  const auto report = farey::dio_distribution(kind, domain_or_torus(c), prm, c.samples, c.seed,
                                              c.kmax, c.threads);
  emit(c, farey::io::dump(farey::io::to_json(report)));
  return kExitOk;
}

std::vector<double> parse_rgrid(const std::string& s) {
  const auto parts = farey::io::split(s, ':');
  if (parts.size() != 3) throw ValidationError("--rgrid", "expected start:stop:step");
  const double start = to_double(parts[0], "--rgrid");
  const double stop = to_double(parts[1], "--rgrid");
  const double step = to_double(parts[2], "--rgrid");
  if (!(step > 0.0) || stop < start) throw ValidationError("--rgrid", "need step > 0 and stop >= start");
  const auto count = static_cast<std::int64_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 1000000) throw ValidationError("--rgrid", "too many grid points");
  std::vector<double> grid;
  for (std::int64_t i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
  return grid;
}

int run_frob(const std::string& action, const Common& c, const std::string& a_text, double h,
             std::int64_t T, const std::string& rgrid) {
  if (action == "number" || action == "identity") {
    if (a_text.empty()) throw ValidationError("--a", "--a is required");
    const auto a = int_list(a_text, "--a");
    if (action == "number") {
      check_format(c, {"json", "text"});
      const auto F = farey::frobenius_number(a);
      if (c.format == "json")
        emit(c, farey::io::dump(json{{"schema_version", farey::io::kSchemaVersion},
                                     {"a", a},
                                     {"frobenius", F}}));
      else
        emit(c, std::to_string(F) + "\n");
      return kExitOk;
    }
    check_format(c, {"json"});
    const auto r = farey::identity_check(a, h, c.threads);
    emit(c, farey::io::dump(json{{"schema_version", farey::io::kSchemaVersion},
                                 {"a", a},
                                 {"h", h},
                                 {"frobenius", r.frobenius},
                                 {"entry_sum", r.entry_sum},
                                 {"lhs", r.lhs},
                                 {"rhs", r.rhs},
                                 {"rhs_upper", r.rhs_upper},
                                 {"residual", r.residual},
                                 {"relative", r.relative}}));
    return kExitOk;
  }
  check_format(c, {"csv", "json"});
  farey::CensusConfig cfg;
  cfg.n = c.n;
  cfg.T = T;
  cfg.sys = residue_system(c);
  cfg.threads = c.threads;
  cfg.r_grid = parse_rgrid(rgrid);
  if (c.domain.empty()) {
    cfg.lo.assign(c.n + 1, 0.0);
    cfg.hi.assign(c.n + 1, 1.0);
  } else {
    const auto d = parse_box(c.domain, "--domain");
    cfg.lo = d.lo;
    cfg.hi = d.hi;
  }
  const auto table = farey::io::census_table(farey::frobenius_census(cfg));
  emit(c, c.format == "json" ? farey::io::dump(farey::io::to_json(table)) : farey::io::to_csv(table));
  return kExitOk;
}

int run_congr(const Common& c, bool bruteforce) {
  check_format(c, {"json"});
  const auto sys = residue_system(c);
  const auto count = farey::astar_count(sys);
  auto j = farey::io::to_json(sys, count);
  if (bruteforce) {
    const auto brute = farey::astar_bruteforce(sys);
    j["bruteforce"] = json{{"astar", brute.astar},
                           {"index", brute.index},
                           {"agrees", brute == count}};
  }
  emit(c, farey::io::dump(j));
  return kExitOk;
}

int run_accept(const std::string& suite, const Common& c) {
  check_format(c, {"json"});
  farey::acceptance::Options opt;
  opt.threads = c.threads;
  const auto reports = farey::acceptance::accept(
      suite == "fast" ? farey::acceptance::Suite::Fast : farey::acceptance::Suite::Full, opt,
      &std::cout);
  int failed = 0;
  for (const auto& r : reports) failed += !r.pass();
  std::cout << (failed ? "FAILED: " : "ALL PASSED: ") << reports.size() - failed << "/"
            << reports.size() << " criteria\n";
  if (!c.out.empty()) emit(c, farey::io::dump(farey::acceptance::to_json(reports)));
  return failed ? kExitCriterion : kExitOk;
}

void print_error(const std::string& kind, const std::string& field, const std::string& message) {
  json j{{"error", kind}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Congruence-restricted Farey sequences, spacing and Diophantine statistics, "
               "Frobenius numbers"};
  app.require_subcommand(1);

  Common c;
  std::string action;

  auto* farey_cmd = app.add_subcommand("farey", "count or list Farey points");
  farey_cmd->add_option("action", action)->required()->check(CLI::IsMember({"count", "list"}));
  add_system_options(farey_cmd, c);
  farey_cmd->add_option("--q", c.q, "maximal denominator Q")->required();
  add_output_options(farey_cmd, c);

  std::string window;
  auto* stats_cmd = app.add_subcommand("stats", "spacing statistics P (random x) or P0 (Farey x)");
  stats_cmd->add_option("action", action)->required()->check(CLI::IsMember({"p", "p0"}));
  add_system_options(stats_cmd, c);
  stats_cmd->add_option("--q", c.q, "maximal denominator Q")->required();
  stats_cmd->add_option("--window", window, "test set 'box:l1,u1;...' or 'ball:c1,...;r'")->required();
  stats_cmd->add_option("--domain", c.domain, "sampling box 'l1,u1;...' (default: [0,m)^n)");
  stats_cmd->add_option("--samples", c.samples, "Monte Carlo samples");
  stats_cmd->add_option("--seed", c.seed, "64-bit seed");
  stats_cmd->add_option("--kmax", c.kmax, "largest count with its own pmf bin");
  add_output_options(stats_cmd, c);

  double alpha = 0.5, ratio = 2.0;
  auto* dio_cmd = app.add_subcommand("dio", "EST or Kesten counting distributions");
  dio_cmd->add_option("action", action)->required()->check(CLI::IsMember({"est", "kesten"}));
  add_system_options(dio_cmd, c);
  dio_cmd->add_option("--q", c.q, "Q")->required();
  dio_cmd->add_option("--alpha", alpha, "amplitude alpha");
  dio_cmd->add_option("--c", ratio, "EST denominator ratio c > 1");
  dio_cmd->add_option("--domain", c.domain, "sampling box 'l1,u1;...' (default: [0,m)^n)");
  dio_cmd->add_option("--samples", c.samples, "Monte Carlo samples");
  dio_cmd->add_option("--seed", c.seed, "64-bit seed");
  dio_cmd->add_option("--kmax", c.kmax, "largest count with its own pmf bin");
  add_output_options(dio_cmd, c);

  std::string a_text, rgrid = "0:3:0.05";
  double h = 1e-3;
  std::int64_t T = 100;
  auto* frob_cmd = app.add_subcommand("frob", "Frobenius numbers, covering-radius identity, census");
  frob_cmd->set_help_flag("--help", "Print this help message and exit");  // frees --h
  frob_cmd->add_option("action", action)->required()->check(
      CLI::IsMember({"number", "identity", "census"}));
  frob_cmd->add_option("--a", a_text, "entries 'a1,...,a_{n+1}'");
  frob_cmd->add_option("--h", h, "covering-radius grid spacing");
  frob_cmd->add_option("--n", c.n, "census dimension n");
  frob_cmd->add_option("--t", T, "census scale T");
  frob_cmd->add_option("--modulus", c.modulus, "census modulus m");
  frob_cmd->add_option("--class", c.classes, "census residue class (repeatable)");
  frob_cmd->add_option("--domain", c.domain, "census box D 'l1,u1;...' (default [0,1]^{n+1})");
  frob_cmd->add_option("--rgrid", rgrid, "R grid start:stop:step");
  frob_cmd->add_option("--threads", c.threads, "worker threads (0: hardware concurrency)");
  add_output_options(frob_cmd, c);

  bool bruteforce = false;
  auto* congr_cmd = app.add_subcommand("congr", "#A*, [Gamma:Gamma(m)] and the density");
  add_system_options(congr_cmd, c);
  congr_cmd->add_flag("--bruteforce", bruteforce, "also enumerate SL(n+1, Z/m)");
  add_output_options(congr_cmd, c);

  std::string suite = "fast";
  auto* accept_cmd = app.add_subcommand("accept", "run the acceptance criteria");
  accept_cmd->add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  accept_cmd->add_option("--threads", c.threads, "worker threads (0: hardware concurrency)");
  accept_cmd->add_option("--out", c.out, "also write a JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("validation", "", e.what());
    return kExitValidation;
  }

  try {
    if (*farey_cmd) return run_farey(action, c);
    if (*stats_cmd) return run_stats(action, c, window);
    if (*dio_cmd) return run_dio(action, c, alpha, ratio);
    if (*frob_cmd) {
      if (action == "census" && frob_cmd->count("--n") == 0) c.n = 2;
      return run_frob(action, c, a_text, h, T, rgrid);
    }
    if (*congr_cmd) return run_congr(c, bruteforce);
    if (*accept_cmd) return run_accept(suite, c);
  } catch (const ValidationError& e) {
    print_error("validation", e.field(), e.what());
    return kExitValidation;
  } catch (const farey::OverflowError& e) {
    print_error("overflow", "", e.what());
    return kExitOverflow;
  } catch (const std::exception& e) {
    print_error("internal", "", e.what());
    return 1;
  }
  return kExitOk;
}
