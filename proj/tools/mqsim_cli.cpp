#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mqsim/algorithms.hpp"
#include "mqsim/scenarios.hpp"
#include "mqsim/setlin.hpp"
#include "mqsim/shifting.hpp"
#include "mqsim/simulator.hpp"
#include "mqsim/trace.hpp"

namespace {

mqsim::Time parse_time_arg(const std::string& text, const std::string& flag) {
  auto t = mqsim::Time::parse(text);
  if (!t) throw CLI::ValidationError(flag, "expected an integer or a rational p/q, got '" + text + "'");
  return *t;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string record_type(const std::string& trace) {
  std::istringstream in(trace);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) return nlohmann::json::parse(line).at("type").get<std::string>();
  throw std::runtime_error("trace: no records");
}

mqsim::History load_history(const std::string& path) {
  const std::string text = read_file(path);
  const std::string type = record_type(text);
  if (type == "history_header") return mqsim::history_from_trace(text);
  if (type == "run_header") return mqsim::extract_history(mqsim::run_from_trace(text));
  throw std::runtime_error("expected a history or run trace, found " + type);
}

int report_admissibility(const mqsim::Run& run, std::ostream& os) {
  const auto verdict = mqsim::is_admissible(run);
  for (const auto& v : verdict.violations) {
    os << "violation: " << mqsim::violation_name(v.kind) << " by " << v.amount.str();
    if (v.message)
      os << " on message " << v.message->sender << "->" << v.message->receiver << " sent at "
         << v.message->send_time.str();
    if (v.processes) os << " between processes " << v.processes->first << " and " << v.processes->second;
    os << "\n";
  }
  if (verdict.admissible) {
    os << "admissible\n";
    return 0;
  }
  os << "inadmissible (" << verdict.violations.size() << " violation"
     << (verdict.violations.size() == 1 ? "" : "s") << ")\n";
  return 1;
}

std::string interval_str(const mqsim::RationalInterval& iv) {
  std::string s = (iv.lower_strict ? "(" : "[") + iv.lower.str() + ", " + iv.upper.str() +
                  (iv.upper_strict ? ")" : "]");
  if (iv.empty())
    s += " empty";
  else if (iv.lower == iv.upper)
    s += " degenerate (single point)";
  return s;
}

struct ScenarioArgs {
  std::string kind;
  int n = 0;
  std::string d, u;
  int k = -1;
  std::string x = "0";
  std::string deq = "0";
  std::string algo = "baseline";
  std::string out;
  std::string schedule_out;
};

int run_scenario(const ScenarioArgs& a) {
  mqsim::SystemParams params{a.n, parse_time_arg(a.d, "--d"), parse_time_arg(a.u, "--u")};
  params.validate();
  const auto behavior = mqsim::behavior_by_name(a.algo);
  const auto cfg = mqsim::ScenarioConfig::derive(params, *behavior, parse_time_arg(a.deq, "--deq"));

  mqsim::Schedule schedule;
  if (a.kind == "S3X") {
    auto built = mqsim::build_S3X(cfg, parse_time_arg(a.x, "--X"));
    for (const auto& w : built.warnings) std::cerr << "warning: " << w << "\n";
    schedule = std::move(built.schedule);
  } else {
    if (a.k < 0) throw CLI::ValidationError("--k", "required for kind " + a.kind);
    if (a.kind == "Dk")
      schedule = mqsim::build_Dk(cfg, a.k);
    else if (a.kind == "Sk")
      schedule = mqsim::build_Sk(cfg, a.k);
    else
      schedule = mqsim::build_Sk_prime(cfg, a.k);
  }
  if (!a.schedule_out.empty()) write_output(a.schedule_out, mqsim::schedule_to_trace(schedule));

  const auto outcome = mqsim::simulate(*behavior, schedule);
  write_output(a.out, mqsim::run_to_trace(outcome.run));
  return report_admissibility(outcome.run, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic message-passing simulator and queue history checker"};
  app.require_subcommand(1);
  int rc = 0;

  struct {
    std::string algo, schedule, out;
  } sim;
  auto* simulate = app.add_subcommand("simulate", "run an algorithm over a schedule trace");
  simulate->add_option("--algo", sim.algo, "zero-u | baseline | strawman:<wait>")->required();
  simulate->add_option("--schedule", sim.schedule, "schedule trace file")->required();
  simulate->add_option("--out", sim.out, "output run trace file (default: stdout)");
  simulate->callback([&] {
    const auto behavior = mqsim::behavior_by_name(sim.algo);
    const auto schedule = mqsim::schedule_from_trace(read_file(sim.schedule));
    write_output(sim.out, mqsim::run_to_trace(mqsim::simulate(*behavior, schedule).run));
  });

  struct {
    std::string in, mode = "setlin";
    int cap = 12;
  } chk;
  auto* check = app.add_subcommand("check", "check a history (or run) trace for legality");
  check->add_option("--in", chk.in, "history or run trace file")->required();
  check->add_option("--mode", chk.mode, "setlin | lin")
      ->check(CLI::IsMember({"setlin", "lin"}));
  check->add_option("--cap", chk.cap, "instance cap for the search (default 12)");
  check->callback([&] {
    const auto history = load_history(chk.in);
    const auto verdict = chk.mode == "setlin" ? mqsim::check_multiplicity_setlin(history, chk.cap)
                                              : mqsim::check_linearizable_fifo(history, chk.cap);
    std::cout << mqsim::verdict_to_record(verdict);
    rc = verdict.legal ? 0 : 1;
  });

  struct {
    std::string in, vector, out;
  } shf;
  auto* shift = app.add_subcommand("shift", "displace processes in real time, preserving local views");
  shift->add_option("--in", shf.in, "run trace file")->required();
  shift->add_option("--vector", shf.vector, "comma-separated per-process amounts, e.g. 0,-1,3/2")
      ->required();
  shift->add_option("--out", shf.out, "output run trace file (default: stdout)");
  shift->callback([&] {
    const auto run = mqsim::run_from_trace(read_file(shf.in));
    mqsim::ShiftVector v;
    std::istringstream in(shf.vector);
    std::string part;
    while (std::getline(in, part, ',')) v.offsets.push_back(parse_time_arg(part, "--vector"));
    if (static_cast<int>(v.offsets.size()) != run.params.n)
      throw CLI::ValidationError("--vector", "expected " + std::to_string(run.params.n) + " entries");
    write_output(shf.out, mqsim::run_to_trace(mqsim::shift(run, v)));
  });

  struct {
    std::string in;
  } adm;
  auto* admissible = app.add_subcommand("admissible", "check delays and skew of a run trace");
  admissible->add_option("--in", adm.in, "run trace file")->required();
  admissible->callback(
      [&] { rc = report_admissibility(mqsim::run_from_trace(read_file(adm.in)), std::cout); });

  ScenarioArgs sc;
  auto* scenario = app.add_subcommand("scenario", "build, simulate, and vet a construction family");
  scenario->add_option("--kind", sc.kind, "Dk | Sk | Sk-prime | S3X")
      ->required()
      ->check(CLI::IsMember({"Dk", "Sk", "Sk-prime", "S3X"}));
  scenario->add_option("--n", sc.n, "process count")->required();
  scenario->add_option("--d", sc.d, "maximum delay")->required();
  scenario->add_option("--u", sc.u, "delay uncertainty")->required();
  scenario->add_option("--k", sc.k, "family index (Dk, Sk, Sk-prime)");
  scenario->add_option("--X", sc.x, "pull-back for S3X (default 0)");
  scenario->add_option("--deq", sc.deq, "assumed dequeue latency bound (default 0)");
  scenario->add_option("--algo", sc.algo, "algorithm (default baseline)");
  scenario->add_option("--out", sc.out, "output run trace file (default: stdout)");
  scenario->add_option("--schedule-out", sc.schedule_out, "also write the schedule trace here");
  scenario->callback([&] { rc = run_scenario(sc); });

  struct {
    int n = 0;
    std::string d, u, deq;
  } bnd;
  auto* bounds = app.add_subcommand("bounds", "print the derived quantities for given parameters");
  bounds->add_option("--n", bnd.n, "process count")->required();
  bounds->add_option("--d", bnd.d, "maximum delay")->required();
  bounds->add_option("--u", bnd.u, "delay uncertainty")->required();
  bounds->add_option("--deq", bnd.deq, "assumed dequeue latency bound")->required();
  bounds->callback([&] {
    mqsim::SystemParams params{bnd.n, parse_time_arg(bnd.d, "--d"), parse_time_arg(bnd.u, "--u")};
    params.validate();
    std::cout << "epsilon = " << mqsim::epsilon(params).str() << "\n";
    std::cout << "Q = " << mqsim::bound_Q(params).str() << "\n";
    std::cout << "s = " << mqsim::stagger_s(params).str() << "\n";
    mqsim::ScenarioConfig cfg{params, mqsim::Time(0), parse_time_arg(bnd.deq, "--deq"), {}};
    std::cout << "X interval: " << interval_str(mqsim::x_constraint_interval(cfg)) << "\n";
    try {
      const auto parts = mqsim::minimal_n_parts(cfg);
      std::cout << "minimal n = " << parts.result << " (n0=" << parts.n0 << ", n1=" << parts.n1
                << ", n2=" << parts.n2 << ")\n";
    } catch (const std::invalid_argument& e) {
      if (std::string(e.what()).find("undefined at u=d") == std::string::npos) throw;
      std::cout << "minimal n: undefined at u=d\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
