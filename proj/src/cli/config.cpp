#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "rwalk/cli.hpp"

namespace rwalk::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    std::istringstream is(item);
    T v{};
    if (item.empty() || !(is >> v) || !is.eof())
      throw ConfigError(std::string("bad value in --") + what + ": '" + item + "'");
    out.push_back(v);
  }
  return out;
}

const std::map<std::string, std::set<std::string>> kKnobs = {
    {"simulate", {"seed", "steps", "thinning", "tail_fraction"}},
    {"mc", {"seed", "steps", "runs", "thinning", "tail_fraction", "near_radius"}},
    {"flow", {"seed", "x0", "y0", "time", "flow_step", "record_every", "tail_fraction"}},
    {"gap", {"seed", "runs", "horizon", "at", "flow_step"}},
    {"spectrum", {}},
    {"lyapunov-scan", {"resolution", "floor", "no_threshold", "dump"}},
    {"verify-appendix", {"resolution", "floor", "kappa", "samples", "radius", "seed", "dump"}},
};

bool uses(const RunConfig& c, const std::string& knob) {
  return kKnobs.at(c.command).count(knob) > 0;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

RunConfig defaults_for(const std::string& command) {
  RunConfig c;
  c.command = command;
  if (command == "mc") {
    c.runs = 200;
    c.thinning = 100;
  }
  if (command == "flow") c.tail_fraction = 0.5;
  return c;
}

}  // namespace

void RunConfig::validate() const {
  require(kKnobs.count(command) > 0, "unknown command '" + command + "'");
  require(d >= 2, "d must be >= 2");
  require(alpha > 0.0 && std::isfinite(alpha), "alpha must be a positive number");
  require(delta > 0.0 && delta < 1.0 / d, "delta must lie in (0, 1/d)");
  require(n0 >= 0, "n0 must be >= 1 (or 0 for the default N0 = d)");
  if (uses(*this, "steps")) require(steps >= 1, "steps must be >= 1");
  if (uses(*this, "runs")) require(runs >= 1, "runs must be >= 1");
  if (uses(*this, "thinning")) require(thinning >= 1, "thinning must be >= 1");
  if (uses(*this, "tail_fraction"))
    require(tail_fraction > 0.0 && tail_fraction <= 1.0, "tail-fraction must lie in (0, 1]");
  if (uses(*this, "near_radius")) require(near_radius > 0.0, "near-radius must be > 0");
  if (uses(*this, "x0")) {
    require(x0.empty() == y0.empty(), "x0 and y0 must be given together");
    require(x0.empty() || (static_cast<int>(x0.size()) == d && static_cast<int>(y0.size()) == d),
            "x0 and y0 need d coordinates each");
  }
  if (uses(*this, "time")) require(time > 0.0, "time must be > 0");
  if (uses(*this, "flow_step")) require(flow_step > 0.0 && flow_step <= 0.1, "flow-step must lie in (0, 0.1]");
  if (uses(*this, "record_every")) require(record_every >= 1, "record-every must be >= 1");
  if (uses(*this, "horizon")) require(horizon > 0.0, "horizon must be > 0");
  if (uses(*this, "at")) {
    require(!at.empty(), "at needs at least one step");
    for (auto n : at) require(n >= 0, "at steps must be >= 0");
  }
  if (uses(*this, "resolution")) require(resolution >= 10, "resolution must be >= 10");
  if (uses(*this, "floor")) {
    const double f = effective_floor();
    require(f > 0.0 && f * d < 1.0, "floor must lie in (0, 1/d)");
  }
  if (uses(*this, "kappa")) require(kappa > 0.0 && kappa < 1.0, "kappa must lie in (0, 1)");
  if (uses(*this, "samples")) require(samples >= 1, "samples must be >= 1");
  if (uses(*this, "radius")) require(radius > 0.0, "radius must be > 0");
  require(workers >= 0, "workers must be >= 0");
}

double RunConfig::effective_floor() const {
  if (floor) return *floor;
  return command == "lyapunov-scan" ? 0.005 : 0.01;
}

nlohmann::json RunConfig::effective_json() const {
  nlohmann::json j;
  j["d"] = d;
  j["alpha"] = alpha;
  j["delta"] = delta;
  j["n0"] = n0 == 0 ? d : n0;
  const auto& knobs = kKnobs.at(command);
  auto put = [&](const char* key, auto value) {
    if (knobs.count(key)) j[key] = value;
  };
  put("seed", seed);
  put("steps", steps);
  put("runs", runs);
  put("thinning", thinning);
  put("tail_fraction", tail_fraction);
  put("near_radius", near_radius);
  if (knobs.count("x0")) {
    j["x0"] = x0.empty() ? nlohmann::json(nullptr) : nlohmann::json(x0);
    j["y0"] = y0.empty() ? nlohmann::json(nullptr) : nlohmann::json(y0);
  }
  put("time", time);
  put("flow_step", flow_step);
  put("record_every", record_every);
  put("horizon", horizon);
  put("at", at);
  put("resolution", resolution);
  if (knobs.count("floor")) j["floor"] = effective_floor();
  put("no_threshold", no_threshold);
  put("dump", dump);
  put("kappa", kappa);
  put("samples", samples);
  put("radius", radius);
  return j;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(number) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(number) + ": empty key");
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

namespace {

struct Cli {
  CLI::App app{"Two-particle repelling vertex-reinforced walk on K_d: simulation, "
               "mean-field flow and numerical checks.",
               "reinforce_walk"};
  std::map<std::string, RunConfig> configs;
  std::map<std::string, std::string> x0_text, y0_text, at_text;
  std::string config_path;

  Cli() {
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    const std::map<std::string, std::string> help = {
        {"simulate", "Run the walk once; trajectory JSONL and summary CSV"},
        {"mc", "Monte Carlo over independent seeds; per-run and aggregate CSV"},
        {"flow", "Integrate the mean-field ODE; trajectory JSONL and report JSON"},
        {"gap", "Distance between the interpolated walk and the semiflow"},
        {"spectrum", "Eigenvalues at (U,U) and of the Hessian matrices M, N"},
        {"lyapunov-scan", "Sign of dH/dt on a product lattice"},
        {"verify-appendix", "Brute-force checks of the simplex inequalities"},
    };
    for (const auto& [name, knobs] : kKnobs) {
      configs.emplace(name, defaults_for(name));
      add(name, help.at(name));
    }
  }

  void add(const std::string& name, const std::string& description) {
    RunConfig& c = configs.at(name);
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "key=value file; flags override it");
    sub->add_option("--d", c.d, "number of vertices")->capture_default_str();
    sub->add_option("--alpha", c.alpha, "repulsion exponent")->capture_default_str();
    sub->add_option("--delta", c.delta, "weight floor")->capture_default_str();
    sub->add_option("--n0", c.n0, "initial count total N0 (0: d)")->capture_default_str();
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    sub->add_option("--workers", c.workers, "worker threads (0: all cores)")->capture_default_str();
    auto opt = [&](const char* knob, const char* flag, auto& var, const char* text) {
      if (kKnobs.at(name).count(knob)) sub->add_option(flag, var, text)->capture_default_str();
    };
    opt("seed", "--seed", c.seed, "base seed");
    opt("steps", "--steps", c.steps, "number of steps");
    opt("runs", "--runs", c.runs, "number of independent runs");
    opt("thinning", "--thinning", c.thinning, "keep every k-th step");
    opt("tail_fraction", "--tail-fraction", c.tail_fraction, "tail share of the run or flow");
    opt("near_radius", "--near-radius", c.near_radius, "L1 radius around (U,U)");
    opt("time", "--time", c.time, "flow time");
    opt("flow_step", "--flow-step", c.flow_step, "RK4 step");
    opt("record_every", "--record-every", c.record_every, "write every k-th flow step");
    opt("horizon", "--horizon", c.horizon, "gap horizon T");
    opt("resolution", "--resolution", c.resolution, "lattice denominator");
    opt("kappa", "--kappa", c.kappa, "far-from-uniform parameter");
    opt("samples", "--samples", c.samples, "samples per sampling sweep");
    opt("radius", "--radius", c.radius, "L1 radius of the local-minimum probe");
    if (kKnobs.at(name).count("floor"))
      sub->add_option("--floor", c.floor, "interior floor of the lattice");
    if (kKnobs.at(name).count("x0")) {
      sub->add_option("--x0", x0_text[name], "start x, comma separated");
      sub->add_option("--y0", y0_text[name], "start y, comma separated");
    }
    if (kKnobs.at(name).count("at"))
      sub->add_option("--at", at_text[name], "steps n where t = tau_n, comma separated")
          ->default_str("1000,100000");
    if (kKnobs.at(name).count("no_threshold"))
      sub->add_flag("--no-threshold", c.no_threshold, "scan all of the lattice");
    if (kKnobs.at(name).count("dump"))
      sub->add_flag("--dump", c.dump, "write every lattice row to CSV");
  }

  // Config-file entries become option tokens placed before the command-line
  // ones, so the take-last policy lets flags win.
  std::vector<std::string> expand(const std::vector<std::string>& args) {
    if (args.empty() || args[0].empty() || args[0][0] == '-') return args;
    CLI::App* sub = app.get_subcommand_ptr(args[0]).get();
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::vector<std::string> out{args[0]};
    for (const auto& [key, value] : read_config_file(path)) {
      const std::string flag = "--" + key;
      const CLI::Option* o = sub->get_option_no_throw(flag);
      if (o == nullptr || key == "config" || key == "help")
        throw ConfigError("unknown key '" + key + "' in " + path + " for " + args[0]);
      if (o->get_expected_min() == 0) {
        out.push_back(flag + "=" + value);
      } else {
        out.push_back(flag);
        out.push_back(value);
      }
    }
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
  }
};

bool flag_given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  Cli cli;
  std::vector<std::string> tokens;
  try {
    tokens = cli.expand(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
  try {
    cli.app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = cli.app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const std::string name = cli.app.get_subcommands().front()->get_name();
  RunConfig cfg = cli.configs.at(name);
  try {
    if (!cli.x0_text[name].empty()) cfg.x0 = parse_list<double>(cli.x0_text[name], "x0");
    if (!cli.y0_text[name].empty()) cfg.y0 = parse_list<double>(cli.y0_text[name], "y0");
    if (!cli.at_text[name].empty()) cfg.at = parse_list<std::int64_t>(cli.at_text[name], "at");
    if (!flag_given(args, "--workers")) {
      if (const char* env = std::getenv("REINFORCE_WALK_WORKERS")) {
        const auto w = parse_list<int>(env, "workers (REINFORCE_WALK_WORKERS)");
        if (w.size() != 1) throw ConfigError("REINFORCE_WALK_WORKERS must be one integer");
        cfg.workers = w[0];
      }
    }
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  static const std::map<std::string, std::function<int(const RunConfig&)>> commands = {
      {"simulate", cmd_simulate},
      {"mc", cmd_mc},
      {"flow", cmd_flow},
      {"gap", cmd_gap},
      {"spectrum", cmd_spectrum},
      {"lyapunov-scan", cmd_lyapunov_scan},
      {"verify-appendix", cmd_verify_appendix},
  };
  try {
    return commands.at(name)(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args);
}

}  // namespace rwalk::cli
