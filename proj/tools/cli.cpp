#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include <CLI11.hpp>

#include "energyq/energyq.h"

namespace energyq::cli {

namespace {

// Flag validation failure: exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Library call failure: exit 1.
struct ComputationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { Human, Csv, Json };

std::string real(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string capacity_text(uint64_t c) { return c == EQ_CAPACITY_UNBOUNDED ? "inf" : std::to_string(c); }

std::string capacity_json(uint64_t c) { return c == EQ_CAPACITY_UNBOUNDED ? "\"inf\"" : std::to_string(c); }

void check(eq_status status) {
  if (status != EQ_OK) throw ComputationError(std::string(eq_status_name(status)) + ": " + eq_last_error());
}

double parse_probability(const std::string& text, const std::string& flag) {
  double v = 0.0;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (text.empty() || ec != std::errc() || ptr != last)
    throw UsageError(flag + ": expected a real number, got '" + text + "'");
  if (!(v >= 0.0 && v <= 1.0)) throw UsageError(flag + ": must be in [0,1], got " + text);
  return v;
}

uint64_t parse_count(const std::string& text, const std::string& flag, uint64_t minimum) {
  uint64_t v = 0;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), last, v);
  if (text.empty() || ec != std::errc() || ptr != last)
    throw UsageError(flag + ": expected a nonnegative integer, got '" + text + "'");
  if (v < minimum) throw UsageError(flag + ": must be >= " + std::to_string(minimum) + ", got " + text);
  return v;
}

uint64_t parse_capacity(const std::string& text, const std::string& flag, bool allow_unbounded) {
  if (text == "inf") {
    if (!allow_unbounded) throw UsageError(flag + ": this subcommand needs a finite capacity (inf not supported)");
    return EQ_CAPACITY_UNBOUNDED;
  }
  const uint64_t v = parse_count(text, flag, 1);
  if (v == EQ_CAPACITY_UNBOUNDED) throw UsageError(flag + ": capacity too large");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) parts.push_back(item);
  if (!text.empty() && text.back() == ',') parts.emplace_back();
  return parts;
}

Format parse_format(const std::string& text) {
  if (text == "human") return Format::Human;
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  throw UsageError("--format: must be one of csv, json, human; got '" + text + "'");
}

// Writes to a sibling temporary and renames so a failed run leaves no file.
void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    out.flush();
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    file << text;
    file.close();
    if (!file) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw ComputationError("--output: cannot write '" + path + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw ComputationError("--output: cannot rename into '" + path + "': " + ec.message());
  }
}

// Fixed-width cell for the human sweep table.
std::string cell(const std::string& s, std::size_t width = 19) {
  return std::string(s.size() < width ? width - s.size() : 1, ' ') + s;
}

struct Options {
  std::string delta, capacity, mu_e = "1", slots = "1000000", seed = "1", warmup;
  std::string lambda_p, success_prob = "1";
  std::string deltas, capacities, preset, jobs = "1";
  bool simulate = false;
  std::string format = "human", output;
};

eq_sim_config sim_config(const Options& o, CLI::App& sub) {
  if (sub.count("--delta") == 0) throw UsageError("--delta: required");
  if (sub.count("--capacity") == 0) throw UsageError("--capacity: required");
  eq_sim_config cfg{};
  cfg.spec.delta = parse_probability(o.delta, "--delta");
  cfg.spec.mu_e = parse_probability(o.mu_e, "--mu-e");
  cfg.spec.capacity = parse_capacity(o.capacity, "--capacity", true);
  cfg.slots = parse_count(o.slots, "--slots", 1);
  cfg.seed = parse_count(o.seed, "--seed", 0);
  cfg.warmup_slots = o.warmup.empty() ? eq_default_warmup(cfg.slots) : parse_count(o.warmup, "--warmup", 0);
  if (cfg.warmup_slots >= cfg.slots)
    throw UsageError("--warmup: must be less than --slots (" + std::to_string(cfg.slots) + "), got " +
                     std::to_string(cfg.warmup_slots));
  return cfg;
}

std::string run_chain(const Options& o, CLI::App& sub, Format format) {
  if (sub.count("--delta") == 0) throw UsageError("--delta: required");
  if (sub.count("--capacity") == 0) throw UsageError("--capacity: required");
  eq_queue_spec spec{};
  spec.delta = parse_probability(o.delta, "--delta");
  spec.mu_e = parse_probability(o.mu_e, "--mu-e");
  spec.capacity = parse_capacity(o.capacity, "--capacity", false);

  eq_chain* chain = nullptr;
  check(eq_chain_build(&spec, &chain));
  std::unique_ptr<eq_chain, decltype(&eq_chain_destroy)> chain_guard(chain, eq_chain_destroy);
  eq_stationary* dist = nullptr;
  check(eq_chain_solve(chain, 1e-12, &dist, nullptr));
  std::unique_ptr<eq_stationary, decltype(&eq_stationary_destroy)> dist_guard(dist, eq_stationary_destroy);

  const std::size_t n = eq_stationary_size(dist);
  std::vector<double> pi(n);
  for (std::size_t j = 0; j < n; ++j) check(eq_stationary_get(dist, j, &pi[j]));
  const double nonempty = eq_stationary_nonempty(dist);
  const double residual = eq_stationary_residual(dist);

  std::string s;
  switch (format) {
    case Format::Human:
      s += "delta=" + real(spec.delta) + "\n";
      s += "mu_e=" + real(spec.mu_e) + "\n";
      s += "capacity=" + capacity_text(spec.capacity) + "\n";
      for (std::size_t j = 0; j < n; ++j) s += "pi[" + std::to_string(j) + "]=" + real(pi[j]) + "\n";
      s += "nonempty=" + real(nonempty) + "\n";
      s += "residual=" + real(residual) + "\n";
      break;
    case Format::Csv:
      s += "state,pi\n";
      for (std::size_t j = 0; j < n; ++j) s += std::to_string(j) + "," + real(pi[j]) + "\n";
      break;
    case Format::Json:
      s += "{\"delta\":" + real(spec.delta) + ",\"mu_e\":" + real(spec.mu_e) +
           ",\"capacity\":" + capacity_json(spec.capacity) + ",\"pi\":[";
      for (std::size_t j = 0; j < n; ++j) s += (j ? "," : "") + real(pi[j]);
      s += "],\"nonempty\":" + real(nonempty) + ",\"residual\":" + real(residual) + "}\n";
      break;
  }
  return s;
}

std::string run_closed_form(const Options& o, CLI::App& sub, Format format) {
  if (sub.count("--delta") == 0) throw UsageError("--delta: required");
  if (sub.count("--capacity") == 0) throw UsageError("--capacity: required");
  const double delta = parse_probability(o.delta, "--delta");
  const uint64_t capacity = parse_capacity(o.capacity, "--capacity", true);
  eq_formula_comparison cmp{};
  check(eq_compare(delta, capacity, &cmp));

  const std::string limit = cmp.mm1c_is_limit ? "true" : "false";
  switch (format) {
    case Format::Human:
      return "delta=" + real(cmp.delta) + "\ncapacity=" + capacity_text(cmp.capacity) +
             "\nmm1c_nonempty=" + real(cmp.mm1c_value) + "\nmm1c_is_limit=" + limit +
             "\ncorrected_nonempty=" + real(cmp.corrected_value) + "\nabs_error=" + real(cmp.abs_error) + "\n";
    case Format::Csv:
      return "delta,capacity,mm1c_nonempty,mm1c_is_limit,corrected_nonempty,abs_error\n" + real(cmp.delta) + "," +
             capacity_text(cmp.capacity) + "," + real(cmp.mm1c_value) + "," + limit + "," +
             real(cmp.corrected_value) + "," + real(cmp.abs_error) + "\n";
    case Format::Json:
      return "{\"delta\":" + real(cmp.delta) + ",\"capacity\":" + capacity_json(cmp.capacity) +
             ",\"mm1c_nonempty\":" + real(cmp.mm1c_value) + ",\"mm1c_is_limit\":" + limit +
             ",\"corrected_nonempty\":" + real(cmp.corrected_value) + ",\"abs_error\":" + real(cmp.abs_error) +
             "}\n";
  }
  return {};
}

std::string run_simulate(const Options& o, CLI::App& sub, Format format) {
  const eq_sim_config cfg = sim_config(o, sub);
  eq_sim_result* result = nullptr;
  check(eq_simulate_energy_queue(&cfg, &result));
  std::unique_ptr<eq_sim_result, decltype(&eq_sim_result_destroy)> guard(result, eq_sim_result_destroy);

  double se = 0.0;
  const bool has_se = eq_sim_nonempty_stderr(result, &se) != 0;
  const std::string se_text = has_se ? real(se) : "";
  const std::size_t levels = eq_sim_histogram_size(result);

  struct Field {
    const char* name;
    std::string value;
    bool quoted;
  };
  const std::vector<Field> fields = {
      {"delta", real(cfg.spec.delta), false},
      {"mu_e", real(cfg.spec.mu_e), false},
      {"capacity", capacity_text(cfg.spec.capacity), cfg.spec.capacity == EQ_CAPACITY_UNBOUNDED},
      {"slots", std::to_string(cfg.slots), false},
      {"warmup", std::to_string(cfg.warmup_slots), false},
      {"seed", std::to_string(eq_sim_seed(result)), false},
      {"generator", eq_sim_generator(result), true},
      {"measured_slots", std::to_string(eq_sim_measured_slots(result)), false},
      {"nonempty_fraction", real(eq_sim_nonempty_fraction(result)), false},
      {"nonempty_stderr", se_text, false},
      {"max_occupancy", std::to_string(eq_sim_max_occupancy(result)), false},
      {"admitted", std::to_string(eq_sim_admitted(result)), false},
      {"departed", std::to_string(eq_sim_departed(result)), false},
      {"dropped", std::to_string(eq_sim_dropped(result)), false},
      {"final_occupancy", std::to_string(eq_sim_final_occupancy(result)), false},
  };

  std::string s;
  switch (format) {
    case Format::Human:
      for (const auto& f : fields) s += std::string(f.name) + "=" + (f.value.empty() ? "-" : f.value) + "\n";
      for (std::size_t j = 0; j < levels; ++j)
        s += "histogram[" + std::to_string(j) + "]=" + std::to_string(eq_sim_histogram_count(result, j)) + "\n";
      break;
    case Format::Csv:
      for (std::size_t i = 0; i < fields.size(); ++i) s += (i ? "," : "") + std::string(fields[i].name);
      s += "\n";
      for (std::size_t i = 0; i < fields.size(); ++i) s += (i ? "," : "") + fields[i].value;
      s += "\n";
      break;
    case Format::Json:
      s += "{";
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& f = fields[i];
        if (f.value.empty()) continue;
        if (s.size() > 1) s += ",";
        s += "\"" + std::string(f.name) + "\":" + (f.quoted ? "\"" + f.value + "\"" : f.value);
      }
      s += ",\"histogram\":[";
      for (std::size_t j = 0; j < levels; ++j) s += (j ? "," : "") + std::to_string(eq_sim_histogram_count(result, j));
      s += "]}\n";
      break;
  }
  return s;
}

std::string run_gated(const Options& o, CLI::App& sub, Format format) {
  if (sub.count("--lambda-p") == 0) throw UsageError("--lambda-p: required");
  const double lambda_p = parse_probability(o.lambda_p, "--lambda-p");
  const double success = parse_probability(o.success_prob, "--success-prob");
  const eq_sim_config cfg = sim_config(o, sub);
  eq_gated_result g{};
  check(eq_simulate_gated_source(lambda_p, success, &cfg, 0.0, &g));

  const std::vector<std::pair<const char*, std::string>> fields = {
      {"lambda_p", real(g.arrival_rate)},
      {"success_prob", real(success)},
      {"delta", real(cfg.spec.delta)},
      {"mu_e", real(cfg.spec.mu_e)},
      {"capacity", format == Format::Json ? capacity_json(cfg.spec.capacity) : capacity_text(cfg.spec.capacity)},
      {"slots", std::to_string(cfg.slots)},
      {"warmup", std::to_string(cfg.warmup_slots)},
      {"seed", std::to_string(cfg.seed)},
      {"measured_slots", std::to_string(g.measured_slots)},
      {"delivered_throughput", real(g.delivered_throughput)},
      {"mean_queue_length", real(g.mean_queue_length)},
      {"queue_growth_slope", real(g.queue_growth_slope)},
      {"stable_verdict", g.stable_verdict ? "true" : "false"},
      {"borderline", g.borderline ? "true" : "false"},
  };
  std::string s;
  switch (format) {
    case Format::Human:
      for (const auto& [k, v] : fields) s += std::string(k) + "=" + v + "\n";
      break;
    case Format::Csv:
      for (std::size_t i = 0; i < fields.size(); ++i) s += (i ? "," : "") + std::string(fields[i].first);
      s += "\n";
      for (std::size_t i = 0; i < fields.size(); ++i) s += (i ? "," : "") + fields[i].second;
      s += "\n";
      break;
    case Format::Json:
      s += "{";
      for (std::size_t i = 0; i < fields.size(); ++i)
        s += (i ? ",\"" : "\"") + std::string(fields[i].first) + "\":" + fields[i].second;
      s += "}\n";
      break;
  }
  return s;
}

std::string run_sweep(const Options& o, CLI::App& sub, Format format) {
  eq_sweep_config* cfg = nullptr;
  if (sub.count("--preset")) {
    if (o.preset != "reproduce-comment")
      throw UsageError("--preset: unknown preset '" + o.preset + "' (available: reproduce-comment)");
    check(eq_sweep_config_preset(o.preset.c_str(), &cfg));
  } else {
    if (sub.count("--deltas") == 0) throw UsageError("--deltas: required unless --preset is given");
    if (sub.count("--capacities") == 0) throw UsageError("--capacities: required unless --preset is given");
    check(eq_sweep_config_create(&cfg));
  }
  std::unique_ptr<eq_sweep_config, decltype(&eq_sweep_config_destroy)> cfg_guard(cfg, eq_sweep_config_destroy);

  if (sub.count("--deltas")) {
    check(eq_sweep_config_clear_deltas(cfg));
    for (const auto& item : split_list(o.deltas))
      check(eq_sweep_config_add_delta(cfg, parse_probability(item, "--deltas")));
  }
  if (sub.count("--capacities")) {
    check(eq_sweep_config_clear_capacities(cfg));
    for (const auto& item : split_list(o.capacities))
      check(eq_sweep_config_add_capacity(cfg, parse_capacity(item, "--capacities", true)));
  }
  check(eq_sweep_config_set_mu_e(cfg, parse_probability(o.mu_e, "--mu-e")));
  const uint64_t slots = parse_count(o.slots, "--slots", 1);
  const uint64_t seed = parse_count(o.seed, "--seed", 0);
  check(eq_sweep_config_set_simulate(cfg, o.simulate ? 1 : 0, slots, seed));
  const uint64_t jobs = parse_count(o.jobs, "--jobs", 1);
  if (jobs > 1024) throw UsageError("--jobs: must be <= 1024, got " + o.jobs);
  check(eq_sweep_config_set_jobs(cfg, static_cast<unsigned>(jobs)));

  eq_sweep* sweep = nullptr;
  check(eq_sweep_run(cfg, &sweep));
  std::unique_ptr<eq_sweep, decltype(&eq_sweep_destroy)> sweep_guard(sweep, eq_sweep_destroy);

  if (format != Format::Human) {
    const eq_format f = format == Format::Csv ? EQ_FORMAT_CSV : EQ_FORMAT_JSON;
    std::size_t needed = 0;
    check(eq_sweep_render(sweep, f, nullptr, 0, &needed));
    std::string text(needed + 1, '\0');
    check(eq_sweep_render(sweep, f, text.data(), text.size(), &needed));
    text.resize(needed);
    return text;
  }

  auto opt = [](int has, double v) { return has ? real(v) : std::string("-"); };
  std::string s = cell("delta", 8) + cell("capacity", 10) + cell("exact") + cell("mm1c") + cell("corrected") +
                  cell("mc") + cell("mc_stderr") + cell("err_mm1c") + "\n";
  const std::size_t n = eq_sweep_row_count(sweep);
  for (std::size_t i = 0; i < n; ++i) {
    eq_sweep_row row{};
    check(eq_sweep_get_row(sweep, i, &row));
    s += cell(real(row.delta), 8) + cell(capacity_text(row.capacity), 10) + cell(opt(row.has_exact, row.exact_nonempty)) +
         cell(real(row.mm1c_nonempty)) + cell(real(row.corrected_nonempty)) + cell(opt(row.has_mc, row.mc_nonempty)) +
         cell(opt(row.has_mc_stderr, row.mc_stderr)) + cell(opt(row.has_err, row.err_mm1c_vs_exact));
    if (row.failed) s += "  error: " + std::string(eq_sweep_row_error(sweep, i));
    s += "\n";
  }
  return s;
}

void add_output_flags(CLI::App* sub, Options& o) {
  sub->add_option("--format", o.format, "csv | json | human");
  sub->add_option("--output", o.output, "Write to this file instead of standard output");
}

void add_queue_flags(CLI::App* sub, Options& o) {
  sub->add_option("--delta", o.delta, "Arrival probability per slot");
  sub->add_option("--capacity", o.capacity, "Buffer capacity in packets, or inf");
  sub->add_option("--mu-e", o.mu_e, "Service probability per nonempty slot (default 1)");
}

void add_sim_flags(CLI::App* sub, Options& o) {
  sub->add_option("--slots", o.slots, "Slots to simulate (default 1000000)");
  sub->add_option("--seed", o.seed, "64-bit seed (default 1)");
  sub->add_option("--warmup", o.warmup, "Slots excluded from statistics (default 1% of slots, min 1000)");
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact analysis and simulation of a slotted energy-harvesting queue", "energyq"};
  app.require_subcommand(1);
  Options o;

  auto* chain = app.add_subcommand("chain", "Stationary distribution of the exact Markov chain");
  add_queue_flags(chain, o);
  add_output_flags(chain, o);

  auto* closed = app.add_subcommand("closed-form", "M/M/1/c formula against the corrected value");
  closed->add_option("--delta", o.delta, "Arrival probability per slot");
  closed->add_option("--capacity", o.capacity, "Buffer capacity in packets, or inf");
  add_output_flags(closed, o);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation of the energy queue");
  add_queue_flags(simulate, o);
  add_sim_flags(simulate, o);
  add_output_flags(simulate, o);

  auto* gated = app.add_subcommand("gated", "Data source gated by the energy queue");
  add_queue_flags(gated, o);
  add_sim_flags(gated, o);
  gated->add_option("--lambda-p", o.lambda_p, "Data arrival probability per slot");
  gated->add_option("--success-prob", o.success_prob, "Transmission success probability (default 1)");
  add_output_flags(gated, o);

  auto* sweep = app.add_subcommand("sweep", "Grid of exact, closed-form and simulated results");
  sweep->add_option("--deltas", o.deltas, "Comma-separated arrival probabilities");
  sweep->add_option("--capacities", o.capacities, "Comma-separated capacities (inf allowed)");
  sweep->add_option("--mu-e", o.mu_e, "Service probability per nonempty slot (default 1)");
  sweep->add_flag("--simulate", o.simulate, "Add Monte Carlo columns");
  sweep->add_option("--slots", o.slots, "Slots per simulated row (default 1000000)");
  sweep->add_option("--seed", o.seed, "Base seed (default 1)");
  sweep->add_option("--preset", o.preset, "Named grid: reproduce-comment");
  sweep->add_option("--jobs", o.jobs, "Rows evaluated concurrently (default 1)");
  add_output_flags(sweep, o);

  std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
  std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "energyq: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const Format format = parse_format(o.format);
    std::string text;
    if (sub == chain)
      text = run_chain(o, *sub, format);
    else if (sub == closed)
      text = run_closed_form(o, *sub, format);
    else if (sub == simulate)
      text = run_simulate(o, *sub, format);
    else if (sub == gated)
      text = run_gated(o, *sub, format);
    else
      text = run_sweep(o, *sub, format);
    write_output(text, o.output, out);
  } catch (const UsageError& e) {
    err << "energyq: " << e.what() << "\n";
    return kUsageError;
  } catch (const ComputationError& e) {
    err << "energyq: " << e.what() << "\n";
    return kComputationError;
  }
  return kOk;
}

}  // namespace energyq::cli
