#include "energyq/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "energyq/chain.hpp"
#include "energyq/closedform.hpp"
#include "energyq/format.hpp"
#include "energyq/montecarlo.hpp"
#include "energyq/rng.hpp"

namespace energyq::sweep {

namespace {

SweepRow evaluate_row(const SweepConfig& cfg, double delta, Capacity capacity, std::size_t index) {
  SweepRow row;
  row.delta = delta;
  row.capacity = capacity;
  try {
    row.mm1c_nonempty = closedform::mm1c_nonempty(delta, capacity).value;
    row.corrected_nonempty = closedform::md1c_nonempty(delta);

    const QueueSpec spec{delta, cfg.mu_e, capacity};
    if (capacity.is_finite()) {
      const auto dist = chain::solve_stationary(chain::build_energy_chain(spec));
      row.exact_nonempty = chain::nonempty_prob(dist);
      row.err_mm1c_vs_exact = row.mm1c_nonempty - *row.exact_nonempty;
    }
    if (cfg.simulate) {
      montecarlo::SimConfig sim;
      sim.spec = spec;
      sim.slots = cfg.sim_slots;
      sim.seed = rng::derive_seed(cfg.base_seed, index);
      sim.warmup_slots = montecarlo::default_warmup(cfg.sim_slots);
      const auto result = montecarlo::simulate_energy_queue(sim);
      row.mc_nonempty = result.nonempty_fraction;
      row.mc_stderr = result.nonempty_stderr;
    }
  } catch (const Error& e) {
    row.error = e.what();
  }
  return row;
}

void put_optional(std::string& line, const std::optional<double>& v) {
  if (v) line += format_real(*v);
}

std::string json_object(const SweepRow& row) {
  std::string s = "{\"delta\":" + format_real(row.delta) + ",\"capacity\":";
  s += row.capacity.is_unbounded() ? std::string("\"inf\"") : row.capacity.to_string();
  auto field = [&s](const char* name, const std::optional<double>& v) {
    if (!v) return;
    s += ",\"";
    s += name;
    s += "\":";
    s += format_real(*v);
  };
  field("exact_nonempty", row.exact_nonempty);
  field("mm1c_nonempty", row.mm1c_nonempty);
  field("corrected_nonempty", row.corrected_nonempty);
  field("mc_nonempty", row.mc_nonempty);
  field("mc_stderr", row.mc_stderr);
  field("err_mm1c_vs_exact", row.err_mm1c_vs_exact);
  if (row.error) s += ",\"error\":" + nlohmann::json(*row.error).dump();
  s += '}';
  return s;
}

std::size_t write_checked(std::ostream& out, const std::string& text) {
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "failed to write output");
  return text.size();
}

}  // namespace

void SweepConfig::validate() const {
  if (deltas.empty()) throw Error(ErrorCode::InvalidConfig, "sweep needs at least one delta");
  if (capacities.empty()) throw Error(ErrorCode::InvalidConfig, "sweep needs at least one capacity");
  for (double d : deltas) require_probability(d, "delta");
  require_probability(mu_e, "mu_e");
  for (const auto& c : capacities)
    if (c.is_finite() && c.packets() < 1) throw Error(ErrorCode::InvalidParameter, "capacity must be >= 1");
  if (simulate && sim_slots < 1) throw Error(ErrorCode::InvalidConfig, "sim_slots must be >= 1");
}

SweepConfig reproduce_comment_preset() {
  SweepConfig cfg;
  cfg.deltas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  for (std::uint64_t c : {1, 2, 5, 10, 50}) cfg.capacities.push_back(Capacity::finite(c));
  return cfg;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();

  std::vector<double> deltas = cfg.deltas;
  std::vector<Capacity> capacities = cfg.capacities;
  std::stable_sort(deltas.begin(), deltas.end());
  std::stable_sort(capacities.begin(), capacities.end());

  struct Point {
    double delta;
    Capacity capacity;
  };
  std::vector<Point> points;
  points.reserve(deltas.size() * capacities.size());
  for (double d : deltas)
    for (const auto& c : capacities) points.push_back({d, c});

  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++)
      rows[i] = evaluate_row(cfg, points[i].delta, points[i].capacity, i);
  };
  const unsigned workers = std::max(1U, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(points.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return rows;
}

std::size_t emit_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  std::string text(kCsvHeader);
  text += '\n';
  for (const auto& row : rows) {
    std::string line = format_real(row.delta);
    line += ',' + row.capacity.to_string() + ',';
    put_optional(line, row.exact_nonempty);
    line += ',' + format_real(row.mm1c_nonempty);
    line += ',' + format_real(row.corrected_nonempty) + ',';
    put_optional(line, row.mc_nonempty);
    line += ',';
    put_optional(line, row.mc_stderr);
    line += ',';
    put_optional(line, row.err_mm1c_vs_exact);
    text += line;
    text += '\n';
  }
  return write_checked(out, text);
}

std::size_t emit_json(const std::vector<SweepRow>& rows, std::ostream& out) {
  if (rows.empty()) return write_checked(out, "[]\n");
  std::string text = "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    text += "  " + json_object(rows[i]);
    text += i + 1 < rows.size() ? ",\n" : "\n";
  }
  text += "]\n";
  return write_checked(out, text);
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  emit_csv(rows, os);
  return os.str();
}

std::string to_json(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  emit_json(rows, os);
  return os.str();
}

std::vector<SweepRow> parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidParameter, std::string("malformed sweep JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::InvalidParameter, "sweep JSON must be an array");

  std::vector<SweepRow> rows;
  rows.reserve(doc.size());
  try {
    for (const auto& obj : doc) {
      SweepRow row;
      row.delta = obj.at("delta").get<double>();
      const auto& cap = obj.at("capacity");
      if (cap.is_string()) {
        row.capacity = Capacity::parse(cap.get<std::string>());
      } else {
        row.capacity = Capacity::finite(cap.get<std::uint64_t>());
      }
      auto optional_field = [&obj](const char* name) -> std::optional<double> {
        if (!obj.contains(name)) return std::nullopt;
        return obj.at(name).get<double>();
      };
      row.exact_nonempty = optional_field("exact_nonempty");
      row.mm1c_nonempty = obj.at("mm1c_nonempty").get<double>();
      row.corrected_nonempty = obj.at("corrected_nonempty").get<double>();
      row.mc_nonempty = optional_field("mc_nonempty");
      row.mc_stderr = optional_field("mc_stderr");
      row.err_mm1c_vs_exact = optional_field("err_mm1c_vs_exact");
      if (obj.contains("error")) row.error = obj.at("error").get<std::string>();
      rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidParameter, std::string("malformed sweep row: ") + e.what());
  }
  return rows;
}

}  // namespace energyq::sweep
