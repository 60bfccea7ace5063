#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "energyq-cli");
  std::ostringstream out, err;
  const int code = energyq::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

// Runs the installed binary, for behaviour that depends on the real process.
int run_binary(const std::string& args) {
  const std::string cmd = std::string("\"") + ENERGYQ_CLI_BINARY + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_scratch";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

}  // namespace

TEST_CASE("chain at delta 0.7") {
  const auto r = run({"chain", "--delta", "0.7", "--capacity", "10"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pi[0]=0.3\n") != std::string::npos);
  CHECK(r.out.find("pi[1]=0.7\n") != std::string::npos);
  CHECK(r.out.find("nonempty=0.7\n") != std::string::npos);
  CHECK(r.err.empty());
}

TEST_CASE("out of range delta is a usage error") {
  const auto r = run({"closed-form", "--delta", "1.2", "--capacity", "3"});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(r.err.find("--delta") != std::string::npos);
  CHECK(r.err.find("[0,1]") != std::string::npos);
}

TEST_CASE("chain rejects unbounded capacity") {
  const auto r = run({"chain", "--delta", "0.5", "--capacity", "inf"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--capacity") != std::string::npos);
}

TEST_CASE("inf is accepted where supported") {
  CHECK(run({"closed-form", "--delta", "0.5", "--capacity", "inf"}).code == 0);
  CHECK(run({"simulate", "--delta", "0.5", "--capacity", "inf", "--slots", "5000"}).code == 0);
  const auto s = run({"sweep", "--deltas", "0.5", "--capacities", "inf", "--format", "csv"});
  CHECK(s.code == 0);
  CHECK(s.out.find("\n0.5,inf,,0.5,0.5,,,\n") != std::string::npos);
}

TEST_CASE("malformed invocations") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"chain", "--delta", "0.5"}).code == 2);
  CHECK(run({"chain", "--delta", "abc", "--capacity", "2"}).code == 2);
  CHECK(run({"chain", "--delta", "0.5", "--capacity", "0"}).code == 2);
  CHECK(run({"chain", "--delta", "0.5", "--capacity", "2", "--format", "xml"}).code == 2);
  CHECK(run({"simulate", "--delta", "0.5", "--capacity", "2", "--slots", "10", "--warmup", "10"}).code == 2);
  CHECK(run({"gated", "--delta", "0.9", "--capacity", "1"}).code == 2);
  CHECK(run({"sweep", "--preset", "unknown"}).code == 2);
  CHECK(run({"sweep", "--deltas", "0.5,x", "--capacities", "2"}).code == 2);
}

TEST_CASE("preset sweep to file matches the golden csv") {
  const auto out = scratch("preset.csv");
  CHECK(run_binary("sweep --preset reproduce-comment --format csv --output \"" + out.string() + "\"") == 0);
  REQUIRE(fs::exists(out));
  CHECK(slurp(out) == slurp(fs::path(ENERGYQ_GOLDEN_DIR) / "reproduce_comment.csv"));
}

TEST_CASE("in-process sweep matches the golden csv") {
  const auto r = run({"sweep", "--preset", "reproduce-comment", "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out == slurp(fs::path(ENERGYQ_GOLDEN_DIR) / "reproduce_comment.csv"));
}

TEST_CASE("no partial file on failure") {
  const auto bad = scratch("bad.csv");
  CHECK(run({"sweep", "--deltas", "2", "--capacities", "2", "--output", bad.string()}).code == 2);
  CHECK_FALSE(fs::exists(bad));
  CHECK(run({"sweep", "--deltas", "0.5", "--capacities", "2", "--output", "/nonexistent-dir/x.csv"}).code == 1);
  for (const auto& e : fs::directory_iterator(bad.parent_path()))
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
}

TEST_CASE("output file holds what stdout would") {
  const auto f = scratch("chain.json");
  const std::vector<std::string> base = {"chain", "--delta", "0.3", "--mu-e", "0.7", "--capacity", "4", "--format", "json"};
  auto with_file = base;
  with_file.insert(with_file.end(), {"--output", f.string()});
  const auto r = run(with_file);
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(f) == run(base).out);
}

TEST_CASE("json output parses for every subcommand") {
  const std::vector<std::vector<std::string>> cases = {
      {"chain", "--delta", "0.5", "--mu-e", "0.5", "--capacity", "2"},
      {"closed-form", "--delta", "0.9", "--capacity", "2"},
      {"closed-form", "--delta", "1", "--capacity", "inf"},
      {"simulate", "--delta", "0.9", "--capacity", "2", "--slots", "20000"},
      {"gated", "--lambda-p", "0.5", "--delta", "0.9", "--capacity", "1", "--slots", "20000"},
      {"sweep", "--preset", "reproduce-comment"},
      {"sweep", "--deltas", "0.2,0.8", "--capacities", "1,inf", "--simulate", "--slots", "5000"},
  };
  for (auto args : cases) {
    args.insert(args.end(), {"--format", "json"});
    const auto r = run(args);
    CHECK(r.code == 0);
    CHECK(nlohmann::json::accept(r.out));
  }
  const auto doc = nlohmann::json::parse(run({"chain", "--delta", "0.5", "--mu-e", "0.5", "--capacity", "2", "--format", "json"}).out);
  CHECK(doc["pi"].size() == 3);
  CHECK(doc["pi"][1].get<double>() == doctest::Approx(0.4));
}

TEST_CASE("csv headers are fixed") {
  CHECK(first_line(run({"sweep", "--deltas", "0.5", "--capacities", "2", "--format", "csv"}).out) ==
        "delta,capacity,exact_nonempty,mm1c_nonempty,corrected_nonempty,mc_nonempty,mc_stderr,err_mm1c_vs_exact");
  CHECK(first_line(run({"sweep", "--deltas", "0.5", "--capacities", "2", "--simulate", "--slots", "4000", "--format", "csv"}).out) ==
        "delta,capacity,exact_nonempty,mm1c_nonempty,corrected_nonempty,mc_nonempty,mc_stderr,err_mm1c_vs_exact");
  CHECK(first_line(run({"chain", "--delta", "0.5", "--capacity", "2", "--format", "csv"}).out) == "state,pi");
  CHECK(first_line(run({"closed-form", "--delta", "0.5", "--capacity", "2", "--format", "csv"}).out) ==
        "delta,capacity,mm1c_nonempty,mm1c_is_limit,corrected_nonempty,abs_error");
}

TEST_CASE("same argv gives the same bytes") {
  const std::vector<std::string> sim = {"simulate", "--delta", "0.9", "--capacity", "2", "--slots", "50000", "--seed", "7"};
  CHECK(run(sim).out == run(sim).out);
  const std::vector<std::string> sweep = {"sweep", "--preset", "reproduce-comment", "--simulate", "--slots", "3000", "--format", "json"};
  const auto a = run(sweep);
  CHECK(a.out == run(sweep).out);
  auto parallel = sweep;
  parallel.insert(parallel.end(), {"--jobs", "4"});
  CHECK(run(parallel).out == a.out);

  auto other_seed = sim;
  other_seed.back() = "8";
  CHECK(run(other_seed).out != run(sim).out);
}

TEST_CASE("corrected column never carries the mm1c value") {
  for (const char* format : {"human", "csv", "json"}) {
    const auto r = run({"closed-form", "--delta", "0.9", "--capacity", "2", "--format", format});
    REQUIRE(r.code == 0);
    if (std::string(format) == "json") {
      const auto doc = nlohmann::json::parse(r.out);
      CHECK(doc["corrected_nonempty"] == 0.9);
      CHECK(doc["mm1c_nonempty"].get<double>() == doctest::Approx(171.0 / 271.0));
    } else if (std::string(format) == "human") {
      CHECK(r.out.find("corrected_nonempty=0.9\n") != std::string::npos);
      CHECK(r.out.find("mm1c_nonempty=0.630996309963\n") != std::string::npos);
    } else {
      CHECK(r.out.find("\n0.9,2,0.630996309963,false,0.9,0.269003690037\n") != std::string::npos);
    }
  }
  const auto doc = nlohmann::json::parse(run({"sweep", "--preset", "reproduce-comment", "--format", "json"}).out);
  for (const auto& row : doc) CHECK(row["corrected_nonempty"] == row["delta"]);
}

TEST_CASE("human sweep table") {
  const auto r = run({"sweep", "--deltas", "0.9", "--capacities", "2,inf"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::vector<std::string> ls;
  for (std::string l; std::getline(in, l);) ls.push_back(l);
  REQUIRE(ls.size() == 3);
  CHECK(ls[0].find("corrected") != std::string::npos);
  CHECK(ls[1].size() == ls[0].size());
  CHECK(ls[2].size() == ls[0].size());
}

TEST_CASE("gated verdicts from the command line") {
  const auto stable = run({"gated", "--lambda-p", "0.85", "--delta", "0.9", "--capacity", "1", "--slots", "300000", "--format", "json"});
  REQUIRE(stable.code == 0);
  CHECK(nlohmann::json::parse(stable.out)["stable_verdict"] == true);
  const auto unstable = run({"gated", "--lambda-p", "0.95", "--delta", "0.9", "--capacity", "1", "--slots", "300000", "--format", "json"});
  REQUIRE(unstable.code == 0);
  CHECK(nlohmann::json::parse(unstable.out)["stable_verdict"] == false);
}
