#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "polygas/beg.hpp"
#include "polygas/beg_io.hpp"
#include "polygas/model_io.hpp"
#include "support/fixtures.hpp"

using nlohmann::json;
using namespace polygas;

namespace {

const std::string cli = POLYGAS_CLI_PATH;
int counter = 0;

std::string temp_path(const std::string& stem) {
  const auto dir = std::filesystem::temp_directory_path() / "polygas_cli_tests";
  std::filesystem::create_directories(dir);
  return (dir / ("t" + std::to_string(counter++) + "_" + stem)).string();
}

int run_cli(const std::string& args) {
  const int status = std::system((cli + " " + args + " > /dev/null 2> /dev/null").c_str());
  return WEXITSTATUS(status);
}

int run_cli_capture(const std::string& args, const std::string& stderr_path) {
  const int status =
      std::system((cli + " " + args + " > /dev/null 2> " + stderr_path).c_str());
  return WEXITSTATUS(status);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<json> read_records(const std::string& path) {
  std::ifstream in(path);
  std::vector<json> records;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) records.push_back(json::parse(line));
  return records;
}

const json* find_record(const std::vector<json>& records, const std::string& kind) {
  for (const auto& r : records)
    if (r.at("record") == kind) return &r;
  return nullptr;
}

std::string write_triangle_model() {
  const auto path = temp_path("triangle.json");
  model::save_space(fixtures::triangle_hardcore(0.2), path);
  return path;
}

std::string write_beg_params(double beta, int window, int n_max) {
  beg::BegParams p;
  p.d = 2;
  p.j1 = 1.0;
  p.j_amp = 1.0;
  p.lambda = 1.0;
  p.lambda_prime = 2.0;
  p.beta = beta;
  p.crystal_field = beg::coupling_j(p).value + 1.0;
  beg::BegRunInput input{p, std::nullopt, std::nullopt};
  if (window > 0) {
    beg::Window w{2, {window, window, 0, 0}};
    input.window = w;
  }
  if (n_max > 0) input.n_max = n_max;
  const auto path = temp_path("beg.json");
  std::ofstream out(path);
  out << beg::beg_input_to_json(input).dump(2) << '\n';
  return path;
}

}  // namespace

TEST_CASE("ursell subcommand on the triangle fixture") {
  const auto model_path = write_triangle_model();
  const auto out = temp_path("out.jsonl");
  const int code =
      run_cli("--output " + out + " ursell --model " + model_path + " --config g1,g2,g3");
  CHECK(code == 0);
  const auto records = read_records(out);
  const auto* record = find_record(records, "ursell");
  REQUIRE(record != nullptr);
  CHECK(record->at("value").get<double>() == doctest::Approx(2.0));
  CHECK(find_record(records, "run") != nullptr);
  CHECK(find_record(records, "done") != nullptr);
}

TEST_CASE("partition subcommand") {
  const auto model_path = write_triangle_model();
  const auto out = temp_path("out.jsonl");
  const int code = run_cli("--output " + out + " partition --model " + model_path);
  CHECK(code == 0);
  const auto records = read_records(out);
  const auto* record = find_record(records, "partition");
  REQUIRE(record != nullptr);
  CHECK(record->at("value").get<double>() == doctest::Approx(1.0 + 3 * 0.2));
  CHECK(record->at("exact").get<bool>());
}

TEST_CASE("verify-identity subcommand passes at its tolerance") {
  const auto out = temp_path("out.jsonl");
  const int code =
      run_cli("--output " + out + " --seed 7 verify-identity --n 3 --trials 100");
  CHECK(code == 0);
  const auto records = read_records(out);
  const auto* record = find_record(records, "identity-summary");
  REQUIRE(record != nullptr);
  CHECK(record->at("max_residual").get<double>() < 1e-7);
  CHECK(record->at("pass").get<bool>());
}

TEST_CASE("reports are byte-identical across reruns with --no-timestamp") {
  const auto out1 = temp_path("a.jsonl");
  const auto out2 = temp_path("b.jsonl");
  const std::string args = "--no-timestamp --seed 99 verify-identity --n 3 --trials 40";
  CHECK(run_cli("--output " + out1 + " " + args) == 0);
  CHECK(run_cli("--output " + out2 + " " + args) == 0);
  const auto text1 = read_file(out1);
  CHECK(!text1.empty());
  CHECK(text1 == read_file(out2));
}

TEST_CASE("check-criterion exit codes distinguish pass from fail") {
  const auto pass_model = temp_path("pass.json");
  model::save_space(fixtures::single_hardcore(0.3), pass_model);
  const auto fail_model = temp_path("fail.json");
  model::save_space(fixtures::single_hardcore(0.5), fail_model);

  const auto mu_path = temp_path("mu.json");
  {
    std::ofstream out(mu_path);
    out << R"({"mu": {"g": 1.0}})" << '\n';
  }
  CHECK(run_cli("check-criterion --model " + pass_model + " --mu " + mu_path) == 0);
  CHECK(run_cli("check-criterion --model " + fail_model + " --mu " + mu_path) == 1);
  CHECK(run_cli("optimize-mu --model " + pass_model) == 0);
  CHECK(run_cli("optimize-mu --model " + fail_model) == 1);
}

TEST_CASE("malformed inputs exit with code 2 and point at the source line") {
  const auto bad = temp_path("bad.json");
  {
    std::ofstream out(bad);
    out << "{\n  \"polymers\": [\"a\",\n";
  }
  const auto err_path = temp_path("stderr.txt");
  CHECK(run_cli_capture("ursell --model " + bad + " --config a", err_path) == 2);
  const auto diagnostic = read_file(err_path);
  CHECK(diagnostic.find("line 3") != std::string::npos);
  CHECK(diagnostic.find("column") != std::string::npos);
  CHECK(run_cli("ursell --model does_not_exist.json --config a") == 2);
  CHECK(run_cli("no-such-subcommand") == 2);
  CHECK(run_cli("ursell") == 2);  // missing required flags

  // capacity errors also map to 2
  const auto model_path = write_triangle_model();
  CHECK(run_cli("ursell --model " + model_path +
                " --config g1,g1,g1,g1,g1,g1,g1,g1,g1") == 2);
}

TEST_CASE("beg-beta0 reproduces the frozen constants") {
  const auto params = write_beg_params(1.0, 0, 0);
  const auto out = temp_path("out.jsonl");
  CHECK(run_cli("--output " + out + " beg-beta0 --params " + params) == 0);
  const auto records = read_records(out);
  const auto* constants = find_record(records, "beg-constants");
  REQUIRE(constants != nullptr);
  CHECK(constants->at("j2").get<double>() == doctest::Approx(5.159472534785811).epsilon(1e-10));
  const auto* beta0 = find_record(records, "beta0");
  REQUIRE(beta0 != nullptr);
  CHECK(beta0->at("value").get<double>() == doctest::Approx(6.987412795255304).epsilon(1e-9));
  CHECK(beta0->at("residual").get<double>() < 1e-10);
}

TEST_CASE("beg reports echo their inputs and reproduce byte-for-byte") {
  const auto params = write_beg_params(1.0, 0, 0);
  const auto out1 = temp_path("a.jsonl");
  const auto out2 = temp_path("b.jsonl");
  CHECK(run_cli("--no-timestamp --output " + out1 + " beg-beta0 --params " + params) == 0);
  CHECK(run_cli("--no-timestamp --output " + out2 + " beg-beta0 --params " + params) == 0);
  CHECK(read_file(out1) == read_file(out2));
  const auto records = read_records(out1);
  const auto* inputs = find_record(records, "inputs");
  REQUIRE(inputs != nullptr);
  CHECK(inputs->at("params").at("lambda").get<double>() == 1.0);
}

TEST_CASE("beg-check passes cold and fails hot") {
  const auto cold = write_beg_params(7.99, 5, 2);
  CHECK(run_cli("beg-check --params " + cold) == 0);
  const auto hot = write_beg_params(0.1, 5, 2);
  CHECK(run_cli("beg-check --params " + hot) == 1);
}

TEST_CASE("bijection-check subcommand") {
  const auto params = write_beg_params(0.9, 2, 0);
  const auto out = temp_path("out.jsonl");
  CHECK(run_cli("--output " + out + " --tolerance 1e-10 bijection-check --params " + params) == 0);
  const auto records = read_records(out);
  const auto* record = find_record(records, "bijection");
  REQUIRE(record != nullptr);
  CHECK(record->at("rel_error").get<double>() < 1e-10);
  CHECK(record->at("spin_configs").get<int>() == 81);
  CHECK(record->at("pass").get<bool>());
}
