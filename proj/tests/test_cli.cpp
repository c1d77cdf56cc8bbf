#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "moltiming/cli.hpp"

using namespace moltiming::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

double value_of(const std::string& csv_line) {
  return std::stod(csv_line.substr(csv_line.rfind(',') + 1));
}

}  // namespace

TEST_CASE("threshold command") {
  const auto r = run({"threshold", "--c", "2", "--delta", "1", "--m", "1,3,15"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "m,theta");
  CHECK(value_of(rows[1]) == doctest::Approx(1.372).epsilon(1e-3));
  CHECK(value_of(rows[2]) == doctest::Approx(1.286).epsilon(1e-3));
  CHECK(value_of(rows[3]) == doctest::Approx(1.146).epsilon(1e-3));
}

TEST_CASE("usage errors exit with 2") {
  const auto zero = run({"threshold", "--c", "2", "--delta", "1", "--m", "0"});
  CHECK(zero.code == 2);
  CHECK(zero.err.find("M must be ≥ 1") != std::string::npos);
  CHECK(run({"threshold", "--c", "-1", "--delta", "1", "--m", "1"}).code == 2);
  CHECK(run({"threshold", "--c", "1", "--channel-preset", "unit"}).code == 2);
  CHECK(run({"pe", "--detector", "nope", "--c", "1"}).code == 2);
  CHECK(run({"pe", "--detector", "ml", "--c", "1"}).code == 2);
  CHECK(run({"sweep", "--fig", "9"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("pe command") {
  const auto fa = run({"pe", "--detector", "fa", "--c", "1", "--delta", "1", "--m", "2"});
  REQUIRE(fa.code == 0);
  CHECK(std::abs(value_of(lines(fa.out)[1]) - 0.2186) < 5e-4);
  const auto m1 = run({"pe", "--detector", "fa", "--c", "1", "--delta", "1", "--m", "1"});
  const auto single = run({"pe", "--detector", "ml-single", "--c", "1", "--delta", "1"});
  CHECK(value_of(lines(m1.out)[1]) == value_of(lines(single.out)[1]));
  const auto gray = run({"pe", "--detector", "gray-fa", "--c", "1", "--delta", "3", "--bits", "3", "--m", "25"});
  REQUIRE(gray.code == 0);
  const auto lines_gray = lines(gray.out);
  CHECK(lines_gray[1].rfind("\"pe_gray[M=25,L=3]\"", 0) == 0);
  const double g = value_of(lines_gray[1]);
  CHECK(g > 0.005);
  CHECK(g < 0.02);
}

TEST_CASE("exponent and mismatch commands") {
  const auto e = run({"exponent", "--c", "0.5", "--delta", "0.1"});
  REQUIRE(e.code == 0);
  const auto rows = lines(e.out);
  CHECK(std::abs(value_of(rows[1]) - 0.025674) < 1e-6);
  CHECK(std::abs(value_of(rows[2]) - 0.044106) < 5e-4);
  const auto mm = run({"mismatch", "--c", "1", "--delta", "5", "--m", "5"});
  REQUIRE(mm.code == 0);
  CHECK(std::abs(value_of(lines(mm.out).back()) - 0.001) < 1e-4);
}

TEST_CASE("required-m command") {
  const auto r = run({"required-m", "--c", "1", "--delta", "1", "--target", "0.4"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out)[1] == "required_m,1");
  CHECK(run({"required-m", "--c", "1", "--delta", "1", "--target", "0.7"}).code == 2);
}

TEST_CASE("sweep output is reproducible and thread independent") {
  const std::vector<std::string> base{"sweep", "--detector", "fa,ml", "--vary", "delta", "--grid",
                                      "0.5:2:0.5", "--c", "1", "--m", "1,2", "--trials", "20000",
                                      "--seed", "7"};
  auto one = base;
  one.insert(one.end(), {"--threads", "1"});
  auto four = base;
  four.insert(four.end(), {"--threads", "4"});
  const auto a = run(one);
  const auto b = run(four);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto rows = lines(a.out);
  CHECK(rows[0] == "param,value,detector,p_hat,ci_lo,ci_hi,trials,seed");
  CHECK(rows.size() == 1 + 2 * 2 * 4);
  CHECK(rows[1].rfind("delta,0.5,fa[M=1],", 0) == 0);
  CHECK(rows[1].substr(rows[1].size() - 8) == ",20000,7");
}

TEST_CASE("JSON carries the same numbers as CSV") {
  const std::vector<std::string> args{"sweep", "--detector", "fa", "--vary", "m", "--grid", "1,3",
                                      "--c", "1", "--delta", "1", "--trials", "5000"};
  auto json_args = args;
  json_args.insert(json_args.end(), {"--format", "json"});
  const auto csv = run(args);
  const auto json = run(json_args);
  REQUIRE(json.code == 0);
  const auto row = lines(csv.out)[2];
  const auto p_hat = row.substr(row.find("fa,") + 3, row.find(',', row.find("fa,") + 3) - row.find("fa,") - 3);
  CHECK(json.out.find("\"p_hat\": " + p_hat) != std::string::npos);
}

TEST_CASE("output files and I/O failures") {
  const auto path = std::filesystem::temp_directory_path() / "moltiming_cli_test.csv";
  const auto r = run({"threshold", "--c", "2", "--delta", "1", "--m", "3", "--out", path.string()});
  REQUIRE(r.code == 0);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "m,theta");
  std::filesystem::remove(path);
  CHECK(run({"threshold", "--c", "2", "--delta", "1", "--out", "/nonexistent/dir/x.csv"}).code == 4);
}

TEST_CASE("channel presets from a file") {
  const auto path = std::filesystem::temp_directory_path() / "moltiming_presets.ini";
  {
    std::ofstream f(path);
    f << "[slow]\nd = 2\nD = 1\nv = 0\ndim_scale = 1\n";
  }
  const auto presets = read_preset_file(path.string());
  REQUIRE(presets.count("slow") == 1);
  CHECK(presets.at("slow").levy().c == doctest::Approx(2.0));

  setenv("MOLTIMING_CONFIG", path.c_str(), 1);
  const auto r = run({"threshold", "--channel-preset", "slow", "--delta", "1", "--m", "1"});
  const auto direct = run({"threshold", "--c", "2", "--delta", "1", "--m", "1"});
  CHECK(r.code == 0);
  CHECK(r.out == direct.out);
  CHECK(load_presets().count("fig8") == 1);
  setenv("MOLTIMING_CONFIG", "/nonexistent/presets.ini", 1);
  CHECK(run({"threshold", "--channel-preset", "slow", "--delta", "1"}).code == 4);
  unsetenv("MOLTIMING_CONFIG");
  std::filesystem::remove(path);
}

TEST_CASE("number lists") {
  CHECK(parse_number_list("1,3,15") == std::vector<double>{1, 3, 15});
  CHECK(parse_number_list("1:4") == std::vector<double>{1, 2, 3, 4});
  CHECK(parse_number_list("0.5:2:0.5") == std::vector<double>{0.5, 1.0, 1.5, 2.0});
  CHECK_THROWS(parse_number_list("a,b"));
  CHECK_THROWS(parse_number_list("3:1"));
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
}
