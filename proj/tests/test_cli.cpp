#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using icspp::Matrix;

namespace {

const fs::path kWork = fs::temp_directory_path() / "icspp_cli_test";

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome pp(const std::string& args) {
  const fs::path out = kWork / "stdout.txt";
  const fs::path err = kWork / "stderr.txt";
  const std::string cmd = std::string("\"") + PP_EXECUTABLE + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out), slurp(err)};
}

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
  ~Workspace() { fs::remove_all(kWork); }
};

Matrix read_matrix(const fs::path& p) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(slurp(p));
  std::string line, cell;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    rows.emplace_back();
    while (std::getline(cells, cell, ',')) rows.back().push_back(std::stod(cell));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

std::string path(const std::string& name) { return "\"" + (kWork / name).string() + "\""; }

}  // namespace

TEST_CASE("pp reference prints the Gaussian reference value") {
  Workspace ws;
  const Outcome o = pp("reference --d 2 --h 0.5");
  CHECK(o.code == 0);
  CHECK(o.out == "2.8610\n");
}

TEST_CASE("pp generate + run: outputs and their invariants") {
  Workspace ws;
  REQUIRE(pp("generate --kind clusters --seed 7 --out " + path("data.csv") + " --truth " + path("truth.json")).code ==
          0);
  const nlohmann::json truth = nlohmann::json::parse(slurp(kWork / "truth.json"));
  CHECK(truth["labels"].size() == 500);

  const Outcome o = pp("run --input " + path("data.csv") +
                       " --d 2 --mode ics-pp --h 0.5 --nu 0 --gamma 1 --starts ics-adjacent --jobs 2 --out-dir " +
                       path("out"));
  INFO(o.err);
  REQUIRE(o.code == 0);
  const fs::path out = kWork / "out";
  for (const char* f : {"projected.csv", "transform_B.csv", "manifest.json", "trace.jsonl", "splom.svg",
                        "snapshot_iter_1.svg", "snapshot_iter_2.svg", "snapshot_iter_4.svg"})
    CHECK(fs::exists(out / f));

  const Matrix raw = read_matrix(kWork / "data.csv");
  const Matrix b = read_matrix(out / "transform_B.csv");
  const Matrix projected = read_matrix(out / "projected.csv");
  REQUIRE(b.rows() == 8);
  REQUIRE(b.cols() == 8);
  const Matrix centered = raw.rowwise() - raw.colwise().mean();
  CHECK(icspp::test::max_abs((centered * b).leftCols(2) - projected) < 1e-6);

  const nlohmann::json manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["starts"].size() == 3);
  CHECK(manifest["config"]["starts"] == "ics-adjacent");
  CHECK(manifest["input"]["rows"] == 500);
  CHECK(manifest["best"]["final_H"].get<double>() < manifest["reference_entropy"]["value"].get<double>());

  const std::string svg = slurp(out / "splom.svg");
  CHECK(icspp::test::well_formed_xml(svg));
  CHECK(icspp::test::count_occurrences(svg, "class=\"panel\"") == 8 * 7 / 2);
  CHECK(icspp::test::well_formed_xml(slurp(out / "snapshot_iter_1.svg")));

  std::map<std::string, double> last;
  std::map<std::string, int> per_start;
  std::istringstream lines(slurp(out / "trace.jsonl"));
  std::string line;
  while (std::getline(lines, line)) {
    const nlohmann::json rec = nlohmann::json::parse(line);
    const std::string key = rec["restart"].dump() + rec["start"].dump();
    const double before = rec["H_before"].get<double>();
    const double after = rec["H_after"].get<double>();
    CHECK(after < before);
    if (last.count(key)) CHECK(before == last[key]);
    last[key] = after;
    ++per_start[key];
  }
  int total = 0;
  for (const auto& s : manifest["starts"]) total += s["iterations"].get<int>();
  int logged = 0;
  for (const auto& [key, count] : per_start) logged += count;
  CHECK(logged == total);
}

TEST_CASE("pp run: all-pairs default and explicit starts") {
  Workspace ws;
  REQUIRE(pp("generate --kind gaussian --n 120 --p 4 --seed 1 --out " + path("g.csv")).code == 0);
  Outcome o = pp("run --input " + path("g.csv") + " --mode ics-only --out-dir " + path("a"));
  REQUIRE(o.code == 0);
  CHECK(nlohmann::json::parse(slurp(kWork / "a" / "manifest.json"))["starts"].size() == 6);

  o = pp("run --input " + path("g.csv") + " --starts \"explicit=3,1;2,4\" --out-dir " + path("b"));
  REQUIRE(o.code == 0);
  const nlohmann::json m = nlohmann::json::parse(slurp(kWork / "b" / "manifest.json"));
  CHECK(m["starts"].size() == 2);
  CHECK(fs::exists(kWork / "b" / "snapshot_iter_1.svg"));
}

TEST_CASE("pp error handling and exit codes") {
  Workspace ws;
  Outcome o = pp("run --input " + path("missing.csv") + " --out-dir " + path("x"));
  CHECK(o.code == 2);
  const nlohmann::json err = nlohmann::json::parse(o.err.substr(0, o.err.find('\n')));
  CHECK(err["error"] == "IoError");

  {
    std::ofstream f(kWork / "nan.csv");
    f << "1,2,3\n4,NaN,6\n7,8,10\n1,1,1\n2,3,1\n";
  }
  o = pp("run --input " + path("nan.csv") + " --out-dir " + path("x"));
  CHECK(o.code == 2);
  CHECK(o.err.find("ParseError") != std::string::npos);
  CHECK(o.err.find("line 2") != std::string::npos);

  {
    std::ofstream f(kWork / "collinear.csv");
    for (int i = 0; i < 20; ++i) f << i << ',' << 2 * i + 1 << ',' << (i * i) % 7 << '\n';
  }
  o = pp("run --input " + path("collinear.csv") + " --out-dir " + path("x"));
  CHECK(o.code == 3);
  CHECK(o.err.find("NotPositiveDefinite") != std::string::npos);

  REQUIRE(pp("generate --kind gaussian --n 100 --p 3 --seed 2 --out " + path("g.csv")).code == 0);
  o = pp("run --input " + path("g.csv") + " --max-iters 1 --out-dir " + path("capped"));
  CHECK(o.code == 4);
  CHECK(fs::exists(kWork / "capped" / "manifest.json"));

  CHECK(pp("run --input " + path("g.csv") + " --d 3 --out-dir " + path("x")).code == 2);
  CHECK(pp("run --input " + path("g.csv") + " --starts explicit=1,1 --out-dir " + path("x")).code == 2);
  CHECK(pp("run --input " + path("g.csv") + " --starts sideways --out-dir " + path("x")).code == 2);
  CHECK(pp("run --input " + path("g.csv") + " --mode nope").code == 2);
  CHECK(pp("run --input " + path("g.csv") + " --h -1 --out-dir " + path("x")).code == 2);
  CHECK(pp("frobnicate").code == 2);
}
