#include "catch_amalgamated.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <eof2q/cli.hpp>
#include <eof2q/io.hpp>

#include "test_utils.hpp"

using namespace eof2q;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct temp_dir {
  fs::path path;
  temp_dir() {
    path = fs::temp_directory_path() /
           ("eof2q_test_" + std::to_string(std::rand()) + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~temp_dir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = cli::run(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

std::vector<io::json> parse_records(const std::string& text) {
  std::vector<io::json> recs;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) recs.push_back(io::json::parse(line));
  return recs;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

void write_matrices(const std::string& path,
                    const std::vector<std::pair<std::string, cmat>>& entries) {
  std::ofstream out(path);
  io::write_matrix_file(out, entries);
}

}  // namespace

TEST_CASE("eof subcommand on reference states") {
  temp_dir tmp;
  cmat mixed(4);
  for (int i = 0; i < 4; ++i) mixed(i, i) = 0.25;
  write_matrices(tmp.file("in.json"),
                 {{"singlet", testutil::projector(testutil::singlet())},
                  {"mixed", mixed},
                  {"werner-0.5", testutil::werner_matrix(0.5)}});

  std::string out, err;
  REQUIRE(run({"eof", tmp.file("in.json")}, &out, &err) == 0);
  REQUIRE(err.empty());
  const auto recs = parse_records(out);
  REQUIRE(recs.size() == 3);

  REQUIRE(recs[0]["label"] == "singlet");
  REQUIRE(recs[0]["concurrence"].get<double>() == Approx(1.0).margin(1e-12));
  REQUIRE(recs[0]["eof"].get<double>() == Approx(1.0).margin(1e-12));
  REQUIRE(recs[0]["rank"].get<int>() == 1);

  REQUIRE(recs[1]["concurrence"].get<double>() == 0.0);
  REQUIRE(recs[1]["eof"].get<double>() == 0.0);

  REQUIRE(recs[2]["concurrence"].get<double>() == Approx(0.25).margin(1e-12));
  REQUIRE(recs[2]["eof"].get<double>() == Approx(0.11761887377091791).margin(1e-12));

  // every record satisfies eof = calE(concurrence) to 1e-12
  for (const auto& r : recs)
    REQUIRE(r["eof"].get<double>() ==
            Approx(eof_from_concurrence(r["concurrence"].get<double>())).margin(1e-12));

  // the concurrence subcommand emits the same records
  std::string out2;
  REQUIRE(run({"concurrence", tmp.file("in.json")}, &out2, &err) == 0);
  REQUIRE(out2 == out);
}

TEST_CASE("invalid entries are diagnosed while valid ones are processed") {
  temp_dir tmp;
  io::json bad = io::json::object();
  bad["basis"] = io::kBasisLabel;
  bad["matrices"] = io::json::array();
  {
    io::json good;
    good["label"] = "ok";
    good["matrix"] = io::matrix_to_json(testutil::projector(testutil::singlet()));
    bad["matrices"].push_back(good);
    io::json broken;
    broken["label"] = "not-psd";
    cmat m(4);
    m(0, 0) = 1.25;
    m(1, 1) = -0.25;
    broken["matrix"] = io::matrix_to_json(m);
    bad["matrices"].push_back(broken);
  }
  write_text(tmp.file("mixed.json"), bad.dump());

  std::string out, err;
  REQUIRE(run({"eof", tmp.file("mixed.json")}, &out, &err) == 2);
  const auto recs = parse_records(out);
  REQUIRE(recs.size() == 1);  // the valid entry is still processed
  REQUIRE(recs[0]["label"] == "ok");
  REQUIRE(err.find("not-psd") != std::string::npos);
  REQUIRE(out.find("negative") == std::string::npos);  // diagnostics stay on stderr
}

TEST_CASE("file and parse errors") {
  temp_dir tmp;
  std::string out, err;
  REQUIRE(run({"eof", tmp.file("missing.json")}, &out, &err) == 1);
  REQUIRE(!err.empty());

  write_text(tmp.file("broken.json"), "{not json");
  REQUIRE(run({"eof", tmp.file("broken.json")}, &out, &err) == 2);

  write_text(tmp.file("basis.json"), R"({"basis":"z-order","matrices":[]})");
  REQUIRE(run({"eof", tmp.file("basis.json")}, &out, &err) == 2);

  REQUIRE(run({"nonsense"}, &out, &err) == 1);
  REQUIRE(run({"eof"}, &out, &err) == 1);  // missing input path
  REQUIRE(run({"--help"}, &out, &err) == 0);
}

TEST_CASE("normalize flag") {
  temp_dir tmp;
  cmat m = testutil::projector(testutil::singlet());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) *= 1.05;
  write_matrices(tmp.file("scaled.json"), {{"scaled", m}});

  std::string out, err;
  REQUIRE(run({"eof", tmp.file("scaled.json")}, &out, &err) == 2);
  REQUIRE(run({"eof", "--normalize", tmp.file("scaled.json")}, &out, &err) == 0);
  const auto recs = parse_records(out);
  REQUIRE(recs[0]["concurrence"].get<double>() == Approx(1.0).margin(1e-12));

  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) *= 2.0;  // trace 2.1, outside [0.9, 1.1]
  write_matrices(tmp.file("toobig.json"), {{"big", m}});
  REQUIRE(run({"eof", "--normalize", tmp.file("toobig.json")}, &out, &err) == 2);
}

TEST_CASE("decompose subcommand") {
  temp_dir tmp;
  write_matrices(tmp.file("in.json"), {{"rho", testutil::random_rho(4, 17).matrix()}});

  std::string out, err;
  REQUIRE(run({"decompose", tmp.file("in.json")}, &out, &err) == 0);
  const auto recs = parse_records(out);
  REQUIRE(recs.size() == 1);
  const auto& d = recs[0]["decomposition"];
  REQUIRE(d["members"].size() <= 4);
  REQUIRE(d["reconstruction_error"].get<double>() <= 1e-10);
  REQUIRE(d["avg_entanglement"].get<double>() ==
          Approx(recs[0]["eof"].get<double>()).margin(1e-8));
  const double c = recs[0]["concurrence"].get<double>();
  double psum = 0.0;
  for (const auto& m : d["members"]) {
    psum += m["probability"].get<double>();
    REQUIRE(m["concurrence"].get<double>() == Approx(c).margin(1e-8));
  }
  REQUIRE(psum == Approx(1.0).margin(1e-10));
}

TEST_CASE("verify subcommand") {
  temp_dir tmp;
  write_matrices(tmp.file("in.json"),
                 {{"singlet", testutil::projector(testutil::singlet())},
                  {"rho", testutil::random_rho(3, 23).matrix()}});

  std::string out, err;
  REQUIRE(run({"verify", tmp.file("in.json"), "--samples", "50", "--seed", "5"}, &out,
              &err) == 0);
  const auto recs = parse_records(out);
  REQUIRE(recs.size() == 2);
  for (const auto& r : recs) {
    REQUIRE(r["violations"].get<int>() == 0);
    REQUIRE(r["samples"].get<int>() == 50);
    REQUIRE(r["min_sampled_avg_entanglement"].get<double>() >=
            r["formula_value"].get<double>() - 1e-9);
  }

  cmat bad(4);
  bad(0, 0) = 1.25;
  bad(1, 1) = -0.25;
  write_matrices(tmp.file("bad.json"), {{"corrupt", bad}});
  REQUIRE(run({"verify", tmp.file("bad.json"), "--samples", "10"}, &out, &err) == 2);
}

TEST_CASE("verify passes on the bundled regression file") {
  const std::string path = std::string(EOF2Q_SOURCE_DIR) + "/data/regression-100.json";
  std::string out, err;
  REQUIRE(run({"verify", path, "--samples", "200", "--seed", "11", "--threads", "2"},
              &out, &err) == 0);
  const auto recs = parse_records(out);
  REQUIRE(recs.size() == 100);
  for (const auto& r : recs) REQUIRE(r["violations"].get<int>() == 0);
}

TEST_CASE("random subcommand") {
  temp_dir tmp;
  std::string out, err;

  SECTION("identical seeds give byte-identical files") {
    REQUIRE(run({"random", "--count", "10", "--seed", "7", tmp.file("a.json")}, &out,
                &err) == 0);
    REQUIRE(run({"random", "--count", "10", "--seed", "7", tmp.file("b.json")}, &out,
                &err) == 0);
    REQUIRE(read_file(tmp.file("a.json")) == read_file(tmp.file("b.json")));
    REQUIRE(run({"random", "--count", "10", "--seed", "8", tmp.file("c.json")}, &out,
                &err) == 0);
    REQUIRE(read_file(tmp.file("a.json")) != read_file(tmp.file("c.json")));
  }

  SECTION("round trip and downstream consumption") {
    REQUIRE(run({"random", "--count", "6", "--rank", "2", "--seed", "3",
                 tmp.file("g.json")}, &out, &err) == 0);
    std::ifstream in(tmp.file("g.json"));
    const auto entries = io::read_matrix_file(in);
    REQUIRE(entries.size() == 6);
    std::vector<std::pair<std::string, cmat>> back;
    for (const auto& e : entries) {
      REQUIRE(e.matrix.has_value());
      back.emplace_back(e.label, *e.matrix);
    }
    std::ostringstream re;
    io::write_matrix_file(re, back);
    REQUIRE(re.str() == read_file(tmp.file("g.json")));

    REQUIRE(run({"eof", tmp.file("g.json")}, &out, &err) == 0);
    REQUIRE(parse_records(out).size() == 6);
  }

  SECTION("rank-1 output is pure") {
    REQUIRE(run({"random", "--count", "8", "--rank", "1", "--seed", "4",
                 tmp.file("p.json")}, &out, &err) == 0);
    REQUIRE(run({"eof", tmp.file("p.json")}, &out, &err) == 0);
    for (const auto& r : parse_records(out)) REQUIRE(r["rank"].get<int>() == 1);
  }

  SECTION("invalid flag combination") {
    REQUIRE(run({"random", "--method", "haar_pure", "--rank", "2", "--count", "1",
                 tmp.file("x.json")}, &out, &err) == 1);
    REQUIRE(run({"random", "--method", "bogus", "--count", "1", tmp.file("y.json")},
                &out, &err) == 1);
  }
}

TEST_CASE("bench subcommand") {
  std::string out, err;
  REQUIRE(run({"bench", "--count", "50", "--seed", "2"}, &out, &err) == 0);
  const auto recs = parse_records(out);
  REQUIRE(recs.size() == 1);
  REQUIRE(recs[0]["count"].get<int>() == 50);
  REQUIRE(recs[0]["eof"]["per_second"].get<double>() > 0.0);
  REQUIRE(recs[0].contains("decompose"));

  REQUIRE(run({"bench", "--count", "20", "--eof-only"}, &out, &err) == 0);
  REQUIRE(!parse_records(out)[0].contains("decompose"));
}

TEST_CASE("threaded output matches single-threaded output") {
  temp_dir tmp;
  std::vector<std::pair<std::string, cmat>> entries;
  for (int i = 0; i < 12; ++i)
    entries.emplace_back("m" + std::to_string(i), testutil::random_rho(1 + i % 4, 40 + i).matrix());
  write_matrices(tmp.file("in.json"), entries);

  std::string out1, out4, err;
  REQUIRE(run({"eof", tmp.file("in.json"), "--threads", "1"}, &out1, &err) == 0);
  REQUIRE(run({"eof", tmp.file("in.json"), "--threads", "4"}, &out4, &err) == 0);
  REQUIRE(out1 == out4);

  std::string v1, v4;
  REQUIRE(run({"verify", tmp.file("in.json"), "--samples", "20", "--threads", "1"}, &v1,
              &err) == 0);
  REQUIRE(run({"verify", tmp.file("in.json"), "--samples", "20", "--threads", "4"}, &v4,
              &err) == 0);
  REQUIRE(v1 == v4);
}
