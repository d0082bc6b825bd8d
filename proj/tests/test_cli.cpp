#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = mcode::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "mcode_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("decode") {
  const auto r = run({"decode", "111001100100000001"});
  CHECK(r.code == 0);
  CHECK(r.out.find("engagement: soft") != std::string::npos);
  CHECK(r.out.find("passive deformation: permanent") != std::string::npos);

  const auto zeros = run({"decode", "000000000000000000"});
  CHECK(zeros.code == 0);
  CHECK(zeros.out.find("non-contact") != std::string::npos);

  const auto short_code = run({"decode", "11100110010000001"});
  CHECK(short_code.code == 1);
  CHECK(short_code.err.rfind("ELength:", 0) == 0);

  const auto hierarchy = run({"decode", "010000000000000000"});
  CHECK(hierarchy.code == 1);
  CHECK(hierarchy.err.rfind("EHierarchy:", 0) == 0);

  CHECK(run({"--format", "json", "decode", "111001100100000001"}).out.find("\"engagement\"") != std::string::npos);
}

TEST_CASE("encode") {
  const auto cut = run({"encode", "--contact", "--engagement", "soft", "--duration", "continuous",
                        "--passive-structure", "permanent", "--active-prismatic", "1", "--tool"});
  CHECK(cut.code == 0);
  CHECK(cut.out == "111001100100000001\n");

  CHECK(run({"encode", "--active-revolute", "1", "--tool"}).out == "000000000001000001\n");

  const auto bad = run({"encode", "--engagement", "soft"});
  CHECK(bad.code == 1);
  CHECK(bad.err.rfind("EInconsistentAnswers:", 0) == 0);
}

TEST_CASE("dist") {
  CHECK(run({"dist", "pour", "sprinkle"}).out == "3\n");
  CHECK(run({"dist", "pour", "sprinkle", "--metric", "weighted", "--preset", "trajectory"}).out == "9\n");
  CHECK(run({"dist", "poke", "grasp", "--metric", "weighted", "--alpha", "1", "--beta", "2"}).out == "3\n");
  CHECK(run({"dist", "pour", "000000010100000001"}).out == "3\n");

  const auto unknown = run({"dist", "pour", "teleport"});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.rfind("EUnknownLabel:", 0) == 0);

  const auto missing_weights = run({"dist", "pour", "sprinkle", "--metric", "weighted"});
  CHECK(missing_weights.code == 2);
  CHECK(missing_weights.err.rfind("EUsage:", 0) == 0);
}

TEST_CASE("matrix") {
  const auto r = run({"matrix"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("label,", 0) == 0);
  std::size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 69);
  CHECK(run({"--format", "json", "matrix"}).out.find("\"values\"") != std::string::npos);
}

TEST_CASE("neighbors") {
  const auto r = run({"neighbors", "pour", "-k", "1", "--metric", "weighted", "--preset", "contact"});
  CHECK(r.code == 0);
  CHECK(r.out == "1\tsprinkle\t3\n");
  CHECK(run({"--format", "csv", "neighbors", "pour", "-k", "1"}).out == "rank,label,distance\n1,sprinkle,3.000000\n");
}

TEST_CASE("consolidate") {
  const auto r = run({"consolidate"});
  CHECK(r.code == 0);
  CHECK(r.out.find("111001100100000001\tchop\tcut\tmash\tpeel\tscrape\tshave\tslice\n") != std::string::npos);
}

TEST_CASE("custom registry") {
  const auto dir = scratch_dir();
  const auto path = dir / "mini.tsv";
  std::ofstream(path) << "# two motions\npour\t000000000001000001\nstir\t111001011000000001\n";
  CHECK(run({"--registry", path.string(), "dist", "pour", "stir"}).out == "7\n");

  std::ofstream(dir / "broken.tsv") << "pour\t0000\n";
  const auto broken = run({"--registry", (dir / "broken.tsv").string(), "consolidate"});
  CHECK(broken.code == 1);
  CHECK(broken.err.rfind("ERegistry:", 0) == 0);

  const auto missing = run({"--registry", (dir / "absent.tsv").string(), "consolidate"});
  CHECK(missing.err.rfind("EIo:", 0) == 0);
}

TEST_CASE("analyze") {
  const auto dir = scratch_dir();
  const auto path = dir / "turn.csv";
  {
    std::ofstream f(path);
    f << "t,x,y,z,qw,qx,qy,qz\n";
    for (int i = 0; i <= 60; ++i) {
      const double half = 0.5 * (120.0 * i / 60.0) * 3.14159265358979323846 / 180.0;
      f << 0.01 * i << ",0,0,0," << std::cos(half) << ",0," << std::sin(half) << ",0\n";
    }
  }
  const auto r = run({"analyze", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"substring\": \"00001\"") != std::string::npos);

  const auto report = dir / "report.json";
  const auto to_file = run({"--out", report.string(), "analyze", path.string()});
  CHECK(to_file.out == "00001\n");
  CHECK(slurp(report) == r.out);

  CHECK(run({"analyze", path.string(), "--rotation-threshold", "150"}).out.find("\"00000\"") != std::string::npos);

  std::ofstream(dir / "bad.csv") << "t,x,y,z,qw,qx,qy,qz\n0,0,0,0,0,0,0,0\n";
  const auto bad = run({"analyze", (dir / "bad.csv").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.rfind("ETrajectory: line 2", 0) == 0);
}

TEST_CASE("embed") {
  const auto dir = scratch_dir();
  const std::vector<std::string> args{"--seed", "4", "embed", "--metric", "weighted", "--preset", "contact",
                                      "--iters", "300", "--svg", (dir / "e.svg").string()};
  const auto a = run(args);
  CHECK(a.code == 0);
  CHECK(a.out.rfind("label,x,y\n", 0) == 0);
  const std::string svg = slurp(dir / "e.svg");
  CHECK(svg.find("<svg") != std::string::npos);

  const auto b = run(args);
  CHECK(a.out == b.out);
  CHECK(slurp(dir / "e.svg") == svg);

  const auto bad = run({"embed", "--perplexity", "40"});
  CHECK(bad.code == 1);
  CHECK(bad.err.rfind("ETsne:", 0) == 0);
}

TEST_CASE("embed word vectors") {
  const auto dir = scratch_dir();
  std::ofstream(dir / "reg.tsv") << "pick-and-place\t000000000000000000\nstir\t111001011000000001\n"
                                    "pour\t000000000001000001\ncut\t111001100100000001\n"
                                    "sprinkle\t000000010100000001\n";
  std::ofstream(dir / "vec.txt") << "move 1 0 0 0.1\nstir 0 1 0.2 0\npour 0.3 0 1 0\ncut 0 0.1 0 1\n"
                                    "sprinkle 0.2 0.1 0.9 0\n";
  const auto r = run({"--registry", (dir / "reg.tsv").string(), "embed", "--vectors", (dir / "vec.txt").string(),
                      "--perplexity", "1", "--iters", "200"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pick-and-place,") != std::string::npos);

  std::ofstream(dir / "novec.txt") << "move 1 0\n";
  const auto missing = run({"--registry", (dir / "reg.tsv").string(), "embed", "--vectors",
                            (dir / "novec.txt").string(), "--perplexity", "1"});
  CHECK(missing.code == 1);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"decode"}).err.rfind("EUsage:", 0) == 0);
  CHECK(run({"--format", "svg", "decode", "000000000000000000"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}
