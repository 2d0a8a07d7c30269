#include <sys/resource.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "ebi_unmix/csv_io.hpp"
#include "ebi_unmix/error.hpp"
#include "oracles.hpp"

using ebi::Matrix;
using ebi::SignalMatrix;

namespace {

std::size_t parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    ebi::read_csv_document(in);
  } catch (const ebi::ParseError& e) {
    return e.line();
  }
  return 0;
}

long max_rss_kb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ebi_unmix_test_" + name);
}

}  // namespace

TEST_CASE("csv round trip is exact") {
  Matrix m = oracle::random_matrix(200, 4, 1, 1e3);
  m(0, 0) = 1e-300;
  m(1, 1) = -0.1;
  m(2, 2) = std::numeric_limits<double>::max();
  m(3, 3) = 0.0;
  const SignalMatrix s(m, 1000.0, {"z1_re", "z1_im", "z2_re", "z2_im"});
  std::stringstream buf;
  ebi::write_csv(s, buf, {{"frame", "3"}, {"note", "a b c"}});
  const auto doc = ebi::read_csv_document(buf);
  CHECK(doc.signal.samples() == s.samples());
  CHECK(doc.signal.sample_rate_hz() == 1000.0);
  CHECK(doc.signal.channel_labels() == s.channel_labels());
  REQUIRE(doc.metadata.size() == 3);
  CHECK(doc.metadata[0] == std::pair<std::string, std::string>{"rate_hz", "1000"});
  CHECK(doc.metadata[1] == std::pair<std::string, std::string>{"frame", "3"});
  CHECK(doc.metadata[2] == std::pair<std::string, std::string>{"note", "a b c"});
}

TEST_CASE("csv round trip through a file") {
  const SignalMatrix s(oracle::random_matrix(50, 2, 7), 123.5);
  const auto path = temp_path("roundtrip.csv");
  ebi::write_csv(s, path);
  const auto back = ebi::read_csv(path);
  CHECK(back.samples() == s.samples());
  CHECK(back.sample_rate_hz() == 123.5);
  CHECK(back.channel_labels() == std::vector<std::string>{"ch1", "ch2"});
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ebi::read_csv(path), ebi::Error);
}

TEST_CASE("csv header parsing") {
  std::istringstream in("# rate_hz=1000\n# subject = s01 \na,b\n1,2\n+3.5, -4e-2\n\n");
  const auto doc = ebi::read_csv_document(in);
  CHECK(doc.signal.sample_rate_hz() == 1000.0);
  CHECK(doc.signal.length() == 2);
  CHECK(doc.signal.samples()(1, 0) == 3.5);
  CHECK(doc.signal.samples()(1, 1) == -0.04);
  CHECK(doc.metadata[1].first == "subject");
  CHECK(doc.metadata[1].second == "s01");
}

TEST_CASE("csv parse errors carry line numbers") {
  CHECK(parse_error_line("# rate_hz=1000\n1,2\n") == 2);
  CHECK(parse_error_line("a,b\n1,2\n") == 1);
  CHECK(parse_error_line("# rate_hz=1000\na,b\n1,2\n3\n") == 4);
  CHECK(parse_error_line("# rate_hz=1000\na,b\n1,2\n3,x\n") == 4);
  CHECK(parse_error_line("# rate_hz=1000\na,b\n1,2\n3,4,5\n") == 4);
  CHECK(parse_error_line("# rate_hz=-5\na\n1\n") == 1);
  CHECK(parse_error_line("# rate_hz=1000\na,b\n") == 2);
  CHECK(parse_error_line("# rate_hz=1000\na,b\n1,nan\n") == 3);
  std::istringstream empty("");
  CHECK_THROWS_AS(ebi::read_csv_document(empty), ebi::ParseError);
  std::istringstream in("# rate_hz=1000\na,b\n1,2\n3,x\n");
  try {
    ebi::read_csv_document(in);
    FAIL("expected throw");
  } catch (const ebi::ParseError& e) {
    CHECK(e.kind() == ebi::ErrorKind::parse);
    CHECK(std::string(e.what()).rfind("line 4: ", 0) == 0);
  }
}

TEST_CASE("100k-row file parses with bounded memory") {
  const std::size_t rows = 100000;
  const auto path = temp_path("large.csv");
  {
    std::ofstream out(path);
    out << "# rate_hz=1000\nz1_re,z1_im,z2_re,z2_im\n";
    for (std::size_t r = 0; r < rows; ++r) {
      const double t = static_cast<double>(r) * 1e-3;
      out << ebi::format_double(std::sin(t)) << ',' << ebi::format_double(std::cos(t)) << ','
          << ebi::format_double(t) << ',' << ebi::format_double(-t) << '\n';
    }
  }
  const auto file_kb = static_cast<long>(std::filesystem::file_size(path) / 1024);
  const long before = max_rss_kb();
  const auto s = ebi::read_csv(path);
  const long growth = max_rss_kb() - before;
  CHECK(s.length() == rows);
  CHECK(s.channels() == 4);
  CHECK(s.samples()(rows - 1, 2) == doctest::Approx(99.999));
  // Stored samples take 3.2 MB; the reader must not also hold the text.
  MESSAGE("file " << file_kb << " kB, peak RSS growth " << growth << " kB");
  CHECK(growth < 4 * 3200);
  std::filesystem::remove(path);
}

TEST_CASE("format_double round-trips") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix m = oracle::random_matrix(100, 1, seed, 1e5);
    for (std::size_t i = 0; i < 100; ++i) {
      CHECK(std::stod(ebi::format_double(m(i, 0))) == m(i, 0));
    }
  }
  CHECK(ebi::format_double(0.1) == "0.1");
  CHECK(ebi::format_double(1000.0) == "1000");
}

TEST_CASE("matrix csv round trip") {
  const Matrix m{{1.0, 0.8}, {0.6, 1.0}, {0.9, -0.4}, {-0.3, 1.1}};
  std::stringstream buf;
  ebi::write_matrix_csv(m, {"cardiac", "respiratory"}, buf);
  const auto back = ebi::read_matrix_csv(buf);
  CHECK(back.values == m);
  CHECK(back.labels == std::vector<std::string>{"cardiac", "respiratory"});
  std::stringstream bad;
  CHECK_THROWS_AS(ebi::write_matrix_csv(m, {"one"}, bad), ebi::Error);
}
