#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "despan/io.hpp"
#include "despan/spanners_1d.hpp"

using namespace despan;

namespace {

RankGraph parse(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::size_t point_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_points(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(EdgeList, RoundTripUnweighted) {
  const RankGraph g = four_hop_spanner(300, 0.5, 4, 1);
  const std::string text = edge_list_text(g);
  EXPECT_EQ(parse(text), g);
  EXPECT_EQ(edge_list_text(parse(text)), text);
}

TEST(EdgeList, RoundTripWeighted) {
  const RankGraph g(4, {{1, 2}, {1, 4}, {3, 4}}, {0.1, 1.0 / 3.0, 2.5e-300});
  const RankGraph back = parse(edge_list_text(g));
  EXPECT_EQ(back, g);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back.weights()[i], g.weights()[i]);
}

TEST(EdgeList, WhitespaceNormalization) {
  const RankGraph g = parse("3  2\r\n\n 1 2 \n2\t3\n\n");
  EXPECT_EQ(edge_list_text(g), "3 2\n1 2\n2 3\n");
}

TEST(EdgeList, Errors) {
  EXPECT_EQ(error_line("4 1\n5 3\n"), 2u);             // out of range
  EXPECT_EQ(error_line("5 1\n5 3\n"), 2u);             // i > j
  EXPECT_EQ(error_line("5 1\n3 3\n"), 2u);             // self-loop
  EXPECT_EQ(error_line("5 3\n1 2\n2 3\n1 2\n"), 4u);   // duplicate, names the later line
  EXPECT_EQ(error_line("5 2\n1 2\n2 3 1.5\n"), 3u);    // mixed arity
  EXPECT_EQ(error_line("5 2\n1 2\n"), 2u);             // too few lines
  EXPECT_EQ(error_line("5 1\n1 2\n2 3\n"), 3u);        // too many lines
  EXPECT_EQ(error_line("5\n"), 1u);                    // malformed header
  EXPECT_EQ(error_line("x 1\n1 2\n"), 1u);
  EXPECT_EQ(error_line(""), 1u);
  EXPECT_EQ(error_line("5 1\n1 2 -1\n"), 2u);          // non-positive weight
  EXPECT_EQ(error_line("5 1\n1 b\n"), 2u);
  EXPECT_EQ(error_line("2 2\n1 2\n1 2\n"), 1u);        // more edges than pairs
  try {
    parse("5 3\n1 2\n2 3\n1 2\n");
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(Points, RoundTrip) {
  RandomStream s = derive_stream(1, 1);
  std::vector<double> c(40 * 3);
  for (double& x : c) x = s.next_uniform() * 0.9;
  const PointSet p(3, c);
  std::istringstream in(points_text(p));
  const PointSet back = parse_point_set(in);
  EXPECT_EQ(back, p);
  EXPECT_EQ(points_text(back), points_text(p));
}

TEST(Points, NormalizesRawInput) {
  std::istringstream in("2 2\n0 0\n10 0\n");
  const PointSet p = parse_point_set(in);
  EXPECT_DOUBLE_EQ(p.distance(0, 1) * p.scale(), 10.0);
}

TEST(Points, Errors) {
  EXPECT_EQ(point_error_line("3 2\n0 0\n1 1\n0 0\n"), 4u);  // duplicate
  EXPECT_EQ(point_error_line("2 2\n0 0\n1\n"), 3u);
  EXPECT_EQ(point_error_line("2 0\n"), 1u);
  EXPECT_EQ(point_error_line("3 1\n0\n1\n"), 3u);
  EXPECT_EQ(point_error_line("1 1\n0\nnan\n"), 3u);
  EXPECT_EQ(point_error_line("2 1\n0\ninf\n"), 3u);
}

TEST(Csv, SchemaLineAndRows) {
  CsvTable t("demo", {"a", "b"});
  t.add_row({"1", "x"});
  EXPECT_EQ(t.text(), "# despan-csv v1 demo\na,b\n1,x\n");
  EXPECT_THROW(t.add_row({"1"}), ValidationError);
  EXPECT_EQ(t.number(0, "a"), 1.0);
}

TEST(Csv, DeficiencyRow) {
  DeficiencyReport r;
  r.n = 200;
  r.psi = 0.5;
  r.trials = 10;
  r.mean_failed_pairs = 12.5;
  r.std_error = 0.25;
  r.seed = 7;
  EXPECT_EQ(deficiency_csv_row(r), (std::vector<std::string>{"200", "0.5", "inf", "10", "12.5", "0.25", "7"}));
  r.hop_bound = 2;
  EXPECT_EQ(deficiency_csv_row(r)[2], "2");
}

TEST(Format, ShortestRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, 2.0}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(2.0), "2");
}
