#include <sstream>

#include <gtest/gtest.h>

#include "pmwls/csv.hpp"
#include "pmwls/error.hpp"

namespace pmwls {
namespace {

TEST(Csv, ParsesHeaderAndRows) {
    std::istringstream in("y,x1,x2\n1.5,0.1,-2\n2.5,0.2,3e-1\n");
    Dataset d = parse_dataset_csv(in);
    EXPECT_EQ(d.size(), 2);
    EXPECT_EQ(d.dim(), 2);
    EXPECT_DOUBLE_EQ(d.y(1), 2.5);
    EXPECT_DOUBLE_EQ(d.x(1, 1), 0.3);
}

TEST(Csv, LogIngestion) {
    std::istringstream in("y,x1\n1,0\n2.718281828459045,1\n");
    Dataset d = parse_dataset_csv(in, true);
    EXPECT_EQ(d.scale, Scale::log_of_multiplicative);
    EXPECT_NEAR(d.y(1), 1.0, 1e-15);
    std::istringstream bad("y,x1\n1,0\n0,1\n");
    EXPECT_THROW(parse_dataset_csv(bad, true), ValidationError);
}

TEST(Csv, ErrorsNameLineAndField) {
    std::istringstream in("y,x1\n1,0\n2,abc\n");
    try {
        parse_dataset_csv(in, false, "d.csv");
        FAIL();
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("d.csv:3"), std::string::npos) << msg;
        EXPECT_NE(msg.find("x1"), std::string::npos) << msg;
    }
    std::istringstream ragged("y,x1\n1,0\n2\n");
    EXPECT_THROW(parse_dataset_csv(ragged), ValidationError);
    std::istringstream header("a,b\n1,2\n3,4\n");
    EXPECT_THROW(parse_dataset_csv(header), ValidationError);
}

TEST(Csv, RoundTrip) {
    std::istringstream in("y,x1\n0.1,1e-300\n3.25,-7\n");
    Dataset d = parse_dataset_csv(in);
    std::ostringstream out;
    write_dataset_csv(out, d);
    std::istringstream back(out.str());
    Dataset e = parse_dataset_csv(back);
    EXPECT_TRUE((d.y.array() == e.y.array()).all());
    EXPECT_TRUE((d.x.array() == e.x.array()).all());
}

TEST(Csv, ShortestRoundTripFormatting) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2.0), "2");
    const double v = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Csv, MatrixWriter) {
    Matrix m(2, 2);
    m << 1, 0, -1, 2;
    std::ostringstream out;
    write_matrix_csv(out, m);
    EXPECT_EQ(out.str(), "1,0\n-1,2\n");
}

}  // namespace
}  // namespace pmwls
