#include "pmwls/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "pmwls/error.hpp"

namespace pmwls {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        const auto first = field.find_first_not_of(" \t\r\"");
        const auto last = field.find_last_not_of(" \t\r\"");
        fields.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) detail::fail_validation("cannot open " + path.string());
    return in;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) detail::fail_numerical("cannot format value");
    return std::string(buf, ptr);
}

Dataset parse_dataset_csv(std::istream& in, bool take_log, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    auto where = [&](std::size_t ln) { return source + ":" + std::to_string(ln); };

    if (!std::getline(in, line)) detail::fail_validation(source + ": empty file");
    ++line_no;
    const std::vector<std::string> header = split_fields(line);
    if (header.size() < 2 || header[0] != "y")
        detail::fail_validation(where(line_no) + ": header must be y,x1,...,xd");
    for (std::size_t j = 1; j < header.size(); ++j)
        if (header[j] != "x" + std::to_string(j))
            detail::fail_validation(where(line_no) + ": expected column 'x" + std::to_string(j) + "', found '" +
                                    header[j] + "'");
    const std::size_t d = header.size() - 1;

    std::vector<double> ys;
    std::vector<double> xs;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != header.size())
            detail::fail_validation(where(line_no) + ": expected " + std::to_string(header.size()) + " fields, found " +
                                    std::to_string(fields.size()));
        for (std::size_t j = 0; j < fields.size(); ++j) {
            double v = 0.0;
            if (!parse_double(fields[j], v))
                detail::fail_validation(where(line_no) + ": field '" + header[j] + "' is not a number ('" +
                                        fields[j] + "')");
            if (j == 0)
                ys.push_back(v);
            else
                xs.push_back(v);
        }
    }
    const Index n = static_cast<Index>(ys.size());
    Vector y = Eigen::Map<const Vector>(ys.data(), n);
    RowMatrix x = Eigen::Map<const RowMatrix>(xs.data(), n, static_cast<Index>(d));
    try {
        return make_dataset(std::move(y), std::move(x), take_log);
    } catch (const ValidationError& e) {
        detail::fail_validation(source + ": " + e.what());
    }
}

Dataset read_dataset_csv(const std::filesystem::path& path, bool take_log) {
    std::ifstream in = open_input(path);
    return parse_dataset_csv(in, take_log, path.string());
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    out << 'y';
    for (Index j = 0; j < data.dim(); ++j) out << ",x" << (j + 1);
    out << '\n';
    const Vector& y = data.raw ? *data.raw : data.y;
    for (Index t = 0; t < data.size(); ++t) {
        out << format_double(y(t));
        for (Index j = 0; j < data.dim(); ++j) out << ',' << format_double(data.x(t, j));
        out << '\n';
    }
}

Vector read_vector_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_fields(line);
        std::vector<double> row;
        bool numeric = true;
        for (const auto& f : fields) {
            double v = 0.0;
            if (!parse_double(f, v)) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (line_no == 1) continue;
            detail::fail_validation(path.string() + ":" + std::to_string(line_no) + ": non-numeric value");
        }
        values.insert(values.end(), row.begin(), row.end());
    }
    if (values.empty()) detail::fail_validation(path.string() + ": no values");
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

}  // namespace pmwls
