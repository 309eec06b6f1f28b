#include "kcf/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace kcf::csv {

std::string format_full(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    fields.push_back(field);
    return fields;
}

double parse_number(const std::string& field, const std::string& path, std::size_t line_no) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        std::ostringstream msg;
        msg << path << ": parse error at line " << line_no << ": not a number: '" << field << "'";
        throw ConfigError(msg.str());
    }
    return value;
}

struct ColumnRoles {
    Index y = -1;
    Index d = -1;
    Index v = -1;
    std::vector<Index> x;  // position of x1, x2, ... in file order
};

ColumnRoles parse_header(const std::vector<std::string>& names, const std::string& path,
                         bool covariates_only) {
    ColumnRoles roles;
    std::vector<std::pair<int, Index>> x_columns;
    for (Index col = 0; col < static_cast<Index>(names.size()); ++col) {
        const std::string& name = names[static_cast<std::size_t>(col)];
        if (name == "y")
            roles.y = col;
        else if (name == "d")
            roles.d = col;
        else if (name == "v")
            roles.v = col;
        else if (name.size() > 1 && name[0] == 'x') {
            int index = 0;
            const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(),
                                                   index);
            if (ec != std::errc() || ptr != name.data() + name.size() || index < 1)
                throw ConfigError(path + ": unrecognized column '" + name + "' in header");
            x_columns.emplace_back(index, col);
        } else {
            throw ConfigError(path + ": unrecognized column '" + name + "' in header");
        }
    }
    std::sort(x_columns.begin(), x_columns.end());
    for (std::size_t k = 0; k < x_columns.size(); ++k) {
        if (x_columns[k].first != static_cast<int>(k) + 1)
            throw ConfigError(path + ": covariate columns must be numbered x1..xp");
        roles.x.push_back(x_columns[k].second);
    }
    if (covariates_only) {
        if (roles.y >= 0 || roles.d >= 0 || roles.v >= 0)
            throw ConfigError(path + ": covariate file must contain x1..xp columns only");
        if (roles.x.empty()) throw ConfigError(path + ": no covariate columns found");
    } else {
        if (roles.y < 0) throw ConfigError(path + ": missing required column 'y'");
        if (roles.d < 0) throw ConfigError(path + ": missing required column 'd'");
        if (roles.x.empty()) throw ConfigError(path + ": no covariate columns x1..xp found");
    }
    return roles;
}

std::vector<std::vector<double>> read_rows(std::ifstream& in, const std::string& path,
                                           std::size_t n_columns) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 1;  // header was line 1
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_line(line);
        if (fields.size() != n_columns) {
            std::ostringstream msg;
            msg << path << ": parse error at line " << line_no << ": expected " << n_columns
                << " fields, found " << fields.size();
            throw ConfigError(msg.str());
        }
        std::vector<double> row(fields.size());
        for (std::size_t k = 0; k < fields.size(); ++k)
            row[k] = parse_number(fields[k], path, line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError(path + ": no data rows");
    return rows;
}

std::vector<std::string> read_header(std::ifstream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": missing header row");
    return split_line(line);
}

}  // namespace

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    const std::vector<std::string> header = read_header(in, path);
    const ColumnRoles roles = parse_header(header, path, false);
    const auto rows = read_rows(in, path, header.size());

    const Index n = static_cast<Index>(rows.size());
    Dataset data;
    data.y.resize(n);
    data.d.resize(n);
    if (roles.v >= 0) data.v = Vec(n);
    data.x.resize(n, static_cast<Index>(roles.x.size()));
    for (Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        data.y[i] = row[static_cast<std::size_t>(roles.y)];
        data.d[i] = row[static_cast<std::size_t>(roles.d)];
        if (roles.v >= 0) (*data.v)[i] = row[static_cast<std::size_t>(roles.v)];
        for (std::size_t k = 0; k < roles.x.size(); ++k)
            data.x(i, static_cast<Index>(k)) = row[static_cast<std::size_t>(roles.x[k])];
    }
    return data;
}

Mat read_covariates(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    const std::vector<std::string> header = read_header(in, path);
    const ColumnRoles roles = parse_header(header, path, true);
    const auto rows = read_rows(in, path, header.size());

    Mat x(static_cast<Index>(rows.size()), static_cast<Index>(roles.x.size()));
    for (Index i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < roles.x.size(); ++k)
            x(i, static_cast<Index>(k)) =
                rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(roles.x[k])];
    return x;
}

void write_text(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp + " for writing");
        out << contents;
        if (!out) throw IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw IoError("rename failed: " + tmp + " -> " + path + ": " + std::strerror(errno));
}

void write_dataset(const std::string& path, const Dataset& data) {
    data.validate();
    std::ostringstream out;
    out << "y,d";
    if (data.v) out << ",v";
    for (Index k = 0; k < data.x.cols(); ++k) out << ",x" << k + 1;
    out << "\n";
    for (Index i = 0; i < data.n(); ++i) {
        out << format_full(data.y[i]) << ',' << format_full(data.d[i]);
        if (data.v) out << ',' << format_full((*data.v)[i]);
        for (Index k = 0; k < data.x.cols(); ++k) out << ',' << format_full(data.x(i, k));
        out << "\n";
    }
    write_text(path, out.str());
}

void write_curve(const std::string& path, const CurveEstimate& curve) {
    std::ostringstream out;
    if (curve.grid.cols() == 1) {
        out << "d,estimate\n";
    } else if (curve.estimand == Estimand::Cate) {
        out << "d,v,estimate\n";
    } else {
        out << "d,dprime,estimate\n";
    }
    for (Index i = 0; i < curve.grid.rows(); ++i) {
        for (Index k = 0; k < curve.grid.cols(); ++k) out << format_full(curve.grid(i, k)) << ',';
        out << format_full(curve.values[i]) << "\n";
    }
    write_text(path, out.str());
}

void write_samples(const std::string& path, const Vec& ys) {
    std::ostringstream out;
    out << "y\n";
    for (Index i = 0; i < ys.size(); ++i) out << format_full(ys[i]) << "\n";
    write_text(path, out.str());
}

void write_study(const std::string& path, const simulate::StudyResult& result,
                 const std::string& design_name) {
    std::ostringstream out;
    out << "design,n,replication,mse\n";
    for (const auto& cell : result.cells) {
        out << design_name << ',' << cell.n << ',' << cell.replication << ','
            << (cell.error.empty() ? format_full(cell.mse) : std::string("nan")) << "\n";
    }
    write_text(path, out.str());
}

}  // namespace kcf::csv
