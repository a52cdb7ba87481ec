#include "sparsemoo/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sparsemoo {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }
    return std::string(buf, ptr);
}

namespace {

nlohmann::json matrix_rows(const Matrix& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            row.push_back(M(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json vector_list(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Matrix matrix_from(const nlohmann::json& rows, int n, const char* name) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
        throw DataError(std::string("instance: '") + name + "' must have " + std::to_string(n) + " rows");
    }
    Matrix M(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n) {
            throw DataError(std::string("instance: '") + name + "' row " + std::to_string(i + 1) + " has wrong length");
        }
        for (int j = 0; j < n; ++j) {
            M(i, j) = row[static_cast<std::size_t>(j)].get<double>();
        }
    }
    return M;
}

Vector vector_from(const nlohmann::json& list, int n, const char* name) {
    if (!list.is_array() || static_cast<int>(list.size()) != n) {
        throw DataError(std::string("instance: '") + name + "' must have " + std::to_string(n) + " entries");
    }
    Vector v(n);
    for (int i = 0; i < n; ++i) {
        v(i) = list[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

}  // namespace

nlohmann::json quadratic_to_json(const QuadraticInstance& inst) {
    nlohmann::json j;
    j["type"] = "quadratic";
    j["n"] = inst.n;
    j["kappa"] = inst.kappa;
    j["seed"] = inst.seed;
    j["s"] = inst.s;
    j["Q1"] = matrix_rows(inst.Q1);
    j["Q2"] = matrix_rows(inst.Q2);
    j["c1"] = vector_list(inst.c1);
    j["c2"] = vector_list(inst.c2);
    if (inst.constants.size() == 2 && !inst.constants.isZero(0.0)) {
        j["constants"] = vector_list(inst.constants);
    }
    return j;
}

QuadraticInstance quadratic_from_json(const nlohmann::json& j) {
    try {
        if (j.at("type").get<std::string>() != "quadratic") {
            throw DataError("instance: expected type 'quadratic'");
        }
        QuadraticInstance inst;
        inst.n = j.at("n").get<int>();
        inst.kappa = j.at("kappa").get<double>();
        inst.seed = j.at("seed").get<std::uint64_t>();
        inst.s = j.value("s", 0);
        inst.Q1 = matrix_from(j.at("Q1"), inst.n, "Q1");
        inst.Q2 = matrix_from(j.at("Q2"), inst.n, "Q2");
        inst.c1 = vector_from(j.at("c1"), inst.n, "c1");
        inst.c2 = vector_from(j.at("c2"), inst.n, "c2");
        inst.constants = j.contains("constants") ? vector_from(j.at("constants"), 2, "constants") : Vector::Zero(2);
        return inst;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("instance: ") + e.what());
    }
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw DataError("write failed for '" + path + "'");
    }
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

LoadedInstance load_instance(const std::string& path) {
    const nlohmann::json j = read_json(path);
    LoadedInstance out;
    try {
        out.type = j.at("type").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw DataError(path + ": missing 'type'");
    }
    if (out.type == "quadratic") {
        QuadraticInstance inst = quadratic_from_json(j);
        out.s = inst.s;
        out.problem = std::make_unique<QuadraticProblem>(inst.problem());
        out.description = {{"type", "quadratic"}, {"n", inst.n}, {"kappa", inst.kappa}, {"seed", inst.seed}, {"s", inst.s}};
    } else if (out.type == "logistic") {
        std::string dataset;
        std::string label;
        try {
            dataset = j.at("dataset").get<std::string>();
            label = j.at("label_column").get<std::string>();
            out.s = j.value("s", 0);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ": " + e.what());
        }
        fs::path data_path(dataset);
        if (data_path.is_relative()) {
            data_path = fs::path(path).parent_path() / data_path;
        }
        Dataset data = load_dataset(data_path.string(), label);
        out.logistic = true;
        out.description = {{"type", "logistic"},
                           {"dataset", dataset},
                           {"label_column", label},
                           {"s", out.s},
                           {"N", data.samples.rows()},
                           {"n", data.samples.cols()},
                           {"dropped_rows", data.dropped_rows},
                           {"warnings", data.warnings}};
        out.problem = std::make_unique<LogisticProblem>(std::move(data.samples), std::move(data.labels));
    } else {
        throw DataError(path + ": unknown instance type '" + out.type + "'");
    }
    return out;
}

std::string front_csv(const Front& front) {
    std::ostringstream out;
    const int m = front.empty() ? 2 : front.num_objectives();
    int n = 0;
    for (const FrontRow& row : front.rows) {
        if (row.x) {
            n = std::max(n, static_cast<int>(row.x->size()));
        }
    }
    for (int j = 0; j < m; ++j) {
        out << (j ? "," : "") << 'f' << (j + 1);
    }
    out << ",support";
    for (int i = 0; i < n; ++i) {
        out << ",x_" << (i + 1);
    }
    out << '\n';
    for (const FrontRow& row : front.rows) {
        for (Eigen::Index j = 0; j < row.f.size(); ++j) {
            out << (j ? "," : "") << format_double(row.f(j));
        }
        out << ',' << (row.support ? row.support->to_string() : "");
        for (int i = 0; i < n; ++i) {
            out << ',';
            if (row.x) {
                out << format_double((*row.x)(i));
            }
        }
        out << '\n';
    }
    return out.str();
}

void write_front_csv(const std::string& path, const Front& front) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write '" + path + "'");
    }
    out << front_csv(front);
    if (!out) {
        throw DataError("write failed for '" + path + "'");
    }
}

namespace {

double parse_number(const std::string& cell, const std::string& path, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw DataError(path + ": non-numeric cell '" + cell + "' at row " + std::to_string(row) + ", column " +
                        std::to_string(col + 1));
    }
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') {
            cell.pop_back();
        }
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

}  // namespace

Front read_front_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path + ": missing header");
    }
    const std::vector<std::string> header = split(line);
    std::size_t m = 0;
    while (m < header.size() && header[m] == "f" + std::to_string(m + 1)) {
        ++m;
    }
    if (m == 0) {
        throw DataError(path + ": header must start with f1");
    }
    const bool has_support = m < header.size() && header[m] == "support";
    const std::size_t x_start = m + (has_support ? 1 : 0);
    const int n = static_cast<int>(header.size() - x_start);

    Front front;
    std::size_t row_number = 1;
    while (std::getline(in, line)) {
        ++row_number;
        if (line.empty() || line == "\r") {
            continue;
        }
        const std::vector<std::string> cells = split(line);
        if (cells.size() != header.size()) {
            throw DataError(path + ": row " + std::to_string(row_number) + " has the wrong number of cells");
        }
        FrontRow row;
        row.f.resize(static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < m; ++j) {
            row.f(static_cast<Eigen::Index>(j)) = parse_number(cells[j], path, row_number, j);
        }
        if (n > 0) {
            Vector x(n);
            for (int i = 0; i < n; ++i) {
                x(i) = parse_number(cells[x_start + static_cast<std::size_t>(i)], path, row_number,
                                    x_start + static_cast<std::size_t>(i));
            }
            row.x = std::move(x);
        }
        if (has_support && n > 0) {
            row.support = SupportSet::parse(cells[m], n);
        }
        front.rows.push_back(std::move(row));
    }
    return front;
}

}  // namespace sparsemoo
