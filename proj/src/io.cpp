#include "sepiter/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sepiter {

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const Matrix& m, const SubsystemDims& dims) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return json{{"dims", std::vector<int>(dims.values().begin(), dims.values().end())}, {"matrix", std::move(rows)}};
}

json vector_to_json(const Vector& v, const SubsystemDims& dims) {
    json entries = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) entries.push_back(complex_to_json(v[i]));
    return json{{"dims", std::vector<int>(dims.values().begin(), dims.values().end())},
                {"entries", std::move(entries)}};
}

json product_state_to_json(const ProductState& s) {
    json doc = vector_to_json(flatten(s).entries, s.dims());
    json factors = json::array();
    for (const auto& f : s.factors()) {
        json one = json::array();
        for (Eigen::Index i = 0; i < f.size(); ++i) one.push_back(complex_to_json(f[i]));
        factors.push_back(std::move(one));
    }
    doc["factors"] = std::move(factors);
    return doc;
}

json spi_result_to_json(const SpiResult& r) {
    json doc = product_state_to_json(r.state);
    doc["g"] = r.g;
    doc["residual"] = r.residual;
    doc["cycles"] = r.cycles;
    doc["converged"] = r.converged;
    doc["start_index"] = r.start_index;
    return doc;
}

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& where, const std::string& what) {
    throw InputError(source + ": " + where + ": " + what);
}

SubsystemDims parse_dims(const json& doc, const std::string& source) {
    if (!doc.is_object()) fail(source, "<root>", "expected a JSON object");
    if (!doc.contains("dims")) fail(source, "dims", "missing field");
    const json& d = doc.at("dims");
    if (!d.is_array() || d.empty()) fail(source, "dims", "expected a nonempty array of positive integers");
    std::vector<int> dims;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!d[i].is_number_integer() || d[i].get<long>() < 1)
            fail(source, "dims[" + std::to_string(i) + "]", "expected a positive integer");
        dims.push_back(d[i].get<int>());
    }
    return SubsystemDims(std::move(dims));
}

Complex parse_complex(const json& z, const std::string& source, const std::string& where) {
    if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        fail(source, where, "expected a [re, im] pair of numbers");
    return {z[0].get<double>(), z[1].get<double>()};
}

}  // namespace

RawOperator parse_operator(const json& doc, const std::string& source) {
    SubsystemDims dims = parse_dims(doc, source);
    if (!doc.contains("matrix")) fail(source, "matrix", "missing field");
    const json& rows = doc.at("matrix");
    const auto n = static_cast<std::size_t>(dims.total());
    if (!rows.is_array() || rows.size() != n)
        fail(source, "matrix", "expected " + std::to_string(n) + " rows for dims " + dims.to_string());
    Matrix m(dims.total(), dims.total());
    for (std::size_t r = 0; r < n; ++r) {
        const std::string where = "matrix[" + std::to_string(r) + "]";
        if (!rows[r].is_array() || rows[r].size() != n) fail(source, where, "expected " + std::to_string(n) + " entries");
        for (std::size_t c = 0; c < n; ++c)
            m(r, c) = parse_complex(rows[r][c], source, where + "[" + std::to_string(c) + "]");
    }
    return {std::move(m), std::move(dims)};
}

MultipartiteOperator operator_from_json(const json& doc, const std::string& source) {
    RawOperator raw = parse_operator(doc, source);
    try {
        return MultipartiteOperator(std::move(raw.matrix), std::move(raw.dims));
    } catch (const StructuralError& e) {
        fail(source, "matrix", e.what());
    }
}

ComplexVector vector_from_json(const json& doc, const std::string& source) {
    SubsystemDims dims = parse_dims(doc, source);
    if (!doc.contains("entries")) fail(source, "entries", "missing field");
    const json& e = doc.at("entries");
    const auto n = static_cast<std::size_t>(dims.total());
    if (!e.is_array() || e.size() != n) fail(source, "entries", "expected " + std::to_string(n) + " entries");
    Vector v(dims.total());
    for (std::size_t i = 0; i < n; ++i) v[i] = parse_complex(e[i], source, "entries[" + std::to_string(i) + "]");
    return ComplexVector(std::move(v), std::move(dims));
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string() + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": byte " + std::to_string(e.byte) + ": invalid JSON");
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path.string() + ": cannot open for writing");
    out << text;
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { append(header); }

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) throw StructuralError("CsvWriter: wrong number of fields");
    append(fields);
    ++rows_;
}

void CsvWriter::append(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) text_ += ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\r\n") == std::string::npos) {
            text_ += f;
        } else {
            text_ += '"';
            for (char c : f) {
                if (c == '"') text_ += '"';
                text_ += c;
            }
            text_ += '"';
        }
    }
    text_ += "\r\n";
}

}  // namespace sepiter
