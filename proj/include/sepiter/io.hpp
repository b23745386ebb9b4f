#pragma once

// JSON and CSV formats.
//
// Operator: {"dims": [d1,...,dN], "matrix": [[[re,im], ...], ...]} (row-major D x D)
// Vector:   {"dims": [d1,...,dN], "entries": [[re,im], ...]}

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "sepiter/see_solver.hpp"
#include "sepiter/tensor_core.hpp"

namespace sepiter {

using json = nlohmann::json;

/// Malformed or unreadable input; the message names the offending location.
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RawOperator {
    Matrix matrix;
    SubsystemDims dims;
};

json complex_to_json(Complex z);
json matrix_to_json(const Matrix& m, const SubsystemDims& dims);
json vector_to_json(const Vector& v, const SubsystemDims& dims);
json product_state_to_json(const ProductState& s);
json spi_result_to_json(const SpiResult& r);

/// Parses the operator layout without checking Hermiticity.
RawOperator parse_operator(const json& doc, const std::string& source = "operator");
MultipartiteOperator operator_from_json(const json& doc, const std::string& source = "operator");
ComplexVector vector_from_json(const json& doc, const std::string& source = "vector");

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal string that round-trips the double.
std::string format_double(double v);

/// RFC-4180 writer; quotes fields containing separators, quotes or newlines.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<std::string>& fields);
    [[nodiscard]] const std::string& text() const { return text_; }
    [[nodiscard]] std::size_t rows() const { return rows_; }

  private:
    void append(const std::vector<std::string>& fields);

    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string text_;
};

}  // namespace sepiter
