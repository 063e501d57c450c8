#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace stride {

using Json = nlohmann::json;

/// Error raised by operations and memory access. `code` is a short
/// machine-readable identifier such as "unknown-op" or "out-of-horizon".
class OpError : public std::runtime_error {
public:
    OpError(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

using Vector = std::vector<double>;

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    bool operator==(const Matrix&) const = default;
};

struct Tensor3 {
    std::size_t d0 = 0;
    std::size_t d1 = 0;
    std::size_t d2 = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(std::size_t a, std::size_t b, std::size_t c, double fill = 0.0)
        : d0(a), d1(b), d2(c), data(a * b * c, fill) {}

    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data[(i * d1 + j) * d2 + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(i * d1 + j) * d2 + k];
    }

    bool operator==(const Tensor3&) const = default;
};

/// A value held in working memory or returned by an operation.
/// monostate is the "ack" result of mutating operations.
using Value = std::variant<std::monostate, double, Vector, Matrix, Tensor3, std::string>;

bool same_shape(const Value& a, const Value& b);

/// Full JSON round-trip, used by instance files and memory snapshots.
Json value_to_json(const Value& v);
Value value_from_json(const Json& j);

/// Compact form stored in trace call records: scalars, strings and short
/// vectors verbatim; matrices/tensors reduced to their shape.
Json value_summary(const Value& v);

}  // namespace stride
