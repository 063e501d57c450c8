#include "stride/memory.hpp"

namespace stride {

void WorkingMemory::write(const std::string& key, Value v) {
    auto it = entries_.find(key);
    if (it != entries_.end() && !same_shape(it->second, v)) {
        throw OpError("shape-mismatch", "key '" + key + "' was written with a different shape");
    }
    entries_[key] = std::move(v);
}

const Value& WorkingMemory::read(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw OpError("missing-key", "no entry '" + key + "' in working memory");
    }
    return it->second;
}

bool WorkingMemory::contains(const std::string& key) const {
    return entries_.count(key) > 0;
}

double WorkingMemory::read_scalar(const std::string& key) const {
    const Value& v = read(key);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    throw OpError("type-mismatch", "entry '" + key + "' is not a scalar");
}

int WorkingMemory::read_int(const std::string& key) const {
    return static_cast<int>(read_scalar(key));
}

const Vector& WorkingMemory::read_vector(const std::string& key) const {
    const Value& v = read(key);
    if (const auto* p = std::get_if<Vector>(&v)) return *p;
    throw OpError("type-mismatch", "entry '" + key + "' is not a vector");
}

const Matrix& WorkingMemory::read_matrix(const std::string& key) const {
    const Value& v = read(key);
    if (const auto* p = std::get_if<Matrix>(&v)) return *p;
    throw OpError("type-mismatch", "entry '" + key + "' is not a matrix");
}

const Tensor3& WorkingMemory::read_tensor(const std::string& key) const {
    const Value& v = read(key);
    if (const auto* p = std::get_if<Tensor3>(&v)) return *p;
    throw OpError("type-mismatch", "entry '" + key + "' is not a tensor");
}

const std::string& WorkingMemory::read_string(const std::string& key) const {
    const Value& v = read(key);
    if (const auto* p = std::get_if<std::string>(&v)) return *p;
    throw OpError("type-mismatch", "entry '" + key + "' is not a string");
}

Vector& WorkingMemory::mutable_vector(const std::string& key) {
    return const_cast<Vector&>(read_vector(key));
}

Matrix& WorkingMemory::mutable_matrix(const std::string& key) {
    return const_cast<Matrix&>(read_matrix(key));
}

Tensor3& WorkingMemory::mutable_tensor(const std::string& key) {
    return const_cast<Tensor3&>(read_tensor(key));
}

}  // namespace stride
