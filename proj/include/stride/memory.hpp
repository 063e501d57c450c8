#pragma once

#include <map>
#include <string>

#include "stride/value.hpp"

namespace stride {

/// Keyed store of problem parameters and intermediate results. Keys are
/// flat strings namespaced by module ("mdp/Q", "bargain/prices", ...).
/// A tensor entry's shape is fixed by its first write; reads of absent
/// keys throw instead of defaulting.
class WorkingMemory {
public:
    void write(const std::string& key, Value v);
    const Value& read(const std::string& key) const;
    bool contains(const std::string& key) const;

    double read_scalar(const std::string& key) const;
    int read_int(const std::string& key) const;
    const Vector& read_vector(const std::string& key) const;
    const Matrix& read_matrix(const std::string& key) const;
    const Tensor3& read_tensor(const std::string& key) const;
    const std::string& read_string(const std::string& key) const;

    Vector& mutable_vector(const std::string& key);
    Matrix& mutable_matrix(const std::string& key);
    Tensor3& mutable_tensor(const std::string& key);

    const std::map<std::string, Value>& entries() const { return entries_; }

    bool operator==(const WorkingMemory&) const = default;

private:
    std::map<std::string, Value> entries_;
};

}  // namespace stride
