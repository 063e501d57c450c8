#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "stride/memory.hpp"
#include "stride/value.hpp"

namespace stride {

enum class ArgType {
    Int,
    Real,
    RealList,
    String,
    IntOrNull,  // e.g. excluded_agent, where null means "no exclusion"
};

struct ArgSpec {
    std::string name;
    ArgType type;
};

struct OpDescriptor {
    std::string name;
    std::string description;
    std::vector<ArgSpec> args;
    std::string result_type;  // "ack", "scalar", "list", ...
};

using OpFunction = std::function<Value(const Json& args, WorkingMemory& mem)>;

/// Uniquely named operations plus their argument schemas. Invocation
/// validates arguments against the schema before the operation touches
/// memory, so a schema mismatch never leaves a partial write behind.
class Registry {
public:
    void register_op(OpDescriptor desc, OpFunction fn);
    bool has(const std::string& name) const;
    const OpDescriptor& descriptor(const std::string& name) const;
    std::vector<std::string> names() const;

    /// Runs the operation. Throws OpError("unknown-op") or
    /// OpError("schema-mismatch") before execution; downstream operation
    /// errors propagate with the op name attached.
    Value invoke(const std::string& name, const Json& args, WorkingMemory& mem) const;

    /// Schema check only, shared with invoke.
    void check_args(const std::string& name, const Json& args) const;

private:
    struct Entry {
        OpDescriptor desc;
        OpFunction fn;
    };
    std::map<std::string, Entry> ops_;
};

}  // namespace stride
