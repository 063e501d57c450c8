#pragma once

#include <string>
#include <vector>

#include "stride/value.hpp"

namespace stride {

class Registry;

/// One structured reasoning step: free text, the operations to execute
/// next, and whether reasoning is finished. exit=true together with a
/// non-empty operation list is rejected by validation.
struct ThoughtUnit {
    std::string text;
    std::vector<std::string> operations;
    bool exit = false;

    bool operator==(const ThoughtUnit&) const = default;
};

struct ValidationResult {
    std::vector<std::string> violations;  // empty means ok

    bool ok() const { return violations.empty(); }
};

/// Pure check: "premature-exit" when exit=true with operations present,
/// "unknown-op:<name>" for names absent from the registry.
ValidationResult validate_thought(const ThoughtUnit& t, const Registry& registry);

Json thought_to_json(const ThoughtUnit& t);
ThoughtUnit thought_from_json(const Json& j);

}  // namespace stride
