#pragma once

#include <string>
#include <vector>

#include "stride/memory.hpp"
#include "stride/registry.hpp"
#include "stride/trace.hpp"

namespace stride {

/// Single-threaded (memory, registry, trace) triple. Sessions are
/// independent; there is no shared mutable state across them.
class Session {
public:
    WorkingMemory memory;
    Registry registry;
    Trace trace;

    /// Results of the operations run under the current thought, in call
    /// order. Controllers use these to decide the next step.
    std::vector<Value> last_results;

    /// Opens a new trace record for a validated thought.
    void begin_record(const std::string& question, const ThoughtUnit& thought);

    /// Validates args, executes the op, appends a call record to the
    /// active trace record, and remembers the result.
    Value invoke(const std::string& name, const Json& args);
};

/// Re-executes the recorded calls of a trace against a session whose
/// memory was initialized with the same instance. Replay of any
/// scripted-controller trace reproduces memory bitwise.
void replay_trace(const Trace& trace, Session& session);

}  // namespace stride
