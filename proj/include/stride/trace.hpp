#pragma once

#include <string>
#include <vector>

#include "stride/thought.hpp"
#include "stride/value.hpp"

namespace stride {

struct CallRecord {
    std::string op;
    Json args;
    Json result;  // summary, see value_summary
};

struct TraceRecord {
    std::string question;
    ThoughtUnit thought;
    std::vector<CallRecord> calls;
};

/// Execution log of a reasoning session. Serialized as one JSON object
/// per record, newline-delimited.
struct Trace {
    std::vector<TraceRecord> records;

    std::string to_jsonl() const;
    static Trace from_jsonl(const std::string& text);
};

}  // namespace stride
