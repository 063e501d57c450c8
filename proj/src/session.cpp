#include "stride/session.hpp"

namespace stride {

void Session::begin_record(const std::string& question, const ThoughtUnit& thought) {
    TraceRecord rec;
    rec.question = question;
    rec.thought = thought;
    trace.records.push_back(std::move(rec));
    last_results.clear();
}

Value Session::invoke(const std::string& name, const Json& args) {
    Value result = registry.invoke(name, args, memory);
    if (trace.records.empty()) {
        trace.records.push_back(TraceRecord{"", ThoughtUnit{"", {name}, false}, {}});
    }
    trace.records.back().calls.push_back(CallRecord{name, args, value_summary(result)});
    last_results.push_back(result);
    return result;
}

void replay_trace(const Trace& trace, Session& session) {
    for (const auto& rec : trace.records) {
        for (const auto& call : rec.calls) {
            session.registry.invoke(call.op, call.args, session.memory);
        }
    }
}

}  // namespace stride
