#include "stride/trace.hpp"

#include <sstream>

namespace stride {

std::string Trace::to_jsonl() const {
    std::ostringstream out;
    for (const auto& rec : records) {
        Json calls = Json::array();
        for (const auto& c : rec.calls) {
            calls.push_back(Json{{"op", c.op}, {"args", c.args}, {"result", c.result}});
        }
        Json j{{"question", rec.question},
               {"thought", thought_to_json(rec.thought)},
               {"calls", calls}};
        out << j.dump() << "\n";
    }
    return out.str();
}

Trace Trace::from_jsonl(const std::string& text) {
    Trace t;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j = Json::parse(line);
        TraceRecord rec;
        rec.question = j.at("question").get<std::string>();
        rec.thought = thought_from_json(j.at("thought"));
        for (const auto& c : j.at("calls")) {
            rec.calls.push_back(CallRecord{c.at("op").get<std::string>(), c.at("args"), c.at("result")});
        }
        t.records.push_back(std::move(rec));
    }
    return t;
}

}  // namespace stride
