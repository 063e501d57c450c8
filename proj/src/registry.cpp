#include "stride/registry.hpp"

#include "stride/thought.hpp"

namespace stride {

namespace {

bool arg_matches(const Json& v, ArgType type) {
    switch (type) {
        case ArgType::Int:
            return v.is_number_integer();
        case ArgType::Real:
            return v.is_number();
        case ArgType::RealList:
            if (!v.is_array()) return false;
            for (const auto& e : v) {
                if (!e.is_number()) return false;
            }
            return true;
        case ArgType::String:
            return v.is_string();
        case ArgType::IntOrNull:
            return v.is_null() || v.is_number_integer();
    }
    return false;
}

}  // namespace

void Registry::register_op(OpDescriptor desc, OpFunction fn) {
    if (ops_.count(desc.name)) {
        throw OpError("duplicate-op", "operation '" + desc.name + "' already registered");
    }
    std::string name = desc.name;
    ops_.emplace(name, Entry{std::move(desc), std::move(fn)});
}

bool Registry::has(const std::string& name) const { return ops_.count(name) > 0; }

const OpDescriptor& Registry::descriptor(const std::string& name) const {
    auto it = ops_.find(name);
    if (it == ops_.end()) throw OpError("unknown-op", "'" + name + "' is not registered");
    return it->second.desc;
}

std::vector<std::string> Registry::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : ops_) out.push_back(k);
    return out;
}

void Registry::check_args(const std::string& name, const Json& args) const {
    const OpDescriptor& desc = descriptor(name);
    if (!args.is_object()) {
        throw OpError("schema-mismatch", name + ": arguments must be an object");
    }
    for (const ArgSpec& spec : desc.args) {
        if (!args.contains(spec.name)) {
            throw OpError("schema-mismatch", name + ": missing argument '" + spec.name + "'");
        }
        if (!arg_matches(args.at(spec.name), spec.type)) {
            throw OpError("schema-mismatch", name + ": bad type for argument '" + spec.name + "'");
        }
    }
    for (auto it = args.begin(); it != args.end(); ++it) {
        bool known = false;
        for (const ArgSpec& spec : desc.args) {
            if (spec.name == it.key()) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw OpError("schema-mismatch", name + ": unexpected argument '" + it.key() + "'");
        }
    }
}

Value Registry::invoke(const std::string& name, const Json& args, WorkingMemory& mem) const {
    check_args(name, args);
    const auto& entry = ops_.at(name);
    try {
        return entry.fn(args, mem);
    } catch (const OpError& e) {
        throw OpError(e.code(), std::string("in ") + name + ": " + e.what());
    }
}

ValidationResult validate_thought(const ThoughtUnit& t, const Registry& registry) {
    ValidationResult r;
    if (t.exit && !t.operations.empty()) {
        r.violations.push_back("premature-exit");
    }
    for (const auto& op : t.operations) {
        if (!registry.has(op)) {
            r.violations.push_back("unknown-op:" + op);
        }
    }
    return r;
}

Json thought_to_json(const ThoughtUnit& t) {
    return Json{{"text", t.text}, {"operations", t.operations}, {"exit", t.exit}};
}

ThoughtUnit thought_from_json(const Json& j) {
    ThoughtUnit t;
    t.text = j.at("text").get<std::string>();
    t.operations = j.at("operations").get<std::vector<std::string>>();
    t.exit = j.at("exit").get<bool>();
    return t;
}

}  // namespace stride
