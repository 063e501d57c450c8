#include "stride/llm_adapter.hpp"

#include <cstdlib>
#include <stdexcept>

#include <httplib.h>

namespace stride {

namespace {

std::string require_env(const std::string& name) {
    const char* value = std::getenv(name.c_str());
    if (value == nullptr || *value == '\0') {
        throw OpError("missing-credential", "environment variable " + name + " is not set");
    }
    return value;
}

Json schema_json(const Registry& registry) {
    Json tools = Json::array();
    for (const std::string& name : registry.names()) {
        const OpDescriptor& desc = registry.descriptor(name);
        Json args = Json::object();
        for (const ArgSpec& a : desc.args) {
            switch (a.type) {
                case ArgType::Int: args[a.name] = "int"; break;
                case ArgType::Real: args[a.name] = "real"; break;
                case ArgType::RealList: args[a.name] = "list of real"; break;
                case ArgType::String: args[a.name] = "string"; break;
                case ArgType::IntOrNull: args[a.name] = "int or null"; break;
            }
        }
        tools.push_back(Json{{"name", name},
                             {"description", desc.description},
                             {"args", args},
                             {"result", desc.result_type}});
    }
    return tools;
}

}  // namespace

LlmController::LlmController(LlmConfig config, std::string system_prompt,
                             std::string problem_prompt, std::string instance_prompt,
                             Demonstration demonstration)
    : config_(std::move(config)), system_prompt_(std::move(system_prompt)) {
    context_ = problem_prompt + "\n\n" + instance_prompt +
               "\n\nHere is an example demonstration trace:\n" + demonstration.trace.to_jsonl() +
               "\nNote: although the problem description above counts time from 0, every "
               "operation argument uses 1-based time indices (h = 1..H, t = 1..T), as in the "
               "demonstration.\n"
               "Respond with one JSON object per turn of the form "
               R"({"text": "...", "operations": ["..."], "exit": false}.)";
    transcript_ = Json::array();
}

std::string LlmController::complete(const std::string& extra_user_message) {
    std::string url = require_env(config_.url_env);
    std::string key = require_env(config_.key_env);

    Json messages = Json::array();
    messages.push_back(Json{{"role", "system"}, {"content", system_prompt_}});
    messages.push_back(Json{{"role", "user"}, {"content", context_}});
    for (const Json& turn : transcript_) messages.push_back(turn);
    if (!extra_user_message.empty()) {
        messages.push_back(Json{{"role", "user"}, {"content", extra_user_message}});
    }

    httplib::Client client(url);
    httplib::Headers headers{{"Authorization", "Bearer " + key}};
    Json body{{"model", config_.model}, {"messages", messages}, {"temperature", 0.0}};
    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res || res->status != 200) {
        throw OpError("llm-service-error",
                      res ? "status " + std::to_string(res->status) : "no response");
    }
    Json reply = Json::parse(res->body);
    std::string content = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    if (!extra_user_message.empty()) {
        transcript_.push_back(Json{{"role", "user"}, {"content", extra_user_message}});
    }
    transcript_.push_back(Json{{"role", "assistant"}, {"content", content}});
    return content;
}

void LlmController::run(Session& session) {
    context_ += "\n\nAvailable operations:\n" + schema_json(session.registry).dump();

    for (int step = 0; step < config_.max_thoughts; ++step) {
        std::string ask = step == 0 ? "Begin. Emit your first thought." : "Emit the next thought.";
        ThoughtUnit thought;
        bool valid = false;
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            std::string content = complete(ask);
            try {
                thought = thought_from_json(Json::parse(content));
            } catch (const std::exception& e) {
                ask = std::string("Your reply was not a valid thought JSON object (") + e.what() +
                      "). Please revise and resubmit.";
                continue;
            }
            ValidationResult check = validate_thought(thought, session.registry);
            if (check.ok()) {
                valid = true;
                break;
            }
            std::string problems;
            for (const std::string& v : check.violations) problems += v + "; ";
            ask = "Your thought failed validation (" + problems + "). Please revise and resubmit.";
        }
        if (!valid) throw OpError("llm-validation-failure", "retries exhausted");

        session.begin_record("", thought);
        for (const std::string& op : thought.operations) {
            std::string args_text = complete(
                "Provide the JSON arguments object for the operation '" + op +
                "'. Reply with the JSON object only.");
            Value result = session.invoke(op, Json::parse(args_text));
            transcript_.push_back(Json{
                {"role", "user"},
                {"content", "Result of " + op + ": " + value_summary(result).dump()}});
        }
        if (thought.exit) return;
    }
    throw OpError("llm-runaway", "thought budget exhausted without exit");
}

}  // namespace stride
