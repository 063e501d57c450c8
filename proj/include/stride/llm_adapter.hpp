#pragma once

#include <string>

#include "stride/controllers.hpp"

namespace stride {

/// Configuration for the external chat-completion controller. The
/// endpoint URL and credential come from environment variables so that
/// no secret ever lands in config files or traces.
struct LlmConfig {
    std::string url_env = "STRIDE_LLM_URL";       // e.g. http://host:port
    std::string path = "/v1/chat/completions";
    std::string key_env = "STRIDE_LLM_API_KEY";
    std::string model = "gpt-4o";
    int max_retries = 3;  // revise-and-resubmit attempts per thought
    int max_thoughts = 256;
};

/// Drives a session by asking an external LLM for one ThoughtUnit at a
/// time. The system/problem/instance prompts come from assets/prompts;
/// the demonstration trace is included as a few-shot exemplar. Each
/// emitted unit must pass validate_thought; on violation the model is
/// prompted to revise and resubmit, up to max_retries times. Operation
/// arguments are decided on separate API calls, one per operation.
class LlmController {
public:
    LlmController(LlmConfig config, std::string system_prompt, std::string problem_prompt,
                  std::string instance_prompt, Demonstration demonstration);

    /// Runs the reasoning loop until the model exits.
    void run(Session& session);

private:
    std::string complete(const std::string& extra_user_message);

    LlmConfig config_;
    std::string system_prompt_;
    std::string context_;
    Json transcript_;  // accumulated assistant/user turns
};

}  // namespace stride
