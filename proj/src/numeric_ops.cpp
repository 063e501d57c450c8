#include "stride/numeric_ops.hpp"

#include <algorithm>

namespace stride {

std::vector<int> get_arg_max(const std::vector<double>& values) {
    if (values.empty()) throw OpError("empty-list", "GetArgMax needs a non-empty list");
    double best = *std::max_element(values.begin(), values.end());
    std::vector<int> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= best - kArgmaxTieTolerance) out.push_back(static_cast<int>(i));
    }
    return out;
}

double get_max(const std::vector<double>& values) {
    if (values.empty()) throw OpError("empty-list", "GetMax needs a non-empty list");
    return *std::max_element(values.begin(), values.end());
}

void register_numeric_ops(Registry& registry) {
    registry.register_op(
        OpDescriptor{"GetArgMax",
                     "return the indices of the maximal value in the given list of numbers",
                     {{"values", ArgType::RealList}},
                     "list"},
        [](const Json& args, WorkingMemory&) -> Value {
            auto idx = get_arg_max(args.at("values").get<std::vector<double>>());
            Vector out(idx.begin(), idx.end());
            return out;
        });
    registry.register_op(
        OpDescriptor{"GetMax",
                     "return the maximal value in the given list of numbers",
                     {{"values", ArgType::RealList}},
                     "scalar"},
        [](const Json& args, WorkingMemory&) -> Value {
            return get_max(args.at("values").get<std::vector<double>>());
        });
}

}  // namespace stride
