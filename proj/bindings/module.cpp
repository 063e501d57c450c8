#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stride/harness.hpp"

namespace py = pybind11;

namespace {

using stride::Json;

std::string memory_snapshot(const stride::Session& session) {
    Json j = Json::object();
    for (const auto& [key, value] : session.memory.entries()) {
        j[key] = stride::value_to_json(value);
    }
    return j.dump();
}

std::unique_ptr<stride::Session> open_session(const std::string& module,
                                              const std::string& instance_json) {
    auto session = std::make_unique<stride::Session>();
    *session = stride::make_session(module, Json::parse(instance_json));
    return session;
}

}  // namespace

PYBIND11_MODULE(stride, m) {
    m.doc() = "Strategic decision making with tool-calling reasoning sessions";

    m.def(
        "generate_instance",
        [](int S, int A, int H, std::uint64_t seed) {
            return stride::generate_instance(S, A, H, seed).to_json().dump();
        },
        py::arg("S"), py::arg("A"), py::arg("H"), py::arg("seed"));

    m.def("solve_known", [](const std::string& instance_json) {
        stride::MdpInstance inst = stride::MdpInstance::from_json(Json::parse(instance_json));
        auto [tables, policy] = stride::solve_known(inst);
        Json q = Json::array();
        for (int h = 1; h <= inst.H; ++h) {
            Json per_state = Json::array();
            for (int s = 0; s < inst.S; ++s) {
                Json row = Json::array();
                for (int a = 0; a < inst.A; ++a) row.push_back(tables.q(h, s, a));
                per_state.push_back(row);
            }
            q.push_back(per_state);
        }
        Json pi = Json::array();
        for (int h = 1; h <= inst.H; ++h) {
            Json row = Json::array();
            for (int s = 0; s < inst.S; ++s) row.push_back(policy.at(h, s));
            pi.push_back(row);
        }
        return Json{{"Q", q}, {"V1", tables.v(1, inst.s1)}, {"policy", pi}}.dump();
    }, py::arg("instance_json"));

    m.def("compute_vcg", [](const std::string& instance_json) {
        stride::MechanismInstance inst =
            stride::MechanismInstance::from_json(Json::parse(instance_json));
        stride::VcgOutcome out = stride::compute_vcg(inst);
        return Json{{"prices", out.prices},
                    {"utilities", out.utilities},
                    {"social_value", out.social_value}}
            .dump();
    }, py::arg("instance_json"));

    m.def("compute_spe", [](const std::string& instance_json) {
        stride::SpeSchedule s = stride::compute_spe(
            stride::CompleteBargainInstance::from_json(Json::parse(instance_json)));
        return Json{{"prices", s.prices}, {"u_buyer", s.u_buyer}, {"u_seller", s.u_seller}}.dump();
    }, py::arg("instance_json"));

    m.def("compute_se", [](const std::string& instance_json) {
        stride::SeSchedule s = stride::compute_se(
            stride::IncompleteBargainInstance::from_json(Json::parse(instance_json)));
        Json j = s.to_json();
        j["bisection_iterations"] = s.bisection_iterations;
        return j.dump();
    }, py::arg("instance_json"));

    m.def("best_move", [](const std::string& node_json) {
        stride::GameNode node = stride::node_from_json(Json::parse(node_json));
        return stride::best_move(node, node.to_move);
    }, py::arg("node_json"));

    m.def("generate_demonstration", [](const std::string& module,
                                       const std::string& instance_json) {
        return stride::generate_demonstration(module, Json::parse(instance_json)).to_json().dump();
    }, py::arg("module"), py::arg("instance_json"));

    m.def(
        "run_experiment",
        [](const std::string& kind, int H, int S, int A, int N, int T, int K, int instances,
           std::uint64_t seed, const std::string& out_dir) {
            stride::ExperimentConfig cfg;
            cfg.kind = kind;
            cfg.H = H;
            cfg.S = S;
            cfg.A = A;
            cfg.N = N;
            cfg.T = T;
            cfg.K = K;
            cfg.instances = instances;
            cfg.seed = seed;
            cfg.out_dir = out_dir;
            stride::MetricsReport report = stride::run_experiment(cfg);
            return Json{{"aggregate", report.aggregate},
                        {"records", Json::parse("[" + [&] {
                             std::string items;
                             for (const auto& rec : report.records) {
                                 if (!items.empty()) items += ",";
                                 items += Json{{"seed", rec.seed}, {"data", rec.data}}.dump();
                             }
                             return items;
                         }() + "]")}}
                .dump();
        },
        py::arg("kind"), py::arg("H") = 5, py::arg("S") = 3, py::arg("A") = 3, py::arg("N") = 2,
        py::arg("T") = 3, py::arg("K") = 40, py::arg("instances") = 20, py::arg("seed") = 0,
        py::arg("out_dir") = "");

    py::class_<stride::Session>(m, "Session")
        .def(py::init(&open_session), py::arg("module"), py::arg("instance_json"))
        .def("invoke",
             [](stride::Session& s, const std::string& op, const std::string& args_json) {
                 return stride::value_to_json(s.invoke(op, Json::parse(args_json))).dump();
             },
             py::arg("op"), py::arg("args_json") = "{}")
        .def("operations",
             [](const stride::Session& s) { return s.registry.names(); })
        .def("memory_json", &memory_snapshot)
        .def("trace_jsonl", [](const stride::Session& s) { return s.trace.to_jsonl(); });
}
