#include "stride/value.hpp"

namespace stride {

bool same_shape(const Value& a, const Value& b) {
    if (a.index() != b.index()) return false;
    if (const auto* va = std::get_if<Vector>(&a)) {
        return va->size() == std::get<Vector>(b).size();
    }
    if (const auto* ma = std::get_if<Matrix>(&a)) {
        const auto& mb = std::get<Matrix>(b);
        return ma->rows == mb.rows && ma->cols == mb.cols;
    }
    if (const auto* ta = std::get_if<Tensor3>(&a)) {
        const auto& tb = std::get<Tensor3>(b);
        return ta->d0 == tb.d0 && ta->d1 == tb.d1 && ta->d2 == tb.d2;
    }
    return true;
}

Json value_to_json(const Value& v) {
    Json j;
    switch (v.index()) {
        case 0:
            j = {{"kind", "ack"}};
            break;
        case 1:
            j = {{"kind", "scalar"}, {"value", std::get<double>(v)}};
            break;
        case 2:
            j = {{"kind", "vector"}, {"value", std::get<Vector>(v)}};
            break;
        case 3: {
            const auto& m = std::get<Matrix>(v);
            j = {{"kind", "matrix"}, {"rows", m.rows}, {"cols", m.cols}, {"value", m.data}};
            break;
        }
        case 4: {
            const auto& t = std::get<Tensor3>(v);
            j = {{"kind", "tensor3"}, {"dims", {t.d0, t.d1, t.d2}}, {"value", t.data}};
            break;
        }
        case 5:
            j = {{"kind", "string"}, {"value", std::get<std::string>(v)}};
            break;
    }
    return j;
}

Value value_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ack") return std::monostate{};
    if (kind == "scalar") return j.at("value").get<double>();
    if (kind == "vector") return j.at("value").get<Vector>();
    if (kind == "matrix") {
        Matrix m;
        m.rows = j.at("rows").get<std::size_t>();
        m.cols = j.at("cols").get<std::size_t>();
        m.data = j.at("value").get<std::vector<double>>();
        return m;
    }
    if (kind == "tensor3") {
        Tensor3 t;
        auto dims = j.at("dims");
        t.d0 = dims.at(0).get<std::size_t>();
        t.d1 = dims.at(1).get<std::size_t>();
        t.d2 = dims.at(2).get<std::size_t>();
        t.data = j.at("value").get<std::vector<double>>();
        return t;
    }
    if (kind == "string") return j.at("value").get<std::string>();
    throw OpError("bad-value", "unknown value kind '" + kind + "'");
}

Json value_summary(const Value& v) {
    switch (v.index()) {
        case 0:
            return "ack";
        case 1:
            return std::get<double>(v);
        case 2: {
            const auto& vec = std::get<Vector>(v);
            if (vec.size() <= 32) return Json(vec);
            return Json{{"vector", vec.size()}};
        }
        case 3: {
            const auto& m = std::get<Matrix>(v);
            return Json{{"shape", {m.rows, m.cols}}};
        }
        case 4: {
            const auto& t = std::get<Tensor3>(v);
            return Json{{"shape", {t.d0, t.d1, t.d2}}};
        }
        default:
            return std::get<std::string>(v);
    }
}

}  // namespace stride
