#include "stride/boardgames.hpp"

#include <algorithm>

namespace stride {

std::string variant_name(GameVariant v) {
    return v == GameVariant::TicTacToe ? "tictactoe" : "connect-n";
}

GameVariant variant_from_string(const std::string& s) {
    if (s == "tictactoe") return GameVariant::TicTacToe;
    if (s == "connect-n") return GameVariant::ConnectN;
    throw OpError("bad-variant", "'" + s + "' is neither tictactoe nor connect-n");
}

void GameNode::validate() const {
    if (rows < 1 || cols < 1 || rows > 4 || cols > 4) {
        throw OpError("bad-node", "board dimensions must be within 4x4");
    }
    if (win_length < 1 || win_length > std::max(rows, cols)) {
        throw OpError("bad-node", "win length does not fit the board");
    }
    if (board.size() != static_cast<std::size_t>(rows * cols)) {
        throw OpError("bad-node", "board string has the wrong length");
    }
    int x = 0, o = 0;
    for (char c : board) {
        if (c == 'X') ++x;
        else if (c == 'O') ++o;
        else if (c != '.') throw OpError("bad-node", std::string("bad cell '") + c + "'");
    }
    // X moves first, so the counts pin down whose turn it is.
    if (!((x == o && to_move == 'X') || (x == o + 1 && to_move == 'O'))) {
        throw OpError("bad-node", "piece counts inconsistent with the player to move");
    }
    if (variant == GameVariant::ConnectN) {
        for (int c = 0; c < cols; ++c) {
            for (int r = 0; r < rows - 1; ++r) {
                if (at(r, c) != '.' && at(r + 1, c) == '.') {
                    throw OpError("bad-node", "floating piece in column " + std::to_string(c));
                }
            }
        }
    }
}

std::string GameNode::key() const { return board_text(*this) + "|" + to_move; }

GameNode make_empty_node(GameVariant variant, int rows, int cols, int win_length) {
    GameNode n;
    n.variant = variant;
    n.rows = rows;
    n.cols = cols;
    n.win_length = win_length;
    n.board.assign(static_cast<std::size_t>(rows * cols), '.');
    n.to_move = 'X';
    n.validate();
    return n;
}

GameNode parse_board(GameVariant variant, int rows, int cols, int win_length,
                     const std::string& text, char to_move) {
    GameNode n;
    n.variant = variant;
    n.rows = rows;
    n.cols = cols;
    n.win_length = win_length;
    n.to_move = to_move;
    for (char c : text) {
        if (c != '/') n.board.push_back(c);
    }
    n.validate();
    return n;
}

std::string board_text(const GameNode& node) {
    std::string out;
    for (int r = 0; r < node.rows; ++r) {
        if (r > 0) out.push_back('/');
        out.append(node.board.substr(r * node.cols, node.cols));
    }
    return out;
}

Json node_to_json(const GameNode& node) {
    return Json{{"variant", variant_name(node.variant)}, {"rows", node.rows},
                {"cols", node.cols},                     {"win_length", node.win_length},
                {"board", board_text(node)},             {"to_move", std::string(1, node.to_move)}};
}

GameNode node_from_json(const Json& j) {
    return parse_board(variant_from_string(j.at("variant").get<std::string>()),
                       j.at("rows").get<int>(), j.at("cols").get<int>(),
                       j.at("win_length").get<int>(), j.at("board").get<std::string>(),
                       j.at("to_move").get<std::string>()[0]);
}

std::vector<int> legal_moves(const GameNode& node) {
    if (terminal_utility(node)) throw OpError("terminal-node", node.key());
    std::vector<int> moves;
    if (node.variant == GameVariant::TicTacToe) {
        for (int i = 0; i < node.rows * node.cols; ++i) {
            if (node.board[i] == '.') moves.push_back(i);
        }
    } else {
        for (int c = 0; c < node.cols; ++c) {
            if (node.at(0, c) == '.') moves.push_back(c);
        }
    }
    return moves;
}

GameNode apply_move(const GameNode& node, int move) {
    GameNode next = node;
    if (node.variant == GameVariant::TicTacToe) {
        if (move < 0 || move >= node.rows * node.cols || node.board[move] != '.') {
            throw OpError("illegal-move", "cell " + std::to_string(move));
        }
        next.board[move] = node.to_move;
    } else {
        if (move < 0 || move >= node.cols || node.at(0, move) != '.') {
            throw OpError("illegal-move", "column " + std::to_string(move));
        }
        int r = node.rows - 1;
        while (node.at(r, move) != '.') --r;  // gravity: lowest empty row
        next.at(r, move) = node.to_move;
    }
    next.to_move = node.to_move == 'X' ? 'O' : 'X';
    return next;
}

namespace {

bool has_line(const GameNode& node, char mark) {
    static const int dirs[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
    for (int r = 0; r < node.rows; ++r) {
        for (int c = 0; c < node.cols; ++c) {
            if (node.at(r, c) != mark) continue;
            for (const auto& d : dirs) {
                int run = 0;
                int rr = r, cc = c;
                while (rr >= 0 && rr < node.rows && cc >= 0 && cc < node.cols &&
                       node.at(rr, cc) == mark) {
                    ++run;
                    if (run >= node.win_length) return true;
                    rr += d[0];
                    cc += d[1];
                }
            }
        }
    }
    return false;
}

}  // namespace

std::optional<int> terminal_utility(const GameNode& node) {
    bool x_wins = has_line(node, 'X');
    bool o_wins = has_line(node, 'O');
    if (x_wins && o_wins) throw OpError("both-players-winning", node.key());
    if (x_wins) return +1;
    if (o_wins) return -1;
    if (node.board.find('.') == std::string::npos) return 0;
    return std::nullopt;
}

Json ScoreMap::to_json() const {
    Json e = Json::object();
    for (const auto& [key, entry] : entries) e[key] = Json{entry.score, entry.pruned};
    return Json{{"root", root_key}, {"entries", e}};
}

ScoreMap ScoreMap::from_json(const Json& j) {
    ScoreMap m;
    m.root_key = j.at("root").get<std::string>();
    for (const auto& [key, v] : j.at("entries").items()) {
        m.entries[key] = ScoreEntry{v.at(0).get<int>(), v.at(1).get<bool>()};
    }
    return m;
}

std::string ScoreMap::serialize() const { return to_json().dump(); }

ScoreMap ScoreMap::deserialize(const std::string& text) {
    return from_json(Json::parse(text));
}

namespace {

std::string depth_key(const GameNode& node, int depth) {
    return node.key() + "@" + std::to_string(depth);
}

void store(ScoreMap& map, const std::string& key, int score, bool pruned) {
    auto it = map.entries.find(key);
    // Never let a bound shadow an exact value found via another path.
    if (it != map.entries.end() && !it->second.pruned) return;
    map.entries[key] = ScoreEntry{score, pruned};
}

int clamp_score(int v) { return std::clamp(v, -1, 1); }

/// Fail-soft alpha-beta. The returned value is exact iff it falls
/// strictly inside the original (alpha, beta) window.
int alphabeta(const GameNode& node, int depth, int alpha, int beta, ScoreMap& map) {
    std::string key = depth_key(node, depth);
    if (auto u = terminal_utility(node)) {
        store(map, key, *u, false);
        return *u;
    }
    const int alpha0 = alpha, beta0 = beta;
    const bool maximizing = node.to_move == 'X';
    std::vector<int> moves = legal_moves(node);
    int value = maximizing ? -2 : 2;
    std::size_t i = 0;
    for (; i < moves.size(); ++i) {
        int v = alphabeta(apply_move(node, moves[i]), depth + 1, alpha, beta, map);
        if (maximizing) {
            value = std::max(value, v);
            alpha = std::max(alpha, value);
        } else {
            value = std::min(value, v);
            beta = std::min(beta, value);
        }
        if (alpha >= beta) {
            ++i;
            break;
        }
    }
    // Siblings skipped by the cutoff: record the bound, flagged.
    for (; i < moves.size(); ++i) {
        store(map, depth_key(apply_move(node, moves[i]), depth + 1), clamp_score(value), true);
    }
    bool exact = value > alpha0 && value < beta0;
    store(map, key, value, !exact);
    return value;
}

}  // namespace

ScoreMap search_scores(const GameNode& root) {
    root.validate();
    ScoreMap map;
    map.root_key = depth_key(root, 0);
    if (auto u = terminal_utility(root)) {
        store(map, map.root_key, *u, false);
        return map;
    }
    const bool maximizing = root.to_move == 'X';
    int value = maximizing ? -2 : 2;
    // Root children get the full window so every depth-1 value is exact.
    for (int m : legal_moves(root)) {
        int v = alphabeta(apply_move(root, m), 1, -2, 2, map);
        value = maximizing ? std::max(value, v) : std::min(value, v);
    }
    store(map, map.root_key, value, false);
    return map;
}

int root_value(const ScoreMap& scores) {
    auto it = scores.entries.find(scores.root_key);
    if (it == scores.entries.end()) throw OpError("scores-missing", scores.root_key);
    return it->second.score;
}

std::map<int, ScoreEntry> scores_at_depth(const GameNode& root, const ScoreMap& scores,
                                          int depth) {
    if (depth < 1) throw OpError("scores-missing", "depth must be >= 1");
    GameNode cur = root;
    // Walk the principal variation down to the parent of the queried layer.
    for (int d = 1; d < depth; ++d) {
        auto it = scores.entries.find(depth_key(cur, d - 1));
        if (it == scores.entries.end() || it->second.pruned) {
            throw OpError("scores-missing", "no exact value at depth " + std::to_string(d - 1));
        }
        int target = it->second.score;
        if (terminal_utility(cur)) throw OpError("scores-missing", "terminal before requested depth");
        bool advanced = false;
        for (int m : legal_moves(cur)) {
            GameNode child = apply_move(cur, m);
            auto ct = scores.entries.find(depth_key(child, d));
            if (ct != scores.entries.end() && !ct->second.pruned && ct->second.score == target) {
                cur = child;
                advanced = true;
                break;
            }
        }
        if (!advanced) throw OpError("scores-missing", "principal variation broken");
    }
    if (terminal_utility(cur)) throw OpError("scores-missing", "terminal before requested depth");
    std::map<int, ScoreEntry> out;
    for (int m : legal_moves(cur)) {
        auto it = scores.entries.find(depth_key(apply_move(cur, m), depth));
        if (it == scores.entries.end()) throw OpError("scores-missing", "depth beyond search");
        out[m] = it->second;
    }
    return out;
}

int best_move(const GameNode& node, char role) {
    if (terminal_utility(node)) throw OpError("no-legal-moves", node.key());
    ScoreMap scores = search_scores(node);
    std::map<int, ScoreEntry> layer = scores_at_depth(node, scores, 1);
    bool maximizing = role == 'X';
    int best = -1;
    int best_score = maximizing ? -2 : 2;
    for (const auto& [m, entry] : layer) {
        bool better = maximizing ? entry.score > best_score : entry.score < best_score;
        if (better) {
            best = m;
            best_score = entry.score;
        }
    }
    return best;
}

void register_game_ops(Registry& registry) {
    registry.register_op(
        OpDescriptor{"CalculateScores",
                     "expand every action at each depth from the current board and calculate the "
                     "minimax scores with alpha-beta pruning",
                     {},
                     "ack"},
        [](const Json&, WorkingMemory& mem) -> Value {
            GameNode node = node_from_memory(mem);
            mem.write("game/scores", search_scores(node).serialize());
            return std::monostate{};
        });

    registry.register_op(
        OpDescriptor{"GetScores",
                     "retrieve the computed scores for all actions at the given depth from the "
                     "current board",
                     {{"depth", ArgType::Int}},
                     "string"},
        [](const Json& args, WorkingMemory& mem) -> Value {
            if (!mem.contains("game/scores")) {
                throw OpError("scores-missing", "run CalculateScores first");
            }
            GameNode node = node_from_memory(mem);
            ScoreMap scores = ScoreMap::deserialize(mem.read_string("game/scores"));
            Json out = Json::object();
            for (const auto& [m, entry] :
                 scores_at_depth(node, scores, args.at("depth").get<int>())) {
                out[std::to_string(m)] = Json{{"score", entry.score}, {"pruned", entry.pruned}};
            }
            return out.dump();
        });
}

void init_game_memory(WorkingMemory& mem, const GameNode& node) {
    node.validate();
    mem.write("game/variant", variant_name(node.variant));
    mem.write("game/rows", static_cast<double>(node.rows));
    mem.write("game/cols", static_cast<double>(node.cols));
    mem.write("game/win_length", static_cast<double>(node.win_length));
    mem.write("game/board", board_text(node));
    mem.write("game/to_move", std::string(1, node.to_move));
}

GameNode node_from_memory(const WorkingMemory& mem) {
    return parse_board(variant_from_string(mem.read_string("game/variant")),
                       mem.read_int("game/rows"), mem.read_int("game/cols"),
                       mem.read_int("game/win_length"), mem.read_string("game/board"),
                       mem.read_string("game/to_move")[0]);
}

GameNode random_position(GameVariant variant, int rows, int cols, int win_length, Rng& rng) {
    GameNode cur = make_empty_node(variant, rows, cols, win_length);
    int steps = rng.uniform_int(0, rows * cols - 1);
    for (int i = 0; i < steps; ++i) {
        std::vector<int> moves = legal_moves(cur);
        GameNode next = apply_move(cur, moves[rng.uniform_int(0, static_cast<int>(moves.size()) - 1)]);
        if (terminal_utility(next)) break;
        cur = next;
    }
    return cur;
}

}  // namespace stride
