#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stride/env_mdp.hpp"
#include "stride/registry.hpp"

namespace stride {

enum class GameVariant { TicTacToe, ConnectN };

std::string variant_name(GameVariant v);
GameVariant variant_from_string(const std::string& s);

/// A board position. Cells are 'X', 'O' or '.'; `board` is row-major with
/// row 0 at the top. For connect-n, gravity pulls pieces toward the last
/// row. Moves are cell indices (tictactoe) or column indices (connect-n).
struct GameNode {
    GameVariant variant = GameVariant::TicTacToe;
    int rows = 3;
    int cols = 3;
    int win_length = 3;
    std::string board;  // rows*cols chars, no separators
    char to_move = 'X';

    char at(int r, int c) const { return board[r * cols + c]; }
    char& at(int r, int c) { return board[r * cols + c]; }

    void validate() const;
    std::string key() const;  // canonical "X../.O./..|X" form
};

GameNode make_empty_node(GameVariant variant, int rows, int cols, int win_length);

/// Parses "X../.O./..." (rows '/'-separated) into the given geometry.
GameNode parse_board(GameVariant variant, int rows, int cols, int win_length,
                     const std::string& text, char to_move);
std::string board_text(const GameNode& node);  // '/'-separated row-major

Json node_to_json(const GameNode& node);
GameNode node_from_json(const Json& j);

std::vector<int> legal_moves(const GameNode& node);
GameNode apply_move(const GameNode& node, int move);

/// +1 X win, -1 O win, 0 full draw, nullopt if play continues.
std::optional<int> terminal_utility(const GameNode& node);

struct ScoreEntry {
    int score = 0;
    bool pruned = false;  // true if the value is only an alpha-beta bound
};

/// Minimax values keyed by "<node-key>@<depth>". The root and every
/// depth-1 child carry exact values; deeper entries may be pruned bounds.
struct ScoreMap {
    std::string root_key;
    std::map<std::string, ScoreEntry> entries;

    Json to_json() const;
    static ScoreMap from_json(const Json& j);
    std::string serialize() const;
    static ScoreMap deserialize(const std::string& text);
};

/// Full alpha-beta search from root. Root children are searched with the
/// full window so their stored values are exact minimax values.
ScoreMap search_scores(const GameNode& root);

/// Exact minimax value without pruning (test oracle lives in the test
/// suite; this is the engine-facing exact value of a position).
int root_value(const ScoreMap& scores);

/// Move -> entry at the given depth along the principal variation.
std::map<int, ScoreEntry> scores_at_depth(const GameNode& root, const ScoreMap& scores, int depth);

/// Argmax over depth-1 scores for X, argmin for O; smallest move wins ties.
int best_move(const GameNode& node, char role);

/// Registers CalculateScores and GetScores over the "game/" namespace.
void register_game_ops(Registry& registry);

void init_game_memory(WorkingMemory& mem, const GameNode& node);
GameNode node_from_memory(const WorkingMemory& mem);

/// Uniformly random non-terminal position reachable by legal play.
GameNode random_position(GameVariant variant, int rows, int cols, int win_length, Rng& rng);

}  // namespace stride
