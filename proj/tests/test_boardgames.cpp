#include <doctest.h>

#include <map>
#include <set>

#include "oracles.hpp"
#include "stride/boardgames.hpp"
#include "stride/session.hpp"

using namespace stride;

namespace {

GameNode transposed(const GameNode& node) {
    GameNode out = node;
    for (int r = 0; r < node.rows; ++r) {
        for (int c = 0; c < node.cols; ++c) out.at(c, r) = node.at(r, c);
    }
    return out;
}

}  // namespace

TEST_CASE("board parsing and keys") {
    GameNode node = parse_board(GameVariant::TicTacToe, 3, 3, 3, "X../.O./...", 'X');
    CHECK(node.at(0, 0) == 'X');
    CHECK(node.at(1, 1) == 'O');
    CHECK(node.key() == "X../.O./...|X");
    CHECK(board_text(node) == "X../.O./...");
    GameNode back = node_from_json(node_to_json(node));
    CHECK(back.key() == node.key());
    CHECK(back.variant == node.variant);
}

TEST_CASE("validation catches malformed positions") {
    // O cannot have moved more often than X.
    CHECK_THROWS(parse_board(GameVariant::TicTacToe, 3, 3, 3, "O../.../...", 'X').validate());
    // Floating piece in connect-n.
    CHECK_THROWS(parse_board(GameVariant::ConnectN, 3, 3, 3, "X../.../...", 'O').validate());
    CHECK_NOTHROW(parse_board(GameVariant::ConnectN, 3, 3, 3, ".../.../X..", 'O').validate());
}

TEST_CASE("connect-n moves obey gravity") {
    GameNode node = make_empty_node(GameVariant::ConnectN, 3, 3, 3);
    GameNode after = apply_move(node, 1);
    CHECK(after.at(2, 1) == 'X');
    after = apply_move(after, 1);
    CHECK(after.at(1, 1) == 'O');
    after = apply_move(after, 1);
    CHECK(after.at(0, 1) == 'X');
    // Column 1 is now full.
    auto moves = legal_moves(after);
    CHECK(std::set<int>(moves.begin(), moves.end()) == std::set<int>{0, 2});
}

TEST_CASE("terminal detection") {
    GameNode x_row = parse_board(GameVariant::TicTacToe, 3, 3, 3, "XXX/OO./...", 'O');
    CHECK(terminal_utility(x_row) == 1);
    GameNode o_diag = parse_board(GameVariant::TicTacToe, 3, 3, 3, "OXX/XO./..O", 'X');
    CHECK(terminal_utility(o_diag) == -1);
    GameNode draw = parse_board(GameVariant::TicTacToe, 3, 3, 3, "XOX/XXO/OXO", 'O');
    CHECK(terminal_utility(draw) == 0);
    GameNode open = parse_board(GameVariant::TicTacToe, 3, 3, 3, "X../.O./...", 'X');
    CHECK_FALSE(terminal_utility(open).has_value());
    CHECK_THROWS_WITH_AS(legal_moves(draw), doctest::Contains("terminal-node"), OpError);
}

TEST_CASE("alpha-beta equals unpruned minimax on random positions") {
    std::map<std::string, int> memo;
    Rng rng(2024);
    for (int i = 0; i < 200; ++i) {
        GameNode node = random_position(GameVariant::TicTacToe, 3, 3, 3, rng);
        ScoreMap scores = search_scores(node);
        CHECK(root_value(scores) == oracles::minimax_value(node, memo));
        // Depth-1 values are exact and match the oracle child by child.
        auto depth1 = scores_at_depth(node, scores, 1);
        for (const auto& [move, entry] : depth1) {
            CHECK_FALSE(entry.pruned);
            CHECK(entry.score == oracles::minimax_value(apply_move(node, move), memo));
        }
    }
    std::map<std::string, int> memo_cn;
    for (int i = 0; i < 200; ++i) {
        GameNode node = random_position(GameVariant::ConnectN, 3, 3, 3, rng);
        ScoreMap scores = search_scores(node);
        CHECK(root_value(scores) == oracles::minimax_value(node, memo_cn));
    }
}

TEST_CASE("empty tictactoe is a draw") {
    GameNode node = make_empty_node(GameVariant::TicTacToe, 3, 3, 3);
    CHECK(root_value(search_scores(node)) == 0);
}

TEST_CASE("board transposition preserves the game value") {
    // Tictactoe win lines are symmetric under transposition, so the
    // reflected position must have the identical minimax value.
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        GameNode node = random_position(GameVariant::TicTacToe, 3, 3, 3, rng);
        CHECK(root_value(search_scores(node)) == root_value(search_scores(transposed(node))));
    }
}

TEST_CASE("opening symmetry classes") {
    // From the empty board every X reply keeps the draw value; the
    // depth-1 table therefore collapses to a single score.
    GameNode node = make_empty_node(GameVariant::TicTacToe, 3, 3, 3);
    ScoreMap scores = search_scores(node);
    auto depth1 = scores_at_depth(node, scores, 1);
    REQUIRE(depth1.size() == 9);
    for (const auto& [move, entry] : depth1) {
        CHECK(entry.score == 0);
        CHECK_FALSE(entry.pruned);
    }
}

TEST_CASE("best_move wins and blocks") {
    // X completes the top row.
    GameNode winning = parse_board(GameVariant::TicTacToe, 3, 3, 3, "XX./OO./...", 'X');
    CHECK(best_move(winning, 'X') == 2);
    // O must block X's open row.
    GameNode blocking = parse_board(GameVariant::TicTacToe, 3, 3, 3, "XX./.O./...", 'O');
    CHECK(best_move(blocking, 'O') == 2);
}

TEST_CASE("score map survives serialization") {
    GameNode node = parse_board(GameVariant::TicTacToe, 3, 3, 3, "X../.O./...", 'X');
    ScoreMap scores = search_scores(node);
    ScoreMap back = ScoreMap::deserialize(scores.serialize());
    CHECK(back.root_key == scores.root_key);
    REQUIRE(back.entries.size() == scores.entries.size());
    for (const auto& [k, e] : scores.entries) {
        auto it = back.entries.find(k);
        REQUIRE(it != back.entries.end());
        CHECK(it->second.score == e.score);
        CHECK(it->second.pruned == e.pruned);
    }
    CHECK(back.serialize() == scores.serialize());
}

TEST_CASE("game ops expose the search through memory") {
    GameNode node = parse_board(GameVariant::TicTacToe, 3, 3, 3, "XX./OO./...", 'X');
    Session sess;
    register_game_ops(sess.registry);
    init_game_memory(sess.memory, node);
    CHECK(node_from_memory(sess.memory).key() == node.key());

    sess.begin_record("", ThoughtUnit{"", {"CalculateScores"}, false});
    sess.invoke("CalculateScores", Json::object());
    sess.begin_record("", ThoughtUnit{"", {"GetScores"}, false});
    Value out = sess.invoke("GetScores", Json{{"depth", 1}});
    Json table = Json::parse(std::get<std::string>(out));
    CHECK(table.at("2").at("score").get<int>() == 1);

    // The stored map is bitwise identical to a direct search.
    CHECK(sess.memory.read_string("game/scores") == search_scores(node).serialize());
}

TEST_CASE("self play from the empty board draws") {
    GameNode node = make_empty_node(GameVariant::TicTacToe, 3, 3, 3);
    while (!terminal_utility(node)) {
        node = apply_move(node, best_move(node, node.to_move));
    }
    CHECK(terminal_utility(node) == 0);
}
