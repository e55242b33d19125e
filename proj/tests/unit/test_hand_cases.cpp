// SPDX-License-Identifier: Apache-2.0
// Small hand-computed cases for data handling, the backbones, retrieval rounds
// and evaluation.
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "adaret/backbone/filter_mlp.hpp"
#include "adaret/backbone/gru_encoder.hpp"
#include "adaret/backbone/transformer.hpp"
#include "adaret/compute/fft.hpp"
#include "adaret/compute/gru.hpp"
#include "adaret/compute/ops.hpp"
#include "adaret/data/batches.hpp"
#include "adaret/data/interactions.hpp"
#include "adaret/data/split.hpp"
#include "adaret/engine/loss.hpp"
#include "adaret/engine/model.hpp"
#include "adaret/engine/rounds.hpp"
#include "adaret/engine/trainer.hpp"
#include "adaret/eval/evaluate.hpp"
#include "adaret/eval/metrics.hpp"
#include "adaret/eval/sweep.hpp"
#include "test_support.hpp"

using namespace adaret;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using compute::Mode;
using compute::Tensor;

namespace {

data::InteractionLog log_of(std::initializer_list<data::Interaction> rows) {
    data::InteractionLog log;
    log.records = rows;
    return log;
}

// Table whose item i (1..n) is the unit vector e_{i-1}.
backbone::EmbeddingTable orthonormal_table(std::size_t n) {
    backbone::EmbeddingTable t;
    std::vector<Real> w((n + 1) * n, 0);
    for (std::size_t i = 1; i <= n; ++i) w[i * n + (i - 1)] = 1;
    t.weight = Tensor({n + 1, n}, w);
    return t;
}

}  // namespace

// --- data ---

TEST_CASE("small interaction files", "[data][hand]") {
    testing::TempDir dir;
    std::ofstream(dir / "three.tsv") << "a\tx\t1\na\ty\t2\nb\tx\t3\n";
    CHECK(data::load_interactions(dir / "three.tsv").records.size() == 3);

    {
        std::ofstream bad(dir / "bad.tsv");
        for (int i = 1; i <= 6; ++i) bad << "u\ti" << i << "\t" << i << "\n";
        bad << "u\ti7\tlater\n";
    }
    REQUIRE_THROWS_WITH(data::load_interactions(dir / "bad.tsv"), ContainsSubstring("line 7"));

    std::ofstream(dir / "header.tsv") << "user\titem\ttimestamp\nu\ti\t5\n";
    data::LoadOptions opts;
    opts.header = true;
    const auto log = data::load_interactions(dir / "header.tsv", opts);
    REQUIRE(log.records.size() == 1);
    CHECK(log.records[0].user == "u");
}

TEST_CASE("k-core cascade, identity and a log that is already a core", "[data][hand]") {
    const auto cascade = log_of({{"A", "x", 0}, {"A", "y", 1}, {"B", "x", 2}});
    REQUIRE_THROWS_WITH(data::kcore_filter(cascade, 2), ContainsSubstring("vanished under k-core"));

    Rng rng(5);
    const auto sparse = testing::random_log(7, 40, 1, 4, rng);
    const auto same = data::kcore_filter(sparse, 1);
    REQUIRE(same.records.size() == sparse.records.size());

    data::InteractionLog dense;
    for (int u = 0; u < 5; ++u)
        for (int i = 0; i < 5; ++i) dense.records.push_back({"u" + std::to_string(u), "i" + std::to_string(i), i});
    const auto kept = data::kcore_filter(dense, 5);
    REQUIRE(kept.records.size() == 25);
    for (std::size_t i = 0; i < 25; ++i) CHECK(kept.records[i].item == dense.records[i].item);
}

TEST_CASE("equal timestamps keep file order", "[data][hand]") {
    const auto r = data::build_split(log_of({{"u", "a", 1}, {"u", "c", 3}, {"u", "b", 1}, {"u", "d", 4}, {"u", "e", 5}}));
    const auto full = data::full_history(r.dataset.users[0]);
    std::vector<std::string> raw;
    for (const int id : full) raw.push_back(r.vocab.item_raw[id]);
    CHECK(raw == std::vector<std::string>{"a", "b", "c", "d", "e"});
}

TEST_CASE("one test target per user", "[data][hand]") {
    Rng rng(6);
    const auto split = data::build_split(testing::random_log(37, 20, 5, 9, rng)).dataset;
    CHECK(data::make_examples(split, data::Phase::test).size() == 37);
}

TEST_CASE("padding, truncation and batch sizes", "[data][hand]") {
    const std::vector<data::Example> short_row{{0, {7, 9}, 1}};
    const auto b = data::collate(short_row, 5);
    CHECK(b.ids == std::vector<int>{0, 0, 0, 7, 9});
    CHECK(b.lengths[0] == 2);

    std::vector<int> sixty(60);
    std::iota(sixty.begin(), sixty.end(), 1);
    const std::vector<data::Example> long_row{{0, sixty, 61}};
    const auto t = data::collate(long_row, 50);
    CHECK(t.lengths[0] == 50);
    CHECK(t.ids.front() == 11);
    CHECK(t.ids.back() == 60);

    std::vector<data::Example> many(2050, data::Example{0, {1, 2}, 3});
    Rng rng(1);
    const auto batches = data::make_batches(many, 50, 1024, &rng);
    REQUIRE(batches.size() == 3);
    CHECK(batches[0].rows == 1024);
    CHECK(batches[1].rows == 1024);
    CHECK(batches[2].rows == 2);
}

TEST_CASE("sparsity of dense and diagonal logs", "[data][hand]") {
    CHECK(data::stats_from_counts(2, 2, 4).sparsity == 0.0);
    CHECK(data::stats_from_counts(10, 10, 10).sparsity == Approx(0.9));
}

// --- backbones and scoring ---

TEST_CASE("embedding lookups repeat and pad to zero", "[backbone][hand]") {
    Rng rng(1);
    const auto table = backbone::EmbeddingTable::init(6, 4, rng);
    const std::vector<int> ids{0, 0, 0, 3, 5, 3};
    const auto e = backbone::embed_sequence(table, ids, 2, 3);
    for (std::size_t j = 0; j < 12; ++j) CHECK(e[j] == Real(0));
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(e[12 + j] == e[20 + j]);
        CHECK(e[12 + j] == table.weight[3 * 4 + j]);
    }
}

TEST_CASE("transformer outputs ignore later positions", "[backbone][hand]") {
    Rng rng(2);
    backbone::EncoderOptions o;
    o.dim = 8;
    o.max_len = 5;
    o.blocks = 2;
    o.dropout = 0;
    const backbone::TransformerEncoder enc(o, rng);
    const std::vector<std::size_t> lengths{5};
    auto values = testing::random_values<Real>(40, rng);
    const auto before = enc.hidden_states(Tensor({1, 5, 8}, values), lengths, Mode::eval, rng);
    for (std::size_t j = 32; j < 40; ++j) values[j] += Real(0.7);
    const auto after = enc.hidden_states(Tensor({1, 5, 8}, values), lengths, Mode::eval, rng);
    for (std::size_t j = 0; j < 32; ++j) CHECK(after[j] == before[j]);
    bool last_changed = false;
    for (std::size_t j = 32; j < 40; ++j) last_changed |= after[j] != before[j];
    CHECK(last_changed);
}

TEST_CASE("GRU encoder on one item and on zeros", "[backbone][hand]") {
    Rng rng(3);
    backbone::EncoderOptions o;
    o.dim = 4;
    o.dropout = 0;
    const backbone::GruEncoder enc(o, rng);
    const Tensor x({1, 1, 4}, testing::random_values<Real>(4, rng));
    const std::vector<std::size_t> one{1};
    const auto f = enc.encode(x, one, Mode::eval, rng);
    const auto step = compute::gru_cell(compute::reshape(x, {1, 4}), Tensor::zeros({1, 4}), enc.gru);
    for (std::size_t j = 0; j < 4; ++j) CHECK(f[j] == Approx(step[j]).margin(1e-6));

    const std::vector<std::size_t> three{3};
    const auto zero = enc.encode(Tensor::zeros({1, 3, 4}), three, Mode::eval, rng);  // biases start at zero
    for (std::size_t j = 0; j < 4; ++j) CHECK(zero[j] == Real(0));
}

TEST_CASE("filter-MLP with a zero or identity filter reduces to layer norm", "[backbone][hand]") {
    Rng rng(4);
    backbone::EncoderOptions o;
    o.dim = 4;
    o.max_len = 6;
    o.blocks = 1;
    o.dropout = 0;
    o.feed_forward = false;
    backbone::FilterMlpEncoder enc(o, rng);
    const Tensor e({1, 6, 4}, testing::random_values<Real>(24, rng));
    const std::vector<std::size_t> lengths{6};
    const auto ln = compute::layer_norm(e, Tensor::full({4}, 1), Tensor::zeros({4}));

    auto& w = enc.blocks[0];
    for (auto& v : w.w_re.data_mut()) v = 0;
    for (auto& v : w.w_im.data_mut()) v = 0;
    const auto zero = enc.hidden_states(e, lengths, Mode::eval, rng);
    for (std::size_t j = 0; j < 24; ++j) CHECK(zero[j] == Approx(ln[j]).margin(1e-5));

    for (auto& v : w.w_re.data_mut()) v = 1;
    const auto identity = enc.hidden_states(e, lengths, Mode::eval, rng);
    for (std::size_t j = 0; j < 24; ++j) CHECK(identity[j] == Approx(ln[j]).margin(1e-5));

    const auto none = compute::spectral_filter(e, Tensor::zeros({4, 4}), Tensor::zeros({4, 4}));
    for (std::size_t j = 0; j < 24; ++j) CHECK(none[j] == Real(0));
}

TEST_CASE("scores against an orthonormal table and a naive dot product", "[backbone][hand]") {
    const auto table = orthonormal_table(5);
    std::vector<Real> f(5, Real(0.1));
    f[2] = 1;  // item 3
    const Tensor fu({1, 5}, f);
    const auto scores = backbone::score_items(fu, table);
    CHECK(engine::top_k_ids(scores, 1) == std::vector<int>{3});
    const std::vector<std::vector<int>> exclude{{3}};
    const auto masked = backbone::score_items(fu, table, exclude);
    CHECK(masked[3] == backbone::kExcludedScore);
    CHECK(engine::top_k_ids(masked, 4) == std::vector<int>{1, 2, 4, 5});

    Rng rng(5);
    const auto big = backbone::EmbeddingTable::init(20, 6, rng);
    const Tensor g({2, 6}, testing::random_values<Real>(12, rng));
    const auto s = backbone::score_items(g, big);
    for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t i = 1; i <= 20; ++i) {
            double acc = 0;
            for (std::size_t j = 0; j < 6; ++j) acc += double(g[b * 6 + j]) * big.weight[i * 6 + j];
            CHECK(std::abs(s[b * 21 + i] - acc) < 1e-6);
        }
}

// --- rounds, losses, retrieval ---

TEST_CASE("item context grows by the best unseen items", "[engine][hand]") {
    const auto table = orthonormal_table(6);
    adapter::ItemContext pool(1, 4);
    const Tensor f({1, 6}, {Real(0.2), Real(0.5), Real(0.9), Real(0.1), Real(0.0), Real(0.3)});
    CHECK(engine::extend_item_context(pool, f, table, 1)[0] == std::vector<int>{3});
    CHECK(engine::extend_item_context(pool, f, table, 1)[0] == std::vector<int>{2});
    CHECK(std::vector<int>(pool.row(0).begin(), pool.row(0).end()) == std::vector<int>{3, 2});

    Rng rng(6);
    const auto big = backbone::EmbeddingTable::init(20, 8, rng);
    const Tensor g({1, 8}, testing::random_values<Real>(8, rng));
    adapter::ItemContext five(1, 5);
    const auto added = engine::extend_item_context(five, g, big, 5)[0];
    const auto s = backbone::score_items(g, big);
    std::vector<int> order(20);
    std::iota(order.begin(), order.end(), 1);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s[a] > s[b]; });
    CHECK(added == std::vector<int>(order.begin(), order.begin() + 5));
}

TEST_CASE("two rounds of two items on an orthonormal table", "[engine][hand]") {
    // K = 4 over T = 2 rounds: each round takes the best two items not yet
    // listed, so the union is the hand-ranked {1, 2} then {4, 5}.
    const auto table = orthonormal_table(6);
    adapter::ItemContext listed(1, 4);
    const Tensor f1({1, 6}, {Real(3), Real(2), Real(1), Real(0), Real(0), Real(0)});
    const Tensor f2({1, 6}, {Real(3), Real(2), Real(0.5), Real(1.5), Real(1), Real(0)});
    CHECK(engine::extend_item_context(listed, f1, table, 2)[0] == std::vector<int>{1, 2});
    CHECK(engine::extend_item_context(listed, f2, table, 2)[0] == std::vector<int>{4, 5});
    CHECK(listed.count(0) == 4);
}

TEST_CASE("loss at zero scores and the round weighting", "[engine][hand]") {
    CHECK(engine::round_loss(Tensor({1, 2}, {Real(0), Real(0)})).item() == Approx(2 * std::log(2.0)));
    const std::vector<Tensor> ones{Tensor::scalar(1), Tensor::scalar(1), Tensor::scalar(1)};
    CHECK(engine::total_loss(ones, 0.5).item() == Approx(0.875));
    const std::vector<Tensor> pair{Tensor::scalar(2), Tensor::scalar(3)};
    CHECK(engine::total_loss(pair, 1.0).item() == Approx(5.0));
    CHECK(engine::total_loss(std::span(pair).first(1), 0.3).item() == Approx(0.6));
}

TEST_CASE("one round with every toggle off gives the base loss", "[engine][hand]") {
    const auto split = testing::cycle_split(6, 15, 7);
    const auto cfg = testing::tiny_config();
    engine::Model model(cfg, split.num_items, cfg.seed);
    const auto ex = data::make_examples(split, data::Phase::train);
    const auto batch = data::collate(ex, cfg.max_len);
    engine::Objective obj;
    obj.rounds = 1;
    obj.lambda = 1.0;
    obj.n_neg = 3;
    Rng r1(9), r2(9);
    const double loss = engine::batch_objective(model, batch, obj, Mode::eval, r1).item();

    std::size_t per_row = 0;
    const auto ids = engine::scoring_ids(batch, split.num_items, 3, false, r2, per_row);
    const auto e = backbone::embed_sequence(model.table, batch.ids, batch.rows, batch.width);
    const auto f = model.encoder->encode(e, batch.lengths, Mode::eval, r2);
    const auto base = engine::round_loss(compute::gather_scores(f, model.table.weight, ids, per_row)).item();
    CHECK(loss == Approx(base).epsilon(1e-6));
}

TEST_CASE("zero epochs return the initial model", "[engine][hand]") {
    const auto split = testing::cycle_split(6, 15, 7);
    auto cfg = testing::tiny_config();
    cfg.epochs = 0;
    const auto out = engine::pretrain(split, cfg);
    const engine::Model fresh(cfg, split.num_items, cfg.seed);
    const auto a = out.model.snapshot(), b = fresh.snapshot();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        INFO(a[i].name);
        CHECK(a[i].values == b[i].values);
    }
    CHECK(out.history.epochs_run == 0);
}

// --- metrics and sweeps ---

TEST_CASE("hit ratio and NDCG on hand-placed targets", "[eval][hand]") {
    const std::vector<std::vector<int>> lists{{4, 2, 9}, {1, 3, 5}};
    const std::vector<int> targets{2, 8};
    CHECK(metrics::hr_at_k(lists, targets, 3) == 0.5);
    const std::vector<std::vector<int>> third{{5, 6, 7}};
    const std::vector<int> seven{7};
    CHECK(metrics::ndcg_at_k(third, seven, 3) == Approx(0.5).margin(1e-12));
    const std::vector<int> firsts{4, 1};
    CHECK(metrics::hr_at_k(lists, firsts, 3) == 1.0);
    CHECK(metrics::ndcg_at_k(lists, firsts, 3) == 1.0);
    const std::vector<int> missing{8, 8};
    CHECK(metrics::ndcg_at_k(lists, missing, 3) == 0.0);
}

TEST_CASE("toy ranking of five scored candidates", "[eval][hand]") {
    const std::vector<Real> scores{backbone::kExcludedScore, Real(0.9), Real(0.1), Real(0.8), Real(0.2), Real(0.3)};
    const auto top = engine::top_k_ids(scores, 2);
    CHECK(top == std::vector<int>{1, 3});
    const std::vector<std::vector<int>> lists{top};
    const std::vector<int> target{3};
    CHECK(metrics::hr_at_k(lists, target, 2) == 1.0);
    CHECK(std::abs(metrics::ndcg_at_k(lists, target, 2) - 1.0 / std::log2(3.0)) <= 1e-9);
}

TEST_CASE("a one-cell sweep matches the base evaluation", "[eval][sweep][hand]") {
    const auto split = testing::cycle_split(12, 20, 8);
    auto cfg = testing::tiny_config();
    cfg.toggles = config::AdapterToggles::all_off();
    // Each cell finetunes every parameter; with no epochs the cell model is
    // the base backbone itself.
    cfg.epochs = 0;
    const engine::Model model(cfg, split.num_items, cfg.seed);
    const auto ckpt = model.to_checkpoint("pretrained", 0);
    eval::SweepGrid grid;
    grid.rounds = {1};
    grid.lambdas = {1.0};
    const auto rows = eval::sweep(split, ckpt, grid, cfg);
    REQUIRE(rows.size() == 1);
    eval::EvalSpec spec;
    spec.k = cfg.eval_k;
    const auto base = eval::evaluate(model, split, data::Phase::test, spec);
    CHECK(rows[0].hr == base.hr);
    CHECK(rows[0].ndcg == base.ndcg);

    const auto tuned = engine::finetune(split, ckpt, cfg);
    const auto again = eval::evaluate(tuned.model, split, data::Phase::test, spec);
    CHECK(again.hr == Approx(base.hr).margin(1e-6));
    CHECK(again.ndcg == Approx(base.ndcg).margin(1e-6));

    const eval::SweepGrid defaults;
    CHECK(defaults.rounds.size() * defaults.lambdas.size() == 30);
}
