// SPDX-License-Identifier: Apache-2.0
#include "adaret/engine/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adaret/common.hpp"

namespace adaret::config {

const char* backbone_name(BackboneKind k) {
    switch (k) {
        case BackboneKind::transformer: return "transformer";
        case BackboneKind::gru: return "gru";
        case BackboneKind::filter_mlp: return "filter_mlp";
    }
    return "?";
}

BackboneKind parse_backbone(const std::string& s) {
    if (s == "transformer") return BackboneKind::transformer;
    if (s == "gru") return BackboneKind::gru;
    if (s == "filter_mlp") return BackboneKind::filter_mlp;
    throw ConfigError("backbone: unknown kind '" + s + "' (expected transformer, gru or filter_mlp)");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size()) throw ConfigError(key + ": invalid number '" + v + "'");
    return out;
}

double parse_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": invalid number '" + v + "'");
    }
    if (used != v.size() || !std::isfinite(out)) throw ConfigError(key + ": invalid number '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::string real_text(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

void set_value(TrainConfig& c, const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (key == "rounds") c.rounds = parse_number<int>(key, v);
    else if (key == "lambda") c.lambda = parse_real(key, v);
    else if (key == "k_ctx") c.k_ctx = parse_number<int>(key, v);
    else if (key == "n_neg") c.n_neg = parse_number<int>(key, v);
    else if (key == "epochs") c.epochs = parse_number<int>(key, v);
    else if (key == "patience") c.patience = parse_number<int>(key, v);
    else if (key == "lr") c.lr = parse_real(key, v);
    else if (key == "batch_size") c.batch_size = parse_number<int>(key, v);
    else if (key == "max_len") c.max_len = parse_number<int>(key, v);
    else if (key == "dim") c.dim = parse_number<int>(key, v);
    else if (key == "backbone") c.backbone = parse_backbone(v);
    else if (key == "blocks") c.blocks = parse_number<int>(key, v);
    else if (key == "heads") c.heads = parse_number<int>(key, v);
    else if (key == "dropout") c.dropout = parse_real(key, v);
    else if (key == "enable_lft") c.toggles.lft = parse_bool(key, v);
    else if (key == "enable_cat") c.toggles.cat = parse_bool(key, v);
    else if (key == "enable_ira") c.toggles.ira = parse_bool(key, v);
    else if (key == "enable_ura_gru") c.toggles.ura_gru = parse_bool(key, v);
    else if (key == "enable_ura_mlp") c.toggles.ura_mlp = parse_bool(key, v);
    else if (key == "enable_ura") c.toggles.ura = parse_bool(key, v);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "eval_k") c.eval_k = parse_number<int>(key, v);
    else if (key == "full_vocab") c.full_vocab = parse_bool(key, v);
    else if (key == "augment") c.augment = parse_bool(key, v);
    else if (key == "ctx_projections") c.ctx_projections = parse_bool(key, v);
    else if (key == "exclude_target_ctx") c.exclude_target_ctx = parse_bool(key, v);
    else if (key == "use_pretrained") c.use_pretrained = parse_bool(key, v);
    else throw ConfigError("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> entries(const TrainConfig& c) {
    return {
        {"rounds", std::to_string(c.rounds)},
        {"lambda", real_text(c.lambda)},
        {"k_ctx", std::to_string(c.k_ctx)},
        {"n_neg", std::to_string(c.n_neg)},
        {"epochs", std::to_string(c.epochs)},
        {"patience", std::to_string(c.patience)},
        {"lr", real_text(c.lr)},
        {"batch_size", std::to_string(c.batch_size)},
        {"max_len", std::to_string(c.max_len)},
        {"dim", std::to_string(c.dim)},
        {"backbone", backbone_name(c.backbone)},
        {"blocks", std::to_string(c.blocks)},
        {"heads", std::to_string(c.heads)},
        {"dropout", real_text(c.dropout)},
        {"enable_lft", bool_text(c.toggles.lft)},
        {"enable_cat", bool_text(c.toggles.cat)},
        {"enable_ira", bool_text(c.toggles.ira)},
        {"enable_ura_gru", bool_text(c.toggles.ura_gru)},
        {"enable_ura_mlp", bool_text(c.toggles.ura_mlp)},
        {"enable_ura", bool_text(c.toggles.ura)},
        {"seed", std::to_string(c.seed)},
        {"eval_k", std::to_string(c.eval_k)},
        {"full_vocab", bool_text(c.full_vocab)},
        {"augment", bool_text(c.augment)},
        {"ctx_projections", bool_text(c.ctx_projections)},
        {"exclude_target_ctx", bool_text(c.exclude_target_ctx)},
        {"use_pretrained", bool_text(c.use_pretrained)},
    };
}

std::string to_text(const TrainConfig& c) {
    std::string out;
    for (const auto& [k, v] : entries(c)) out += k + " = " + v + "\n";
    return out;
}

TrainConfig parse_config(const std::string& text, TrainConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        set_value(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return base;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

void TrainConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& what) { throw ConfigError(field + ": " + what); };
    if (rounds < 1) fail("rounds", "must be at least 1");
    if (!(lambda > 0.0 && lambda <= 1.0)) fail("lambda", "must lie in (0, 1]");
    if (k_ctx < 1) fail("k_ctx", "must be at least 1");
    if (n_neg < 0) fail("n_neg", "must be non-negative");
    if (epochs < 0) fail("epochs", "must be non-negative");
    if (patience < 1) fail("patience", "must be at least 1");
    if (!(lr > 0.0)) fail("lr", "must be positive");
    if (batch_size < 1) fail("batch_size", "must be at least 1");
    if (max_len < 1) fail("max_len", "must be at least 1");
    if (dim < 1) fail("dim", "must be at least 1");
    if (blocks < 1) fail("blocks", "must be at least 1");
    if (heads < 1 || dim % heads != 0) fail("heads", "must divide dim");
    if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout", "must lie in [0, 1)");
    if (eval_k < 1) fail("eval_k", "must be at least 1");
}

std::size_t TrainConfig::context_capacity() const {
    return static_cast<std::size_t>(rounds - 1) * static_cast<std::size_t>(k_ctx);
}

std::string config_hash(const TrainConfig& cfg) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : to_text(cfg)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace adaret::config
