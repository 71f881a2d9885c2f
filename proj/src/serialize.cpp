#include "mptcs/serialize.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mptcs/breakout.hpp"
#include "mptcs/errors.hpp"
#include "mptcs/griddodge.hpp"

namespace mptcs {

namespace {

std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

json state_to_json(const StateSchema& schema, const EnvState& state) {
    if (static_cast<int>(state.slots.size()) != schema.total_slots())
        throw SchemaMismatchError("state size does not match schema");
    json j = json::object();
    for (const auto& f : schema.fields()) {
        if (f.kind == FieldKind::Grid) {
            json cells = json::array();
            for (int i = 0; i < f.slot_count(); ++i)
                cells.push_back(state.slots[static_cast<size_t>(f.offset + i)]);
            j[f.name] = std::move(cells);
        } else {
            j[f.name] = state.slots[static_cast<size_t>(f.offset)];
        }
    }
    return j;
}

EnvState state_from_json(const StateSchema& schema, const json& j) {
    EnvState state;
    state.slots.assign(static_cast<size_t>(schema.total_slots()), 0);
    for (const auto& f : schema.fields()) {
        if (!j.contains(f.name)) throw SchemaMismatchError("missing field " + f.name);
        if (f.kind == FieldKind::Grid) {
            const auto& cells = j.at(f.name);
            if (static_cast<int>(cells.size()) != f.slot_count())
                throw SchemaMismatchError("grid size mismatch for " + f.name);
            for (int i = 0; i < f.slot_count(); ++i)
                state.slots[static_cast<size_t>(f.offset + i)] = cells[static_cast<size_t>(i)];
        } else {
            state.slots[static_cast<size_t>(f.offset)] = j.at(f.name).get<int32_t>();
        }
    }
    if (!schema.validate(state))
        throw SchemaMismatchError("deserialized state invalid: " + schema.validate_message(state));
    return state;
}

json test_case_to_json(const StateSchema& schema, const TestCase& tc) {
    return json{{"state", state_to_json(schema, tc.state)}, {"key", tc.key}};
}

TestCase test_case_from_json(const StateSchema& schema, const json& j) {
    TestCase tc;
    tc.state = state_from_json(schema, j.at("state"));
    tc.key = j.at("key").get<uint64_t>();
    return tc;
}

json trajectory_to_json(const StateSchema& schema, const Trajectory& trajectory) {
    json steps = json::array();
    for (const auto& s : trajectory.steps) {
        steps.push_back(json{{"state", state_to_json(schema, s.state)},
                             {"observation", s.observation},
                             {"action_distribution", s.action_distribution},
                             {"action", s.action},
                             {"reward", s.reward}});
    }
    json j{{"steps", std::move(steps)}, {"return_sum", trajectory.return_sum}};
    if (trajectory.terminated_at) {
        j["terminated_at"] = *trajectory.terminated_at;
        j["terminal_event"] =
            trajectory.terminal_event == TerminalEvent::Defeat ? "defeat" : "win";
    }
    return j;
}

std::unique_ptr<Environment> make_environment(const json& config) {
    if (config.value("schema", "") != "mptcs-env-v1")
        throw ConfigError("environment config must declare schema mptcs-env-v1");
    std::string id = config.at("id").get<std::string>();
    if (id == "minibreakout") {
        MiniBreakoutConfig c;
        c.width = config.value("width", c.width);
        c.height = config.value("height", c.height);
        c.brick_rows = config.value("brick_rows", c.brick_rows);
        c.brick_y0 = config.value("brick_y0", c.brick_y0);
        c.max_steps = config.value("max_steps", c.max_steps);
        c.gamma = config.value("gamma", c.gamma);
        c.mutation_probability = config.value("mutation_probability", c.mutation_probability);
        c.mutate_key = config.value("mutate_key", c.mutate_key);
        return std::make_unique<MiniBreakoutEnv>(c);
    }
    if (id == "griddodge") {
        GridDodgeConfig c;
        c.width = config.value("width", c.width);
        c.height = config.value("height", c.height);
        c.entity_capacity = config.value("entity_capacity", c.entity_capacity);
        c.spawn_interval = config.value("spawn_interval", c.spawn_interval);
        c.gold_probability = config.value("gold_probability", c.gold_probability);
        c.initial_entities_min = config.value("initial_entities_min", c.initial_entities_min);
        c.initial_entities_max = config.value("initial_entities_max", c.initial_entities_max);
        c.max_steps = config.value("max_steps", c.max_steps);
        c.gamma = config.value("gamma", c.gamma);
        c.mutation_probability = config.value("mutation_probability", c.mutation_probability);
        c.mutate_key = config.value("mutate_key", c.mutate_key);
        return std::make_unique<GridDodgeEnv>(c);
    }
    throw ConfigError("unknown environment id: " + id);
}

std::unique_ptr<Environment> load_environment(const std::filesystem::path& path) {
    return make_environment(json::parse(read_text_file(path)));
}

json environment_config_to_json(const Environment& env) {
    json j{{"schema", "mptcs-env-v1"}, {"id", env.spec().id}};
    if (const auto* b = dynamic_cast<const MiniBreakoutEnv*>(&env)) {
        const auto& c = b->config();
        j["width"] = c.width;
        j["height"] = c.height;
        j["brick_rows"] = c.brick_rows;
        j["brick_y0"] = c.brick_y0;
        j["max_steps"] = c.max_steps;
        j["gamma"] = c.gamma;
        j["mutation_probability"] = c.mutation_probability;
        j["mutate_key"] = c.mutate_key;
    } else if (const auto* g = dynamic_cast<const GridDodgeEnv*>(&env)) {
        const auto& c = g->config();
        j["width"] = c.width;
        j["height"] = c.height;
        j["entity_capacity"] = c.entity_capacity;
        j["spawn_interval"] = c.spawn_interval;
        j["gold_probability"] = c.gold_probability;
        j["initial_entities_min"] = c.initial_entities_min;
        j["initial_entities_max"] = c.initial_entities_max;
        j["max_steps"] = c.max_steps;
        j["gamma"] = c.gamma;
        j["mutation_probability"] = c.mutation_probability;
        j["mutate_key"] = c.mutate_key;
    }
    return j;
}

namespace {

json scored_fields_to_json(const StateSchema& schema, const TestCase& tc, const Score& score,
                           const Descriptor& desc, const PassFailVector& verdicts,
                           uint64_t sequence) {
    json v = json::array();
    for (uint8_t b : verdicts) v.push_back(static_cast<int>(b));
    return json{{"test_case", test_case_to_json(schema, tc)},
                {"score_numerator", score.numerator},
                {"score_m", score.m},
                {"descriptor", {{"obs_variance", desc.obs_variance}, {"mean_entropy", desc.mean_entropy}}},
                {"verdicts", std::move(v)},
                {"sequence", sequence}};
}

void scored_fields_from_json(const StateSchema& schema, const json& j, TestCase& tc, Score& score,
                             Descriptor& desc, PassFailVector& verdicts, uint64_t& sequence) {
    tc = test_case_from_json(schema, j.at("test_case"));
    score.numerator = j.at("score_numerator").get<int>();
    score.m = j.at("score_m").get<int>();
    desc.obs_variance = j.at("descriptor").at("obs_variance").get<double>();
    desc.mean_entropy = j.at("descriptor").at("mean_entropy").get<double>();
    verdicts.clear();
    for (const auto& b : j.at("verdicts")) verdicts.push_back(b.get<int>() ? 1 : 0);
    sequence = j.at("sequence").get<uint64_t>();
}

}  // namespace

json archive_to_json(const Archive& archive, const StateSchema& schema, const std::string& env_id) {
    json cells = json::array();
    for (const auto& [niche, elite] : archive.cells()) {
        json cell = scored_fields_to_json(schema, elite.test_case, elite.score, elite.descriptor,
                                          elite.verdicts, elite.sequence);
        cell["niche"] = {niche.first, niche.second};
        cells.push_back(std::move(cell));
    }
    const auto& b = archive.bounds();
    return json{{"schema", "mptcs-archive-v1"},
                {"env_id", env_id},
                {"bounds",
                 {{"variance", {b.variance_lo, b.variance_hi}},
                  {"entropy", {b.entropy_lo, b.entropy_hi}}}},
                {"resolution", {archive.resolution_x(), archive.resolution_y()}},
                {"cells", std::move(cells)}};
}

Archive archive_from_json(const StateSchema& schema, const json& j) {
    if (j.value("schema", "") != "mptcs-archive-v1")
        throw ConfigError("archive file must declare schema mptcs-archive-v1");
    ArchiveBounds bounds;
    bounds.variance_lo = j.at("bounds").at("variance")[0].get<double>();
    bounds.variance_hi = j.at("bounds").at("variance")[1].get<double>();
    bounds.entropy_lo = j.at("bounds").at("entropy")[0].get<double>();
    bounds.entropy_hi = j.at("bounds").at("entropy")[1].get<double>();
    Archive archive(bounds, j.at("resolution")[0].get<int>(), j.at("resolution")[1].get<int>());
    for (const auto& cell : j.at("cells")) {
        ScoredTestCase elite;
        scored_fields_from_json(schema, cell, elite.test_case, elite.score, elite.descriptor,
                                elite.verdicts, elite.sequence);
        archive.offer(elite);
    }
    return archive;
}

void save_archive(const Archive& archive, const Environment& env,
                  const std::filesystem::path& path) {
    write_text_file(path, archive_to_json(archive, env.spec().schema, env.spec().id).dump(2) + "\n");
}

Archive load_archive(const Environment& env, const std::filesystem::path& path) {
    return archive_from_json(env.spec().schema, json::parse(read_text_file(path)));
}

void save_pool(const std::vector<PoolEntry>& pool, const StateSchema& schema,
               const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write pool file " + path.string());
    for (const auto& entry : pool) {
        json j{{"test_case", test_case_to_json(schema, entry.test_case)},
               {"sequence", entry.sequence},
               {"iteration", entry.iteration},
               {"parent_sequence", entry.parent_sequence},
               {"generator", entry.generator}};
        if (entry.has_score) {
            j["score_numerator"] = entry.score.numerator;
            j["score_m"] = entry.score.m;
            j["descriptor"] = {{"obs_variance", entry.descriptor.obs_variance},
                               {"mean_entropy", entry.descriptor.mean_entropy}};
            json v = json::array();
            for (uint8_t b : entry.verdicts) v.push_back(static_cast<int>(b));
            j["verdicts"] = std::move(v);
        }
        out << j.dump() << "\n";
    }
}

std::vector<PoolEntry> load_pool(const StateSchema& schema, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read pool file " + path.string());
    std::vector<PoolEntry> pool;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        PoolEntry entry;
        entry.test_case = test_case_from_json(schema, j.at("test_case"));
        entry.sequence = j.at("sequence").get<uint64_t>();
        entry.iteration = j.at("iteration").get<int>();
        entry.parent_sequence = j.at("parent_sequence").get<int64_t>();
        entry.generator = j.at("generator").get<std::string>();
        if (j.contains("score_numerator")) {
            entry.has_score = true;
            entry.score.numerator = j.at("score_numerator").get<int>();
            entry.score.m = j.at("score_m").get<int>();
            entry.descriptor.obs_variance = j.at("descriptor").at("obs_variance").get<double>();
            entry.descriptor.mean_entropy = j.at("descriptor").at("mean_entropy").get<double>();
            for (const auto& b : j.at("verdicts")) entry.verdicts.push_back(b.get<int>() ? 1 : 0);
        }
        pool.push_back(std::move(entry));
    }
    return pool;
}

namespace {
constexpr uint32_t kNetworkMagic = 0x4d504e57;  // "MPNW"

json heuristic_to_json(const Policy& policy) {
    if (const auto* bt = dynamic_cast<const BreakoutTrackerPolicy*>(&policy)) {
        const auto& p = bt->params();
        return json{{"family", "breakout_tracker"},
                    {"observation_size", policy.observation_size()},
                    {"params",
                     {{"width", p.width},
                      {"height", p.height},
                      {"dead_zone", p.dead_zone},
                      {"trigger_y", p.trigger_y},
                      {"aim_lead", p.aim_lead},
                      {"home_x", p.home_x},
                      {"temperature", p.temperature},
                      {"action_bias", p.action_bias}}}};
    }
    if (const auto* dg = dynamic_cast<const DodgeGreedyPolicy*>(&policy)) {
        const auto& p = dg->params();
        return json{{"family", "dodge_greedy"},
                    {"observation_size", policy.observation_size()},
                    {"params",
                     {{"width", p.width},
                      {"height", p.height},
                      {"entity_capacity", p.entity_capacity},
                      {"danger_radius", p.danger_radius},
                      {"flee_weight", p.flee_weight},
                      {"gold_weight", p.gold_weight},
                      {"temperature", p.temperature},
                      {"action_bias", p.action_bias}}}};
    }
    throw ConfigError("unknown heuristic policy type for " + policy.id());
}

PolicyPtr heuristic_from_json(const std::string& id, const json& j) {
    std::string family = j.at("family").get<std::string>();
    int obs = j.at("observation_size").get<int>();
    const json& p = j.at("params");
    if (family == "breakout_tracker") {
        BreakoutTrackerParams params;
        params.width = p.at("width").get<int>();
        params.height = p.at("height").get<int>();
        params.dead_zone = p.at("dead_zone").get<int>();
        params.trigger_y = p.at("trigger_y").get<int>();
        params.aim_lead = p.at("aim_lead").get<int>();
        params.home_x = p.value("home_x", -1);
        params.temperature = p.at("temperature").get<double>();
        params.action_bias = p.at("action_bias").get<std::vector<double>>();
        return std::make_shared<BreakoutTrackerPolicy>(id, obs, params);
    }
    if (family == "dodge_greedy") {
        DodgeGreedyParams params;
        params.width = p.at("width").get<int>();
        params.height = p.at("height").get<int>();
        params.entity_capacity = p.at("entity_capacity").get<int>();
        params.danger_radius = p.at("danger_radius").get<int>();
        params.flee_weight = p.at("flee_weight").get<double>();
        params.gold_weight = p.at("gold_weight").get<double>();
        params.temperature = p.at("temperature").get<double>();
        params.action_bias = p.at("action_bias").get<std::vector<double>>();
        return std::make_shared<DodgeGreedyPolicy>(id, obs, params);
    }
    throw ConfigError("unknown heuristic family " + family);
}
}  // namespace

void save_policy(const Policy& policy, const std::filesystem::path& path) {
    if (const auto* net = dynamic_cast<const NetworkPolicy*>(&policy)) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot write policy file " + path.string());
        uint32_t magic = kNetworkMagic;
        uint32_t layers = static_cast<uint32_t>(net->layer_sizes().size());
        out.write(reinterpret_cast<const char*>(&magic), sizeof(magic));
        out.write(reinterpret_cast<const char*>(&layers), sizeof(layers));
        for (int d : net->layer_sizes()) {
            uint32_t dim = static_cast<uint32_t>(d);
            out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
        }
        out.write(reinterpret_cast<const char*>(net->parameters().data()),
                  static_cast<std::streamsize>(net->parameters().size() * sizeof(double)));
        return;
    }
    write_text_file(path, heuristic_to_json(policy).dump(2) + "\n");
}

PolicyPtr load_policy(const std::filesystem::path& path, const Environment& env) {
    std::string id = path.stem().string();
    if (path.extension() == ".bin") {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot read policy file " + path.string());
        uint32_t magic = 0, layers = 0;
        in.read(reinterpret_cast<char*>(&magic), sizeof(magic));
        in.read(reinterpret_cast<char*>(&layers), sizeof(layers));
        if (magic != kNetworkMagic || layers < 2)
            throw ConfigError("bad network policy file " + path.string());
        std::vector<int> sizes(layers);
        for (auto& d : sizes) {
            uint32_t dim = 0;
            in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
            d = static_cast<int>(dim);
        }
        std::vector<double> params(NetworkPolicy::parameter_count(sizes));
        in.read(reinterpret_cast<char*>(params.data()),
                static_cast<std::streamsize>(params.size() * sizeof(double)));
        if (!in) throw ConfigError("truncated network policy file " + path.string());
        return std::make_shared<NetworkPolicy>(id, sizes, std::move(params));
    }
    json j = json::parse(read_text_file(path));
    auto policy = heuristic_from_json(id, j);
    if (policy->observation_size() != env.observation_size())
        throw DimensionMismatchError("policy " + id + " does not match environment " +
                                     env.spec().id);
    return policy;
}

void save_manifest(const PolicyManifest& manifest, const std::filesystem::path& path) {
    json policies = json::array();
    for (const auto& e : manifest.policies) {
        policies.push_back(json{{"id", e.id},
                                {"kind", e.kind},
                                {"file", e.file},
                                {"mean_return", e.mean_return},
                                {"rank", e.rank}});
    }
    json j{{"schema", "mptcs-manifest-v1"},
           {"env_id", manifest.env_id},
           {"seed", manifest.seed},
           {"rank_episodes", manifest.rank_episodes},
           {"policies", std::move(policies)},
           {"sel_ids", manifest.sel_ids},
           {"eval_ids", manifest.eval_ids}};
    write_text_file(path, j.dump(2) + "\n");
}

PolicyManifest load_manifest(const std::filesystem::path& path) {
    json j = json::parse(read_text_file(path));
    if (j.value("schema", "") != "mptcs-manifest-v1")
        throw ConfigError("manifest must declare schema mptcs-manifest-v1");
    PolicyManifest m;
    m.env_id = j.at("env_id").get<std::string>();
    m.seed = j.at("seed").get<uint64_t>();
    m.rank_episodes = j.at("rank_episodes").get<int>();
    for (const auto& e : j.at("policies")) {
        m.policies.push_back({e.at("id").get<std::string>(), e.at("kind").get<std::string>(),
                              e.at("file").get<std::string>(), e.at("mean_return").get<double>(),
                              e.at("rank").get<int>()});
    }
    m.sel_ids = j.at("sel_ids").get<std::vector<std::string>>();
    m.eval_ids = j.at("eval_ids").get<std::vector<std::string>>();
    return m;
}

LoadedPolicyPool load_policy_pool(const PolicyManifest& manifest,
                                  const std::filesystem::path& manifest_dir,
                                  const Environment& env) {
    if (manifest.env_id != env.spec().id)
        throw ConfigError("manifest env " + manifest.env_id + " does not match " + env.spec().id);
    LoadedPolicyPool pool;
    auto find = [&](const std::string& id) -> PolicyPtr {
        for (const auto& p : pool.all)
            if (p->id() == id) return p;
        throw ConfigError("manifest set references unknown policy " + id);
    };
    for (const auto& e : manifest.policies)
        pool.all.push_back(load_policy(manifest_dir / e.file, env));
    pool.selection.role = "selection";
    pool.evaluation.role = "evaluation";
    for (const auto& id : manifest.sel_ids) pool.selection.members.push_back(find(id));
    for (const auto& id : manifest.eval_ids) pool.evaluation.members.push_back(find(id));
    return pool;
}

void write_comparison_csv(const ComparisonReport& report, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "method,repetition,seed,suite_size,mean_failure_rate,cstc,unique_obs_per_case,"
           "pass_entropy,policy_executions\n";
    for (const auto& row : report.rows) {
        out << row.method << ',' << row.repetition << ',' << row.seed << ','
            << row.evaluation.suite_size << ',' << format_metric(row.evaluation.mean_failure_rate)
            << ',' << format_metric(row.evaluation.cstc) << ','
            << format_metric(row.evaluation.unique_obs_per_case) << ','
            << format_metric(row.evaluation.pass_entropy) << ',' << row.evaluation.policy_executions
            << "\n";
    }
    write_text_file(path, out.str());
}

std::string render_summary(const ComparisonReport& report) {
    std::ostringstream out;
    out << "selection method comparison (mean +/- std over repetitions)\n";
    out << "method  reps  suite   MFR              CSTC             unique-obs/case  pass-entropy\n";
    for (const auto& s : report.summarize()) {
        char line[256];
        std::snprintf(line, sizeof(line),
                      "%-7s %-5d %-7.1f %.4f+/-%.4f  %.4f+/-%.4f  %.3f+/-%.3f  %.4f+/-%.4f\n",
                      s.method.c_str(), s.repetitions, s.suite_size_mean, s.mfr_mean, s.mfr_std,
                      s.cstc_mean, s.cstc_std, s.unique_mean, s.unique_std, s.entropy_mean,
                      s.entropy_std);
        out << line;
    }
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file " + path.string());
    out << content;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace mptcs
