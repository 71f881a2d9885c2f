#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mptcs/experiment.hpp"

namespace py = pybind11;
using namespace mptcs;

namespace {

json parse_config(const std::string& text) { return json::parse(text); }

// pybind11 holders must be non-const; the core traffics in
// shared_ptr<const Policy>, so expose a thin handle instead.
struct PolicyHandle {
    PolicyPtr ptr;
};

std::vector<PolicyPtr> unwrap(const std::vector<PolicyHandle>& handles) {
    std::vector<PolicyPtr> out;
    out.reserve(handles.size());
    for (const auto& h : handles) out.push_back(h.ptr);
    return out;
}

std::vector<PolicyHandle> wrap(std::vector<PolicyPtr> policies) {
    std::vector<PolicyHandle> out;
    out.reserve(policies.size());
    for (auto& p : policies) out.push_back({std::move(p)});
    return out;
}

py::dict suite_evaluation_dict(const SuiteEvaluation& e) {
    py::dict d;
    d["mean_failure_rate"] = e.mean_failure_rate;
    d["cstc"] = e.cstc;
    d["unique_obs_per_case"] = e.unique_obs_per_case;
    d["pass_entropy"] = e.pass_entropy;
    d["per_policy_pass_counts"] = e.per_policy_pass_counts;
    d["suite_size"] = e.suite_size;
    d["policy_count"] = e.policy_count;
    d["policy_executions"] = e.policy_executions;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-policy test case selection core";

    py::enum_<TerminalEvent>(m, "TerminalEvent")
        .value("NONE", TerminalEvent::None)
        .value("DEFEAT", TerminalEvent::Defeat)
        .value("WIN", TerminalEvent::Win);

    py::class_<EnvState>(m, "EnvState")
        .def(py::init<>())
        .def_readwrite("slots", &EnvState::slots)
        .def("__eq__", [](const EnvState& a, const EnvState& b) { return a == b; });

    py::class_<TestCase>(m, "TestCase")
        .def(py::init<>())
        .def_readwrite("state", &TestCase::state)
        .def_readwrite("key", &TestCase::key)
        .def("__eq__", [](const TestCase& a, const TestCase& b) { return a == b; });

    py::class_<TrajectoryStep>(m, "TrajectoryStep")
        .def_readonly("state", &TrajectoryStep::state)
        .def_readonly("observation", &TrajectoryStep::observation)
        .def_readonly("action_distribution", &TrajectoryStep::action_distribution)
        .def_readonly("action", &TrajectoryStep::action)
        .def_readonly("reward", &TrajectoryStep::reward);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("steps", &Trajectory::steps)
        .def_readonly("terminal_event", &Trajectory::terminal_event)
        .def_readonly("return_sum", &Trajectory::return_sum)
        .def_property_readonly("terminated_at", [](const Trajectory& t) -> py::object {
            if (t.terminated_at) return py::int_(*t.terminated_at);
            return py::none();
        });

    py::class_<OracleVerdict>(m, "OracleVerdict")
        .def_readonly("failed", &OracleVerdict::failed)
        .def_property_readonly("failing_step", [](const OracleVerdict& v) -> py::object {
            if (v.failing_step) return py::int_(*v.failing_step);
            return py::none();
        });

    py::class_<OracleConfig>(m, "OracleConfig")
        .def(py::init<>())
        .def_readwrite("horizon", &OracleConfig::horizon)
        .def_readwrite("win_counts_as_failure", &OracleConfig::win_counts_as_failure);

    py::class_<Environment, std::shared_ptr<Environment>>(m, "Environment")
        .def_property_readonly("id", [](const Environment& e) { return e.spec().id; })
        .def_property_readonly("action_count",
                               [](const Environment& e) { return e.spec().action_count; })
        .def_property_readonly("max_steps", [](const Environment& e) { return e.spec().max_steps; })
        .def_property_readonly("observation_size",
                               [](const Environment& e) { return e.observation_size(); })
        .def_property_readonly("field_names",
                               [](const Environment& e) {
                                   std::vector<std::string> names;
                                   for (const auto& f : e.spec().schema.fields())
                                       names.push_back(f.name);
                                   return names;
                               })
        .def("sample_initial", &Environment::sample_initial, py::arg("key"))
        .def("transition",
             [](const Environment& e, const EnvState& s, int action, uint64_t key, int step) {
                 StepOutcome out = e.transition(s, action, key, step);
                 return py::make_tuple(out.state, out.reward, out.event);
             },
             py::arg("state"), py::arg("action"), py::arg("key"), py::arg("step"))
        .def("observe",
             [](const Environment& e, const EnvState& s) {
                 return e.observe(s);
             },
             py::arg("state"))
        .def("validate_state", &Environment::validate_state, py::arg("state"))
        .def("mutate",
             [](const Environment& e, const TestCase& tc, uint64_t rng_key) {
                 return mutate(tc, rng_key, e.mutation_ops(), e);
             },
             py::arg("test_case"), py::arg("rng_key"));

    m.def("make_environment",
          [](const std::string& config_json) {
              return std::shared_ptr<Environment>(make_environment(parse_config(config_json)));
          },
          py::arg("config_json"));
    m.def("load_environment",
          [](const std::filesystem::path& path) {
              return std::shared_ptr<Environment>(load_environment(path));
          },
          py::arg("path"));

    py::class_<PolicyHandle>(m, "Policy")
        .def_property_readonly("id", [](const PolicyHandle& h) { return h.ptr->id(); })
        .def_property_readonly("kind", [](const PolicyHandle& h) { return h.ptr->kind(); })
        .def_property_readonly("action_count",
                               [](const PolicyHandle& h) { return h.ptr->action_count(); })
        .def("act_distribution",
             [](const PolicyHandle& h, const std::vector<double>& obs) {
                 return h.ptr->act_distribution(obs);
             },
             py::arg("observation"))
        .def("act",
             [](const PolicyHandle& h, const std::vector<double>& obs) { return h.ptr->act(obs); },
             py::arg("observation"));

    m.def("execute",
          [](const TestCase& tc, const PolicyHandle& policy, const Environment& env,
             int step_cap) { return execute(tc, *policy.ptr, env, step_cap); },
          py::arg("test_case"), py::arg("policy"), py::arg("env"), py::arg("step_cap") = -1);
    m.def("oracle",
          [](const TestCase& tc, const PolicyHandle& policy, const Environment& env, int horizon) {
              return oracle(tc, *policy.ptr, env, OracleConfig{horizon, false});
          },
          py::arg("test_case"), py::arg("policy"), py::arg("env"), py::arg("horizon") = 10);

    m.def("difficulty",
          [](const std::vector<int>& verdicts) {
              PassFailVector v(verdicts.begin(), verdicts.end());
              Score s = difficulty(v);
              return py::make_tuple(s.numerator, s.m);
          },
          py::arg("verdicts"), "verdicts use 1 for a failed policy; returns (numerator, m)");

    py::class_<Descriptor>(m, "Descriptor")
        .def_readonly("obs_variance", &Descriptor::obs_variance)
        .def_readonly("mean_entropy", &Descriptor::mean_entropy);

    m.def("descriptor_from", &descriptor_from, py::arg("trajectories"));

    py::class_<ArchiveBounds>(m, "ArchiveBounds")
        .def(py::init<>())
        .def_readwrite("variance_lo", &ArchiveBounds::variance_lo)
        .def_readwrite("variance_hi", &ArchiveBounds::variance_hi)
        .def_readwrite("entropy_lo", &ArchiveBounds::entropy_lo)
        .def_readwrite("entropy_hi", &ArchiveBounds::entropy_hi);

    py::class_<ScoredTestCase>(m, "ScoredTestCase")
        .def_readonly("test_case", &ScoredTestCase::test_case)
        .def_readonly("descriptor", &ScoredTestCase::descriptor)
        .def_readonly("sequence", &ScoredTestCase::sequence)
        .def_property_readonly("score",
                               [](const ScoredTestCase& s) {
                                   return py::make_tuple(s.score.numerator, s.score.m);
                               })
        .def_property_readonly("verdicts", [](const ScoredTestCase& s) {
            std::vector<int> v(s.verdicts.begin(), s.verdicts.end());
            return v;
        });

    py::class_<Archive>(m, "Archive")
        .def(py::init<ArchiveBounds, int, int>(), py::arg("bounds"), py::arg("resolution_x"),
             py::arg("resolution_y"))
        .def_property_readonly("size", &Archive::size)
        .def("niche_index",
             [](const Archive& a, const Descriptor& d) { return a.niche_index(d); })
        .def("suite", &Archive::suite)
        .def("occupants", [](const Archive& a) {
            py::list out;
            for (const auto& [niche, elite] : a.cells())
                out.append(py::make_tuple(niche, elite));
            return out;
        });

    m.def("mptcs_insert",
          [](Archive& archive, const TestCase& candidate,
             const std::vector<PolicyHandle>& selection, const Environment& env, int horizon) {
              PolicySet sel{unwrap(selection), "selection"};
              InsertResult r = mptcs_insert(archive, candidate, sel, env,
                                            OracleConfig{horizon, false});
              return py::make_tuple(r.inserted, r.niche, r.scored);
          },
          py::arg("archive"), py::arg("candidate"), py::arg("selection"), py::arg("env"),
          py::arg("horizon") = 10);

    m.def("calibrate_bounds",
          [](const Environment& env, const std::vector<PolicyHandle>& selection, int probe_count,
             uint64_t seed, int horizon, int workers) {
              PolicySet sel{unwrap(selection), "selection"};
              return calibrate_bounds(env, sel, OracleConfig{horizon, false}, probe_count, seed,
                                      workers);
          },
          py::arg("env"), py::arg("selection"), py::arg("probe_count") = 2000, py::arg("seed") = 0,
          py::arg("horizon") = 10, py::arg("workers") = 1);

    m.def("provision_policy_pool",
          [](const Environment& env, int count, uint64_t seed, double heuristic_fraction,
             int workers) {
              ProvisionConfig cfg;
              cfg.count = count;
              cfg.heuristic_fraction = heuristic_fraction;
              // Desk-scale search budget keeps interactive calls quick.
              cfg.es_generations = 4;
              cfg.es_population = 4;
              cfg.es_episodes = 8;
              return wrap(provision_policy_pool(env, cfg, seed, workers));
          },
          py::arg("env"), py::arg("count"), py::arg("seed") = 0,
          py::arg("heuristic_fraction") = 0.6, py::arg("workers") = 1);

    m.def("rank_policies",
          [](const std::vector<PolicyHandle>& policies, const Environment& env, int episodes,
             uint64_t seed, int workers) {
              return rank_policies(unwrap(policies), env, episodes, seed, workers).entries;
          },
          py::arg("policies"), py::arg("env"), py::arg("episodes") = 200, py::arg("seed") = 0,
          py::arg("workers") = 1);

    m.def("partition_alternating",
          [](const std::vector<PolicyHandle>& policies, const Environment& env, int episodes,
             uint64_t seed, int n_sel, int n_eval, int workers) {
              auto unwrapped = unwrap(policies);
              PolicyRanking ranking = rank_policies(unwrapped, env, episodes, seed, workers);
              auto [sel, eval] = partition_alternating(ranking, unwrapped, n_sel, n_eval);
              return py::make_tuple(wrap(std::move(sel.members)), wrap(std::move(eval.members)));
          },
          py::arg("policies"), py::arg("env"), py::arg("episodes"), py::arg("seed"),
          py::arg("n_sel"), py::arg("n_eval"), py::arg("workers") = 1);

    m.def("run_ga_campaign",
          [](Archive& archive, const Environment& env,
             const std::vector<PolicyHandle>& selection, int iterations,
             int samples_per_iteration, int bootstrap_min_archive, uint64_t seed, int horizon,
             int workers) {
              PolicySet sel{unwrap(selection), "selection"};
              CampaignConfig cfg;
              cfg.mode = GenerationMode::Ga;
              cfg.ga.iterations = iterations;
              cfg.ga.samples_per_iteration = samples_per_iteration;
              cfg.ga.bootstrap_min_archive = bootstrap_min_archive;
              cfg.oracle.horizon = horizon;
              cfg.seed = seed;
              cfg.workers = workers;
              CampaignResult result = run_generation_campaign(archive, env, sel, cfg);
              py::dict d;
              d["policy_executions"] = result.policy_executions;
              d["bootstrap_candidates"] = result.bootstrap_candidates;
              d["main_candidates"] = result.main_candidates;
              d["iterations_run"] = result.iterations_run;
              d["archive_size"] = archive.size();
              d["pool_size"] = result.pool.size();
              return d;
          },
          py::arg("archive"), py::arg("env"), py::arg("selection"), py::arg("iterations"),
          py::arg("samples_per_iteration") = 200, py::arg("bootstrap_min_archive") = 100,
          py::arg("seed") = 0, py::arg("horizon") = 10, py::arg("workers") = 1);

    m.def("evaluate_suite",
          [](const std::vector<TestCase>& suite, const std::vector<PolicyHandle>& evaluation,
             const Environment& env, int horizon, int workers) {
              PolicySet eval{unwrap(evaluation), "evaluation"};
              return suite_evaluation_dict(
                  evaluate_suite(suite, eval, env, OracleConfig{horizon, false}, workers));
          },
          py::arg("suite"), py::arg("evaluation"), py::arg("env"), py::arg("horizon") = 10,
          py::arg("workers") = 1);

    m.def("save_policy",
          [](const PolicyHandle& policy, const std::filesystem::path& path) {
              save_policy(*policy.ptr, path);
          },
          py::arg("policy"), py::arg("path"));
    m.def("load_policy",
          [](const std::filesystem::path& path, const Environment& env) {
              return PolicyHandle{load_policy(path, env)};
          },
          py::arg("path"), py::arg("env"));
}
