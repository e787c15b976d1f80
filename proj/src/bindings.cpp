#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "duplexsim/engine.hpp"

namespace py = pybind11;
using namespace duplexsim;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cultural transmission on two-layer directed networks";

    // --- network ---
    py::class_<DirectedLayer>(m, "DirectedLayer")
        .def(py::init<>())
        .def_readwrite("n", &DirectedLayer::n)
        .def_readwrite("out_adjacency", &DirectedLayer::out_adjacency)
        .def("edge_count", &DirectedLayer::edge_count);

    py::class_<DuplexNetwork>(m, "DuplexNetwork")
        .def(py::init<>())
        .def_readwrite("n", &DuplexNetwork::n)
        .def_readwrite("layer1", &DuplexNetwork::layer1)
        .def_readwrite("layer2", &DuplexNetwork::layer2);

    m.def("generate_complete", &generate_complete, py::arg("n"));
    m.def("generate_scale_free", &generate_scale_free, py::arg("n"), py::arg("k_out"),
          py::arg("seed"));
    m.def("generate_small_world", &generate_small_world, py::arg("n"), py::arg("clusters"),
          py::arg("k_out"), py::arg("p_rewire"), py::arg("seed"));
    m.def("duplicate", &duplicate, py::arg("layer"));
    m.def("out_neighbors", &out_neighbors, py::arg("net"), py::arg("layer_id"), py::arg("node"),
          py::return_value_policy::copy);
    m.def("save_duplex", &save_duplex, py::arg("net"), py::arg("path"));
    m.def("load_duplex", &load_duplex, py::arg("path"));

    // --- dynamics ---
    py::enum_<Retention>(m, "Retention")
        .value("greater", Retention::greater)
        .value("less", Retention::less);
    py::enum_<MiMode>(m, "MiMode")
        .value("sequential", MiMode::sequential)
        .value("association_coupled", MiMode::association_coupled);
    py::enum_<StepKind>(m, "StepKind")
        .value("association", StepKind::association)
        .value("preference", StepKind::preference)
        .value("skipped", StepKind::skipped);

    py::class_<ModelConfig>(m, "ModelConfig")
        .def(py::init<>())
        .def_readwrite("alpha", &ModelConfig::alpha)
        .def_readwrite("k", &ModelConfig::k)
        .def_readwrite("steps", &ModelConfig::steps)
        .def_readwrite("symmetric_r", &ModelConfig::symmetric_r)
        .def_readwrite("cs_normalize", &ModelConfig::cs_normalize)
        .def_readwrite("cs_include_diagonal", &ModelConfig::cs_include_diagonal)
        .def_readwrite("bounded_preferences", &ModelConfig::bounded_preferences)
        .def_readwrite("retention", &ModelConfig::retention)
        .def_readwrite("mi_mode", &ModelConfig::mi_mode)
        .def_readwrite("master_seed", &ModelConfig::master_seed);

    py::class_<AgentState>(m, "AgentState")
        .def(py::init<>())
        .def_readwrite("k", &AgentState::k)
        .def_readwrite("preference", &AgentState::preference)
        .def_readwrite("association", &AgentState::association)
        .def("r", [](const AgentState& a, int i, int j) { return a.r(i, j); }, py::arg("i"),
             py::arg("j"));

    py::class_<Population>(m, "Population")
        .def(py::init<>())
        .def_readwrite("k", &Population::k)
        .def_readwrite("agents", &Population::agents)
        .def("__len__", &Population::size);

    py::class_<StepOutcome>(m, "StepOutcome")
        .def(py::init<>())
        .def_readwrite("kind", &StepOutcome::kind)
        .def_readwrite("observer", &StepOutcome::observer)
        .def_readwrite("sender", &StepOutcome::sender)
        .def_readwrite("practice_i", &StepOutcome::practice_i)
        .def_readwrite("practice_j", &StepOutcome::practice_j)
        .def_readwrite("proposal_retained", &StepOutcome::proposal_retained)
        .def_readwrite("cs_fallback", &StepOutcome::cs_fallback);

    py::class_<RandomStream>(m, "RandomStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("next_u64", &RandomStream::next_u64)
        .def("uniform01", &RandomStream::uniform01)
        .def("uniform", &RandomStream::uniform, py::arg("lo"), py::arg("hi"))
        .def("uniform_below", &RandomStream::uniform_below, py::arg("bound"))
        .def("normal", &RandomStream::normal);

    m.def("init_population", &init_population, py::arg("n"), py::arg("k"), py::arg("rng"));
    m.def("softmax_probabilities",
          [](const std::vector<double>& v) { return softmax_probabilities(v); }, py::arg("v"));
    m.def("exhibit_pair", &exhibit_pair, py::arg("agent"), py::arg("rng"));
    m.def("exhibit_single", &exhibit_single, py::arg("agent"), py::arg("rng"));
    m.def(
        "constraint_satisfaction",
        [](const std::vector<double>& v, const std::vector<double>& r, const ModelConfig& cfg) {
            return constraint_satisfaction(v, r, cfg);
        },
        py::arg("v"), py::arg("r"), py::arg("cfg"));
    m.def("association_step", &association_step, py::arg("pop"), py::arg("net"), py::arg("cfg"),
          py::arg("rng"));
    m.def("preference_step", &preference_step, py::arg("pop"), py::arg("net"), py::arg("cfg"),
          py::arg("rng"));
    m.def("step", &step, py::arg("pop"), py::arg("net"), py::arg("cfg"), py::arg("rng"));
    m.def(
        "run",
        [](const DuplexNetwork& net, const ModelConfig& cfg, std::uint64_t sample_every,
           const py::object& sample, const py::object& trace) {
            SampleSink sample_sink;
            if (!sample.is_none())
                sample_sink = [sample](const RunProgress& progress, const Population& pop) {
                    sample(progress.t, progress.skipped_steps, pop);
                };
            TraceSink trace_sink;
            if (!trace.is_none())
                trace_sink = [trace](std::uint64_t t, const StepOutcome& outcome) {
                    trace(t, outcome);
                };
            return run(net, cfg, sample_every, sample_sink, trace_sink);
        },
        py::arg("net"), py::arg("cfg"), py::arg("sample_every") = 500,
        py::arg("sample") = py::none(), py::arg("trace") = py::none(),
        "Seeds a stream from cfg.master_seed, initializes the population, runs "
        "cfg.steps rounds, and returns the final population. sample(t, skipped, pop) "
        "fires at t=0, every sample_every rounds, and at the end.");

    // --- measures ---
    py::class_<PairwiseStat>(m, "PairwiseStat")
        .def_readonly("mean", &PairwiseStat::mean)
        .def_readonly("excluded_pairs", &PairwiseStat::excluded_pairs)
        .def_readonly("total_pairs", &PairwiseStat::total_pairs);

    py::class_<MeasurementRecord>(m, "MeasurementRecord")
        .def_readonly("t", &MeasurementRecord::t)
        .def_readonly("pref_similarity", &MeasurementRecord::pref_similarity)
        .def_readonly("pref_congruence", &MeasurementRecord::pref_congruence)
        .def_readonly("assoc_similarity", &MeasurementRecord::assoc_similarity)
        .def_readonly("mean_mutual_info", &MeasurementRecord::mean_mutual_info)
        .def_readonly("excluded_pairs", &MeasurementRecord::excluded_pairs);

    py::class_<JointExhibitDistribution>(m, "JointExhibitDistribution")
        .def_readonly("k", &JointExhibitDistribution::k)
        .def_readonly("p", &JointExhibitDistribution::p)
        .def("at", &JointExhibitDistribution::at, py::arg("i"), py::arg("j"));

    m.def(
        "pearson",
        [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); },
        py::arg("x"), py::arg("y"));
    m.def("preference_similarity", &preference_similarity, py::arg("pop"));
    m.def("preference_congruence", &preference_congruence, py::arg("pop"));
    m.def("association_similarity", &association_similarity, py::arg("pop"));
    m.def(
        "interpretive_distance",
        [](const std::vector<double>& ra, const std::vector<double>& rb, int k) {
            return interpretive_distance(ra, rb, k);
        },
        py::arg("ra"), py::arg("rb"), py::arg("k"));
    m.def("joint_exhibit_distribution", &joint_exhibit_distribution, py::arg("agent"),
          py::arg("cfg"));
    m.def("mutual_information", &mutual_information, py::arg("joint"));
    m.def("mean_mutual_information", &mean_mutual_information, py::arg("pop"), py::arg("cfg"));
    m.def("optimal_cluster_count", &optimal_cluster_count, py::arg("pop"), py::arg("k_max"),
          py::arg("n_refs"), py::arg("rng"));
    m.def("measure_population", &measure_population, py::arg("pop"), py::arg("cfg"),
          py::arg("t") = 0);

    // --- engine ---
    py::enum_<Topology>(m, "Topology")
        .value("complete", Topology::complete)
        .value("scale_free", Topology::scale_free)
        .value("small_world", Topology::small_world)
        .value("file", Topology::file);

    py::class_<TopologyParams>(m, "TopologyParams")
        .def(py::init<>())
        .def_readwrite("k_out", &TopologyParams::k_out)
        .def_readwrite("clusters", &TopologyParams::clusters)
        .def_readwrite("p_rewire", &TopologyParams::p_rewire)
        .def_readwrite("path", &TopologyParams::path);

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("topology", &ExperimentSpec::topology)
        .def_readwrite("topology_params", &ExperimentSpec::topology_params)
        .def_readwrite("n", &ExperimentSpec::n)
        .def_readwrite("model", &ExperimentSpec::model)
        .def_readwrite("alphas", &ExperimentSpec::alphas)
        .def_readwrite("replicates", &ExperimentSpec::replicates)
        .def_readwrite("sample_every", &ExperimentSpec::sample_every)
        .def_readwrite("out_path", &ExperimentSpec::out_path)
        .def_readwrite("measure_clusters", &ExperimentSpec::measure_clusters);

    py::class_<ResultRow>(m, "ResultRow")
        .def(py::init<>())
        .def_readwrite("topology", &ResultRow::topology)
        .def_readwrite("alpha", &ResultRow::alpha)
        .def_readwrite("replicate", &ResultRow::replicate)
        .def_readwrite("t", &ResultRow::t)
        .def_readwrite("pref_similarity", &ResultRow::pref_similarity)
        .def_readwrite("pref_congruence", &ResultRow::pref_congruence)
        .def_readwrite("assoc_similarity", &ResultRow::assoc_similarity)
        .def_readwrite("mean_mutual_info", &ResultRow::mean_mutual_info)
        .def_readwrite("excluded_pairs", &ResultRow::excluded_pairs)
        .def_readwrite("skipped_steps", &ResultRow::skipped_steps)
        .def_readwrite("optimal_clusters", &ResultRow::optimal_clusters);

    py::class_<SummaryRow>(m, "SummaryRow")
        .def_readonly("topology", &SummaryRow::topology)
        .def_readonly("alpha", &SummaryRow::alpha)
        .def_readonly("t", &SummaryRow::t)
        .def_readonly("replicates", &SummaryRow::replicates)
        .def_readonly("mean_pref_similarity", &SummaryRow::mean_pref_similarity)
        .def_readonly("sd_pref_similarity", &SummaryRow::sd_pref_similarity)
        .def_readonly("mean_pref_congruence", &SummaryRow::mean_pref_congruence)
        .def_readonly("sd_pref_congruence", &SummaryRow::sd_pref_congruence)
        .def_readonly("mean_assoc_similarity", &SummaryRow::mean_assoc_similarity)
        .def_readonly("sd_assoc_similarity", &SummaryRow::sd_assoc_similarity)
        .def_readonly("mean_mutual_info", &SummaryRow::mean_mutual_info)
        .def_readonly("sd_mutual_info", &SummaryRow::sd_mutual_info);

    m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("alpha_index"),
          py::arg("replicate"));
    m.def("build_network", &build_network, py::arg("spec"), py::arg("replicate"));
    m.def("run_single", &run_single, py::arg("spec"), py::arg("alpha_index"),
          py::arg("replicate"), py::call_guard<py::gil_scoped_release>());
    m.def("final_population", &final_population, py::arg("spec"), py::arg("alpha_index"),
          py::arg("replicate"), py::call_guard<py::gil_scoped_release>());
    m.def("run_sweep", &run_sweep, py::arg("spec"), py::arg("threads") = 0,
          py::call_guard<py::gil_scoped_release>());
    m.def("final_comparison", &final_comparison, py::arg("table"));
    m.def("load_experiment_spec", &load_experiment_spec, py::arg("path"));
    m.def("write_result_csv", &write_result_csv, py::arg("rows"), py::arg("path"));
    m.def("read_result_csv", &read_result_csv, py::arg("path"));
    m.def("emit_plot", &emit_plot, py::arg("table"), py::arg("measure"), py::arg("out_path"),
          py::arg("topology_filter") = "");
    m.def("render_plot_svg", &render_plot_svg, py::arg("table"), py::arg("measure"),
          py::arg("topology_filter") = "");
    m.def("save_population", &save_population, py::arg("pop"), py::arg("path"));
    m.def("load_population", &load_population, py::arg("path"));
}
