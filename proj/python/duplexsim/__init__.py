"""Cultural transmission on two-layer directed networks.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from duplexsim._core import (  # noqa: F401
    AgentState,
    DirectedLayer,
    DuplexNetwork,
    ExperimentSpec,
    JointExhibitDistribution,
    MeasurementRecord,
    MiMode,
    ModelConfig,
    PairwiseStat,
    Population,
    RandomStream,
    ResultRow,
    Retention,
    StepKind,
    StepOutcome,
    Topology,
    TopologyParams,
    association_similarity,
    association_step,
    build_network,
    constraint_satisfaction,
    derive_seed,
    duplicate,
    emit_plot,
    exhibit_pair,
    exhibit_single,
    final_comparison,
    final_population,
    generate_complete,
    generate_scale_free,
    generate_small_world,
    init_population,
    interpretive_distance,
    joint_exhibit_distribution,
    load_duplex,
    load_experiment_spec,
    load_population,
    mean_mutual_information,
    measure_population,
    mutual_information,
    optimal_cluster_count,
    out_neighbors,
    pearson,
    preference_congruence,
    preference_similarity,
    preference_step,
    read_result_csv,
    render_plot_svg,
    run,
    run_single,
    run_sweep,
    save_duplex,
    save_population,
    softmax_probabilities,
    step,
    write_result_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
