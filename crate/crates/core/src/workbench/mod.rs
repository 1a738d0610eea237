//! File formats, random generators, the experiment harness and exports.

mod experiment;
mod export;
mod formats;
mod generate;

pub use formats::{
    csp_to_json, decomposition_from_json, decomposition_to_json, instance_from_json, load_structure, path_as_named_csp, path_to_json,
    structure_from_json, structure_to_json, to_json, ConstraintSpec, DecompositionFile, InstanceFile, LoadedInstance,
    RelationRef, RelationSpec, StructureFile,
};
pub use generate::{close_under_chain, gen_random_path_instance, gen_random_pw_instance, GenMode, PathGenConfig};
pub use experiment::{
    run_experiment, Budgets, ExperimentConfig, GeneratorParams, Outcome, Properties, Report, SolverKind, Tally, TraceRef,
    TrialRecord,
};
pub use export::{braid_dot, export_artifacts, graph_dot, report_text, ExportFormat, ExportTarget};
