//! Distributed variant: nodes keep local copies of a shared variable and
//! reach consensus through per-edge virtual queues.

mod graph;
mod node;
mod problem;
mod run;

pub use graph::GraphTopology;
pub use node::{edge_queue_update, node_step_theta, node_step_x, NodeQueues, Node};
pub use problem::{make_cycle_consensus, DistributedProblem};
pub use run::{run_distributed, DistributedRun};
