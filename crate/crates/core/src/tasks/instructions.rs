use super::{Question, TaskKind, TaskParams};

const YES_NO_CONTROL: &str = "Please put the answer between <answer> and </answer> tags. \
For example, <answer>Yes</answer> or <answer>No</answer>.";
const PATH_CONTROL: &str = "Please put the answer between <answer> and </answer> tags. \
For example, <answer>0->1->2->3->4</answer> or <answer>0->1->3->7->8->4->6->5->9->2</answer>.";
const NUMBER_CONTROL: &str = "Please put the answer between <answer> and </answer> tags. \
For example, <answer>3</answer> or <answer>8</answer>.";
const CLASS_CONTROL: &str = "Please put the answer between <answer> and </answer> tags. \
For example, <answer>Class 1</answer> or <answer>Class 3</answer>.";

const FLOW_DIRECTION_NOTE: &str = "Note that capacity is directional, allowing flow only in the \
edge direction; reverse edge direction should not be considered in the path.";

/// The answer-format instruction appended after every task instruction.
pub fn control_instruction(task: TaskKind) -> &'static str {
    match task {
        TaskKind::Conn | TaskKind::Cyc | TaskKind::LP => YES_NO_CONTROL,
        TaskKind::TS | TaskKind::SP | TaskKind::HP => PATH_CONTROL,
        // Matching sizes are integers too.
        TaskKind::MF | TaskKind::BGM => NUMBER_CONTROL,
        TaskKind::NC => CLASS_CONTROL,
    }
}

fn pair(q: &Question) -> (usize, usize) {
    match q.params {
        TaskParams::Pair { source, target } => (source, target),
        TaskParams::NodeClass { target, .. } => (target, target),
        TaskParams::None => (0, 0),
    }
}

/// The task instruction with its placeholders substituted.
pub fn task_instruction(q: &Question) -> String {
    let (s, t) = pair(q);
    match q.task {
        TaskKind::Conn => {
            format!("Is there a path between node {s} and node {t} in this undirected graph?")
        }
        TaskKind::Cyc => "Is there a cycle in this undirected graph?".to_string(),
        TaskKind::TS => "This representation depicts a directed graph, in which each directed edge \
from node A to node B signifies that, according to the topological order, node A must precede \
node B. Q: The topological order of the directed graph is:"
            .to_string(),
        TaskKind::SP => format!(
            "This representation illustrates an undirected graph, with each edge's weight \
indicated by a numerical label in close proximity. Q: What is the shortest path from node {s} \
to node {t}:"
        ),
        TaskKind::MF => format!(
            "This representation illustrates a directed graph, with each edge's capacity \
indicated by a numerical label in close proximity. Q: What is the maximum flow from node {s} to \
node {t}: {FLOW_DIRECTION_NOTE}"
        ),
        TaskKind::BGM => {
            let (hosts, tasks) = q.graph.bipartite_split().unwrap_or((q.graph.node_count(), 0));
            format!(
                "There are {hosts} hosts numbered from 0 to {}, and {tasks} tasks numbered from 0 \
to {}. Each host has a set of tasks that it is interested in, represented by arrows from a host \
to a task in the diagram. However, each host is capable of solving only one task, and similarly, \
each task can be resolved by just one host. Q:  What is the maximum number of hosts that can be \
assigned a task they are interested in?",
                hosts.saturating_sub(1),
                tasks.saturating_sub(1)
            )
        }
        TaskKind::HP => {
            "Q: Begin with node 0, what is the path in this graph that visits every node exactly once?"
                .to_string()
        }
        TaskKind::LP => format!(
            "The task is link prediction, aiming to predict the presence or absence of an unknown \
edge between Node {s} and Node {t} based on the known graph structure. Q: Does an unknown edge \
exist between Node {s} and Node {t}?"
        ),
        TaskKind::NC => format!(
            "The task is semi-supervised node classification, and needs to predict which class \
Node {s} belongs to, based on graph structure and known node classes. Q: Node {s} belongs to Class:"
        ),
    }
}

/// Task instruction followed by the control instruction on a new line.
pub fn render_instruction(q: &Question) -> String {
    format!("{}\n{}", task_instruction(q), control_instruction(q.task))
}
