//! The minimal naming game.
//!
//! Agents sit on a fixed connected graph and start with empty memories.
//! Each step one connected speaker/hearer pair interacts: the speaker
//! utters a name from memory (inventing a fresh one when empty); a hearer
//! that lacks the name learns it (failure), while a hearer that has it
//! collapses both memories to exactly that name (success, local
//! consensus). The run ends at global consensus, when every agent holds
//! one identical name, or at the step cap.
//!
//! Total and distinct word counts are maintained incrementally through a
//! name reference-count table, so a step costs only the touched memory
//! sizes and 1e7-step runs stay cheap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::metrics::{MetricsSeries, SampleSchedule};

pub type NameId = u32;

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("the underlying graph must be connected; isolated agents cannot play")]
    Disconnected,
    #[error("the game needs at least two agents, got {0}")]
    TooFewAgents(usize),
    #[error("max_steps must be >= 1")]
    ZeroStepCap,
}

/// How the speaker/hearer pair is drawn each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairSelection {
    /// Speaker uniform over agents, hearer uniform over the speaker's
    /// neighbors.
    #[default]
    SpeakerFirst,
    /// Edge uniform over all edges, orientation by fair coin. Sensitivity
    /// alternative; weights high-degree agents as hearers.
    EdgeUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteractionOutcome {
    pub speaker: NodeId,
    pub hearer: NodeId,
    pub uttered: NameId,
    pub success: bool,
    pub invented: bool,
}

#[derive(Debug, Clone)]
pub struct GameState {
    memories: Vec<Vec<NameId>>,
    next_name: NameId,
    step: u64,
    rng: ChaCha8Rng,
    pair_selection: PairSelection,
    /// Sorted edge list, populated only for edge-uniform selection.
    edges: Vec<(NodeId, NodeId)>,
    /// How many memories currently hold each name.
    name_refs: Vec<u32>,
    n_total: u64,
    n_diff: u64,
}

impl GameState {
    /// Fresh game on `g`: all memories empty, step 0, no names invented.
    pub fn new(g: &Graph, seed: u64) -> Result<Self, GameError> {
        Self::with_pair_selection(g, seed, PairSelection::default())
    }

    pub fn with_pair_selection(
        g: &Graph,
        seed: u64,
        pair_selection: PairSelection,
    ) -> Result<Self, GameError> {
        let n = g.node_count();
        if n < 2 {
            return Err(GameError::TooFewAgents(n));
        }
        if !g.is_connected() {
            return Err(GameError::Disconnected);
        }
        let edges = match pair_selection {
            PairSelection::SpeakerFirst => Vec::new(),
            PairSelection::EdgeUniform => g.edges_sorted(),
        };
        Ok(GameState {
            memories: vec![Vec::new(); n],
            next_name: 0,
            step: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            pair_selection,
            edges,
            name_refs: Vec::new(),
            n_total: 0,
            n_diff: 0,
        })
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn n_total(&self) -> u64 {
        self.n_total
    }

    pub fn n_diff(&self) -> u64 {
        self.n_diff
    }

    pub fn names_invented(&self) -> u64 {
        self.next_name as u64
    }

    pub fn memory(&self, agent: NodeId) -> &[NameId] {
        &self.memories[agent as usize]
    }

    /// From-scratch recount of `(n_total, n_diff)`; the incremental
    /// counters must always agree with this.
    pub fn recounted_totals(&self) -> (u64, u64) {
        let total = self.memories.iter().map(|m| m.len() as u64).sum();
        let mut seen = vec![false; self.next_name as usize];
        let mut diff = 0;
        for memory in &self.memories {
            for &name in memory {
                if !seen[name as usize] {
                    seen[name as usize] = true;
                    diff += 1;
                }
            }
        }
        (total, diff)
    }

    /// Every agent holds exactly one name and it is the same everywhere.
    ///
    /// Equivalent to scanning all memories: one distinct name means every
    /// nonempty memory is exactly that name (memories hold no duplicates),
    /// and a total word count of N then forces every memory nonempty.
    pub fn is_global_consensus(&self) -> bool {
        self.n_diff == 1 && self.n_total == self.memories.len() as u64
    }

    /// Performs one speaker/hearer interaction.
    pub fn step(&mut self, g: &Graph) -> InteractionOutcome {
        let (speaker, hearer) = self.pick_pair(g);
        self.step += 1;
        self.interact(speaker, hearer)
    }

    fn pick_pair(&mut self, g: &Graph) -> (NodeId, NodeId) {
        match self.pair_selection {
            PairSelection::SpeakerFirst => {
                let speaker = self.rng.gen_range(0..g.node_count()) as NodeId;
                let neighbors = g.neighbors(speaker);
                let hearer = neighbors[self.rng.gen_range(0..neighbors.len())];
                (speaker, hearer)
            }
            PairSelection::EdgeUniform => {
                let (u, v) = self.edges[self.rng.gen_range(0..self.edges.len())];
                if self.rng.gen::<bool>() {
                    (u, v)
                } else {
                    (v, u)
                }
            }
        }
    }

    fn interact(&mut self, speaker: NodeId, hearer: NodeId) -> InteractionOutcome {
        let s = speaker as usize;
        let h = hearer as usize;
        let invented = self.memories[s].is_empty();
        let uttered = if invented {
            let name = self.next_name;
            self.next_name += 1;
            self.name_refs.push(0);
            self.memories[s].push(name);
            self.acquire(name);
            name
        } else {
            let memory = &self.memories[s];
            memory[self.rng.gen_range(0..memory.len())]
        };
        let success = self.memories[h].contains(&uttered);
        if success {
            self.collapse(s, uttered);
            self.collapse(h, uttered);
        } else {
            self.memories[h].push(uttered);
            self.acquire(uttered);
        }
        InteractionOutcome {
            speaker,
            hearer,
            uttered,
            success,
            invented,
        }
    }

    /// Clears an agent's memory down to exactly `keep`.
    fn collapse(&mut self, agent: usize, keep: NameId) {
        let mut memory = std::mem::take(&mut self.memories[agent]);
        for &name in &memory {
            self.release(name);
        }
        memory.clear();
        memory.push(keep);
        self.memories[agent] = memory;
        self.acquire(keep);
    }

    fn acquire(&mut self, name: NameId) {
        let refs = &mut self.name_refs[name as usize];
        *refs += 1;
        if *refs == 1 {
            self.n_diff += 1;
        }
        self.n_total += 1;
    }

    fn release(&mut self, name: NameId) {
        let refs = &mut self.name_refs[name as usize];
        *refs -= 1;
        if *refs == 0 {
            self.n_diff -= 1;
        }
        self.n_total -= 1;
    }
}

/// Result of one complete game run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameOutcome {
    /// First step at which global consensus held, if it was reached.
    pub convergence_time: Option<u64>,
    /// Steps actually executed.
    pub steps: u64,
    pub final_n_total: u64,
    pub final_n_diff: u64,
}

impl GameOutcome {
    pub fn converged(&self) -> bool {
        self.convergence_time.is_some()
    }
}

/// Runs one game to global consensus or to `max_steps`, recording the
/// trajectory on the geometric schedule plus forced samples at step 1 and
/// at termination.
pub fn run(
    g: &Graph,
    seed: u64,
    max_steps: u64,
    pair_selection: PairSelection,
) -> Result<(GameOutcome, MetricsSeries), GameError> {
    run_observed(g, seed, max_steps, pair_selection, |_, _| {})
}

/// [`run`] with a per-step observer, for trace output on small graphs.
/// The observer is called with the step number and its outcome.
pub fn run_observed(
    g: &Graph,
    seed: u64,
    max_steps: u64,
    pair_selection: PairSelection,
    mut on_step: impl FnMut(u64, &InteractionOutcome),
) -> Result<(GameOutcome, MetricsSeries), GameError> {
    if max_steps == 0 {
        return Err(GameError::ZeroStepCap);
    }
    let mut state = GameState::with_pair_selection(g, seed, pair_selection)?;
    let mut series = MetricsSeries::new();
    let mut schedule = SampleSchedule::default();
    let mut bin_successes = 0u64;
    let mut bin_interactions = 0u64;
    loop {
        let outcome = state.step(g);
        on_step(state.step_count(), &outcome);
        bin_interactions += 1;
        if outcome.success {
            bin_successes += 1;
        }
        let consensus = state.is_global_consensus();
        let capped = state.step_count() >= max_steps;
        if consensus || capped || schedule.due(state.step_count()) {
            series
                .record(
                    state.step_count(),
                    state.n_total(),
                    state.n_diff(),
                    bin_successes,
                    bin_interactions,
                )
                .expect("steps strictly increase");
            bin_successes = 0;
            bin_interactions = 0;
            schedule.advance_past(state.step_count());
        }
        if consensus || capped {
            return Ok((
                GameOutcome {
                    convergence_time: consensus.then_some(state.step_count()),
                    steps: state.step_count(),
                    final_n_total: state.n_total(),
                    final_n_diff: state.n_diff(),
                },
                series,
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_graph() -> Graph {
        let mut g = Graph::new(2);
        g.add_edge(0, 1).unwrap();
        g
    }

    #[test]
    fn init_leaves_memories_empty() {
        let state = GameState::new(&Graph::complete(3), 42).unwrap();
        for agent in 0..3 {
            assert!(state.memory(agent).is_empty());
        }
        assert_eq!(state.step_count(), 0);
        assert_eq!(state.names_invented(), 0);
        assert_eq!((state.n_total(), state.n_diff()), (0, 0));
    }

    #[test]
    fn init_rejects_disconnected_graph() {
        let mut g = Graph::new(4);
        g.add_edge(0, 1).unwrap();
        g.add_edge(2, 3).unwrap();
        assert_eq!(GameState::new(&g, 1).unwrap_err(), GameError::Disconnected);
    }

    #[test]
    fn init_rejects_single_agent() {
        assert_eq!(
            GameState::new(&Graph::new(1), 1).unwrap_err(),
            GameError::TooFewAgents(1)
        );
    }

    #[test]
    fn invention_teaches_the_hearer() {
        let g = pair_graph();
        let mut state = GameState::new(&g, 7).unwrap();
        let outcome = state.interact(0, 1);
        assert!(outcome.invented);
        assert!(!outcome.success, "hearer did not previously know the name");
        assert_eq!(outcome.uttered, 0);
        assert_eq!(state.memory(0), &[0]);
        assert_eq!(state.memory(1), &[0]);
        assert_eq!((state.n_total(), state.n_diff()), (2, 1));
        assert_eq!(state.names_invented(), 1);
    }

    #[test]
    fn success_collapses_both_memories() {
        let g = Graph::complete(3);
        let mut state = GameState::new(&g, 7).unwrap();
        // speaker knows only m = 5; hearer holds {4, 5}
        state.seed_memory(0, &[5]);
        state.seed_memory(1, &[4, 5]);
        let outcome = state.interact(0, 1);
        assert!(outcome.success);
        assert_eq!(outcome.uttered, 5);
        assert_eq!(state.memory(0), &[5]);
        assert_eq!(state.memory(1), &[5]);
        assert_eq!((state.n_total(), state.n_diff()), (2, 1));
    }

    #[test]
    fn matching_singletons_stay_put() {
        let g = pair_graph();
        let mut state = GameState::new(&g, 7).unwrap();
        state.seed_memory(0, &[3]);
        state.seed_memory(1, &[3]);
        let outcome = state.interact(0, 1);
        assert!(outcome.success);
        assert_eq!(state.memory(0), &[3]);
        assert_eq!(state.memory(1), &[3]);
    }

    #[test]
    fn failure_appends_to_hearer() {
        let g = pair_graph();
        let mut state = GameState::new(&g, 7).unwrap();
        state.seed_memory(0, &[2]);
        state.seed_memory(1, &[1]);
        let outcome = state.interact(0, 1);
        assert!(!outcome.success);
        assert!(!outcome.invented);
        assert_eq!(state.memory(1), &[1, 2]);
        assert_eq!((state.n_total(), state.n_diff()), (3, 2));
    }

    #[test]
    fn consensus_predicate() {
        let g = Graph::complete(3);
        let mut state = GameState::new(&g, 7).unwrap();
        state.seed_memory(0, &[7]);
        state.seed_memory(1, &[7]);
        state.seed_memory(2, &[7]);
        assert!(state.is_global_consensus());
        assert!(state.consensus_by_scan());

        let mut state = GameState::new(&g, 7).unwrap();
        state.seed_memory(0, &[7]);
        state.seed_memory(1, &[7]);
        state.seed_memory(2, &[7, 9]);
        assert!(!state.is_global_consensus());
        assert!(!state.consensus_by_scan());

        // an empty memory blocks consensus
        let mut state = GameState::new(&g, 7).unwrap();
        state.seed_memory(0, &[7]);
        state.seed_memory(1, &[7]);
        assert!(!state.is_global_consensus());
        assert!(!state.consensus_by_scan());
    }

    #[test]
    fn word_accounting_per_step() {
        let g = Graph::complete(8);
        let mut state = GameState::new(&g, 3).unwrap();
        for _ in 0..20_000 {
            let before_total = state.n_total();
            let sizes: Vec<usize> = (0..8).map(|a| state.memory(a).len()).collect();
            let outcome = state.step(&g);
            let (s, h) = (outcome.speaker as usize, outcome.hearer as usize);
            let delta = state.n_total() as i64 - before_total as i64;
            if outcome.success {
                assert_eq!(delta, -((sizes[s] + sizes[h]) as i64 - 2));
            } else if outcome.invented {
                // invention stores the fresh name and the hearer learns it
                assert_eq!(delta, 2);
            } else {
                assert_eq!(delta, 1);
            }
            if state.is_global_consensus() {
                break;
            }
        }
    }

    #[test]
    fn counters_match_recounts_and_memories_stay_duplicate_free() {
        let g = Graph::complete(6);
        let mut state = GameState::new(&g, 11).unwrap();
        for step in 0..5_000 {
            state.step(&g);
            if step % 50 == 0 {
                assert_eq!((state.n_total(), state.n_diff()), state.recounted_totals());
                assert_eq!(state.is_global_consensus(), state.consensus_by_scan());
                for agent in 0..6 {
                    let memory = state.memory(agent);
                    let mut unique = memory.to_vec();
                    unique.sort_unstable();
                    unique.dedup();
                    assert_eq!(unique.len(), memory.len());
                }
            }
        }
    }

    #[test]
    fn two_agents_converge_quickly() {
        let g = pair_graph();
        let (outcome, series) = run(&g, 5, 10_000, PairSelection::SpeakerFirst).unwrap();
        let time = outcome.convergence_time.expect("pair must converge");
        // the first invention already leaves both agents with the same
        // single name, so a pair converges on step one
        assert_eq!(time, 1);
        assert_eq!(outcome.final_n_diff, 1);
        assert_eq!(outcome.final_n_total, 2);
        // first sample is forced at step 1: one invention = two words
        let first = series.samples()[0];
        assert_eq!(first.step, 1);
        assert_eq!(first.n_total, 2);
        assert_eq!(first.n_diff, 1);
        let last = series.last().unwrap();
        assert_eq!(last.step, time);
    }

    #[test]
    fn three_agents_need_an_invention_and_a_success() {
        // with a third agent, step one cannot reach everyone: at least one
        // learning step plus one success must follow
        let mut g = Graph::new(3);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        for seed in 0..20 {
            let (outcome, _) = run(&g, seed, 100_000, PairSelection::SpeakerFirst).unwrap();
            assert!(outcome.convergence_time.expect("must converge") >= 2);
        }
    }

    #[test]
    fn converged_run_ends_with_population_total() {
        let g = Graph::complete(20);
        let (outcome, series) = run(&g, 9, 1_000_000, PairSelection::SpeakerFirst).unwrap();
        assert!(outcome.converged());
        assert_eq!(outcome.final_n_total, 20);
        assert_eq!(outcome.final_n_diff, 1);
        let last = series.last().unwrap();
        assert_eq!(last.n_total, 20);
        assert_eq!(last.n_diff, 1);
        // final interaction is a success
        assert!(last.success_rate > 0.0);
    }

    #[test]
    fn success_rate_climbs_into_convergence() {
        // on small complete graphs the terminal bins are dominated by
        // successes; checked on ensemble means since single bins are noisy
        let g = Graph::complete(20);
        let seeds = 30;
        let mut final_bin = 0.0;
        let mut earlier = 0.0;
        let mut earlier_bins = 0.0;
        for seed in 0..seeds {
            let (outcome, series) = run(&g, seed, 1_000_000, PairSelection::SpeakerFirst).unwrap();
            assert!(outcome.converged());
            let samples = series.samples();
            final_bin += samples.last().unwrap().success_rate;
            for s in &samples[..samples.len() - 1] {
                earlier += s.success_rate;
                earlier_bins += 1.0;
            }
        }
        assert!(final_bin / seeds as f64 > earlier / earlier_bins);
    }

    #[test]
    fn distinct_names_never_exceed_inventions() {
        let g = Graph::complete(15);
        let mut state = GameState::new(&g, 13).unwrap();
        for _ in 0..3_000 {
            state.step(&g);
            assert!(state.n_diff() <= state.names_invented());
            assert!(state.n_diff() >= 1);
        }
    }

    #[test]
    fn run_is_deterministic() {
        let g = Graph::complete(12);
        let a = run(&g, 33, 100_000, PairSelection::SpeakerFirst).unwrap();
        let b = run(&g, 33, 100_000, PairSelection::SpeakerFirst).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        let c = run(&g, 34, 100_000, PairSelection::SpeakerFirst).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn edge_uniform_selection_also_converges() {
        let g = Graph::complete(10);
        let (outcome, _) = run(&g, 21, 1_000_000, PairSelection::EdgeUniform).unwrap();
        assert!(outcome.converged());
    }

    #[test]
    fn zero_step_cap_is_rejected() {
        let g = pair_graph();
        assert_eq!(
            run(&g, 1, 0, PairSelection::SpeakerFirst).unwrap_err(),
            GameError::ZeroStepCap
        );
    }

    #[test]
    fn capped_run_reports_final_counts() {
        let g = Graph::complete(30);
        let (outcome, series) = run(&g, 2, 10, PairSelection::SpeakerFirst).unwrap();
        assert!(!outcome.converged());
        assert_eq!(outcome.steps, 10);
        assert!(outcome.final_n_diff >= 1);
        assert_eq!(series.last().unwrap().step, 10);
    }

    impl GameState {
        /// Test helper: fill an agent's memory directly.
        fn seed_memory(&mut self, agent: NodeId, names: &[NameId]) {
            for &name in names {
                while self.name_refs.len() <= name as usize {
                    self.name_refs.push(0);
                    self.next_name = self.name_refs.len() as NameId;
                }
                self.memories[agent as usize].push(name);
                self.acquire(name);
            }
        }

        /// Full-scan consensus check used to validate the counter shortcut.
        fn consensus_by_scan(&self) -> bool {
            let first = match self.memories.first() {
                Some(m) if m.len() == 1 => m[0],
                _ => return false,
            };
            self.memories.iter().all(|m| m.as_slice() == [first])
        }
    }
}
