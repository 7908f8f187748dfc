//! Finite knowledge models.
//!
//! A model is a finite world set `0..n` together with one partition per
//! agent. Every subset of worlds is an event. An agent knows `E` at `w` when
//! the agent's cell containing `w` lies inside `E`; common knowledge is the
//! limit of iterating "everyone knows" and is computed here as a fixpoint.

use crate::error::{Error, Result};
use crate::event::Event;

/// A partition of `0..n_worlds` into non-empty, pairwise disjoint cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    cells: Vec<Event>,
    cell_of_world: Vec<usize>,
}

impl Partition {
    pub fn new(n_worlds: usize, cells: Vec<Event>) -> Result<Self> {
        let mut cell_of_world = vec![usize::MAX; n_worlds];
        for (k, cell) in cells.iter().enumerate() {
            if cell.n_worlds() != n_worlds {
                return Err(Error::UniverseMismatch {
                    expected: n_worlds,
                    found: cell.n_worlds(),
                });
            }
            if cell.is_empty() {
                return Err(Error::InvalidPartition(format!("cell {k} is empty")));
            }
            for w in cell {
                if cell_of_world[w] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "world {w} lies in cells {} and {k}",
                        cell_of_world[w]
                    )));
                }
                cell_of_world[w] = k;
            }
        }
        if let Some(w) = cell_of_world.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidPartition(format!("world {w} is in no cell")));
        }
        Ok(Self {
            cells,
            cell_of_world,
        })
    }

    /// Builds a partition from a list of index lists.
    pub fn from_cells(n_worlds: usize, cells: &[Vec<usize>]) -> Result<Self> {
        let mut events = Vec::with_capacity(cells.len());
        for cell in cells {
            let mut event = Event::empty(n_worlds);
            for &w in cell {
                if w >= n_worlds {
                    return Err(Error::WorldOutOfRange { world: w, n_worlds });
                }
                if event.contains(w) {
                    return Err(Error::InvalidPartition(format!(
                        "world {w} repeated within a cell"
                    )));
                }
                event.insert(w);
            }
            events.push(event);
        }
        Self::new(n_worlds, events)
    }

    /// Builds a partition from a labelling `world -> label`; cells are ordered
    /// by first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let n = labels.len();
        let mut remap = std::collections::HashMap::new();
        let mut cells: Vec<Event> = Vec::new();
        let mut cell_of_world = Vec::with_capacity(n);
        for (w, label) in labels.iter().enumerate() {
            let k = *remap.entry(*label).or_insert_with(|| {
                cells.push(Event::empty(n));
                cells.len() - 1
            });
            cells[k].insert(w);
            cell_of_world.push(k);
        }
        Self {
            cells,
            cell_of_world,
        }
    }

    pub fn discrete(n_worlds: usize) -> Self {
        Self::from_labels(&(0..n_worlds).collect::<Vec<_>>())
    }

    pub fn trivial(n_worlds: usize) -> Self {
        Self::from_labels(&vec![0; n_worlds])
    }

    pub fn n_worlds(&self) -> usize {
        self.cell_of_world.len()
    }

    pub fn cells(&self) -> &[Event] {
        &self.cells
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Index of the cell containing `world`.
    pub fn cell_index(&self, world: usize) -> usize {
        self.cell_of_world[world]
    }

    pub fn cell(&self, world: usize) -> &Event {
        &self.cells[self.cell_of_world[world]]
    }

    /// True if `event` is a union of cells of this partition.
    pub fn is_union_of_cells(&self, event: &Event) -> bool {
        self.cells
            .iter()
            .all(|c| c.is_subset(event) || c.is_disjoint(event))
    }

    /// Same cells regardless of order.
    pub fn same_as(&self, other: &Partition) -> bool {
        self.n_worlds() == other.n_worlds()
            && self.n_cells() == other.n_cells()
            && (0..self.n_worlds()).all(|w| self.cell(w) == other.cell(w))
    }
}

/// Disjoint-set forest with path halving and union by size.
struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// A finite world set with one partition per agent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeModel {
    n_worlds: usize,
    partitions: Vec<Partition>,
}

impl KnowledgeModel {
    pub fn new(n_worlds: usize, partitions: Vec<Partition>) -> Result<Self> {
        if n_worlds == 0 {
            return Err(Error::NoWorlds);
        }
        if partitions.is_empty() {
            return Err(Error::NoAgents);
        }
        for p in &partitions {
            if p.n_worlds() != n_worlds {
                return Err(Error::UniverseMismatch {
                    expected: n_worlds,
                    found: p.n_worlds(),
                });
            }
        }
        Ok(Self {
            n_worlds,
            partitions,
        })
    }

    /// Convenience constructor from per-agent lists of index lists.
    pub fn from_cells(n_worlds: usize, agents: &[Vec<Vec<usize>>]) -> Result<Self> {
        let partitions = agents
            .iter()
            .map(|cells| Partition::from_cells(n_worlds, cells))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_worlds, partitions)
    }

    pub fn n_worlds(&self) -> usize {
        self.n_worlds
    }

    pub fn n_agents(&self) -> usize {
        self.partitions.len()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn partition(&self, agent: usize) -> Result<&Partition> {
        self.partitions.get(agent).ok_or(Error::AgentOutOfRange {
            agent,
            n_agents: self.partitions.len(),
        })
    }

    pub fn full_event(&self) -> Event {
        Event::full(self.n_worlds)
    }

    pub fn empty_event(&self) -> Event {
        Event::empty(self.n_worlds)
    }

    /// Checks that `event` lives over this model's worlds.
    pub fn check_event(&self, event: &Event) -> Result<()> {
        if event.n_worlds() != self.n_worlds {
            return Err(Error::UniverseMismatch {
                expected: self.n_worlds,
                found: event.n_worlds(),
            });
        }
        Ok(())
    }

    /// The cell of `agent`'s partition containing `world`.
    pub fn cell_of(&self, agent: usize, world: usize) -> Result<&Event> {
        let partition = self.partition(agent)?;
        if world >= self.n_worlds {
            return Err(Error::WorldOutOfRange {
                world,
                n_worlds: self.n_worlds,
            });
        }
        Ok(partition.cell(world))
    }

    /// Worlds at which `agent` knows `event`: the union of the agent's cells inside it.
    pub fn know(&self, agent: usize, event: &Event) -> Result<Event> {
        let partition = self.partition(agent)?;
        self.check_event(event)?;
        Ok(know_in(partition, event))
    }

    /// Everyone-knows, iterated `m` times. `m = 0` returns `event` itself.
    pub fn mutual_knowledge(&self, event: &Event, m: usize) -> Result<Event> {
        self.check_event(event)?;
        let mut current = event.clone();
        for _ in 0..m {
            let next = self.everyone_knows(&current);
            if next == current {
                break;
            }
            current = next;
        }
        Ok(current)
    }

    fn everyone_knows(&self, event: &Event) -> Event {
        let mut result = self.full_event();
        for p in &self.partitions {
            result.intersect_with(&know_in(p, event));
            if result.is_empty() {
                break;
            }
        }
        result
    }

    /// Common knowledge of `event`: the stable value of the decreasing chain
    /// `M_1(E) ⊇ M_2(E) ⊇ ...`.
    pub fn common_knowledge(&self, event: &Event) -> Result<Event> {
        Ok(self
            .common_knowledge_trace(event, self.n_worlds + 1)?
            .common)
    }

    /// Runs the mutual-knowledge iteration and records every level `M_1..M_k`
    /// up to the first repeat. Fails if the chain has not stabilised after
    /// `max_iters` applications of "everyone knows".
    pub fn common_knowledge_trace(&self, event: &Event, max_iters: usize) -> Result<FixpointTrace> {
        self.check_event(event)?;
        let mut levels = Vec::new();
        let mut current = event.clone();
        for k in 0..max_iters {
            let next = self.everyone_knows(&current);
            let stable = next == current;
            // M_1 is always recorded, even when it already equals E.
            if k == 0 || !stable {
                levels.push(next.clone());
            }
            if stable {
                return Ok(FixpointTrace {
                    common: current,
                    levels,
                });
            }
            current = next;
        }
        Err(Error::FixpointNotReached { max_iters })
    }

    /// The finest common coarsening of all agents' partitions.
    pub fn meet_partition(&self) -> Partition {
        let mut sets = DisjointSets::new(self.n_worlds);
        for p in &self.partitions {
            for cell in p.cells() {
                let mut it = cell.iter();
                if let Some(first) = it.next() {
                    for w in it {
                        sets.union(first, w);
                    }
                }
            }
        }
        let labels: Vec<usize> = (0..self.n_worlds).map(|w| sets.find(w)).collect();
        Partition::from_labels(&labels)
    }

    /// Common knowledge computed from the meet partition: the union of meet
    /// cells contained in `event`.
    pub fn common_knowledge_via_meet(&self, event: &Event) -> Result<Event> {
        self.check_event(event)?;
        Ok(know_in(&self.meet_partition(), event))
    }

    /// Splits `event` into the cells of `agent`'s partition that make it up.
    /// Fails when `event` cuts through some cell.
    pub fn cell_decomposition(&self, agent: usize, event: &Event) -> Result<Vec<Event>> {
        let partition = self.partition(agent)?;
        self.check_event(event)?;
        let mut cells = Vec::new();
        for cell in partition.cells() {
            if cell.is_subset(event) {
                cells.push(cell.clone());
            } else if !cell.is_disjoint(event) {
                return Err(Error::NotCellUnion {
                    agent,
                    event: event.to_string(),
                });
            }
        }
        Ok(cells)
    }
}

fn know_in(partition: &Partition, event: &Event) -> Event {
    let mut result = Event::empty(event.n_worlds());
    for cell in partition.cells() {
        if cell.is_subset(event) {
            result.union_with(cell);
        }
    }
    result
}

/// The mutual-knowledge levels visited while computing common knowledge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixpointTrace {
    pub common: Event,
    /// `M_1, M_2, ...` up to and including the stable level.
    pub levels: Vec<Event>,
}
