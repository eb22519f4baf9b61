//! Query-filtered reviewer graphs.
//!
//! Nodes are user ids held in ascending order; the walk and centrality code
//! works on the dense indices of that order, so index order and id order
//! agree everywhere.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::Result;
use crate::model::{Dataset, Mode, Query};

/// Contact hops explored around each seed.
pub const HOP_LIMIT: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewerGraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    seeds: Vec<usize>,
    origin: Mode,
}

impl ReviewerGraph {
    /// Builds a graph from node ids and undirected edges. Self-loops and
    /// duplicate edges are dropped; endpoints and seeds missing from `nodes`
    /// are added as nodes.
    pub fn from_edges<S: AsRef<str>>(
        nodes: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = (S, S)>,
        seeds: impl IntoIterator<Item = S>,
        origin: Mode,
    ) -> Self {
        let edges: Vec<(String, String)> = edges
            .into_iter()
            .map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string()))
            .collect();
        let seeds: Vec<String> = seeds.into_iter().map(|s| s.as_ref().to_string()).collect();
        let mut ids: BTreeSet<String> = nodes.into_iter().map(|n| n.as_ref().to_string()).collect();
        for (a, b) in &edges {
            ids.insert(a.clone());
            ids.insert(b.clone());
        }
        ids.extend(seeds.iter().cloned());

        let nodes: Vec<String> = ids.into_iter().collect();
        let index: HashMap<String, usize> =
            nodes.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let mut neighbor_sets = vec![BTreeSet::new(); nodes.len()];
        for (a, b) in &edges {
            let (ia, ib) = (index[a], index[b]);
            if ia != ib {
                neighbor_sets[ia].insert(ib);
                neighbor_sets[ib].insert(ia);
            }
        }
        let mut seeds: Vec<usize> = seeds.iter().map(|s| index[s]).collect();
        seeds.sort_unstable();
        seeds.dedup();

        ReviewerGraph {
            nodes,
            index,
            adjacency: neighbor_sets
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
            seeds,
            origin,
        }
    }

    pub fn empty(origin: Mode) -> Self {
        ReviewerGraph::from_edges(
            Vec::<String>::new(),
            Vec::<(String, String)>::new(),
            Vec::<String>::new(),
            origin,
        )
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn origin(&self) -> Mode {
        self.origin
    }

    /// Node ids in ascending order; position is the node index.
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn id(&self, index: usize) -> &str {
        &self.nodes[index]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Sorted neighbour indices.
    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    pub fn neighbor_ids(&self, id: &str) -> Vec<&str> {
        self.index_of(id)
            .map(|i| self.adjacency[i].iter().map(|&j| self.id(j)).collect())
            .unwrap_or_default()
    }

    pub fn degree(&self, index: usize) -> usize {
        self.adjacency[index].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Each undirected edge once, as `(lower index, higher index)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    pub fn seed_ids(&self) -> Vec<&str> {
        self.seeds.iter().map(|&i| self.id(i)).collect()
    }

    /// Connected components as ascending index lists, ordered by their
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut components = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut members = vec![start];
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    /// Subgraph induced by `members`, keeping the seeds that fall inside it.
    pub fn induced(&self, members: &[usize]) -> ReviewerGraph {
        let keep: BTreeSet<usize> = members.iter().copied().collect();
        let edges = self
            .edges()
            .filter(|(a, b)| keep.contains(a) && keep.contains(b))
            .map(|(a, b)| (self.id(a), self.id(b)));
        let seeds = self
            .seeds
            .iter()
            .filter(|s| keep.contains(s))
            .map(|&s| self.id(s));
        ReviewerGraph::from_edges(keep.iter().map(|&i| self.id(i)), edges, seeds, self.origin)
    }

    /// `a b` per edge with `a < b`, edges sorted; isolated nodes appear alone
    /// on their own line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for v in 0..self.len() {
            if self.adjacency[v].is_empty() {
                writeln!(out, "{}", self.id(v)).unwrap();
            }
            for &w in self.adjacency[v].iter().filter(|&&w| w > v) {
                writeln!(out, "{} {}", self.id(v), self.id(w)).unwrap();
            }
        }
        out
    }
}

/// Every user within `HOP_LIMIT` contact hops of any seed, seeds included.
fn expand(dataset: &Dataset, seeds: &BTreeSet<String>) -> BTreeSet<String> {
    let users = dataset.users();
    let mut reached: BTreeSet<String> = seeds.clone();
    let mut frontier: VecDeque<(String, usize)> = seeds.iter().map(|s| (s.clone(), 0)).collect();
    while let Some((id, depth)) = frontier.pop_front() {
        if depth == HOP_LIMIT {
            continue;
        }
        let Some(user) = users.get(&id) else { continue };
        for contact in &user.contacts {
            if contact != &id && users.contains_key(contact) && reached.insert(contact.clone()) {
                frontier.push_back((contact.clone(), depth + 1));
            }
        }
    }
    reached
}

fn contact_graph(
    dataset: &Dataset,
    nodes: &BTreeSet<String>,
    seeds: &BTreeSet<String>,
    origin: Mode,
) -> ReviewerGraph {
    let users = dataset.users();
    let edges = nodes.iter().flat_map(|id| {
        users[id]
            .contacts
            .iter()
            .filter(|c| nodes.contains(*c) && *c > id)
            .map(move |c| (id.as_str(), c.as_str()))
    });
    ReviewerGraph::from_edges(
        nodes.iter().map(String::as_str),
        edges,
        seeds.iter().map(String::as_str),
        origin,
    )
}

/// Reviewers of the query's matching places, expanded two contact hops. The
/// result may have several components.
pub fn build_global_graph(dataset: &Dataset, query: &Query) -> ReviewerGraph {
    let seeds: BTreeSet<String> = dataset
        .matching_places(query)
        .iter()
        .flat_map(|p| dataset.reviews_by_place(p))
        .map(|r| r.user_id.clone())
        .filter(|u| dataset.users().contains_key(u))
        .collect();
    let nodes = expand(dataset, &seeds);
    contact_graph(dataset, &nodes, &seeds, Mode::Global)
}

/// The requesting user's two-hop contact network.
pub fn build_pa_graph(dataset: &Dataset, user_id: &str, _query: &Query) -> Result<ReviewerGraph> {
    dataset.user(user_id)?;
    let seeds = BTreeSet::from([user_id.to_string()]);
    let nodes = expand(dataset, &seeds);
    Ok(contact_graph(dataset, &nodes, &seeds, Mode::Pa))
}

/// The component with the largest total degree; ties go to more nodes, then
/// to the component holding the smallest id.
pub fn highest_degree_component(graph: &ReviewerGraph) -> ReviewerGraph {
    let components = graph.components();
    let best = components.iter().max_by(|a, b| {
        let total = |c: &Vec<usize>| c.iter().map(|&v| graph.degree(v)).sum::<usize>();
        total(a)
            .cmp(&total(b))
            .then(a.len().cmp(&b.len()))
            // smaller minimum index wins, so it must compare as greater
            .then(b[0].cmp(&a[0]))
    });
    match best {
        Some(members) if members.len() == graph.len() => graph.clone(),
        Some(members) => graph.induced(members),
        None => ReviewerGraph::empty(graph.origin()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Place, Review, Sentiment, User};

    fn g(edges: &[(&str, &str)]) -> ReviewerGraph {
        ReviewerGraph::from_edges(Vec::<&str>::new(), edges.iter().copied(), [], Mode::Global)
    }

    #[test]
    fn from_edges_symmetrises_and_drops_loops() {
        let graph = g(&[("b", "a"), ("a", "b"), ("c", "c")]);
        assert_eq!(graph.nodes(), ["a", "b", "c"]);
        assert_eq!(graph.neighbor_ids("a"), ["b"]);
        assert_eq!(graph.neighbor_ids("b"), ["a"]);
        assert!(graph.neighbor_ids("c").is_empty());
        assert_eq!(graph.edge_count(), 1);
    }

    #[test]
    fn component_with_most_edges_wins() {
        let graph = g(&[("a", "b"), ("b", "c"), ("c", "d"), ("x", "y")]);
        let best = highest_degree_component(&graph);
        assert_eq!(best.nodes(), ["a", "b", "c", "d"]);
    }

    #[test]
    fn component_tie_prefers_more_nodes() {
        // triangle and 4-node path both have total degree 6
        let graph = g(&[("a", "b"), ("b", "c"), ("c", "a"), ("w", "x"), ("x", "y"), ("y", "z")]);
        assert_eq!(highest_degree_component(&graph).nodes(), ["w", "x", "y", "z"]);
    }

    #[test]
    fn component_tie_then_prefers_smallest_id() {
        let graph = g(&[("e", "f"), ("f", "g"), ("a", "b"), ("b", "c")]);
        assert_eq!(highest_degree_component(&graph).nodes(), ["a", "b", "c"]);
    }

    #[test]
    fn single_component_is_returned_unchanged() {
        let graph = g(&[("a", "b"), ("b", "c")]);
        assert_eq!(highest_degree_component(&graph), graph);
        let empty = ReviewerGraph::empty(Mode::Global);
        assert!(highest_degree_component(&empty).is_empty());
    }

    #[test]
    fn edge_list_export() {
        let graph = ReviewerGraph::from_edges(["z"], [("b", "a")], [], Mode::Pa);
        assert_eq!(graph.to_edge_list(), "a b\nz\n");
    }

    #[test]
    fn pa_graph_hop_cutoff() {
        let d = Dataset::from_parts(
            vec![
                User::new("u", "", "X", ["a"]),
                User::new("a", "", "X", ["b"]),
                User::new("b", "", "X", ["c"]),
                User::new("c", "", "X", Vec::<String>::new()),
            ],
            vec![Place::new("p", "", "X", "market")],
            vec![Review::new("c", "p", "", Sentiment::Positive)],
        );
        let q = Query::new("q", "market", "X", Mode::Pa, 5, Some("u".into())).unwrap();
        let graph = build_pa_graph(&d, "u", &q).unwrap();
        assert_eq!(graph.nodes(), ["a", "b", "u"]);
        assert_eq!(graph.seed_ids(), ["u"]);
        assert_eq!(graph.origin(), Mode::Pa);
        assert!(build_pa_graph(&d, "nobody", &q).is_err());
    }
}
