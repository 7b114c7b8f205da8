use std::collections::VecDeque;

use super::ComponentIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeColor {
    /// Trace relation between `(p, q)` and `(p+1, q+1)`.
    Red,
    /// First-slot orthogonality to `y` between `(p, q)` and `(p+1, q)`.
    Blue,
}

/// Which stored components of a solenoidal, trace-free spectrum are tied together by the two constraints.
#[derive(Debug, Clone)]
pub struct ComponentGraph {
    pub k: usize,
    pub l: usize,
    pub nodes: Vec<ComponentIndex>,
    pub edges: Vec<(usize, usize, EdgeColor)>,
    pub adjacency: Vec<Vec<usize>>,
    pub connected: bool,
}

pub fn component_graph(k: usize, l: usize) -> ComponentGraph {
    let nodes: Vec<_> = ComponentIndex::all(k, l).collect();
    let mut edges = Vec::new();
    for c in &nodes {
        if c.p < k && c.q < l {
            edges.push((c.offset(l), ComponentIndex::new(c.p + 1, c.q + 1).offset(l), EdgeColor::Red));
        }
        if c.p < k {
            edges.push((c.offset(l), ComponentIndex::new(c.p + 1, c.q).offset(l), EdgeColor::Blue));
        }
    }
    let mut adjacency = vec![Vec::new(); nodes.len()];
    for &(a, b, _) in &edges {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    let mut seen = vec![false; nodes.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    let connected = seen.iter().all(|&s| s);
    ComponentGraph { k, l, nodes, edges, adjacency, connected }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_case() {
        let g = component_graph(1, 0);
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.edges, vec![(0, 1, EdgeColor::Blue)]);
        assert!(g.connected);
    }

    #[test]
    fn two_three() {
        let g = component_graph(2, 3);
        assert_eq!(g.nodes.len(), 12);
        assert!(g.connected);
    }

    #[test]
    fn no_first_group_means_no_relations() {
        let g = component_graph(0, 3);
        assert!(g.edges.is_empty());
        assert!(!g.connected);
    }
}
