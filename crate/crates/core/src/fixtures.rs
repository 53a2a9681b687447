//! Named small trees used across tests, examples and the CLI docs.

use crate::graph::Graph;

/// Two adjacent degree-3 centers `0` and `1`, each carrying two legs of
/// length two: `0-2-3`, `0-4-5`, `1-6-7`, `1-8-9`. The smallest handy tree
/// with `alpha < beta`.
pub fn ds10() -> Graph {
    Graph::from_edges(
        10,
        &[(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (1, 6), (6, 7), (1, 8), (8, 9)],
    )
}

/// Center `0` with pendant paths of the given lengths, numbered outward
/// branch by branch.
pub fn spider(legs: &[usize]) -> Graph {
    let n = 1 + legs.iter().sum::<usize>();
    let mut edges = Vec::new();
    let mut next = 1;
    for &len in legs {
        let mut prev = 0;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    Graph::from_edges(n, &edges)
}
