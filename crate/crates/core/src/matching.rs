//! Capacitated bipartite assignment by augmenting paths.
//!
//! Each right node `j` has `capacity` slots; slots are expanded explicitly
//! and a maximum matching is grown with Kuhn's augmenting-path search.
//! Left nodes are processed in ascending order and each left node scans its
//! slots in ascending order, so the result is deterministic.

/// Assignment of left nodes to right nodes, `None` where unmatched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BMatching {
    pub assignment: Vec<Option<usize>>,
    pub matched: usize,
}

/// `adj[u]` lists the right nodes left node `u` may use, ascending.
pub fn b_matching(adj: &[Vec<usize>], right: usize, capacity: usize) -> BMatching {
    let slots = right * capacity;
    let slot_adj: Vec<Vec<usize>> = adj
        .iter()
        .map(|rs| {
            rs.iter()
                .flat_map(|&j| (0..capacity).map(move |t| j * capacity + t))
                .collect()
        })
        .collect();

    let mut owner: Vec<Option<usize>> = vec![None; slots];
    let mut slot_of: Vec<Option<usize>> = vec![None; adj.len()];
    let mut seen = vec![usize::MAX; slots];
    let mut via = vec![0usize; slots];
    let mut matched = 0;

    for root in 0..adj.len() {
        // Explicit stack of (left node, next edge index).
        let mut stack = vec![(root, 0usize)];
        let mut found = None;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if *next >= slot_adj[u].len() {
                stack.pop();
                continue;
            }
            let v = slot_adj[u][*next];
            *next += 1;
            if seen[v] == root {
                continue;
            }
            seen[v] = root;
            via[v] = u;
            match owner[v] {
                None => {
                    found = Some(v);
                    break;
                }
                Some(w) => stack.push((w, 0)),
            }
        }
        if let Some(mut v) = found {
            loop {
                let u = via[v];
                let prev = slot_of[u];
                owner[v] = Some(u);
                slot_of[u] = Some(v);
                match prev {
                    Some(p) if u != root => v = p,
                    _ => break,
                }
            }
            matched += 1;
        }
    }

    BMatching {
        assignment: slot_of
            .iter()
            .map(|s| s.map(|v| v / capacity.max(1)))
            .collect(),
        matched,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_perfect() {
        let adj = vec![vec![0, 1], vec![0]];
        let m = b_matching(&adj, 2, 1);
        assert_eq!(m.matched, 2);
        assert_eq!(m.assignment, vec![Some(1), Some(0)]);
    }

    #[test]
    fn capacity_two() {
        let adj = vec![vec![0], vec![0, 1], vec![0], vec![1]];
        let m = b_matching(&adj, 2, 2);
        assert_eq!(m.matched, 4);
        let load0 = m.assignment.iter().filter(|a| **a == Some(0)).count();
        assert_eq!(load0, 2);
        assert_eq!(m.assignment[1], Some(1));
    }

    #[test]
    fn deficient() {
        let adj = vec![vec![0], vec![0], vec![0]];
        let m = b_matching(&adj, 3, 1);
        assert_eq!(m.matched, 1);
        assert_eq!(m.assignment, vec![Some(0), None, None]);
    }

    #[test]
    fn long_augmenting_chain() {
        // u_i may use rows i and i+1; greedy takes row i for every u_i except
        // the last one, which forces a full-length reroute.
        let n = 2000;
        let mut adj: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
        adj.push(vec![0]);
        let m = b_matching(&adj, n, 1);
        assert_eq!(m.matched, n);
    }
}
