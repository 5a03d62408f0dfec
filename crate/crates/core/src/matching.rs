//! Maximum bipartite matching (Hopcroft–Karp).

use std::collections::VecDeque;

const FREE: usize = usize::MAX;

/// Size of a maximum matching between `0..adj.len()` on the left and
/// `0..n_right` on the right; `adj[u]` lists the right neighbours of `u`.
pub fn maximum_matching(adj: &[Vec<usize>], n_right: usize) -> usize {
    let n_left = adj.len();
    let mut match_left = vec![FREE; n_left];
    let mut match_right = vec![FREE; n_right];
    let mut layer = vec![0usize; n_left];
    let mut size = 0;

    // Greedy start.
    for u in 0..n_left {
        if let Some(&v) = adj[u].iter().find(|&&v| match_right[v] == FREE) {
            match_left[u] = v;
            match_right[v] = u;
            size += 1;
        }
    }

    loop {
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_left[u] == FREE {
                layer[u] = 0;
                queue.push_back(u);
            } else {
                layer[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_right[v];
                if w == FREE {
                    found = true;
                } else if layer[w] == usize::MAX {
                    layer[w] = layer[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return size;
        }
        let mut cursor = vec![0usize; n_left];
        for u in 0..n_left {
            if match_left[u] == FREE && augment(u, adj, &mut match_left, &mut match_right, &mut layer, &mut cursor) {
                size += 1;
            }
        }
    }
}

fn augment(
    root: usize,
    adj: &[Vec<usize>],
    match_left: &mut [usize],
    match_right: &mut [usize],
    layer: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    // Iterative DFS along the layered graph.
    let mut stack = vec![root];
    while let Some(&u) = stack.last() {
        if cursor[u] == adj[u].len() {
            layer[u] = usize::MAX;
            stack.pop();
            continue;
        }
        let v = adj[u][cursor[u]];
        cursor[u] += 1;
        let w = match_right[v];
        if w == FREE {
            // Flip the path recorded on the stack.
            let mut v = v;
            while let Some(u) = stack.pop() {
                let prev = match_left[u];
                match_left[u] = v;
                match_right[v] = u;
                v = prev;
            }
            return true;
        }
        if layer[w] == layer[u] + 1 {
            stack.push(w);
        }
    }
    false
}
