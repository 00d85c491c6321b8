//! Strongly connected components (iterative Tarjan).

/// SCCs of the graph `succ`, in reverse topological order (sinks first).
pub(crate) fn sccs(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    // Call stack of (node, next successor position).
    let mut calls: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        calls.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    calls.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

/// Component id of every node.
pub(crate) fn component_of(n: usize, comps: &[Vec<usize>]) -> Vec<usize> {
    let mut of = vec![0; n];
    for (c, comp) in comps.iter().enumerate() {
        for &v in comp {
            of[v] = c;
        }
    }
    of
}

/// SCCs with no edge leaving them.
pub(crate) fn bottom_sccs(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let comps = sccs(succ);
    let of = component_of(succ.len(), &comps);
    comps
        .into_iter()
        .enumerate()
        .filter(|(c, comp)| comp.iter().all(|&v| succ[v].iter().all(|&w| of[w] == *c)))
        .map(|(_, comp)| comp)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_graphs() {
        assert_eq!(bottom_sccs(&[vec![0]]), vec![vec![0]]);
        // 0 -> 1 -> 2 -> 1, 0 -> 3 -> 3
        let g = vec![vec![1, 3], vec![2], vec![1], vec![3]];
        let mut b = bottom_sccs(&g);
        b.sort();
        assert_eq!(b, vec![vec![1, 2], vec![3]]);
        let dag = vec![vec![1, 2], vec![3], vec![3], vec![3]];
        assert_eq!(bottom_sccs(&dag), vec![vec![3]]);
    }

    fn reach(g: &[Vec<usize>], from: usize) -> Vec<bool> {
        let mut seen = vec![false; g.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &w in &g[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    proptest! {
        #[test]
        fn matches_mutual_reachability(edges in proptest::collection::vec((0usize..7, 0usize..7), 0..20)) {
            let n = 7;
            let mut g = vec![Vec::new(); n];
            for (a, b) in edges {
                g[a].push(b);
            }
            let r: Vec<Vec<bool>> = (0..n).map(|v| reach(&g, v)).collect();
            let comps = sccs(&g);
            let of = component_of(n, &comps);
            for u in 0..n {
                for v in 0..n {
                    prop_assert_eq!(of[u] == of[v], r[u][v] && r[v][u]);
                }
            }
            // Sinks come first: no edge goes to a later component.
            for u in 0..n {
                for &w in &g[u] {
                    prop_assert!(of[w] <= of[u]);
                }
            }
        }
    }
}
