//! Enumeration of forests by combinatorial construction.

use std::collections::HashSet;

use rayon::prelude::*;

use super::code::code_cmp;
use super::{Forest, ForestError, Kind};

/// Codes of all vertex-only rooted trees, indexed by size (index 0 empty).
pub fn rooted_trees(max: usize) -> Vec<Vec<String>> {
    let mut by_size: Vec<Vec<String>> = vec![Vec::new(); max + 1];
    for k in 1..=max {
        let pool: Vec<(usize, &String)> = (1..k)
            .flat_map(|s| by_size[s].iter().map(move |c| (s, c)))
            .collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        multisets(&pool, 0, k - 1, &mut chosen, &mut |children| {
            let mut codes: Vec<&str> = children.iter().map(|c| c.as_str()).collect();
            if codes.is_empty() {
                out.push("b".to_string());
            } else {
                codes.sort_by(|a, b| code_cmp(a, b));
                out.push(format!("b[{}]", codes.join(",")));
            }
        });
        out.sort_by(|a, b| code_cmp(a, b));
        by_size[k] = out;
    }
    by_size
}

/// Enumerates multisets from `pool[start..]` (non-decreasing index) whose
/// sizes sum to `remaining`.
fn multisets<'a, F: FnMut(&[&'a String])>(
    pool: &[(usize, &'a String)],
    start: usize,
    remaining: usize,
    chosen: &mut Vec<&'a String>,
    emit: &mut F,
) {
    if remaining == 0 {
        emit(chosen);
        return;
    }
    for i in start..pool.len() {
        let (s, c) = pool[i];
        if s <= remaining {
            chosen.push(c);
            multisets(pool, i, remaining - s, chosen, emit);
            chosen.pop();
        }
    }
}

/// Ordered sequences of trees with the given number of parts and total size.
fn tree_sequences(trees: &[Vec<String>], parts: usize, total: usize) -> Vec<Vec<&String>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for s in 1..=total.saturating_sub(parts - 1) {
        for t in &trees[s] {
            for mut rest in tree_sequences(trees, parts - 1, total - s) {
                rest.insert(0, t);
                out.push(rest);
            }
        }
    }
    out
}

fn connected_aromas(trees: &[Vec<String>], max: usize) -> Vec<Vec<String>> {
    let mut by_size: Vec<Vec<String>> = vec![Vec::new(); max + 1];
    for (k, slot) in by_size.iter_mut().enumerate().skip(1) {
        let mut seen = HashSet::new();
        for cycle_len in 1..=k {
            for seq in tree_sequences(trees, cycle_len, k) {
                let best = (0..cycle_len)
                    .map(|r| {
                        let rot: Vec<&str> =
                            (0..cycle_len).map(|i| seq[(r + i) % cycle_len].as_str()).collect();
                        format!("<{}>", rot.join(","))
                    })
                    .min_by(|a, b| code_cmp(a, b))
                    .unwrap();
                seen.insert(best);
            }
        }
        let mut v: Vec<String> = seen.into_iter().collect();
        v.sort_by(|a, b| code_cmp(a, b));
        *slot = v;
    }
    by_size
}

/// All forests with `n_nodes` nodes, `n_roots` roots and `p` covertices,
/// each exactly once, sorted by canonical encoding. With `divfree`, forests
/// containing a 1-loop are excluded.
pub fn generate(
    n_nodes: usize,
    n_roots: usize,
    p: usize,
    divfree: bool,
) -> Result<Vec<Forest>, ForestError> {
    if p > n_nodes || n_roots > n_nodes {
        return Err(ForestError::InvalidArguments(format!(
            "need roots {n_roots} and covertices {p} at most the order {n_nodes}"
        )));
    }
    if n_nodes == 0 {
        return Ok(vec![Forest::empty()]);
    }
    let trees = rooted_trees(n_nodes);
    let aromas = connected_aromas(&trees, n_nodes);
    let aroma_pool: Vec<(usize, &String)> = (1..=n_nodes)
        .flat_map(|s| aromas[s].iter().map(move |c| (s, c)))
        .collect();

    let mut skeletons = Vec::new();
    let min_tree_nodes = n_roots;
    for aroma_nodes in 0..=(n_nodes - min_tree_nodes) {
        let tree_part = n_nodes - aroma_nodes;
        if n_roots == 0 && tree_part != 0 {
            continue;
        }
        let mut aroma_sets: Vec<Vec<String>> = Vec::new();
        let mut chosen = Vec::new();
        multisets(&aroma_pool, 0, aroma_nodes, &mut chosen, &mut |set| {
            let mut codes: Vec<String> = set.iter().map(|s| s.to_string()).collect();
            codes.sort_by(|a, b| code_cmp(a, b));
            aroma_sets.push(codes);
        });
        let tuples = tree_sequences(&trees, n_roots, tree_part);
        for set in &aroma_sets {
            for tuple in &tuples {
                let parts: Vec<&str> = set
                    .iter()
                    .map(|s| s.as_str())
                    .chain(tuple.iter().map(|s| s.as_str()))
                    .collect();
                skeletons.push(parts.join(" "));
            }
        }
    }

    crate::util::init_thread_pool();
    let codes: HashSet<String> = skeletons
        .par_iter()
        .flat_map_iter(|code| {
            let f = Forest::parse(code).expect("generated code parses");
            let mut out = Vec::new();
            let mut nodes = Vec::new();
            label_assignments(&f, p, &mut nodes, &mut out);
            out.into_iter().filter(move |g: &Forest| !divfree || !g.has_one_loop()).map(|g| g.code().into_string())
        })
        .collect();
    let mut codes: Vec<String> = codes.into_iter().collect();
    codes.sort_by(|a, b| code_cmp(a, b));
    Ok(codes.iter().map(|c| Forest::parse(c).expect("canonical code parses")).collect())
}

fn label_assignments(f: &Forest, p: usize, nodes: &mut Vec<usize>, out: &mut Vec<Forest>) {
    if nodes.len() == p {
        let mut g = f.clone();
        for (i, &v) in nodes.iter().enumerate() {
            g.kinds[v] = Kind::Covertex(i as u32 + 1);
        }
        out.push(g);
        return;
    }
    for v in 0..f.len() {
        if !nodes.contains(&v) {
            nodes.push(v);
            label_assignments(f, p, nodes, out);
            nodes.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(n: usize, r: usize, p: usize, d: bool) -> Vec<String> {
        generate(n, r, p, d).unwrap().iter().map(|f| f.to_string()).collect()
    }

    #[test]
    fn tree_counts() {
        let t = rooted_trees(8);
        let counts: Vec<usize> = t.iter().skip(1).map(|v| v.len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 9, 20, 48, 115]);
    }

    #[test]
    fn small_sets() {
        assert_eq!(codes(2, 1, 0, false), vec!["b[b]", "<b> b"]);
        assert_eq!(codes(2, 0, 0, false), vec!["<b[b]>", "<b,b>", "<b> <b>"]);
        assert_eq!(codes(2, 1, 1, false).len(), 4);
        assert_eq!(codes(0, 0, 0, false), vec!["1"]);
        assert_eq!(codes(1, 1, 0, true), vec!["b"]);
        assert!(generate(1, 0, 2, false).is_err());
    }

    #[test]
    fn scalar_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| codes(n, 0, 0, false).len()).collect();
        assert_eq!(counts, vec![1, 3, 7, 19, 47, 130]);
    }
}
