//! Speech-graph features against matrix and Floyd-Warshall oracles.

use cogspeech::speechgraph::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Oracle {
    n: usize,
    /// multiplicity matrix
    m: Vec<Vec<usize>>,
}

impl Oracle {
    fn new(tokens: &[String]) -> Self {
        let mut names: Vec<&String> = Vec::new();
        for t in tokens {
            if !names.contains(&t) {
                names.push(t);
            }
        }
        let id = |t: &String| names.iter().position(|n| *n == t).unwrap();
        let n = names.len();
        let mut m = vec![vec![0; n]; n];
        for pair in tokens.windows(2) {
            m[id(&pair[0])][id(&pair[1])] += 1;
        }
        Oracle { n, m }
    }

    fn adjacency(&self, loops: bool) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| if self.m[i][j] > 0 && (loops || i != j) { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    fn features(&self) -> [Option<f64>; 13] {
        let n = self.n;
        let mul = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
        };
        let trace = |a: &Vec<Vec<f64>>| (0..n).map(|i| a[i][i]).sum::<f64>();
        let a = self.adjacency(true);
        let b = self.adjacency(false);
        let e = a.iter().flatten().sum::<f64>();
        let repeated: usize = self.m.iter().flatten().filter(|&&k| k > 0).map(|k| k - 1).sum();
        let mut parallel = 0;
        for i in 0..n {
            for j in i + 1..n {
                parallel += self.m[i][j].min(self.m[j][i]);
            }
        }
        let l1 = trace(&a);
        let l2 = (trace(&mul(&a, &a)) - l1) / 2.0;
        let l3 = trace(&mul(&mul(&b, &b), &b)) / 3.0;

        // reachability by Floyd-Warshall on the directed graph
        let mut reach: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j || self.m[i][j] > 0).collect()).collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        let lsc = (0..n).map(|i| (0..n).filter(|&j| reach[i][j] && reach[j][i]).count()).max().unwrap();

        // undirected shortest paths
        let inf = f64::INFINITY;
        let mut d: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 0.0 } else if self.m[i][j] + self.m[j][i] > 0 { 1.0 } else { inf })
                    .collect()
            })
            .collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        let lcc = (0..n).map(|i| (0..n).filter(|&j| d[i][j] < inf).count()).max().unwrap();
        // a token sequence always yields one weak component
        assert_eq!(lcc, n);
        let mut finite = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    finite.push(d[i][j]);
                }
            }
        }
        let (diam, asp) = if n > 1 {
            (
                Some(finite.iter().copied().fold(0.0, f64::max)),
                Some(finite.iter().sum::<f64>() / finite.len() as f64),
            )
        } else {
            (None, None)
        };
        [
            Some(n as f64),
            Some(e),
            Some(repeated as f64),
            Some(parallel as f64),
            Some(l1),
            Some(l2),
            Some(l3),
            Some(lcc as f64),
            Some(lsc as f64),
            Some(2.0 * e / n as f64),
            (n > 1).then(|| (e - l1) / (n * (n - 1)) as f64),
            diam,
            asp,
        ]
    }
}

fn random_tokens(rng: &mut ChaCha8Rng, len: usize) -> Vec<String> {
    let vocab = rng.gen_range(1..12);
    (0..len).map(|_| format!("w{}", rng.gen_range(0..vocab))).collect()
}

#[test]
fn adjacency_matches_pair_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let tokens = random_tokens(&mut rng, 30);
        let g = build_graph(&tokens);
        let oracle = Oracle::new(&tokens);
        assert_eq!(g.node_count(), oracle.n);
        for (&(u, v), &k) in &g.edges {
            let i = oracle_index(&tokens, &g.nodes[u]);
            let j = oracle_index(&tokens, &g.nodes[v]);
            assert_eq!(oracle.m[i][j], k);
        }
        assert_eq!(g.total_multiplicity(), 29);
    }
}

fn oracle_index(tokens: &[String], word: &str) -> usize {
    let mut seen: Vec<&str> = Vec::new();
    for t in tokens {
        if !seen.contains(&t.as_str()) {
            seen.push(t);
        }
    }
    seen.iter().position(|s| *s == word).unwrap()
}

#[test]
fn features_match_matrix_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let len = rng.gen_range(2..40);
        let tokens = random_tokens(&mut rng, len);
        let got = graph_features(&build_graph(&tokens));
        let want = Oracle::new(&tokens).features();
        for k in 0..13 {
            match (got[k], want[k]) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12, "{} {a} vs {b} on {tokens:?}", GRAPH_NAMES[k]),
                (a, b) => assert_eq!(a, b, "{}", GRAPH_NAMES[k]),
            }
        }
        let (lsc, lcc, n) = (got[8].unwrap(), got[7].unwrap(), got[0].unwrap());
        assert!(lsc <= lcc && lcc <= n);
        if let Some(density) = got[10] {
            assert!((0.0..=1.0).contains(&density));
        }
    }
}
