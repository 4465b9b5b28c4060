use serde::{Deserialize, Serialize};

use super::special::{chi_square_sf, t_two_sided_p};
use crate::error::{Error, Result};
use crate::featureset::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Welch's unequal-variance t-test of `a` against `b`. `None` when either
/// sample has fewer than 2 values or both variances are zero.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Option<TTest> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if se2 <= 0.0 {
        return None;
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    Some(TTest {
        t,
        df,
        p: t_two_sided_p(t, df),
    })
}

/// Average ranks (1-based), ties sharing the mean of their positions.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub rho: f64,
    pub p: f64,
}

/// Spearman rank correlation with a t-approximation p-value on `n - 2`
/// degrees of freedom. `None` for fewer than 3 pairs or a constant input.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<Correlation> {
    if x.len() != y.len() || x.len() < 3 {
        return None;
    }
    let rho = pearson(&average_ranks(x), &average_ranks(y))?;
    let df = x.len() as f64 - 2.0;
    let p = if rho.abs() >= 1.0 {
        0.0
    } else {
        t_two_sided_p(rho * (df / (1.0 - rho * rho)).sqrt(), df)
    };
    Some(Correlation { rho, p })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallis {
    pub h: f64,
    pub p: f64,
}

/// Kruskal-Wallis H over any number of groups, tie-corrected; `H = 0`
/// when every value is identical.
pub fn kruskal_wallis(groups: &[&[f64]]) -> Result<KruskalWallis> {
    if groups.len() < 2 || groups.iter().any(|g| g.is_empty()) {
        return Err(Error::data("Kruskal-Wallis needs at least two nonempty samples"));
    }
    let all: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let n = all.len() as f64;
    let ranks = average_ranks(&all);
    let mut ties = 0.0;
    let mut sorted = all.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
        ties += (j as f64).powi(3) - j as f64;
        i += j;
    }
    let correction = 1.0 - ties / (n.powi(3) - n);
    if correction <= 0.0 {
        return Ok(KruskalWallis { h: 0.0, p: 1.0 });
    }
    let mut at = 0;
    let mut s = 0.0;
    for g in groups {
        let r: f64 = ranks[at..at + g.len()].iter().sum();
        s += r * r / g.len() as f64;
        at += g.len();
    }
    let h = (12.0 / (n * (n + 1.0)) * s - 3.0 * (n + 1.0)) / correction;
    let h = h.max(0.0);
    Ok(KruskalWallis {
        h,
        p: chi_square_sf(h, groups.len() as f64 - 1.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStat {
    pub name: String,
    pub mean_ad: Option<f64>,
    pub mean_non_ad: Option<f64>,
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub significant: bool,
    pub rho: Option<f64>,
    pub rho_p: Option<f64>,
    pub rho_significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub alpha: f64,
    pub tests: usize,
    /// `alpha / tests`
    pub threshold: f64,
    pub features: Vec<FeatureStat>,
}

pub fn bonferroni_threshold(alpha: f64, tests: usize) -> f64 {
    alpha / tests as f64
}

/// Per-feature Welch t-test between AD and non-AD rows, plus Spearman
/// correlation with MMSE where scores exist. Masked values are skipped.
/// `tests` overrides the Bonferroni denominator (default: feature count).
pub fn feature_differentiation(data: &Dataset, alpha: f64, tests: Option<usize>) -> Result<StatsReport> {
    let labels = data.binary_labels()?;
    if !labels.contains(&0) || !labels.contains(&1) {
        return Err(Error::data("feature statistics need both classes present"));
    }
    let tests = tests.unwrap_or(data.n_features());
    if tests == 0 {
        return Err(Error::InvalidArgument("Bonferroni test count must be positive".into()));
    }
    let threshold = bonferroni_threshold(alpha, tests);
    let mean = |v: &[f64]| crate::util::mean(v);
    let features = data
        .names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let (mut ad, mut non) = (Vec::new(), Vec::new());
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for ((row, &l), m) in data.rows.iter().zip(&labels).zip(&data.mmse) {
                let Some(v) = row[j] else { continue };
                if l == 1 {
                    ad.push(v);
                } else {
                    non.push(v);
                }
                if let Some(m) = m {
                    xs.push(v);
                    ys.push(*m);
                }
            }
            let tt = welch_t_test(&ad, &non);
            let corr = spearman(&xs, &ys);
            FeatureStat {
                name: name.clone(),
                mean_ad: mean(&ad),
                mean_non_ad: mean(&non),
                t: tt.map(|t| t.t),
                p: tt.map(|t| t.p),
                significant: tt.map_or(false, |t| t.p < threshold),
                rho: corr.map(|c| c.rho),
                rho_p: corr.map(|c| c.p),
                rho_significant: corr.map_or(false, |c| c.p < threshold),
            }
        })
        .collect();
    Ok(StatsReport {
        alpha,
        tests,
        threshold,
        features,
    })
}

impl StatsReport {
    pub fn significant_indices(&self) -> Vec<usize> {
        (0..self.features.len()).filter(|&i| self.features[i].significant).collect()
    }

    /// CSV with one row per feature; `weights` adds a regression-weight
    /// column when given.
    pub fn write_csv<W: std::io::Write>(&self, out: W, weights: Option<&[f64]>) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "feature", "mean_ad", "mean_non_ad", "t", "p", "significant", "rho_mmse", "rho_p", "rho_significant",
        ];
        if weights.is_some() {
            header.push("ridge_weight");
        }
        w.write_record(&header)?;
        let o = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
        for (i, f) in self.features.iter().enumerate() {
            let mut rec = vec![
                f.name.clone(),
                o(f.mean_ad),
                o(f.mean_non_ad),
                o(f.t),
                o(f.p),
                f.significant.to_string(),
                o(f.rho),
                o(f.rho_p),
                f.rho_significant.to_string(),
            ];
            if let Some(ws) = weights {
                rec.push(ws[i].to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}
