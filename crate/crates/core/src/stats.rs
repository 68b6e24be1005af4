//! Pearson correlation with significance and the Mann-Whitney U test.
//! Conventions follow the usual midrank treatment of ties; the U statistic
//! is always reported for the first sample.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alternative {
    Less,
    Greater,
    TwoSided,
}

impl std::fmt::Display for Alternative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Alternative::Less => "less",
            Alternative::Greater => "greater",
            Alternative::TwoSided => "two-sided",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatReport {
    pub statistic: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
    pub alternative: Alternative,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// Pearson r with a two-sided p-value from the t distribution on n-2
/// degrees of freedom.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<StatReport, StatsError> {
    let n = xs.len();
    if n != ys.len() {
        return Err(StatsError::DegenerateInput(format!(
            "length mismatch: {} vs {}",
            n,
            ys.len()
        )));
    }
    if n < 3 {
        return Err(StatsError::DegenerateInput(format!("need at least 3 points, got {n}")));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::DegenerateInput("zero variance".to_string()));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p = if 1.0 - r * r <= f64::EPSILON {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("valid dof");
        (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
    };
    Ok(StatReport { statistic: r, p_value: p, n1: n, n2: n, alternative: Alternative::TwoSided })
}

/// Midranks of the concatenation a ++ b, 1-based, ties averaged.
fn midranks(a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let combined: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut order: Vec<usize> = (0..combined.len()).collect();
    order.sort_by(|&i, &j| combined[i].partial_cmp(&combined[j]).expect("no NaN"));
    let mut ranks = vec![0.0; combined.len()];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && combined[order[j + 1]] == combined[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0; // mean of 1-based positions i+1..=j+1
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        tie_sizes.push(j - i + 1);
        i = j + 1;
    }
    (ranks, tie_sizes)
}

/// Count size-k rank subsets of {1..n} whose rank sum is <= `limit`.
fn count_sums_at_most(n: usize, k: usize, limit: f64) -> (u64, u64) {
    let mut le = 0u64;
    let mut total = 0u64;
    // n <= 12, so a bitmask sweep is cheap.
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        total += 1;
        let sum: usize = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| i + 1).sum();
        if (sum as f64) <= limit + 1e-9 {
            le += 1;
        }
    }
    (le, total)
}

/// Mann-Whitney U with midrank ties. Exact p by enumerating rank subsets
/// when the combined sample is small and tie-free; otherwise the normal
/// approximation with tie and continuity corrections. The statistic is U
/// for `a`.
pub fn mann_whitney_u(a: &[f64], b: &[f64], alternative: Alternative) -> StatReport {
    assert!(!a.is_empty() && !b.is_empty(), "both samples must be non-empty");
    let (n1, n2) = (a.len(), b.len());
    let nf = (n1 + n2) as f64;
    let (ranks, tie_sizes) = midranks(a, b);
    let r1: f64 = ranks[..n1].iter().sum();
    let u1 = r1 - (n1 * (n1 + 1)) as f64 / 2.0;

    let has_ties = tie_sizes.iter().any(|&t| t > 1);
    let p = if n1 + n2 <= 12 && !has_ties {
        let n = n1 + n2;
        let (le, total) = count_sums_at_most(n, n1, r1);
        // sums >= r1 by symmetry of the complement count
        let (lt, _) = count_sums_at_most(n, n1, r1 - 1e-6);
        let ge = total - lt;
        let pl = le as f64 / total as f64;
        let pg = ge as f64 / total as f64;
        match alternative {
            Alternative::Less => pl,
            Alternative::Greater => pg,
            Alternative::TwoSided => (2.0 * pl.min(pg)).min(1.0),
        }
    } else {
        let mu = (n1 * n2) as f64 / 2.0;
        let tie_term: f64 = tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>()
            / (nf * (nf - 1.0));
        let sigma2 = ((n1 * n2) as f64 / 12.0) * ((nf + 1.0) - tie_term);
        if sigma2 <= 0.0 {
            1.0
        } else {
            let sigma = sigma2.sqrt();
            let norm = Normal::new(0.0, 1.0).expect("unit normal");
            let pl = norm.cdf((u1 + 0.5 - mu) / sigma);
            let pg = 1.0 - norm.cdf((u1 - 0.5 - mu) / sigma);
            match alternative {
                Alternative::Less => pl,
                Alternative::Greater => pg,
                Alternative::TwoSided => (2.0 * pl.min(pg)).min(1.0),
            }
        }
    };
    StatReport { statistic: u1, p_value: p.clamp(0.0, 1.0), n1, n2, alternative }
}

/// All index pairs (i, j) with i < j, lexicographic.
pub fn pairwise_indices(n: usize) -> Vec<(usize, usize)> {
    assert!(n >= 2, "need at least two items");
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_perfect_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let r = pearson(&xs, &ys).unwrap();
        assert!((r.statistic - 1.0).abs() < 1e-12);
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn pearson_perfect_negative() {
        let xs: Vec<f64> = (0..8).map(|i| i as f64 * 0.5 - 1.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -x).collect();
        let r = pearson(&xs, &ys).unwrap();
        assert!((r.statistic + 1.0).abs() < 1e-12);
    }

    // 20-point fixture; r and p cross-checked against an external
    // reference implementation.
    const PX: [f64; 20] = [
        -0.52, 2.44, -1.92, 1.45, -0.47, -0.44, 0.81, 0.14, -0.51, -2.99, -2.45, 1.26, 0.15,
        1.18, 2.73, 1.1, -2.68, -1.15, 0.56, -1.59,
    ];
    const PY: [f64; 20] = [
        -0.41, 2.66, -1.52, -1.04, -0.38, 1.44, 0.1, -0.81, -1.5, -2.84, -1.77, -0.42, 1.59,
        0.43, 1.75, 2.1, -0.1, -0.9, 0.67, -0.22,
    ];

    #[test]
    fn pearson_matches_direct_formula() {
        let rep = pearson(&PX, &PY).unwrap();
        let n = PX.len() as f64;
        let sx: f64 = PX.iter().sum();
        let sy: f64 = PY.iter().sum();
        let sxx: f64 = PX.iter().map(|x| x * x).sum();
        let syy: f64 = PY.iter().map(|y| y * y).sum();
        let sxy: f64 = PX.iter().zip(PY).map(|(x, y)| x * y).sum();
        let direct =
            (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt());
        assert!((rep.statistic - direct).abs() < 1e-10);
        assert!((rep.statistic - 0.685640981740798).abs() < 1e-9);
        assert!((rep.p_value - 8.471357134078192e-4).abs() < 1e-9);
    }

    #[test]
    fn pearson_symmetric() {
        let a = pearson(&PX, &PY).unwrap();
        let b = pearson(&PY, &PX).unwrap();
        assert_eq!(a.statistic, b.statistic);
    }

    #[test]
    fn pearson_rejects_degenerate() {
        assert!(pearson(&[1.0, 2.0], &[2.0, 3.0]).is_err());
        assert!(pearson(&[1.0, 1.0, 1.0], &[2.0, 3.0, 4.0]).is_err());
        assert!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn mann_whitney_exact_separated() {
        let rep = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], Alternative::Less);
        assert_eq!(rep.statistic, 0.0);
        assert_eq!(rep.p_value, 0.05);
    }

    #[test]
    fn mann_whitney_identical_samples() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let rep = mann_whitney_u(&a, &a, Alternative::TwoSided);
        assert!(rep.p_value >= 0.99, "p {}", rep.p_value);
    }

    #[test]
    fn mann_whitney_u_duality() {
        let a = [1.2, 3.4, 2.2, 5.1, 0.3, 4.4, 9.9];
        let b = [2.9, 6.0, 4.1, 7.3, 5.5, 1.8];
        let ab = mann_whitney_u(&a, &b, Alternative::Less).statistic;
        let ba = mann_whitney_u(&b, &a, Alternative::Less).statistic;
        assert_eq!(ab + ba, (a.len() * b.len()) as f64);
    }

    // 6v6 tie-free fixture: exact path, frozen against an external
    // reference; approximation must land within 0.02.
    const C6: [f64; 6] = [1.2, 3.4, 2.2, 5.1, 0.3, 4.4];
    const D6: [f64; 6] = [2.9, 6.0, 4.1, 7.3, 5.5, 1.8];

    #[test]
    fn mann_whitney_exact_golden() {
        let less = mann_whitney_u(&C6, &D6, Alternative::Less);
        assert_eq!(less.statistic, 9.0);
        assert!((less.p_value - 0.089826839826840).abs() < 1e-12);
        let greater = mann_whitney_u(&C6, &D6, Alternative::Greater);
        assert!((greater.p_value - 0.933982683982684).abs() < 1e-12);
        let two = mann_whitney_u(&C6, &D6, Alternative::TwoSided);
        assert!((two.p_value - 0.179653679653680).abs() < 1e-12);
    }

    #[test]
    fn mann_whitney_exact_approx_agree() {
        // Force the approximation on the same data by inflating both
        // samples with a far-away sentinel pair, then compare on the
        // original: instead, drive the approximation directly via the
        // formulas by using a 13-element combined sample that shares the
        // 6v6 ordering. Simpler: check the frozen approximate values.
        let approx = |alt| {
            let (ranks, tie_sizes) = midranks(&C6, &D6);
            let r1: f64 = ranks[..6].iter().sum();
            let u1 = r1 - 21.0;
            let mu = 18.0;
            let nf = 12.0;
            let tie_term: f64 = tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>()
                / (nf * (nf - 1.0));
            let sigma = ((36.0 / 12.0) * ((nf + 1.0) - tie_term)).sqrt();
            let norm = Normal::new(0.0, 1.0).unwrap();
            let pl = norm.cdf((u1 + 0.5 - mu) / sigma);
            let pg = 1.0 - norm.cdf((u1 - 0.5 - mu) / sigma);
            match alt {
                Alternative::Less => pl,
                Alternative::Greater => pg,
                Alternative::TwoSided => (2.0 * pl.min(pg)).min(1.0),
            }
        };
        for alt in [Alternative::Less, Alternative::Greater, Alternative::TwoSided] {
            let exact = mann_whitney_u(&C6, &D6, alt).p_value;
            assert!((exact - approx(alt)).abs() < 0.02, "{alt}: {exact} vs {}", approx(alt));
        }
    }

    // 20v20 fixture with ties: approximation path, frozen against an
    // external reference implementation.
    const A20: [f64; 20] = [
        3.4, -0.9, 0.1, 0.8, -1.6, 0.0, -0.0, -3.5, 2.0, 1.2, -1.3, -0.3, 1.0, -0.5, -0.5,
        -2.9, 1.1, 0.2, 0.5, -3.1,
    ];
    const B20: [f64; 20] = [
        4.1, 1.1, 0.0, 4.9, 0.7, -2.1, -0.0, -3.8, 2.9, -0.0, -0.7, 2.9, -2.5, 1.9, -3.3,
        -0.5, -1.6, 3.7, 4.3, 0.1,
    ];

    #[test]
    fn mann_whitney_approx_golden() {
        let less = mann_whitney_u(&A20, &B20, Alternative::Less);
        assert_eq!(less.statistic, 168.5);
        assert!((less.p_value - 0.200550582839184).abs() < 1e-6);
        let greater = mann_whitney_u(&A20, &B20, Alternative::Greater);
        assert!((greater.p_value - 0.806958281040027).abs() < 1e-6);
        let two = mann_whitney_u(&A20, &B20, Alternative::TwoSided);
        assert!((two.p_value - 0.401101165678368).abs() < 1e-6);
    }

    #[test]
    fn pairwise_counts() {
        assert_eq!(pairwise_indices(100).len(), 4950);
        assert_eq!(pairwise_indices(2), vec![(0, 1)]);
        let p5 = pairwise_indices(5);
        assert_eq!(p5.len(), 10);
        let mut sorted = p5.clone();
        sorted.sort();
        assert_eq!(p5, sorted);
        assert!(p5.iter().all(|&(i, j)| i < j));
    }
}
