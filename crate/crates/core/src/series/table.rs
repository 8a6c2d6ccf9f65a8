use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated power series `F(x) = Σ_{n≥1} aₙ xⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub seed: Vec<f64>,
    pub n_max: usize,
    /// `a₁..a_{n_max}`.
    pub coefficients: Vec<f64>,
    /// Number of leading coefficients that were inputs rather than recurrence output.
    pub seeded_prefix: usize,
}

impl CoefficientTable {
    /// A table taken verbatim, with every entry counted as seeded.
    pub fn from_coefficients(coefficients: Vec<f64>) -> Self {
        CoefficientTable {
            seed: coefficients.iter().take(4).copied().collect(),
            n_max: coefficients.len(),
            seeded_prefix: coefficients.len(),
            coefficients,
        }
    }

    /// `aₖ` with `a₀ = 0` and zero past the end.
    pub fn a(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.coefficients.get(k - 1).copied().unwrap_or(0.0)
        }
    }

    /// Evaluates the truncated series and its derivative at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let mut value = 0.0;
        let mut slope = 0.0;
        for (i, &c) in self.coefficients.iter().enumerate().rev() {
            let k = (i + 1) as f64;
            value = value * x + c;
            slope = slope * x + k * c;
        }
        (value * x, slope)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("coefficient table serializes")
    }
}

/// Binomial coefficients `C(n, k)` from Pascal's rule.
#[derive(Debug, Clone)]
pub struct Binomials {
    rows: Vec<Vec<f64>>,
}

impl Binomials {
    pub fn new(n_max: usize) -> Self {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut row = vec![1.0; n + 1];
            for k in 1..n {
                row[k] = rows[n - 1][k - 1] + rows[n - 1][k];
            }
            rows.push(row);
        }
        Binomials { rows }
    }

    pub fn c(&self, n: usize, k: usize) -> f64 {
        if k > n {
            0.0
        } else {
            self.rows[n][k]
        }
    }
}

/// Relative threshold below which a coefficient counts as zero.
pub const ZERO_TOL: f64 = 1e-14;
const CONSISTENCY_TOL: f64 = 1e-10;

pub(crate) fn is_zero(v: f64, scale: f64) -> bool {
    v.abs() <= ZERO_TOL * scale
}

/// Extends the seed `a₁..a₄` to `a₁..a_{n_max}`.
///
/// With `a₁ ≠ 0`, `a_{k+3}` comes from
/// `C(k+3,k) a_{k+3} a₁ = (k+1) a_{k+1} a₃`; with `a₁ = 0` the odd terms vanish
/// and `a_{k+3} = (12 a₄/a₂) a_{k+1} / ((k+3)(k+2))`. In both cases the second
/// four-term relation is checked on every index.
pub fn extend_coefficients(seed: [f64; 4], n_max: usize) -> Result<CoefficientTable> {
    if n_max < 4 {
        return Err(Error::domain(format!("n_max must be at least 4, got {n_max}")));
    }
    if seed.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSeed(format!("non-finite seed {seed:?}")));
    }
    let scale = seed.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let [a1, a2, a3, a4] = seed.map(|v| if is_zero(v, scale) { 0.0 } else { v });
    if a1 == 0.0 && a2 == 0.0 {
        return Err(Error::InvalidSeed("a₁ = a₂ = 0 forces F ≡ 0".into()));
    }
    let binom = Binomials::new(n_max + 4);
    let mut a = vec![0.0; n_max + 1];
    a[1..=4].copy_from_slice(&[a1, a2, a3, a4]);
    if a1 == 0.0 {
        if a3 != 0.0 {
            return Err(Error::Inconsistency(format!("a₁ = 0 requires a₃ = 0, got a₃ = {a3}")));
        }
        let ratio = 12.0 * a4 / a2;
        for k in 2..=n_max.saturating_sub(3) {
            a[k + 3] = ratio * a[k + 1] / (((k + 3) * (k + 2)) as f64);
        }
    } else {
        let lhs = 4.0 * a4 * a1;
        let rhs = 2.0 * a2 * a3;
        if (lhs - rhs).abs() > CONSISTENCY_TOL * lhs.abs().max(rhs.abs()).max(scale * scale) {
            return Err(Error::Inconsistency(format!(
                "a₄ must equal a₂a₃/(2a₁) = {}",
                rhs / (4.0 * a1)
            )));
        }
        for k in 2..=n_max.saturating_sub(3) {
            a[k + 3] = (k + 1) as f64 * a[k + 1] * a3 / (binom.c(k + 3, k) * a1);
        }
    }
    for k in 0..=n_max.saturating_sub(4) {
        let terms = [
            2.0 * binom.c(k + 4, k) * a[k + 4] * a1,
            binom.c(k + 3, k) * a[k + 3] * a2,
            -binom.c(k + 2, k) * a[k + 2] * a3,
            -2.0 * (k + 1) as f64 * a[k + 1] * a4,
        ];
        let defect: f64 = terms.iter().sum();
        let size = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        if defect.abs() > CONSISTENCY_TOL * size {
            return Err(Error::Inconsistency(format!(
                "four-term relation fails at k = {k} by {defect:e}"
            )));
        }
    }
    Ok(CoefficientTable {
        seed: seed.to_vec(),
        n_max,
        coefficients: a[1..].to_vec(),
        seeded_prefix: 4,
    })
}

/// Largest defect of the general bilinear relation
///
/// `Σ_{m=0}^{l-1} (l-2m+1) C(l-m+1+k, k) a_{l-m+1+k} a_m = (l-2)(k+1) a_{k+1} a_l + a₁ a_{l+k} C(l+k, k)`
///
/// over `0 ≤ k ≤ k_max`, `1 ≤ l ≤ l_max`, divided by the largest term magnitude.
pub fn verify_comb20(table: &CoefficientTable, k_max: usize, l_max: usize) -> Result<f64> {
    if table.n_max < l_max + k_max + 1 {
        return Err(Error::domain(format!(
            "table of length {} is too short for k ≤ {k_max}, l ≤ {l_max}",
            table.n_max
        )));
    }
    let binom = Binomials::new(l_max + k_max + 2);
    let a = |k: usize| table.a(k);
    let mut worst = 0.0f64;
    let mut largest = 0.0f64;
    for k in 0..=k_max {
        for l in 1..=l_max {
            let mut lhs = 0.0;
            for m in 0..l {
                let idx = l - m + 1 + k;
                let t = (l as f64 - 2.0 * m as f64 + 1.0) * binom.c(idx, k) * a(idx) * a(m);
                largest = largest.max(t.abs());
                lhs += t;
            }
            let r1 = (l as f64 - 2.0) * (k + 1) as f64 * a(k + 1) * a(l);
            let r2 = a(1) * a(l + k) * binom.c(l + k, k);
            largest = largest.max(r1.abs()).max(r2.abs());
            worst = worst.max((lhs - r1 - r2).abs());
        }
    }
    Ok(if largest > 0.0 { worst / largest } else { worst })
}
