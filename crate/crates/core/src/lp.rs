//! Dense phase-one simplex for linear feasibility over `x >= 0`.
//!
//! Used only by the brute-force L0 decoder, whose instances are a few
//! dozen rows by a handful of variables. Bland's rule guarantees
//! termination.

const PIVOT_EPS: f64 = 1e-12;
const FEASIBILITY_EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// `coeffs · x  (relation)  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }

    fn satisfied_by(&self, x: &[f64], tol: f64) -> bool {
        let lhs: f64 = self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs + tol,
            Relation::Ge => lhs >= self.rhs - tol,
            Relation::Eq => (lhs - self.rhs).abs() <= tol,
        }
    }
}

/// A point `x >= 0` meeting every constraint, or `None` if the system is
/// infeasible (up to floating tolerance).
pub fn find_feasible_point(nvars: usize, constraints: &[Constraint]) -> Option<Vec<f64>> {
    let m = constraints.len();
    if m == 0 {
        return Some(vec![0.0; nvars]);
    }
    // Normalize to rhs >= 0.
    let rows: Vec<(Vec<f64>, Relation, f64)> = constraints
        .iter()
        .map(|c| {
            assert_eq!(c.coeffs.len(), nvars, "constraint width mismatch");
            if c.rhs < 0.0 {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs)
            }
        })
        .collect();

    // Column layout: originals, one slack/surplus per inequality, artificials.
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let width = nvars + n_slack + n_art;
    let art_start = nvars + n_slack;

    let mut tab = vec![vec![0.0; width + 1]; m];
    let mut basis = vec![0usize; m];
    let (mut s, mut a) = (nvars, art_start);
    for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        tab[i][..nvars].copy_from_slice(coeffs);
        tab[i][width] = *rhs;
        match rel {
            Relation::Le => {
                tab[i][s] = 1.0;
                basis[i] = s;
                s += 1;
            }
            Relation::Ge => {
                tab[i][s] = -1.0;
                s += 1;
                tab[i][a] = 1.0;
                basis[i] = a;
                a += 1;
            }
            Relation::Eq => {
                tab[i][a] = 1.0;
                basis[i] = a;
                a += 1;
            }
        }
    }

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![0.0; width + 1];
    for i in 0..m {
        if basis[i] >= art_start {
            for (c, t) in cost.iter_mut().zip(&tab[i]) {
                *c -= t;
            }
        }
    }
    for c in cost.iter_mut().take(width).skip(art_start) {
        *c += 1.0;
    }

    for _ in 0..MAX_PIVOTS {
        let Some(enter) = (0..width).find(|&j| cost[j] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if tab[i][enter] > PIVOT_EPS {
                let ratio = tab[i][width] / tab[i][enter];
                leave = match leave {
                    None => Some(i),
                    Some(l) => {
                        let best = tab[l][width] / tab[l][enter];
                        if ratio < best - PIVOT_EPS
                            || ((ratio - best).abs() <= PIVOT_EPS && basis[i] < basis[l])
                        {
                            Some(i)
                        } else {
                            Some(l)
                        }
                    }
                };
            }
        }
        // Phase one is bounded below by 0, so an entering column always has a pivot.
        let Some(r) = leave else { break };
        pivot(&mut tab, &mut cost, r, enter);
        basis[r] = enter;
    }

    let residual: f64 = (0..m)
        .filter(|&i| basis[i] >= art_start)
        .map(|i| tab[i][width])
        .sum();
    if residual > FEASIBILITY_EPS {
        return None;
    }
    let mut x = vec![0.0; nvars];
    for (i, &b) in basis.iter().enumerate() {
        if b < nvars {
            x[b] = tab[i][width].max(0.0);
        }
    }
    constraints
        .iter()
        .all(|c| c.satisfied_by(&x, 1e-7))
        .then_some(x)
}

fn pivot(tab: &mut [Vec<f64>], cost: &mut [f64], r: usize, c: usize) {
    let p = tab[r][c];
    for v in tab[r].iter_mut() {
        *v /= p;
    }
    let pivot_row = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r && row[c] != 0.0 {
            let f = row[c];
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
    let f = cost[c];
    for (v, pv) in cost.iter_mut().zip(&pivot_row) {
        *v -= f * pv;
    }
}
