//! Bit pigeonhole formulas.
//!
//! `BPHP^n_m` has variables `x_{i,j}` for `i in [m]`, `j in [log n]`, read as
//! an `m x log n` bit matrix. For every pair `i < j` and every
//! `alpha in {0,1}^(log n)` it contains the clause "row i != alpha or
//! row j != alpha", giving `C(m,2) n` clauses of width `2 log n`.
//!
//! Layout: `x_{i,j}` (0-based) is variable `i * log n + j`, column 0 being the
//! most significant bit of row `i`. Clauses are ordered by pair `(i, j)`
//! lexicographically and then by `alpha` ascending, so clause
//! `pair_index(i, j) * n + alpha` is the one for `(i, j, alpha)`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Lit { var, positive: false }
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }

    /// 1-based signed DIMACS literal.
    pub fn to_dimacs(&self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }
}

pub type Clause = Vec<Lit>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self> {
        for (c, clause) in clauses.iter().enumerate() {
            for (a, lit) in clause.iter().enumerate() {
                if lit.var >= num_vars {
                    return Err(Error::OutOfRange(format!(
                        "clause {c} uses variable {} of {num_vars}",
                        lit.var
                    )));
                }
                if clause[..a].iter().any(|l| l.var == lit.var) {
                    return Err(Error::InvalidParameter(format!(
                        "clause {c} mentions variable {} twice",
                        lit.var
                    )));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn clause_satisfied(&self, index: usize, assignment: &[bool]) -> bool {
        self.clauses[index].iter().any(|l| l.eval(assignment))
    }

    pub fn is_satisfied(&self, assignment: &[bool]) -> bool {
        (0..self.clauses.len()).all(|c| self.clause_satisfied(c, assignment))
    }
}

/// `log2 n` for a power of two `n`.
pub fn log2_exact(n: usize) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("n must be a power of two, got {n}")));
    }
    Ok(n.trailing_zeros() as usize)
}

/// Index of the unordered pair `i < j` among all pairs of `[m]` in
/// lexicographic order.
pub fn pair_index(i: usize, j: usize, m: usize) -> usize {
    debug_assert!(i < j && j < m);
    i * m - i * (i + 1) / 2 + (j - i - 1)
}

pub fn generate_bphp(n: usize, m: usize) -> Result<CnfFormula> {
    let width = log2_exact(n)?;
    if m < 2 {
        return Err(Error::InvalidParameter(format!("m must be at least 2, got {m}")));
    }
    let mut clauses = Vec::with_capacity(m * (m - 1) / 2 * n);
    for i in 0..m {
        for j in i + 1..m {
            for alpha in 0..n {
                let mut clause = Vec::with_capacity(2 * width);
                for row in [i, j] {
                    for b in 0..width {
                        let bit = (alpha >> (width - 1 - b)) & 1 == 1;
                        // row != alpha: some bit disagrees with alpha
                        clause.push(Lit { var: row * width + b, positive: !bit });
                    }
                }
                clauses.push(clause);
            }
        }
    }
    Ok(CnfFormula { num_vars: m * width, clauses })
}

pub fn to_dimacs(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars, f.clauses.len());
    for clause in &f.clauses {
        for lit in clause {
            write!(out, "{} ", lit.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// One row `coeffs . x <= bound` over 0/1 vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Inequality {
    pub coeffs: Vec<i64>,
    pub bound: i64,
}

impl Inequality {
    pub fn new(coeffs: Vec<i64>, bound: i64) -> Self {
        Inequality { coeffs, bound }
    }

    /// `0 <= -1` over `num_vars` variables.
    pub fn contradiction(num_vars: usize) -> Self {
        Inequality { coeffs: vec![0; num_vars], bound: -1 }
    }

    pub fn lhs(&self, assignment: &[bool]) -> i64 {
        self.coeffs
            .iter()
            .zip(assignment)
            .filter(|(_, &x)| x)
            .map(|(&a, _)| a)
            .sum()
    }

    pub fn holds(&self, assignment: &[bool]) -> bool {
        self.lhs(assignment) <= self.bound
    }

    pub fn max_abs_coeff(&self) -> u64 {
        self.coeffs.iter().map(|a| a.unsigned_abs()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSystem {
    pub num_vars: usize,
    pub rows: Vec<Inequality>,
}

impl LinearSystem {
    pub fn new(num_vars: usize, rows: Vec<Inequality>) -> Result<Self> {
        let sys = LinearSystem { num_vars, rows };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        match self.rows.iter().position(|r| r.coeffs.len() != self.num_vars) {
            Some(i) => Err(Error::DimensionMismatch(format!(
                "row {i} has {} coefficients, expected {}",
                self.rows[i].coeffs.len(),
                self.num_vars
            ))),
            None => Ok(()),
        }
    }

    pub fn is_satisfied(&self, assignment: &[bool]) -> bool {
        self.rows.iter().all(|r| r.holds(assignment))
    }

    pub fn first_violated(&self, assignment: &[bool]) -> Option<usize> {
        self.rows.iter().position(|r| !r.holds(assignment))
    }
}

/// Clause `P ∨ ¬N` becomes `-Σ_P x + Σ_N x <= |N| - 1`.
pub fn clause_to_inequality(clause: &[Lit], num_vars: usize) -> Inequality {
    let mut coeffs = vec![0i64; num_vars];
    let mut negatives = 0i64;
    for lit in clause {
        if lit.positive {
            coeffs[lit.var] -= 1;
        } else {
            coeffs[lit.var] += 1;
            negatives += 1;
        }
    }
    Inequality { coeffs, bound: negatives - 1 }
}

pub fn cnf_to_inequalities(f: &CnfFormula) -> LinearSystem {
    LinearSystem {
        num_vars: f.num_vars,
        rows: f.clauses.iter().map(|c| clause_to_inequality(c, f.num_vars)).collect(),
    }
}

/// Smallest index of a clause falsified by `assignment`.
pub fn search_violated_clause(f: &CnfFormula, assignment: &[bool]) -> Result<usize> {
    if assignment.len() != f.num_vars {
        return Err(Error::DimensionMismatch(format!(
            "assignment has {} values for {} variables",
            assignment.len(),
            f.num_vars
        )));
    }
    (0..f.clauses.len())
        .find(|&c| !f.clause_satisfied(c, assignment))
        .ok_or(Error::SatisfyingAssignment)
}

/// Reads a flat assignment as the `m x log n` bit matrix.
pub fn assignment_matrix(assignment: &[bool], m: usize, width: usize) -> Result<Gf2Matrix> {
    if assignment.len() != m * width {
        return Err(Error::DimensionMismatch(format!(
            "assignment has {} values, expected {m} x {width}",
            assignment.len()
        )));
    }
    let mut out = Gf2Matrix::zeros(m, width);
    for (v, &x) in assignment.iter().enumerate() {
        out.set(v / width, v % width, x);
    }
    Ok(out)
}

/// Index of the clause `(i, j, alpha)` violated by two equal rows.
pub fn collision_to_clause(n: usize, m: usize, assignment: &[bool], pair: (usize, usize)) -> Result<usize> {
    let width = log2_exact(n)?;
    let rows = assignment_matrix(assignment, m, width)?;
    let (i, j) = (pair.0.min(pair.1), pair.0.max(pair.1));
    if i == j || j >= m {
        return Err(Error::OutOfRange(format!("pair ({}, {}) invalid for m = {m}", pair.0, pair.1)));
    }
    if rows.row_words(i) != rows.row_words(j) {
        return Err(Error::InvalidParameter(format!("rows {i} and {j} differ")));
    }
    let alpha = if width == 0 { 0 } else { rows.row_value(i) as usize };
    Ok(pair_index(i, j, m) * n + alpha)
}

/// Inverse of the clause ordering: `(i, j, alpha)` for a clause index.
pub fn clause_coordinates(n: usize, m: usize, index: usize) -> (usize, usize, usize) {
    let (pair, alpha) = (index / n, index % n);
    let mut i = 0;
    let mut first = 0;
    while first + (m - i - 1) <= pair {
        first += m - i - 1;
        i += 1;
    }
    (i, i + 1 + pair - first, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().filter(|c| !c.is_whitespace()).map(|c| c == '1').collect()
    }

    #[test]
    fn clause_counts() {
        let f = generate_bphp(2, 3).unwrap();
        assert_eq!((f.num_vars, f.clauses.len()), (3, 6));
        assert!(f.clauses.iter().all(|c| c.len() == 2));
        let f = generate_bphp(4, 5).unwrap();
        assert_eq!((f.num_vars, f.clauses.len()), (10, 40));
        assert!(f.clauses.iter().all(|c| c.len() == 4));
        assert!(generate_bphp(6, 3).is_err());
        assert!(generate_bphp(4, 1).is_err());
    }

    #[test]
    fn equal_rows_falsify_one_clause_of_their_pair() {
        let f = generate_bphp(4, 5).unwrap();
        let a = bits("00 01 10 11 00");
        let pair = pair_index(0, 4, 5);
        let falsified: Vec<usize> = (pair * 4..pair * 4 + 4).filter(|&c| !f.clause_satisfied(c, &a)).collect();
        assert_eq!(falsified, vec![pair * 4]);
        assert_eq!(search_violated_clause(&f, &a).unwrap(), pair * 4);
    }

    #[test]
    fn dimacs_format() {
        assert_eq!(to_dimacs(&CnfFormula::new(0, vec![]).unwrap()), "p cnf 0 0\n");
        let f = CnfFormula::new(2, vec![vec![Lit::pos(0), Lit::neg(1)]]).unwrap();
        assert_eq!(to_dimacs(&f), "p cnf 2 1\n1 -2 0\n");
        let text = to_dimacs(&generate_bphp(2, 3).unwrap());
        assert_eq!(text, "p cnf 3 6\n1 2 0\n-1 -2 0\n1 3 0\n-1 -3 0\n2 3 0\n-2 -3 0\n");
    }

    #[test]
    fn formula_rejects_bad_clauses() {
        assert!(CnfFormula::new(1, vec![vec![Lit::pos(1)]]).is_err());
        assert!(CnfFormula::new(2, vec![vec![Lit::pos(0), Lit::neg(0)]]).is_err());
    }

    #[test]
    fn inequality_translation() {
        let ineq = clause_to_inequality(&[Lit::pos(0), Lit::pos(1), Lit::pos(2)], 3);
        assert_eq!(ineq, Inequality::new(vec![-1, -1, -1], -1));
        assert_eq!(clause_to_inequality(&[Lit::neg(0)], 1), Inequality::new(vec![1], 0));
        assert_eq!(clause_to_inequality(&[Lit::pos(0), Lit::neg(1)], 2), Inequality::new(vec![-1, 1], 0));
    }

    #[test]
    fn search_examples() {
        let f = generate_bphp(4, 4).unwrap();
        assert!(matches!(
            search_violated_clause(&f, &bits("00 01 10 11")),
            Err(Error::SatisfyingAssignment)
        ));
        assert!(search_violated_clause(&f, &bits("00")).is_err());

        let f = generate_bphp(4, 5).unwrap();
        let a = bits("10 01 10 11 00");
        let c = search_violated_clause(&f, &a).unwrap();
        assert_eq!(clause_coordinates(4, 5, c), (0, 2, 0b10));
    }

    #[test]
    fn collision_to_clause_examples() {
        let a = bits("00 00 01 10 11");
        let c = collision_to_clause(4, 5, &a, (0, 1)).unwrap();
        assert_eq!(c, 0);
        assert_eq!(clause_coordinates(4, 5, c), (0, 1, 0));
        let f = generate_bphp(4, 5).unwrap();
        assert!(!f.clause_satisfied(c, &a));
        assert!(collision_to_clause(4, 5, &a, (1, 2)).is_err());
        assert!(collision_to_clause(4, 5, &a, (1, 1)).is_err());
    }

    #[test]
    fn clause_coordinates_inverts_ordering() {
        for (n, m) in [(2, 3), (4, 5), (8, 4)] {
            let f = generate_bphp(n, m).unwrap();
            for c in 0..f.clauses.len() {
                let (i, j, alpha) = clause_coordinates(n, m, c);
                assert_eq!(pair_index(i, j, m) * n + alpha, c);
            }
        }
    }
}
