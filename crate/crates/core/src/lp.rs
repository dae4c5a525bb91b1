//! Exact rational linear-programming feasibility.
//!
//! Phase-1 simplex (no objective) over an arbitrary exact scalar, with
//! Bland's anti-cycling pivot rule. The solver is deterministic: identical
//! systems produce identical witnesses, independent of thread count. No
//! Farkas certificates are produced; callers only need the boolean plus a
//! substitutable witness.

use crate::error::Error;
use crate::scalar::Scalar;

/// Constraint relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Row<S> {
    pub coeffs: Vec<S>,
    pub rel: Rel,
    pub rhs: S,
}

/// A system of linear constraints over `num_vars` free variables.
#[derive(Debug, Clone)]
pub struct LinearSystem<S> {
    num_vars: usize,
    rows: Vec<Row<S>>,
}

impl<S: Scalar> LinearSystem<S> {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            num_vars,
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[Row<S>] {
        &self.rows
    }

    pub fn push(&mut self, coeffs: Vec<S>, rel: Rel, rhs: S) -> Result<(), Error> {
        if coeffs.len() != self.num_vars {
            return Err(Error::MalformedSystem(format!(
                "row has {} coefficients, system has {} variables",
                coeffs.len(),
                self.num_vars
            )));
        }
        self.rows.push(Row { coeffs, rel, rhs });
        Ok(())
    }

    /// Exact substitution check of a candidate witness.
    pub fn check(&self, witness: &[S]) -> bool {
        if witness.len() != self.num_vars {
            return false;
        }
        self.rows.iter().all(|row| {
            let lhs = row
                .coeffs
                .iter()
                .zip(witness)
                .fold(S::zero(), |acc, (c, x)| acc + c.clone() * x.clone());
            match row.rel {
                Rel::Le => lhs <= row.rhs,
                Rel::Eq => lhs == row.rhs,
                Rel::Ge => lhs >= row.rhs,
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility<S> {
    Feasible(Vec<S>),
    Infeasible,
}

impl<S> Feasibility<S> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[S]> {
        match self {
            Feasibility::Feasible(w) => Some(w),
            Feasibility::Infeasible => None,
        }
    }
}

/// Decide feasibility of `sys`, returning an exact witness when one exists.
pub fn lp_feasible<S: Scalar>(sys: &LinearSystem<S>) -> Feasibility<S> {
    let n = sys.num_vars();

    // Preprocess: harvest sign restrictions from singleton rows of the form
    // a*x_j >= 0 (a > 0) or a*x_j <= 0 (a < 0); reject or drop trivial rows.
    let mut nonneg = vec![false; n];
    let mut active: Vec<&Row<S>> = Vec::new();
    for row in sys.rows() {
        let nz: Vec<usize> = (0..n).filter(|&j| !row.coeffs[j].is_zero()).collect();
        if nz.is_empty() {
            let sat = match row.rel {
                Rel::Le => S::zero() <= row.rhs,
                Rel::Eq => row.rhs.is_zero(),
                Rel::Ge => S::zero() >= row.rhs,
            };
            if !sat {
                return Feasibility::Infeasible;
            }
            continue;
        }
        if nz.len() == 1 && row.rhs.is_zero() {
            let j = nz[0];
            let a = &row.coeffs[j];
            match row.rel {
                Rel::Ge if a.is_positive() => {
                    nonneg[j] = true;
                    continue;
                }
                Rel::Le if a.is_negative() => {
                    nonneg[j] = true;
                    continue;
                }
                _ => {}
            }
        }
        active.push(row);
    }

    // Column layout: unrestricted variables split into a difference of two
    // nonnegative columns.
    let mut pos_col = vec![0usize; n];
    let mut neg_col = vec![usize::MAX; n];
    let mut next = 0usize;
    for j in 0..n {
        pos_col[j] = next;
        next += 1;
        if !nonneg[j] {
            neg_col[j] = next;
            next += 1;
        }
    }
    let structural = next;

    let m = active.len();
    if m == 0 {
        return Feasibility::Feasible(vec![S::zero(); n]);
    }

    // One slack per Le row, one surplus per Ge row, artificials for Ge/Eq.
    let mut slack_of = vec![usize::MAX; m];
    let mut artificial_of = vec![usize::MAX; m];
    let mut col = structural;
    for (i, row) in active.iter().enumerate() {
        // Orient so the right-hand side is nonnegative.
        let flip = row.rhs.is_negative();
        let rel = match (row.rel, flip) {
            (Rel::Eq, _) => Rel::Eq,
            (Rel::Le, false) | (Rel::Ge, true) => Rel::Le,
            (Rel::Ge, false) | (Rel::Le, true) => Rel::Ge,
        };
        match rel {
            Rel::Le => {
                slack_of[i] = col;
                col += 1;
            }
            Rel::Ge => {
                slack_of[i] = col;
                col += 1;
                artificial_of[i] = usize::MAX - 1; // placeholder, assigned below
            }
            Rel::Eq => {
                artificial_of[i] = usize::MAX - 1;
            }
        }
    }
    let first_artificial = col;
    for a in artificial_of.iter_mut() {
        if *a == usize::MAX - 1 {
            *a = col;
            col += 1;
        }
    }
    let total = col;

    // Dense tableau rows: coefficients then rhs. Rows are rescaled by a
    // positive factor into canonical small form; relations are unaffected.
    let mut tab: Vec<Vec<S>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    for (i, row) in active.iter().enumerate() {
        let mut scaled: Vec<S> = row.coeffs.clone();
        scaled.push(row.rhs.clone());
        let _ = S::canonicalize_direction(&mut scaled);
        let rhs = scaled.pop().unwrap();
        let mut t = vec![S::zero(); total + 1];
        let flip = rhs.is_negative();
        let s = if flip { -S::one() } else { S::one() };
        for j in 0..n {
            let c = scaled[j].clone() * s.clone();
            if c.is_zero() {
                continue;
            }
            t[pos_col[j]] = c.clone();
            if neg_col[j] != usize::MAX {
                t[neg_col[j]] = -c;
            }
        }
        t[total] = rhs * s.clone();
        let rel = match (row.rel, flip) {
            (Rel::Eq, _) => Rel::Eq,
            (Rel::Le, false) | (Rel::Ge, true) => Rel::Le,
            (Rel::Ge, false) | (Rel::Le, true) => Rel::Ge,
        };
        match rel {
            Rel::Le => {
                t[slack_of[i]] = S::one();
                basis.push(slack_of[i]);
            }
            Rel::Ge => {
                t[slack_of[i]] = -S::one();
                t[artificial_of[i]] = S::one();
                basis.push(artificial_of[i]);
            }
            Rel::Eq => {
                t[artificial_of[i]] = S::one();
                basis.push(artificial_of[i]);
            }
        }
        tab.push(t);
    }

    // Phase-1 objective: minimize the sum of artificials. The z-row stores
    // reduced costs with -objective in the rhs cell.
    let mut zrow = vec![S::zero(); total + 1];
    for j in first_artificial..total {
        zrow[j] = S::one();
    }
    for (i, row) in tab.iter().enumerate() {
        if basis[i] >= first_artificial {
            for j in 0..=total {
                let v = row[j].clone();
                if !v.is_zero() {
                    zrow[j] = zrow[j].clone() - v;
                }
            }
        }
    }

    let mut dropped = vec![false; total];
    // Most-negative entering rule for speed; after a run of non-improving
    // pivots switch permanently to Bland's rule, which cannot cycle. Both
    // rules are deterministic, so the outcome is too.
    let mut bland = false;
    let mut stall = 0u32;
    const STALL_LIMIT: u32 = 24;
    loop {
        let mut entering = None;
        if bland {
            for (j, z) in zrow.iter().enumerate().take(total) {
                if !dropped[j] && z.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
        } else {
            let mut best: Option<(usize, &S)> = None;
            for (j, z) in zrow.iter().enumerate().take(total) {
                if !dropped[j] && z.is_negative() {
                    match &best {
                        Some((_, bz)) if *bz <= z => {}
                        _ => best = Some((j, z)),
                    }
                }
            }
            entering = best.map(|(j, _)| j);
        }
        let Some(e) = entering else {
            break;
        };

        // Ratio test; ties resolved by the smallest basic variable index.
        let mut leave: Option<(usize, S)> = None;
        for i in 0..m {
            if tab[i][e].is_positive() {
                let ratio = tab[i][total].clone() / tab[i][e].clone();
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let (r, step) = leave.expect("phase-1 objective is bounded below");
        if !bland {
            if step.is_zero() {
                stall += 1;
                if stall >= STALL_LIMIT {
                    bland = true;
                }
            } else {
                stall = 0;
            }
        }

        // Pivot at (r, e).
        let pivot = tab[r][e].clone();
        for v in tab[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / pivot.clone();
            }
        }
        let pivot_row = tab[r].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let factor = row[e].clone();
            for (j, v) in row.iter_mut().enumerate() {
                if !pivot_row[j].is_zero() {
                    *v = v.clone() - factor.clone() * pivot_row[j].clone();
                }
            }
        }
        if !zrow[e].is_zero() {
            let factor = zrow[e].clone();
            for (j, v) in zrow.iter_mut().enumerate() {
                if !pivot_row[j].is_zero() {
                    *v = v.clone() - factor.clone() * pivot_row[j].clone();
                }
            }
        }

        // An artificial that leaves the basis never re-enters.
        if basis[r] >= first_artificial {
            dropped[basis[r]] = true;
        }
        basis[r] = e;
    }

    // Feasible iff the artificial objective vanished (z-row rhs holds -z).
    if !zrow[total].is_zero() {
        return Feasibility::Infeasible;
    }

    let mut values = vec![S::zero(); total];
    for i in 0..m {
        values[basis[i]] = tab[i][total].clone();
    }
    let mut witness = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = values[pos_col[j]].clone();
        if neg_col[j] != usize::MAX {
            v = v - values[neg_col[j]].clone();
        }
        witness.push(v);
    }
    debug_assert!(sys.check(&witness), "simplex witness failed substitution");
    Feasibility::Feasible(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn sys(num_vars: usize, rows: &[(&[i64], Rel, i64)]) -> LinearSystem<BigRational> {
        let mut s = LinearSystem::new(num_vars);
        for (coeffs, rel, rhs) in rows {
            s.push(
                coeffs.iter().map(|&c| rat_int(c)).collect(),
                *rel,
                rat_int(*rhs),
            )
            .unwrap();
        }
        s
    }

    #[test]
    fn contradictory_bounds_infeasible() {
        let s = sys(1, &[(&[1], Rel::Ge, 1), (&[1], Rel::Le, 0)]);
        assert_eq!(lp_feasible(&s), Feasibility::Infeasible);
    }

    #[test]
    fn simplex_face_feasible_with_checked_witness() {
        let s = sys(
            2,
            &[
                (&[1, 1], Rel::Eq, 1),
                (&[1, 0], Rel::Ge, 0),
                (&[0, 1], Rel::Ge, 0),
            ],
        );
        match lp_feasible(&s) {
            Feasibility::Feasible(w) => assert!(s.check(&w)),
            Feasibility::Infeasible => panic!("unit simplex is nonempty"),
        }
    }

    #[test]
    fn equality_with_negative_rhs() {
        let s = sys(2, &[(&[1, -1], Rel::Eq, -3), (&[1, 1], Rel::Ge, 5)]);
        match lp_feasible(&s) {
            Feasibility::Feasible(w) => assert!(s.check(&w)),
            Feasibility::Infeasible => panic!("feasible system"),
        }
    }

    #[test]
    fn row_length_is_validated() {
        let mut s = LinearSystem::<BigRational>::new(2);
        assert!(s.push(vec![rat_int(1)], Rel::Le, rat_int(0)).is_err());
    }

    #[test]
    fn zero_row_handling() {
        let s = sys(1, &[(&[0], Rel::Ge, 1)]);
        assert_eq!(lp_feasible(&s), Feasibility::Infeasible);
        let s = sys(1, &[(&[0], Rel::Le, 1)]);
        assert!(lp_feasible(&s).is_feasible());
    }

    #[test]
    fn determinism_across_threads() {
        let s = sys(
            3,
            &[
                (&[2, 1, -1], Rel::Le, 7),
                (&[1, -3, 2], Rel::Ge, -4),
                (&[1, 1, 1], Rel::Eq, 3),
                (&[1, 0, 0], Rel::Ge, 0),
            ],
        );
        let base = lp_feasible(&s);
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let s = s.clone();
                std::thread::spawn(move || lp_feasible(&s))
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), base);
        }
    }

    #[test]
    fn fractional_witness_is_exact() {
        // 3x = 1 has the unique solution 1/3; no rounding allowed.
        let s = sys(1, &[(&[3], Rel::Eq, 1)]);
        match lp_feasible(&s) {
            Feasibility::Feasible(w) => assert_eq!(w[0], rat(1, 3)),
            Feasibility::Infeasible => panic!(),
        }
    }

    proptest! {
        // Completeness on boxes: a product of intervals is feasible exactly
        // when every interval is nonempty.
        #[test]
        fn boxes(bounds in prop::collection::vec((-20i64..20, -20i64..20), 1..5)) {
            let n = bounds.len();
            let mut s = LinearSystem::<BigRational>::new(n);
            let mut nonempty = true;
            for (j, (a, b)) in bounds.iter().enumerate() {
                let mut lo = vec![rat_int(0); n];
                lo[j] = rat_int(1);
                s.push(lo.clone(), Rel::Ge, rat_int(*a)).unwrap();
                s.push(lo, Rel::Le, rat_int(*b)).unwrap();
                nonempty &= a <= b;
            }
            let res = lp_feasible(&s);
            prop_assert_eq!(res.is_feasible(), nonempty);
            if let Feasibility::Feasible(w) = res {
                prop_assert!(s.check(&w));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        // Soundness: any witness returned satisfies every constraint exactly.
        #[test]
        fn witness_soundness(rows in prop::collection::vec(
            (prop::collection::vec(-3i64..=3, 3), 0u8..3, -5i64..=5), 1..6)) {
            let mut s = LinearSystem::<BigRational>::new(3);
            for (coeffs, rel, rhs) in rows {
                let rel = match rel { 0 => Rel::Le, 1 => Rel::Eq, _ => Rel::Ge };
                s.push(coeffs.into_iter().map(rat_int).collect(), rel, rat_int(rhs)).unwrap();
            }
            if let Feasibility::Feasible(w) = lp_feasible(&s) {
                prop_assert!(s.check(&w));
            }
        }
    }
}
