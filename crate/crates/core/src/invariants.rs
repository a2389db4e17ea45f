//! Graded Betti numbers and dimension functions of presentations and of the
//! blocks of a diagonalization.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagonalize::{Diagonalization, IndexBlock};
use crate::error::{Error, Result};
use crate::f2::{rank, F2Matrix};
use crate::graded_matrix::GradedMatrix;
use crate::grades::Grade;
use crate::presentation::{kernel_gens, KernelMode};

/// Multiplicities `beta[j][u]`; absent keys are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    pub entries: BTreeMap<usize, BTreeMap<Grade, usize>>,
    pub max_degree_computed: usize,
}

impl BettiTable {
    pub fn add(&mut self, j: usize, u: Grade) {
        *self.entries.entry(j).or_default().entry(u).or_insert(0) += 1;
    }

    pub fn get(&self, j: usize, u: &Grade) -> usize {
        self.entries
            .get(&j)
            .and_then(|m| m.get(u))
            .copied()
            .unwrap_or(0)
    }

    /// Grades of degree `j`, repeated by multiplicity, in lexicographic order.
    pub fn grades(&self, j: usize) -> Vec<Grade> {
        self.entries
            .get(&j)
            .map(|m| {
                m.iter()
                    .flat_map(|(g, &k)| std::iter::repeat_n(g.clone(), k))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Entrywise sum.
    pub fn merge(&mut self, other: &BettiTable) {
        for (&j, m) in &other.entries {
            for (g, &k) in m {
                *self.entries.entry(j).or_default().entry(g.clone()).or_insert(0) += k;
            }
        }
        self.max_degree_computed = self.max_degree_computed.min(other.max_degree_computed);
    }

    /// `sum over v <= u of sum_j (-1)^j beta[j][v]`.
    pub fn euler_at(&self, u: &Grade) -> i64 {
        let mut s = 0i64;
        for (&j, m) in &self.entries {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            for (g, &k) in m {
                if g.dominated_by(u) {
                    s += sign * k as i64;
                }
            }
        }
        s
    }
}

/// Closed integer box `lo..=hi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradeBox {
    pub lo: Grade,
    pub hi: Grade,
}

impl GradeBox {
    pub fn new(lo: Grade, hi: Grade) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: lo.dim(),
                found: hi.dim(),
            });
        }
        if !lo.dominated_by(&hi) {
            return Err(Error::Input(format!("empty box {lo}..{hi}")));
        }
        Ok(GradeBox { lo, hi })
    }

    /// From the componentwise minimum of `grades` to their maximum plus one.
    pub fn around(grades: &[Grade], d: usize) -> Self {
        if grades.is_empty() {
            return GradeBox {
                lo: Grade::zero(d),
                hi: Grade::new(vec![1; d]),
            };
        }
        let lo = grades.iter().skip(1).fold(grades[0].clone(), |a, g| a.meet(g));
        let hi = grades.iter().skip(1).fold(grades[0].clone(), |a, g| a.join(g));
        let hi = Grade::new(hi.coords().iter().map(|c| c + 1).collect());
        GradeBox { lo, hi }
    }

    pub fn d(&self) -> usize {
        self.lo.dim()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.lo
            .coords()
            .iter()
            .zip(self.hi.coords())
            .map(|(a, b)| (b - a + 1) as usize)
            .collect()
    }

    pub fn contains(&self, g: &Grade) -> bool {
        self.lo.dominated_by(g) && g.dominated_by(&self.hi)
    }

    /// All grades of the box in row-major order (last coordinate fastest).
    pub fn points(&self) -> Vec<Grade> {
        let shape = self.shape();
        let total: usize = shape.iter().product();
        let mut out = Vec::with_capacity(total);
        for mut flat in 0..total {
            let mut c = vec![0i64; shape.len()];
            for k in (0..shape.len()).rev() {
                c[k] = self.lo.coords()[k] + (flat % shape[k]) as i64;
                flat /= shape[k];
            }
            out.push(Grade::new(c));
        }
        out
    }
}

/// Dense dimension function over a box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimFunction {
    pub origin: Grade,
    pub shape: Vec<usize>,
    pub values: Vec<usize>,
}

impl DimFunction {
    pub fn at(&self, u: &Grade) -> Option<usize> {
        let mut flat = 0usize;
        for k in 0..self.shape.len() {
            let off = u.coords()[k] - self.origin.coords()[k];
            if off < 0 || off as usize >= self.shape[k] {
                return None;
            }
            flat = flat * self.shape[k] + off as usize;
        }
        Some(self.values[flat])
    }
}

/// `#{rows <= u} - rank(columns <= u)`.
pub fn dim_at(m: &GradedMatrix, u: &Grade) -> usize {
    let cols: Vec<usize> = (0..m.n_cols())
        .filter(|&j| m.col_grade(j).dominated_by(u))
        .collect();
    let rows = (0..m.n_rows())
        .filter(|&i| m.row_grade(i).dominated_by(u))
        .count();
    let sub = F2Matrix::from_columns(m.n_rows(), cols.iter().map(|&j| m.matrix().col(j).clone()).collect())
        .expect("columns of m");
    rows - rank(&sub)
}

/// Dimension of the cokernel of `m` at every grade of `bx`.
pub fn dimension_function(m: &GradedMatrix, bx: &GradeBox) -> Result<DimFunction> {
    if bx.d() != m.d() {
        return Err(Error::DimensionMismatch {
            expected: m.d(),
            found: bx.d(),
        });
    }
    if let Some(g) = m
        .row_grades()
        .iter()
        .chain(m.col_grades())
        .find(|g| !bx.contains(g))
    {
        return Err(Error::Input(format!(
            "box {}..{} does not contain grade {g}",
            bx.lo, bx.hi
        )));
    }
    let values = bx.points().par_iter().map(|u| dim_at(m, u)).collect();
    Ok(DimFunction {
        origin: bx.lo.clone(),
        shape: bx.shape(),
        values,
    })
}

/// `beta_0` and `beta_1` from the row and column grades of a presentation
/// without unit entries.
pub fn betti01(m: &GradedMatrix) -> Result<BettiTable> {
    if let Some((i, j)) = m
        .matrix()
        .entries()
        .into_iter()
        .find(|&(i, j)| m.row_grade(i) == m.col_grade(j))
    {
        return Err(Error::Input(format!(
            "presentation is not minimized: unit entry at ({i}, {j})"
        )));
    }
    let mut t = BettiTable {
        max_degree_computed: 1,
        ..Default::default()
    };
    for g in m.row_grades() {
        t.add(0, g.clone());
    }
    for g in m.col_grades() {
        t.add(1, g.clone());
    }
    Ok(t)
}

/// Adds `beta_2`, the grades of a kernel basis of the relation matrix.
pub fn betti_higher_2param(m: &GradedMatrix, table: &mut BettiTable) -> Result<()> {
    if m.d() != 2 {
        return Err(Error::Unsupported(format!(
            "second syzygies are only computed for 2 parameters, got {}",
            m.d()
        )));
    }
    for k in kernel_gens(m, KernelMode::Basis2Param)? {
        table.add(2, k.grade);
    }
    table.max_degree_computed = 2;
    Ok(())
}

/// `beta_0`, `beta_1` and, for two parameters, `beta_2`.
pub fn betti_table(m: &GradedMatrix) -> Result<BettiTable> {
    let mut t = betti01(m)?;
    if m.d() == 2 {
        betti_higher_2param(m, &mut t)?;
    }
    Ok(t)
}

/// The presentation of one block of a diagonalization.
pub fn block_matrix(diag: &Diagonalization, block: &IndexBlock) -> GradedMatrix {
    diag.matrix.select(&block.rows, &block.cols)
}

/// The diagonalized matrix without its zero-column blocks.
pub fn summand_matrix(diag: &Diagonalization) -> GradedMatrix {
    let zero = diag.blocks.zero_columns();
    let cols: Vec<usize> = (0..diag.matrix.n_cols())
        .filter(|j| !zero.contains(j))
        .collect();
    let rows: Vec<usize> = (0..diag.matrix.n_rows()).collect();
    diag.matrix.select(&rows, &cols)
}

/// One Betti table per summand block, in block order.
pub fn persistent_betti(diag: &Diagonalization) -> Result<Vec<BettiTable>> {
    diag.blocks
        .summands()
        .map(|b| betti_table(&block_matrix(diag, b)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagonalize::{tot_diagonalize, DiagonalizeOptions};

    fn g(c: &[i64]) -> Grade {
        Grade::new(c.to_vec())
    }

    fn working_example() -> GradedMatrix {
        GradedMatrix::new(
            F2Matrix::from_rows(&[vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]),
            vec![g(&[0, 1]), g(&[1, 0]), g(&[1, 1])],
            vec![g(&[1, 1]), g(&[1, 2]), g(&[2, 1])],
        )
        .unwrap()
    }

    #[test]
    fn box_points_are_row_major() {
        let b = GradeBox::new(g(&[0, 0]), g(&[1, 2])).unwrap();
        assert_eq!(b.shape(), vec![2, 3]);
        let p = b.points();
        assert_eq!(p[0], g(&[0, 0]));
        assert_eq!(p[1], g(&[0, 1]));
        assert_eq!(p[3], g(&[1, 0]));
        let around = GradeBox::around(&[g(&[0, 1]), g(&[2, 1])], 2);
        assert_eq!(around, GradeBox::new(g(&[0, 1]), g(&[3, 2])).unwrap());
    }

    #[test]
    fn working_example_tables() {
        let d = tot_diagonalize(&working_example(), DiagonalizeOptions::default()).unwrap();
        let tables = persistent_betti(&d).unwrap();
        assert_eq!(tables.len(), 2);
        assert_eq!(tables[0].grades(0), vec![g(&[0, 1]), g(&[1, 0])]);
        assert_eq!(tables[0].grades(1), vec![g(&[1, 1])]);
        assert!(tables[0].grades(2).is_empty());
        assert_eq!(tables[1].grades(0), vec![g(&[1, 1])]);
        assert_eq!(tables[1].grades(1), vec![g(&[1, 2]), g(&[2, 1])]);
        assert_eq!(tables[1].grades(2), vec![g(&[2, 2])]);
    }

    #[test]
    fn working_example_dimensions() {
        let a = working_example();
        let bx = GradeBox::new(g(&[0, 0]), g(&[3, 3])).unwrap();
        let dm = dimension_function(&a, &bx).unwrap();
        assert_eq!(dm.at(&g(&[0, 0])), Some(0));
        assert_eq!(dm.at(&g(&[1, 1])), Some(2));
        assert_eq!(dm.at(&g(&[2, 2])), Some(1));
        assert_eq!(dm.at(&g(&[0, 1])), Some(1));
        assert_eq!(dm.at(&g(&[4, 0])), None);
    }

    #[test]
    fn box_must_cover_grades() {
        let bx = GradeBox::new(g(&[0, 0]), g(&[1, 1])).unwrap();
        assert!(matches!(dimension_function(&working_example(), &bx), Err(Error::Input(_))));
    }

    #[test]
    fn unit_entries_are_refused() {
        let m = GradedMatrix::new(F2Matrix::from_rows(&[vec![1]]), vec![g(&[1, 1])], vec![g(&[1, 1])]).unwrap();
        assert!(betti01(&m).is_err());
    }

    #[test]
    fn free_block_has_no_relations() {
        let m = GradedMatrix::new(F2Matrix::zeros(1, 0), vec![g(&[2, 2])], vec![]).unwrap();
        let t = betti_table(&m).unwrap();
        assert_eq!(t.grades(0), vec![g(&[2, 2])]);
        assert!(t.grades(1).is_empty() && t.grades(2).is_empty());
    }

    #[test]
    fn higher_betti_needs_two_parameters() {
        let m = GradedMatrix::new(F2Matrix::zeros(1, 0), vec![g(&[0, 0, 0])], vec![]).unwrap();
        let mut t = betti01(&m).unwrap();
        assert!(matches!(betti_higher_2param(&m, &mut t), Err(Error::Unsupported(_))));
        assert_eq!(betti_table(&m).unwrap().max_degree_computed, 1);
    }
}
