#![allow(dead_code)]

use mpdecomp::{F2Matrix, Filtration, Grade, GradeOrderContext, GradedMatrix};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn g(c: &[i64]) -> Grade {
    Grade::new(c.to_vec())
}

pub fn data(name: &str) -> String {
    let path = format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn data_path(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn random_grade<R: Rng>(rng: &mut R, d: usize, max: i64) -> Grade {
    Grade::new((0..d).map(|_| rng.gen_range(0..=max)).collect())
}

fn distinct_grades<R: Rng>(rng: &mut R, k: usize, max: i64) -> Vec<Grade> {
    let mut all: Vec<Grade> = Vec::new();
    for a in 0..=max {
        for b in 0..=max {
            all.push(g(&[a, b]));
        }
    }
    all.shuffle(rng);
    all.truncate(k);
    all
}

/// Random homogeneous matrix with grades in `{0..=max}^2`, columns sorted.
/// With `distinct`, row grades are pairwise distinct and so are column
/// grades.
pub fn random_graded<R: Rng>(rng: &mut R, n: usize, m: usize, max: i64, distinct: bool, density: f64) -> GradedMatrix {
    let (rows, cols) = if distinct {
        (distinct_grades(rng, n, max), distinct_grades(rng, m, max))
    } else {
        (
            (0..n).map(|_| random_grade(rng, 2, max)).collect(),
            (0..m).map(|_| random_grade(rng, 2, max)).collect::<Vec<_>>(),
        )
    };
    let mut mat = F2Matrix::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            if rows[i].dominated_by(&cols[j]) && rng.gen_bool(density) {
                mat.set(i, j, true);
            }
        }
    }
    let a = GradedMatrix::with_dim(2, mat, rows, cols).unwrap();
    a.sorted(&GradeOrderContext::new(2)).0
}

/// Random 1-critical filtration of dimension <= 2 in `d` parameters.
pub fn random_filtration<R: Rng>(rng: &mut R, d: usize, n_vertices: usize, max: i64) -> Filtration {
    let mut simplices: Vec<(Grade, Vec<usize>)> = Vec::new();
    for _ in 0..n_vertices {
        simplices.push((random_grade(rng, d, max), vec![]));
    }
    let bump = |rng: &mut R, base: Grade| -> Grade {
        Grade::new(
            base.coords()
                .iter()
                .map(|c| c + i64::from(rng.gen_bool(0.3)))
                .collect(),
        )
    };
    let mut edge_of = std::collections::HashMap::new();
    for a in 0..n_vertices {
        for b in (a + 1)..n_vertices {
            if rng.gen_bool(0.5) {
                let base = simplices[a].0.join(&simplices[b].0);
                let gr = bump(rng, base);
                edge_of.insert((a, b), simplices.len());
                simplices.push((gr, vec![a, b]));
            }
        }
    }
    for a in 0..n_vertices {
        for b in (a + 1)..n_vertices {
            for c in (b + 1)..n_vertices {
                let (Some(&x), Some(&y), Some(&z)) =
                    (edge_of.get(&(a, b)), edge_of.get(&(b, c)), edge_of.get(&(a, c)))
                else {
                    continue;
                };
                if rng.gen_bool(0.5) {
                    let base = simplices[x].0.join(&simplices[y].0).join(&simplices[z].0);
                    let gr = bump(rng, base);
                    simplices.push((gr, vec![x, y, z]));
                }
            }
        }
    }
    Filtration::new(d, simplices).unwrap()
}

/// Rank of a set of bit rows by row-major elimination.
pub fn rank_of(vectors: &[Vec<bool>]) -> usize {
    let mut rows: Vec<Vec<bool>> = vectors.to_vec();
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Nullity of the columns of `m` with grade `<= u`.
pub fn nullity_at(m: &GradedMatrix, u: &Grade) -> usize {
    let cols: Vec<Vec<bool>> = (0..m.n_cols())
        .filter(|&j| m.col_grade(j).dominated_by(u))
        .map(|j| (0..m.n_rows()).map(|i| m.get(i, j)).collect())
        .collect();
    cols.len() - rank_of(&cols)
}

/// All grades of the closed box `lo..=hi` in two or more parameters.
pub fn box_points(lo: &[i64], hi: &[i64]) -> Vec<Grade> {
    let mut out = vec![Vec::new()];
    for k in 0..lo.len() {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (lo[k]..=hi[k]).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(Grade::new).collect()
}
