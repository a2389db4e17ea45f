//! 1-critical simplicial filtrations over `Z^d` and their graded boundary
//! matrices.
//!
//! Text format, one simplex per line in id order:
//!
//! ```text
//! mpfilt 1
//! params 2
//! s 0 1 :          # vertex 0
//! s 1 0 :          # vertex 1
//! s 1 1 : 0 1      # edge between them
//! ```
//!
//! A simplex lists the ids of its facets; vertices list none.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::f2::F2Matrix;
use crate::graded_matrix::GradedMatrix;
use crate::grades::Grade;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplex {
    pub id: usize,
    pub grade: Grade,
    pub facets: Vec<usize>,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    d: usize,
    simplices: Vec<Simplex>,
}

impl Filtration {
    /// Validates and builds a filtration from `(grade, facets)` pairs given in
    /// id order.
    pub fn new(d: usize, simplices: Vec<(Grade, Vec<usize>)>) -> Result<Self> {
        let mut b = Builder::new(d)?;
        for (k, (grade, facets)) in simplices.into_iter().enumerate() {
            b.push(grade, facets).map_err(|e| match e {
                Error::Input(message) => Error::Input(format!("simplex {k}: {message}")),
                other => other,
            })?;
        }
        Ok(b.finish())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.dim).max()
    }

    /// Ids of the simplices of dimension `p`, in id order.
    pub fn ids_of_dim(&self, p: usize) -> Vec<usize> {
        self.simplices
            .iter()
            .filter(|s| s.dim == p)
            .map(|s| s.id)
            .collect()
    }

    /// The graded boundary matrix from `p`-chains to `(p-1)`-chains. Rows and
    /// columns follow id order and are labelled `s<id>`.
    pub fn boundary_matrix(&self, p: usize) -> Result<GradedMatrix> {
        if p == 0 {
            return Err(Error::Input("boundary matrices start at p = 1".into()));
        }
        let rows = self.ids_of_dim(p - 1);
        let cols = self.ids_of_dim(p);
        let mut pos = vec![usize::MAX; self.simplices.len()];
        for (i, &id) in rows.iter().enumerate() {
            pos[id] = i;
        }
        let mut mat = F2Matrix::zeros(rows.len(), cols.len());
        for (j, &id) in cols.iter().enumerate() {
            for &f in &self.simplices[id].facets {
                mat.set(pos[f], j, true);
            }
        }
        let grade_of = |ids: &[usize]| -> Vec<Grade> {
            ids.iter().map(|&i| self.simplices[i].grade.clone()).collect()
        };
        GradedMatrix::with_dim(self.d, mat, grade_of(&rows), grade_of(&cols))?.with_labels(
            rows.iter().map(|i| format!("s{i}")).collect(),
            cols.iter().map(|i| format!("s{i}")).collect(),
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("mpfilt 1\nparams {}\n", self.d);
        for s in &self.simplices {
            out.push('s');
            for c in s.grade.coords() {
                out.push_str(&format!(" {c}"));
            }
            out.push_str(" :");
            for f in &s.facets {
                out.push_str(&format!(" {f}"));
            }
            out.push('\n');
        }
        out
    }
}

struct Builder {
    d: usize,
    simplices: Vec<Simplex>,
    seen: HashSet<Vec<usize>>,
}

impl Builder {
    fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Input("a filtration needs at least one parameter".into()));
        }
        Ok(Builder {
            d,
            simplices: Vec::new(),
            seen: HashSet::new(),
        })
    }

    fn push(&mut self, grade: Grade, mut facets: Vec<usize>) -> Result<()> {
        let id = self.simplices.len();
        if grade.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: grade.dim(),
            });
        }
        facets.sort_unstable();
        if facets.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("repeated facet".into()));
        }
        if let Some(&f) = facets.iter().find(|&&f| f >= id) {
            return Err(Error::Input(format!(
                "facet {f} is not an earlier simplex"
            )));
        }
        let dim = if facets.is_empty() {
            0
        } else {
            let fd = self.simplices[facets[0]].dim;
            if facets.iter().any(|&f| self.simplices[f].dim != fd) {
                return Err(Error::Input("facets have different dimensions".into()));
            }
            if facets.len() != fd + 2 {
                return Err(Error::Input(format!(
                    "a {}-simplex needs {} facets, found {}",
                    fd + 1,
                    fd + 2,
                    facets.len()
                )));
            }
            fd + 1
        };
        for &f in &facets {
            let fg = &self.simplices[f].grade;
            if !fg.dominated_by(&grade) {
                return Err(Error::Input(format!(
                    "facet {f} enters at {fg}, after the simplex itself at {grade}"
                )));
            }
        }
        if dim >= 2 {
            // the facets must close up: every ridge is shared by two facets
            let mut parity: Vec<usize> = Vec::new();
            for &f in &facets {
                for &r in &self.simplices[f].facets {
                    match parity.iter().position(|&x| x == r) {
                        Some(p) => {
                            parity.swap_remove(p);
                        }
                        None => parity.push(r),
                    }
                }
            }
            if !parity.is_empty() {
                return Err(Error::Input("facets do not bound a simplex".into()));
            }
        }
        if dim > 0 && !self.seen.insert(facets.clone()) {
            return Err(Error::Input(
                "simplex declared twice; multi-critical input must first be converted to a 1-critical one (e.g. with a mapping telescope)"
                    .into(),
            ));
        }
        self.simplices.push(Simplex {
            id,
            grade,
            facets,
            dim,
        });
        Ok(())
    }

    fn finish(self) -> Filtration {
        Filtration {
            d: self.d,
            simplices: self.simplices,
        }
    }
}

/// Splits off a `#` comment and returns the whitespace tokens of a line.
pub(crate) fn tokens(line: &str) -> Vec<&str> {
    let body = match line.find('#') {
        Some(p) => &line[..p],
        None => line,
    };
    body.split_whitespace().collect()
}

pub(crate) fn parse_int<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} '{tok}'"),
    })
}

/// Content lines as `(line number, tokens)`, skipping blanks and comments.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, tokens(l)))
        .filter(|(_, t)| !t.is_empty())
}

/// Reads the `<magic> 1` / `params <d>` preamble.
pub(crate) fn parse_header<'a, I>(lines: &mut I, magic: &str) -> Result<(usize, usize)>
where
    I: Iterator<Item = (usize, Vec<&'a str>)>,
{
    let (ln, t) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: format!("empty input, expected '{magic} 1'"),
    })?;
    if t != [magic, "1"] {
        return Err(Error::Parse {
            line: ln,
            message: format!("expected header '{magic} 1', found '{}'", t.join(" ")),
        });
    }
    let (ln, t) = lines.next().ok_or(Error::Parse {
        line: ln + 1,
        message: "missing 'params <d>' line".into(),
    })?;
    if t.len() != 2 || t[0] != "params" {
        return Err(Error::Parse {
            line: ln,
            message: "expected 'params <d>'".into(),
        });
    }
    let d: usize = parse_int(t[1], ln, "parameter count")?;
    if d == 0 {
        return Err(Error::Parse {
            line: ln,
            message: "parameter count must be at least 1".into(),
        });
    }
    Ok((ln, d))
}

pub(crate) fn parse_grade(toks: &[&str], d: usize, line: usize) -> Result<Grade> {
    if toks.len() != d {
        return Err(Error::Parse {
            line,
            message: format!("expected {d} grade coordinates, found {}", toks.len()),
        });
    }
    toks.iter()
        .map(|t| parse_int::<i64>(t, line, "grade coordinate"))
        .collect::<Result<Vec<_>>>()
        .map(Grade::new)
}

pub fn parse_filtration(text: &str) -> Result<Filtration> {
    let mut lines = content_lines(text);
    let (_, d) = parse_header(&mut lines, "mpfilt")?;
    let mut b = Builder::new(d)?;
    for (ln, t) in lines {
        if t[0] != "s" {
            return Err(Error::Parse {
                line: ln,
                message: format!("expected a simplex line 's ...', found '{}'", t[0]),
            });
        }
        let colon = t.iter().position(|&x| x == ":").ok_or(Error::Parse {
            line: ln,
            message: "missing ':' between grade and facets".into(),
        })?;
        let grade = parse_grade(&t[1..colon], d, ln)?;
        let facets = t[colon + 1..]
            .iter()
            .map(|x| parse_int::<usize>(x, ln, "facet id"))
            .collect::<Result<Vec<_>>>()?;
        b.push(grade, facets).map_err(|e| Error::Parse {
            line: ln,
            message: match e {
                Error::Input(m) => m,
                other => other.to_string(),
            },
        })?;
    }
    Ok(b.finish())
}
