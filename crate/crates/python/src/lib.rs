//! Python bindings for `mpdecomp`.

use mpdecomp::cli::{build_presentation, prepare, Construction, Input};
use mpdecomp::invariants::{block_matrix, GradeBox};
use mpdecomp::oracle::DEFAULT_BUDGET;
use mpdecomp::{
    BettiTable, DiagonalizeOptions, Error, F2Matrix, Filtration, Grade, GradedMatrix, IndexBlock, OpKind,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyIndexError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

create_exception!(pympdecomp, TiedGradesError, PyValueError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::TiedGrades { .. } => TiedGradesError::new_err(e.to_string()),
        Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn grades(v: Vec<Vec<i64>>) -> Vec<Grade> {
    v.into_iter().map(Grade::new).collect()
}

fn coords(gs: &[Grade]) -> Vec<Vec<i64>> {
    gs.iter().map(|g| g.coords().to_vec()).collect()
}

fn grade_key<'py>(py: Python<'py>, g: &Grade) -> PyResult<Bound<'py, PyTuple>> {
    PyTuple::new(py, g.coords())
}

fn betti_dict<'py>(py: Python<'py>, t: &BettiTable) -> PyResult<Bound<'py, PyDict>> {
    let out = PyDict::new(py);
    for j in 0..=t.max_degree_computed {
        let row = PyDict::new(py);
        if let Some(entries) = t.entries.get(&j) {
            for (g, n) in entries {
                row.set_item(grade_key(py, g)?, *n)?;
            }
        }
        out.set_item(j, row)?;
    }
    Ok(out)
}

fn grade_box(m: &GradedMatrix, lo: Option<Vec<i64>>, hi: Option<Vec<i64>>) -> PyResult<GradeBox> {
    match (lo, hi) {
        (Some(lo), Some(hi)) => GradeBox::new(Grade::new(lo), Grade::new(hi)).map_err(to_py),
        (None, None) => {
            let all: Vec<Grade> = m.row_grades().iter().chain(m.col_grades()).cloned().collect();
            Ok(GradeBox::around(&all, m.d()))
        }
        _ => Err(PyValueError::new_err("give both lo and hi or neither")),
    }
}

fn dim_dict<'py>(py: Python<'py>, m: &GradedMatrix, bx: &GradeBox) -> PyResult<Bound<'py, PyDict>> {
    let f = mpdecomp::dimension_function(m, bx).map_err(to_py)?;
    let out = PyDict::new(py);
    for (u, v) in bx.points().iter().zip(&f.values) {
        out.set_item(grade_key(py, u)?, *v)?;
    }
    Ok(out)
}

fn block_pair(b: &IndexBlock) -> (Vec<usize>, Vec<usize>) {
    (b.rows.clone(), b.cols.clone())
}

fn construction(name: &str) -> PyResult<Construction> {
    match name {
        "auto" => Ok(Construction::Auto),
        "two-param" => Ok(Construction::TwoParam),
        "d-param" => Ok(Construction::DParam),
        _ => Err(PyValueError::new_err(format!("unknown construction '{name}'"))),
    }
}

/// A binary matrix whose rows and columns carry grades in Z^d.
#[pyclass(name = "GradedMatrix", module = "pympdecomp", skip_from_py_object)]
#[derive(Clone)]
struct PyGradedMatrix {
    inner: GradedMatrix,
}

#[pymethods]
impl PyGradedMatrix {
    #[new]
    #[pyo3(signature = (rows, row_grades, col_grades, d = None))]
    fn new(rows: Vec<Vec<i64>>, row_grades: Vec<Vec<i64>>, col_grades: Vec<Vec<i64>>, d: Option<usize>) -> PyResult<Self> {
        let n_cols = col_grades.len();
        if rows.len() != row_grades.len() || rows.iter().any(|r| r.len() != n_cols) {
            return Err(PyValueError::new_err("entries do not match the grade counts"));
        }
        let mut mat = F2Matrix::zeros(rows.len(), n_cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                mat.set(i, j, x.rem_euclid(2) == 1);
            }
        }
        let inner = match d {
            Some(d) => GradedMatrix::with_dim(d, mat, grades(row_grades), grades(col_grades)),
            None => GradedMatrix::new(mat, grades(row_grades), grades(col_grades)),
        }
        .map_err(to_py)?;
        Ok(PyGradedMatrix { inner })
    }

    /// Parses the `mppres` text format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        mpdecomp::parse_presentation(text).map(|inner| PyGradedMatrix { inner }).map_err(to_py)
    }

    fn to_text(&self) -> String {
        mpdecomp::presentation::write_presentation(&self.inner)
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    #[getter]
    fn n_cols(&self) -> usize {
        self.inner.n_cols()
    }

    #[getter]
    fn row_grades(&self) -> Vec<Vec<i64>> {
        coords(self.inner.row_grades())
    }

    #[getter]
    fn col_grades(&self) -> Vec<Vec<i64>> {
        coords(self.inner.col_grades())
    }

    #[getter]
    fn row_labels(&self) -> Vec<String> {
        (0..self.inner.n_rows()).map(|i| self.inner.row_label(i)).collect()
    }

    #[getter]
    fn col_labels(&self) -> Vec<String> {
        (0..self.inner.n_cols()).map(|j| self.inner.col_label(j)).collect()
    }

    fn to_rows(&self) -> Vec<Vec<u32>> {
        let rows = self.inner.matrix().to_rows();
        rows.into_iter().map(|r| r.into_iter().map(u32::from).collect()).collect()
    }

    fn is_homogeneous(&self) -> bool {
        self.inner.check_homogeneity().is_ok()
    }

    /// `{"col": [(src, dst)], "row": [(src, dst)]}`.
    fn admissible_ops<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let ops = self.inner.admissible_ops();
        let out = PyDict::new(py);
        out.set_item("col", ops.colop)?;
        out.set_item("row", ops.rowop)?;
        Ok(out)
    }

    fn add_col(&mut self, src: usize, dst: usize) -> PyResult<()> {
        self.inner.add_col(src, dst).map_err(to_py)
    }

    fn add_row(&mut self, src: usize, dst: usize) -> PyResult<()> {
        self.inner.add_row(src, dst).map_err(to_py)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "GradedMatrix(d={}, rows={}, cols={})",
            self.inner.d(),
            self.inner.n_rows(),
            self.inner.n_cols()
        )
    }
}

/// A 1-critical simplicial filtration.
#[pyclass(name = "Filtration", module = "pympdecomp")]
struct PyFiltration {
    inner: Filtration,
}

#[pymethods]
impl PyFiltration {
    /// `simplices` is a list of `(grade, facet_ids)` in insertion order.
    #[new]
    fn new(d: usize, simplices: Vec<(Vec<i64>, Vec<usize>)>) -> PyResult<Self> {
        let s = simplices.into_iter().map(|(g, f)| (Grade::new(g), f)).collect();
        Filtration::new(d, s).map(|inner| PyFiltration { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        mpdecomp::parse_filtration(text).map(|inner| PyFiltration { inner }).map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn boundary_matrix(&self, p: usize) -> PyResult<PyGradedMatrix> {
        self.inner.boundary_matrix(p).map(|inner| PyGradedMatrix { inner }).map_err(to_py)
    }

    /// Minimal presentation of homology in degree `p`, rows and columns sorted.
    #[pyo3(signature = (p, construction = "auto"))]
    fn presentation(&self, p: usize, construction: &str) -> PyResult<PyGradedMatrix> {
        let input = Input::Filtration(self.inner.clone());
        let pres = build_presentation(&input, p, self::construction(construction)?).map_err(to_py)?;
        Ok(PyGradedMatrix { inner: prepare(&pres).matrix })
    }

    fn __repr__(&self) -> String {
        format!("Filtration(d={}, simplices={})", self.inner.d(), self.inner.len())
    }
}

/// Result of a total diagonalization.
#[pyclass(name = "Diagonalization", module = "pympdecomp")]
struct PyDiagonalization {
    inner: mpdecomp::Diagonalization,
}

#[pymethods]
impl PyDiagonalization {
    #[getter]
    fn matrix(&self) -> PyGradedMatrix {
        PyGradedMatrix { inner: self.inner.matrix.clone() }
    }

    #[getter]
    fn perturbed(&self) -> bool {
        self.inner.perturbed
    }

    /// All index blocks as `(rows, cols)`, zero columns included.
    #[getter]
    fn blocks(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        self.inner.blocks.blocks.iter().map(block_pair).collect()
    }

    #[getter]
    fn summands(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        self.inner.blocks.summands().map(block_pair).collect()
    }

    #[getter]
    fn zero_columns(&self) -> Vec<usize> {
        self.inner.blocks.zero_columns()
    }

    /// Operations as `(kind, source, target)` with kind `"row"` or `"col"`.
    #[getter]
    fn certificate(&self) -> Vec<(&'static str, usize, usize)> {
        self.inner
            .certificate
            .ops
            .iter()
            .map(|op| {
                let kind = match op.kind {
                    OpKind::Row => "row",
                    OpKind::Col => "col",
                };
                (kind, op.source, op.target)
            })
            .collect()
    }

    fn summand_matrix(&self, i: usize) -> PyResult<PyGradedMatrix> {
        let b = self
            .inner
            .blocks
            .summands()
            .nth(i)
            .ok_or_else(|| PyIndexError::new_err("summand index out of range"))?;
        Ok(PyGradedMatrix { inner: block_matrix(&self.inner, b) })
    }

    /// One Betti table per summand, `{degree: {grade: count}}`.
    fn betti<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let tables = mpdecomp::persistent_betti(&self.inner).map_err(to_py)?;
        tables.iter().map(|t| betti_dict(py, t)).collect()
    }

    /// One dimension function per summand, `{grade: dim}` over the box.
    #[pyo3(signature = (lo = None, hi = None))]
    fn dimension_functions<'py>(
        &self,
        py: Python<'py>,
        lo: Option<Vec<i64>>,
        hi: Option<Vec<i64>>,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let bx = grade_box(&self.inner.matrix, lo, hi)?;
        self.inner
            .blocks
            .summands()
            .map(|b| dim_dict(py, &block_matrix(&self.inner, b), &bx))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.blocks.summands().count()
    }

    fn __repr__(&self) -> String {
        format!(
            "Diagonalization(summands={}, zero_columns={}, ops={})",
            self.inner.blocks.summands().count(),
            self.inner.blocks.zero_columns().len(),
            self.inner.certificate.len()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (m, perturb_ties = false))]
fn tot_diagonalize(m: &PyGradedMatrix, perturb_ties: bool) -> PyResult<PyDiagonalization> {
    mpdecomp::tot_diagonalize(&m.inner, DiagonalizeOptions { perturb_ties })
        .map(|inner| PyDiagonalization { inner })
        .map_err(to_py)
}

/// Removes unit entries and sorts rows and columns by grade.
#[pyfunction]
fn minimize(m: &PyGradedMatrix) -> PyGradedMatrix {
    let p = mpdecomp::Presentation::new(m.inner.clone(), mpdecomp::CaseTag::Raw);
    PyGradedMatrix { inner: prepare(&p).matrix }
}

/// Parses filtration or presentation text, builds the minimal presentation
/// in degree `dim` and diagonalizes it.
#[pyfunction]
#[pyo3(signature = (text, dim = 0, perturb_ties = false, construction = "auto"))]
fn decompose(text: &str, dim: usize, perturb_ties: bool, construction: &str) -> PyResult<PyDiagonalization> {
    let input = mpdecomp::cli::parse_input(text).map_err(to_py)?;
    let pres = prepare(&build_presentation(&input, dim, self::construction(construction)?).map_err(to_py)?);
    tot_diagonalize(&PyGradedMatrix { inner: pres.matrix }, perturb_ties)
}

#[pyfunction]
fn betti_table<'py>(py: Python<'py>, m: &PyGradedMatrix) -> PyResult<Bound<'py, PyDict>> {
    let t = mpdecomp::betti_table(&m.inner).map_err(to_py)?;
    betti_dict(py, &t)
}

#[pyfunction]
#[pyo3(signature = (m, lo = None, hi = None))]
fn dimension_function<'py>(
    py: Python<'py>,
    m: &PyGradedMatrix,
    lo: Option<Vec<i64>>,
    hi: Option<Vec<i64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let bx = grade_box(&m.inner, lo, hi)?;
    dim_dict(py, &m.inner, &bx)
}

/// Finest partition found by exhaustive search, for small matrices.
#[pyfunction]
#[pyo3(signature = (m, budget = DEFAULT_BUDGET))]
fn brute_force_finest(m: &PyGradedMatrix, budget: usize) -> PyResult<Vec<(Vec<usize>, Vec<usize>)>> {
    let parts = mpdecomp::brute_force_finest(&m.inner, budget).map_err(to_py)?;
    Ok(parts.blocks.iter().map(block_pair).collect())
}

#[pymodule]
fn pympdecomp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGradedMatrix>()?;
    m.add_class::<PyFiltration>()?;
    m.add_class::<PyDiagonalization>()?;
    m.add_function(wrap_pyfunction!(tot_diagonalize, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(betti_table, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_function, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_finest, m)?)?;
    m.add("TiedGradesError", m.py().get_type::<TiedGradesError>())?;
    Ok(())
}
