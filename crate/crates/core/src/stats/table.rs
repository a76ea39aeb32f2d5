use crate::error::{Error, Result};

/// Real-valued r×c table of observed counts with labelled rows and columns.
///
/// Margins are always computed from the cells, never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    rows: Vec<String>,
    cols: Vec<String>,
    cells: Vec<f64>,
}

impl ContingencyTable {
    pub fn new<R, C>(rows: Vec<R>, cols: Vec<C>, observed: Vec<Vec<f64>>) -> Result<Self>
    where
        R: Into<String>,
        C: Into<String>,
    {
        let rows: Vec<String> = rows.into_iter().map(Into::into).collect();
        let cols: Vec<String> = cols.into_iter().map(Into::into).collect();
        if rows.len() < 2 || cols.len() < 2 {
            return Err(Error::DegenerateTable(format!(
                "need at least 2×2, got {}×{}",
                rows.len(),
                cols.len()
            )));
        }
        if observed.len() != rows.len() || observed.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::DegenerateTable("cell matrix does not match labels".into()));
        }
        let cells: Vec<f64> = observed.into_iter().flatten().collect();
        if cells.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::DegenerateTable("cells must be finite and non-negative".into()));
        }
        if cells.iter().sum::<f64>() <= 0.0 {
            return Err(Error::DegenerateTable("grand total is zero".into()));
        }
        Ok(ContingencyTable { rows, cols, cells })
    }

    /// Unlabelled table; rows and columns are numbered from 1.
    pub fn from_matrix(observed: Vec<Vec<f64>>) -> Result<Self> {
        let r = observed.len();
        let c = observed.first().map_or(0, Vec::len);
        Self::new(
            (1..=r).map(|i| format!("r{i}")).collect(),
            (1..=c).map(|j| format!("c{j}")).collect(),
            observed,
        )
    }

    pub fn row_labels(&self) -> &[String] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[String] {
        &self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.ncols() + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.cells.chunks(self.ncols()).map(<[f64]>::to_vec).collect()
    }

    pub fn row_totals(&self) -> Vec<f64> {
        self.cells.chunks(self.ncols()).map(|r| r.iter().sum()).collect()
    }

    pub fn col_totals(&self) -> Vec<f64> {
        (0..self.ncols())
            .map(|j| (0..self.nrows()).map(|i| self.get(i, j)).sum())
            .collect()
    }

    pub fn grand_total(&self) -> f64 {
        self.cells.iter().sum()
    }

    /// Degrees of freedom of the independence test, (r−1)(c−1).
    pub fn dof(&self) -> usize {
        (self.nrows() - 1) * (self.ncols() - 1)
    }

    fn map_cells(&self, f: impl Fn(usize, usize, f64) -> f64) -> Vec<Vec<f64>> {
        (0..self.nrows())
            .map(|i| (0..self.ncols()).map(|j| f(i, j, self.get(i, j))).collect())
            .collect()
    }

    /// Expected counts under independence: row total × column total / grand total.
    ///
    /// A zero margin yields zero expected cells (whose observed cells are
    /// necessarily zero as well); see [`ContingencyTable::zero_expected_cells`].
    pub fn expected(&self) -> ContingencyTable {
        let rt = self.row_totals();
        let ct = self.col_totals();
        let n = self.grand_total();
        ContingencyTable {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            cells: self.map_cells(|i, j, _| rt[i] * ct[j] / n).concat(),
        }
    }

    /// Cells whose expected count is zero because their row or column is empty.
    pub fn zero_expected_cells(&self) -> Vec<(usize, usize)> {
        let rt = self.row_totals();
        let ct = self.col_totals();
        let mut out = Vec::new();
        for (i, &r) in rt.iter().enumerate() {
            for (j, &c) in ct.iter().enumerate() {
                if r == 0.0 || c == 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn require_positive_expected(&self) -> Result<ContingencyTable> {
        if let Some(&(i, j)) = self.zero_expected_cells().first() {
            return Err(Error::ZeroExpectedCell {
                row: self.rows[i].clone(),
                col: self.cols[j].clone(),
            });
        }
        Ok(self.expected())
    }

    /// Per-cell contributions (O−E)²/E to the chi-square statistic.
    pub fn chi_square_contributions(&self) -> Result<Vec<Vec<f64>>> {
        let e = self.require_positive_expected()?;
        Ok(self.map_cells(|i, j, o| {
            let ev = e.get(i, j);
            (o - ev) * (o - ev) / ev
        }))
    }

    /// Pearson chi-square, Σ (O−E)²/E.
    pub fn chi_square(&self) -> Result<f64> {
        Ok(self.chi_square_contributions()?.iter().flatten().sum())
    }

    /// Standardized residuals (O−E)/√E.
    pub fn standardized_residuals(&self) -> Result<Vec<Vec<f64>>> {
        let e = self.require_positive_expected()?;
        Ok(self.map_cells(|i, j, o| {
            let ev = e.get(i, j);
            (o - ev) / ev.sqrt()
        }))
    }

    /// Multiplies every cell by `k > 0`.
    pub fn scaled(&self, k: f64) -> Result<ContingencyTable> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidArgument(format!("scale factor {k} must be positive")));
        }
        Ok(ContingencyTable {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            cells: self.cells.iter().map(|v| v * k).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_2a() -> ContingencyTable {
        ContingencyTable::new(
            vec!["Tsinghua", "Zhejiang"],
            vec!["top-10%", "non-top"],
            vec![vec![2738.0, 17164.0], vec![2604.0, 20906.0]],
        )
        .unwrap()
    }

    #[test]
    fn expected_top_left() {
        let e = table_2a().expected();
        assert!((e.get(0, 0) - 2449.01).abs() <= 0.01);
    }

    #[test]
    fn expected_trivial_cases() {
        let uniform = ContingencyTable::from_matrix(vec![vec![5.0; 2]; 2]).unwrap();
        assert_eq!(uniform.expected().to_rows(), vec![vec![5.0; 2]; 2]);
        let diag = ContingencyTable::from_matrix(vec![vec![10.0, 0.0], vec![0.0, 10.0]]).unwrap();
        assert_eq!(diag.expected().to_rows(), vec![vec![5.0; 2]; 2]);
    }

    #[test]
    fn margins_preserved_in_2a() {
        let t = table_2a();
        let e = t.expected();
        for (a, b) in t.row_totals().iter().zip(e.row_totals()) {
            assert!((a - b).abs() <= 1e-9 * a);
        }
        for (a, b) in t.col_totals().iter().zip(e.col_totals()) {
            assert!((a - b).abs() <= 1e-9 * a);
        }
    }

    #[test]
    fn chi_square_of_2a() {
        let t = table_2a();
        assert!((t.chi_square().unwrap() - 71.80).abs() <= 0.05);
        let c = t.chi_square_contributions().unwrap();
        for (got, want) in c.iter().flatten().zip([34.10, 4.79, 28.87, 4.05]) {
            assert!((got - want).abs() <= 0.05, "{got} vs {want}");
        }
    }

    #[test]
    fn chi_square_hand_summed() {
        // E = [[20, 80], [20, 80]]; terms 100/20 + 100/80 + 100/20 + 100/80
        let t = ContingencyTable::from_matrix(vec![vec![30.0, 70.0], vec![10.0, 90.0]]).unwrap();
        let hand = 100.0 / 20.0 + 100.0 / 80.0 + 100.0 / 20.0 + 100.0 / 80.0;
        assert!((t.chi_square().unwrap() - hand).abs() < 1e-12);
        assert!((hand - 12.5_f64).abs() < 1e-12);
    }

    #[test]
    fn chi_square_zero_when_observed_is_expected() {
        let t = table_2a().expected();
        assert!(t.chi_square().unwrap().abs() < 1e-9);
        assert!(t
            .standardized_residuals()
            .unwrap()
            .iter()
            .flatten()
            .all(|r| r.abs() < 1e-9));
    }

    #[test]
    fn residuals_of_2a() {
        let r = table_2a().standardized_residuals().unwrap();
        for (got, want) in r.iter().flatten().zip([5.84, -2.19, -5.37, 2.01]) {
            assert!((got - want).abs() <= 0.01, "{got} vs {want}");
        }
    }

    #[test]
    fn zero_margin_is_reported() {
        let t = ContingencyTable::from_matrix(vec![vec![3.0, 0.0], vec![4.0, 0.0]]).unwrap();
        assert_eq!(t.zero_expected_cells(), vec![(0, 1), (1, 1)]);
        assert_eq!(t.expected().get(0, 1), 0.0);
        assert!(matches!(t.chi_square(), Err(Error::ZeroExpectedCell { .. })));
        assert!(matches!(
            t.standardized_residuals(),
            Err(Error::ZeroExpectedCell { .. })
        ));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(ContingencyTable::from_matrix(vec![vec![1.0, 2.0]]).is_err());
        assert!(ContingencyTable::from_matrix(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(ContingencyTable::from_matrix(vec![vec![1.0, -2.0], vec![1.0, 1.0]]).is_err());
        assert!(ContingencyTable::from_matrix(vec![vec![0.0; 2]; 2]).is_err());
    }
}
