//! Plain-text report layout and optional ANSI styling.

use std::fmt::Write as _;
use std::io::IsTerminal;

use ranksig_core::stats::{significance_level, ContingencyTable, PairwiseTest};
use ranksig_core::SignificanceLevel;

#[derive(Debug, Clone, Copy)]
pub struct Style {
    color: bool,
}

impl Style {
    /// Colour only on a terminal and when `RANKSIG_NO_COLOR` is unset.
    pub fn detect(to_file: bool) -> Self {
        let color = !to_file && std::env::var_os("RANKSIG_NO_COLOR").is_none() && std::io::stdout().is_terminal();
        Style { color }
    }

    fn paint(self, code: &str, text: &str) -> String {
        if self.color && !text.is_empty() {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    pub fn heading(self, text: &str) -> String {
        self.paint("1", text)
    }

    pub fn stars(self, level: SignificanceLevel) -> String {
        let code = match level {
            SignificanceLevel::P001 => "1;31",
            SignificanceLevel::P01 => "31",
            _ => "33",
        };
        self.paint(code, level.stars())
    }
}

fn stars_of(style: Style, x: f64) -> String {
    significance_level(x).map(|l| style.stars(l)).unwrap_or_default()
}

fn table_block(out: &mut String, style: Style, title: &str, t: &ContingencyTable, totals: bool) {
    let width = t.row_labels().iter().map(String::len).max().unwrap_or(0).max(5);
    let _ = writeln!(out, "{}", style.heading(title));
    let _ = write!(out, "{:width$}", "");
    for c in t.col_labels() {
        let _ = write!(out, " {c:>12}");
    }
    if totals {
        let _ = write!(out, " {:>12}", "total");
    }
    out.push('\n');
    let rows = t.to_rows();
    for (label, row) in t.row_labels().iter().zip(&rows) {
        let _ = write!(out, "{label:width$}");
        for v in row {
            let _ = write!(out, " {v:>12.2}");
        }
        if totals {
            let _ = write!(out, " {:>12.2}", row.iter().sum::<f64>());
        }
        out.push('\n');
    }
    if totals {
        let _ = write!(out, "{:width$}", "total");
        for v in t.col_totals() {
            let _ = write!(out, " {v:>12.2}");
        }
        let _ = writeln!(out, " {:>12.2}", t.grand_total());
    }
    out.push('\n');
}

fn matrix_block(out: &mut String, style: Style, title: &str, t: &ContingencyTable, m: &[Vec<f64>], star: bool) {
    let width = t.row_labels().iter().map(String::len).max().unwrap_or(0).max(5);
    let _ = writeln!(out, "{}", style.heading(title));
    let mut line = format!("{:width$}", "");
    for c in t.col_labels() {
        let _ = write!(line, " {c:>12}    ");
    }
    let _ = writeln!(out, "{}", line.trim_end());
    for (label, row) in t.row_labels().iter().zip(m) {
        let mut line = format!("{label:width$}");
        for &v in row {
            let s = if star { stars_of(style, v) } else { String::new() };
            let pad = 3 - s.chars().filter(|c| *c == '*').count();
            let _ = write!(line, " {v:>12.2} {s}{}", " ".repeat(pad));
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
    out.push('\n');
}

pub struct PairwiseReport<'a> {
    pub context: String,
    pub table: &'a ContingencyTable,
    pub test: &'a PairwiseTest,
    pub z_stored: f64,
    pub z_exact: f64,
}

impl PairwiseReport<'_> {
    pub fn render(&self, style: Style) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} vs {} ({})\n", self.test.a, self.test.b, self.context);
        table_block(&mut out, style, "Observed", self.table, true);
        table_block(&mut out, style, "Expected", &self.table.expected(), true);
        match self.table.chi_square_contributions() {
            Ok(c) => matrix_block(&mut out, style, "Chi-square contributions", self.table, &c, false),
            Err(e) => {
                let _ = writeln!(out, "{}\nn/a ({e})\n", style.heading("Chi-square contributions"));
            }
        }
        let level = ranksig_core::stats::chi_square_level(self.test.chi2, self.table.dof())
            .unwrap_or(SignificanceLevel::NotSignificant);
        let line = format!(
            "chi-square = {:.2} (df = {}, {level}) {}",
            self.test.chi2,
            self.table.dof(),
            style.stars(level)
        );
        let _ = writeln!(out, "{}\n", line.trim_end());
        let residuals: Vec<Vec<f64>> = self.test.residuals.iter().map(|r| r.to_vec()).collect();
        matrix_block(&mut out, style, "Standardized residuals", self.table, &residuals, true);
        let _ = writeln!(out, "{}", style.heading("z-test"));
        for (label, z) in [
            ("z (stored proportions)", self.z_stored),
            ("z (exact proportions)", self.z_exact),
        ] {
            let level = significance_level(z).unwrap_or(SignificanceLevel::NotSignificant);
            let line = format!("{label:<22} = {z:>8.3}  {level} {}", style.stars(level));
            let _ = writeln!(out, "{}", line.trim_end());
        }
        out
    }
}
