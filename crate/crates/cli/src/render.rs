//! Flat tables derived from a [`Report`], shared by the CSV and text emitters.

use std::fmt::Write;

use popgrowth_core::ols::Estimate;
use popgrowth_core::var::VarFit;
use popgrowth_core::Level;

use crate::report::{Report, SeriesTest, VintageReport};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
    /// A value flagged as significant at the table's stated level.
    Flagged(f64, bool),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) | Cell::Flagged(x, _) => x.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => fmt_num(*x),
            Cell::Flagged(x, star) => format!("{}{}", fmt_num(*x), if *star { "*" } else { "" }),
            Cell::Missing => ".".into(),
        }
    }
}

fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".into()
    } else if !x.is_finite() {
        x.to_string()
    } else if !(1e-4..1e9).contains(&a) {
        format!("{x:.4e}")
    } else if a >= 1e4 {
        format!("{x:.1}")
    } else if a >= 0.01 {
        format!("{x:.4}")
    } else {
        format!("{x:.6}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem of the CSV.
    pub name: String,
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra lines printed under the table in text output.
    pub notes: Vec<String>,
}

impl Table {
    fn new(name: String, title: String, header: &[&str]) -> Self {
        Self {
            name,
            title,
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.iter().map(Cell::csv).collect()).collect()
    }
}

fn text(s: impl Into<String>) -> Cell {
    Cell::Text(s.into())
}

fn int(v: impl TryInto<i64>) -> Cell {
    v.try_into().map(Cell::Int).unwrap_or(Cell::Missing)
}

fn opt(v: Option<f64>) -> Cell {
    v.map_or(Cell::Missing, Cell::Num)
}

fn sample(s: (i32, i32)) -> Cell {
    text(format!("{}-{}", s.0, s.1))
}

fn level(l: Option<Level>) -> Cell {
    l.map_or(text("none"), |l| text(l.label()))
}

fn estimate_cells(e: &Estimate) -> [Cell; 4] {
    [Cell::Flagged(e.value, e.p_value < 0.05), Cell::Num(e.std_error), Cell::Num(e.t_statistic), Cell::Num(e.p_value)]
}

const UNIT_ROOT_HEADER: [&str; 11] =
    ["series", "test", "lag", "trend", "sample", "n_obs", "statistic", "cv_1pct", "cv_5pct", "cv_10pct", "reject_at"];

fn unit_root_table(name: String, title: String, tests: &[SeriesTest]) -> Table {
    let mut t = Table::new(name, title, &UNIT_ROOT_HEADER);
    for SeriesTest { series, result: r } in tests {
        t.rows.push(vec![
            text(series),
            text(r.test.to_string()),
            int(r.lag),
            text(r.trend.to_string()),
            sample(r.sample),
            int(r.n_obs),
            Cell::Flagged(r.statistic, r.rejects_at(Level::OnePercent)),
            Cell::Num(r.critical_values.one),
            Cell::Num(r.critical_values.five),
            Cell::Num(r.critical_values.ten),
            level(r.reject_at),
        ]);
    }
    t.notes.push("* rejects a unit root at 1%".into());
    t
}

fn var_rows(t: &mut Table, model: &str, fit: &VarFit, names: &[&str], exog_name: &str) {
    for (j, eq) in names.iter().enumerate() {
        for (i, lag) in fit.coefficients.iter().enumerate() {
            for (m, e) in lag[j].iter().enumerate() {
                let mut row = vec![text(model), text(*eq), text(format!("L{}.{}", i + 1, names[m]))];
                row.extend(estimate_cells(e));
                t.rows.push(row);
            }
        }
        if let Some(ex) = &fit.exogenous {
            for (l, e) in fit.exog_lags.iter().zip(&ex[j]) {
                let mut row = vec![text(model), text(*eq), text(format!("L{l}.{exog_name}"))];
                row.extend(estimate_cells(e));
                t.rows.push(row);
            }
        }
        let mut row = vec![text(model), text(*eq), text("constant")];
        row.extend(estimate_cells(&fit.intercept[j]));
        t.rows.push(row);
    }
}

fn vintage_tables(v: &VintageReport, out: &mut Vec<Table>) {
    let tag = |stem: &str| format!("{}_{}", v.label, stem);
    let names = ["measured", "predicted"];

    if let Some(m) = &v.model {
        let f = &m.fit;
        let mut t = Table::new(tag("calibration"), format!("Calibration ({})", v.label), &["quantity", "value"]);
        t.rows = vec![
            vec![text("A"), Cell::Num(f.params.a)],
            vec![text("n9_initial"), Cell::Num(f.params.n9_initial)],
            vec![text("initial_year"), int(f.params.initial_year)],
            vec![text("first_year"), int(f.first_year)],
            vec![text("last_year"), int(f.last_year)],
            vec![text("n_obs"), int(f.n_obs)],
            vec![text("mean_difference"), Cell::Num(f.mean_difference)],
            vec![text("sd_difference"), Cell::Num(f.sd_difference)],
            vec![text("rms_difference"), Cell::Num(f.rms_difference)],
        ];
        out.push(t);

        let mut t = Table::new(
            tag("model_fit"),
            format!("Model fit series ({})", v.label),
            &["year", "gdp_per_capita", "growth", "trend_growth", "n9_measured", "n9_predicted", "difference"],
        );
        for r in &m.rows {
            t.rows.push(vec![
                int(r.year),
                Cell::Num(r.gdp_per_capita),
                opt(r.growth),
                Cell::Num(r.trend_growth),
                opt(r.n9_measured),
                opt(r.n9_predicted),
                opt(r.difference),
            ]);
        }
        out.push(t);
    }

    if let Some(tests) = &v.unit_root_levels {
        out.push(unit_root_table(
            tag("table1_unit_root_levels"),
            format!("Unit-root tests, levels ({})", v.label),
            tests,
        ));
    }
    if let Some(tests) = &v.unit_root_differences {
        out.push(unit_root_table(
            tag("table2_unit_root_differences"),
            format!("Unit-root tests, first differences ({})", v.label),
            tests,
        ));
    }
    if let Some(tests) = &v.difference_tests {
        out.push(unit_root_table(
            tag("table3_difference_tests"),
            format!("Unit-root tests, measured minus predicted ({})", v.label),
            tests,
        ));
    }

    if let Some(eg) = &v.engle_granger {
        let s = &eg.step1;
        let mut t = Table::new(
            tag("table4_engle_granger_step1"),
            format!("Engle-Granger step 1: measured on predicted ({})", v.label),
            &["sample", "n_obs", "slope", "slope_se", "constant", "constant_se", "r_squared", "rmse"],
        );
        t.rows.push(vec![
            sample((eg.residuals.start_year(), eg.residuals.end_year())),
            int(s.n_obs),
            Cell::Num(s.coefficients[0]),
            Cell::Num(s.standard_errors[0]),
            Cell::Num(s.coefficients[1]),
            Cell::Num(s.standard_errors[1]),
            Cell::Num(s.r_squared),
            Cell::Num(s.rmse),
        ]);
        out.push(t);
        let tests: Vec<SeriesTest> =
            eg.residual_tests.iter().map(|r| SeriesTest { series: "residual".into(), result: r.clone() }).collect();
        let mut t = unit_root_table(
            tag("table4_engle_granger_residuals"),
            format!("Engle-Granger residual tests ({})", v.label),
            &tests,
        );
        t.notes.push(format!("cointegrated at: {}", eg.cointegrated_at.map_or("none", |l| l.label())));
        out.push(t);
    }

    if let Some(sel) = &v.lag_selection {
        let mut t = Table::new(
            tag("table5_lag_selection"),
            format!("Lag-order selection, sample {}-{} ({})", sel.sample.0, sel.sample.1, v.label),
            &["lag", "log_likelihood", "lr", "df", "p_value", "fpe", "aic", "hqic", "sbic"],
        );
        for r in &sel.rows {
            t.rows.push(vec![
                int(r.lag),
                Cell::Num(r.log_likelihood),
                Cell::Flagged(r.lr, sel.lr_choice == Some(r.lag)),
                int(r.lr_df),
                Cell::Num(r.lr_p_value),
                Cell::Flagged(r.fpe, sel.fpe_choice == r.lag),
                Cell::Flagged(r.aic, sel.aic_choice == r.lag),
                Cell::Flagged(r.hqic, sel.hqic_choice == r.lag),
                Cell::Flagged(r.sbic, sel.sbic_choice == r.lag),
            ]);
        }
        t.notes.push("* lag chosen by the criterion".into());
        t.notes.push(format!("Consensus lag: {}", sel.consensus));
        out.push(t);
    }

    if let Some(j) = &v.johansen {
        let tr = &j.trace;
        let n = tr.eigenvalues.len();
        let mut t = Table::new(
            tag("table6_johansen"),
            format!(
                "Johansen trace test, lag {}, trend {}, sample {}-{} ({})",
                tr.lag_order, tr.trend, tr.sample.0, tr.sample.1, v.label
            ),
            &["max_rank", "log_likelihood", "eigenvalue", "trace", "cv_5pct", "sbic", "hqic"],
        );
        for r in 0..=n {
            t.rows.push(vec![
                int(r),
                Cell::Num(tr.log_likelihood[r]),
                if r == 0 { Cell::Missing } else { Cell::Num(tr.eigenvalues[r - 1]) },
                if r < n { Cell::Flagged(tr.trace_statistics[r], r == tr.selected_rank) } else { Cell::Missing },
                if r < n { Cell::Num(tr.critical_values_5pct[r]) } else { Cell::Missing },
                Cell::Num(tr.sbic[r]),
                Cell::Num(tr.hqic[r]),
            ]);
        }
        t.notes.push("* trace statistic below its 5% critical value at the selected rank".into());
        t.notes.push(format!("Rank: {}", tr.selected_rank));
        out.push(t);

        let d = &j.diagnostics;
        let mut t = Table::new(
            tag("diagnostics_lm"),
            format!("LM test for residual autocorrelation ({})", v.label),
            &["lag", "statistic", "df", "p_value"],
        );
        for r in &d.lm_by_lag {
            t.rows.push(vec![int(r.lag), Cell::Num(r.statistic), int(r.df), Cell::Num(r.p_value)]);
        }
        out.push(t);

        let mut t = Table::new(
            tag("diagnostics_normality"),
            format!("Jarque-Bera normality ({})", v.label),
            &["equation", "statistic", "df", "p_value", "skewness", "kurtosis"],
        );
        for (name, r) in names.iter().zip(&d.normality.per_equation) {
            t.rows.push(vec![
                text(*name),
                Cell::Num(r.statistic),
                int(2),
                Cell::Num(r.p_value),
                Cell::Num(r.skewness),
                Cell::Num(r.kurtosis),
            ]);
        }
        let jn = &d.normality.joint;
        t.rows.push(vec![
            text("joint"),
            Cell::Num(jn.statistic),
            int(jn.df),
            Cell::Num(jn.p_value),
            Cell::Num(jn.skewness_statistic),
            Cell::Num(jn.kurtosis_statistic),
        ]);
        t.notes.push("joint row: skewness and kurtosis columns hold their chi-squared components".into());
        out.push(t);

        let mut t = Table::new(
            tag("diagnostics_companion"),
            format!("Companion-matrix eigenvalue moduli ({})", v.label),
            &["index", "modulus"],
        );
        for (i, m) in d.companion_moduli.iter().enumerate() {
            t.rows.push(vec![int(i + 1), Cell::Num(*m)]);
        }
        let stable = d.companion_moduli.first().is_none_or(|m| *m < 1.0);
        t.notes.push(format!("stable: {}", if stable { "yes" } else { "no" }));
        out.push(t);
    }

    if let Some(var) = &v.var {
        let header = ["model", "equation", "regressor", "coefficient", "std_error", "t", "p_value"];
        let mut t = Table::new(tag("table7_var"), format!("VAR models ({})", v.label), &header);
        var_rows(&mut t, "exogenous", &var.exogenous, &names[..1], names[1]);
        var_rows(&mut t, "endogenous", &var.endogenous, &names, "");
        t.notes.push("* significant at 5%".into());
        out.push(t);

        let mut t = Table::new(
            tag("table7_var_fit"),
            format!("VAR fit statistics ({})", v.label),
            &["model", "equation", "lag_order", "sample", "n_obs", "r_squared", "rmse"],
        );
        for (model, fit) in [("exogenous", &var.exogenous), ("endogenous", &var.endogenous)] {
            for (j, name) in names.iter().enumerate().take(fit.n_vars()) {
                t.rows.push(vec![
                    text(model),
                    text(*name),
                    int(fit.lag_order),
                    sample(fit.sample),
                    int(fit.n_obs),
                    Cell::Num(fit.per_equation_r2[j]),
                    Cell::Num(fit.per_equation_rmse[j]),
                ]);
            }
        }
        out.push(t);
    }

    if let Some(vecm) = &v.vecm {
        let mut t = Table::new(
            tag("table8_vecm"),
            format!(
                "VECM, rank {}, lag {}, trend {}, sample {}-{} ({})",
                vecm.rank, vecm.lag_order, vecm.trend, vecm.sample.0, vecm.sample.1, v.label
            ),
            &["block", "equation", "regressor", "coefficient", "std_error", "t", "p_value"],
        );
        for (k, (beta, se)) in vecm.beta.iter().zip(&vecm.beta_std_errors).enumerate() {
            for (m, (b, s)) in beta.iter().zip(se).enumerate() {
                t.rows.push(vec![
                    text("beta"),
                    text(format!("ce{}", k + 1)),
                    text(names[m]),
                    Cell::Num(*b),
                    opt(*s),
                    opt(s.map(|s| b / s)),
                    Cell::Missing,
                ]);
            }
        }
        for (j, eq) in names.iter().enumerate() {
            for (k, e) in vecm.alpha[j].iter().enumerate() {
                let mut row = vec![text("alpha"), text(*eq), text(format!("ce{}", k + 1))];
                row.extend(estimate_cells(e));
                t.rows.push(row);
            }
            for (i, lag) in vecm.short_run.iter().enumerate() {
                for (m, e) in lag[j].iter().enumerate() {
                    let mut row = vec![text("short_run"), text(*eq), text(format!("LD{}.{}", i + 1, names[m]))];
                    row.extend(estimate_cells(e));
                    t.rows.push(row);
                }
            }
            if let Some(c) = &vecm.constant {
                let mut row = vec![text("constant"), text(*eq), text("constant")];
                row.extend(estimate_cells(&c[j]));
                t.rows.push(row);
            }
        }
        t.notes.push("beta normalised to 1 on the measured population".into());
        out.push(t);

        let mut t = Table::new(
            tag("table8_vecm_fit"),
            format!("VECM fit statistics ({})", v.label),
            &["equation", "r_squared", "rmse", "log_likelihood", "sbic", "hqic"],
        );
        for (j, eq) in names.iter().enumerate() {
            t.rows.push(vec![
                text(*eq),
                Cell::Num(vecm.per_equation_r2[j]),
                Cell::Num(vecm.per_equation_rmse[j]),
                Cell::Num(vecm.log_likelihood),
                Cell::Num(vecm.sbic),
                Cell::Num(vecm.hqic),
            ]);
        }
        out.push(t);
    }

    if let Some(regs) = &v.regressions {
        let mut t = Table::new(
            tag("table9_regressions"),
            format!("Regressions of measured on predicted ({})", v.label),
            &[
                "label",
                "regressor",
                "sample",
                "n_obs",
                "slope",
                "slope_se",
                "constant",
                "constant_se",
                "r_squared",
                "rmse",
            ],
        );
        for r in regs {
            let slope = r.fit.estimate(0);
            let c = r.fit.estimate(1);
            t.rows.push(vec![
                text(&r.label),
                text(&r.regressor),
                sample(r.sample),
                int(r.fit.n_obs),
                Cell::Flagged(slope.value, slope.p_value < 0.05),
                Cell::Num(slope.std_error),
                Cell::Flagged(c.value, c.p_value < 0.05),
                Cell::Num(c.std_error),
                Cell::Num(r.fit.r_squared),
                Cell::Num(r.fit.rmse),
            ]);
        }
        t.notes.push("* significant at 5%".into());
        out.push(t);
    }
}

/// Every table of the report in emission order.
pub fn tables(report: &Report) -> Vec<Table> {
    let mut out = Vec::new();
    for v in &report.vintages {
        vintage_tables(v, &mut out);
    }
    if let Some(audit) = &report.critical_value_audit {
        let mut t = Table::new(
            "critical_value_audit".into(),
            "Critical values: table against simulation".into(),
            &["test", "trend", "n_obs", "level", "table", "simulated", "difference", "replications", "seed"],
        );
        for r in audit {
            t.rows.push(vec![
                text(r.test.to_string()),
                text(r.trend.to_string()),
                int(r.n_obs),
                text(r.level.label()),
                Cell::Num(r.table),
                Cell::Num(r.simulated),
                Cell::Num(r.simulated - r.table),
                int(r.replications),
                text(r.seed.to_string()),
            ]);
        }
        out.push(t);
    }
    out
}

fn render_table(t: &Table, out: &mut String) {
    let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::text).collect()).collect();
    let widths: Vec<usize> = (0..t.header.len())
        .map(|c| cells.iter().map(|r| r[c].chars().count()).chain([t.header[c].len()]).max().unwrap_or(0))
        .collect();
    let line = |row: &[String]| -> String {
        let mut s = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                s.push_str("  ");
            }
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                s.push_str(cell);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str(&" ".repeat(pad));
                s.push_str(cell);
            }
        }
        s.trim_end().to_string()
    };
    let rule = "-".repeat(widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1));
    let _ = writeln!(out, "{}", t.title);
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "{}", line(&t.header));
    let _ = writeln!(out, "{rule}");
    for r in &cells {
        let _ = writeln!(out, "{}", line(r));
    }
    let _ = writeln!(out, "{rule}");
    for n in &t.notes {
        let _ = writeln!(out, "{n}");
    }
    out.push('\n');
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let p = &report.provenance;
    let _ = writeln!(out, "{} {} (report version {})", p.library, p.version, report.report_version);
    for h in &p.inputs {
        let _ = writeln!(out, "input {}: {} sha256 {}", h.name, h.source, h.sha256);
    }
    out.push('\n');
    for t in tables(report) {
        render_table(&t, &mut out);
    }
    if let Some(f) = &report.failure {
        let _ = writeln!(
            out,
            "FAILED at stage {}{}: {}",
            f.stage,
            f.vintage.as_deref().map(|v| format!(" ({v})")).unwrap_or_default(),
            f.message
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-3.65), "-3.6500");
        assert_eq!(fmt_num(3_900_000.0), "3900000.0");
        assert_eq!(fmt_num(5.8e9), "5.8000e9");
        assert_eq!(fmt_num(0.0021), "0.002100");
    }

    #[test]
    fn flagged_cells_star_in_text_only() {
        let c = Cell::Flagged(-2.87, true);
        assert_eq!(c.text(), "-2.8700*");
        assert_eq!(c.csv(), "-2.87");
        assert_eq!(Cell::Missing.csv(), "");
    }
}
