//! Text and CSV renderings of the library's report types. Text tables carry
//! three decimals; CSV keeps full precision so emitted files round-trip.

use std::fmt::Write as _;

use boxjenkins::correlogram::Correlogram;
use boxjenkins::diagnostics::DiagnosticsReport;
use boxjenkins::forecast::{AccuracyReport, ForecastResult};
use boxjenkins::sarima::FittedModel;
use boxjenkins::select::Leaderboard;
use boxjenkins::series::{SeasonalPivot, TimeSeries};
use boxjenkins::unitroot::{AdfResult, Differencing, DifferencingDecision};

const MONTHS: [&str; 12] = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];

/// 17-character correlation bar: eight cells per side of the zero axis, one
/// star per eighth of magnitude.
fn bar(r: f64) -> String {
    let filled = ((r.abs() * 8.0).round() as usize).min(8);
    let mut cells = [' '; 17];
    cells[8] = '|';
    if r < 0.0 {
        for c in cells.iter_mut().take(8).skip(8 - filled) {
            *c = '*';
        }
    } else {
        for c in cells.iter_mut().skip(9).take(filled) {
            *c = '*';
        }
    }
    cells.iter().collect()
}

fn opt3(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.3}"),
        None => "-".into(),
    }
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

pub fn correlogram_text(c: &Correlogram) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        " {:^17}  {:^17}  lag      AC     PAC     Q-stat    prob",
        "autocorrelation", "partial corr"
    );
    for i in 0..c.max_lag() {
        let _ = writeln!(
            out,
            "[{}] [{}]  {:>3}  {:>6.3}  {:>6.3}  {:>9.3}  {:>6}",
            bar(c.ac[i]),
            bar(c.pac[i]),
            i + 1,
            c.ac[i],
            c.pac[i],
            c.q_stat[i],
            c.q_prob[i].map_or(String::new(), |p| format!("{p:.3}")),
        );
    }
    let _ = writeln!(
        out,
        "T = {}; 5% band = +/-{:.3}",
        c.sample_size, c.band
    );
    out
}

pub fn correlogram_csv(c: &Correlogram) -> String {
    let mut out = String::from("lag,ac,pac,q_stat,q_prob\n");
    for i in 0..c.max_lag() {
        let prob = c.q_prob[i].map_or(String::new(), |p| p.to_string());
        let _ = writeln!(out, "{},{},{},{},{}", i + 1, c.ac[i], c.pac[i], c.q_stat[i], prob);
    }
    out
}

pub fn adf_text(r: &AdfResult) -> String {
    let verdict = if r.rejects_at_5pct() {
        "unit root rejected at the 5% level"
    } else {
        "unit root not rejected at the 5% level"
    };
    format!(
        "ADF unit-root test (constant only)\n\
           t-statistic        {:>8.3}\n\
           p-value            {:>8.3}\n\
           critical values    1%: {:.3}   5%: {:.3}   10%: {:.3}\n\
           augmentation lags  {}\n\
           observations       {}\n\
           {}\n",
        r.t_stat,
        r.p_value,
        r.critical.pct1,
        r.critical.pct5,
        r.critical.pct10,
        r.lags_used,
        r.nobs,
        verdict
    )
}

pub fn adf_csv(r: &AdfResult) -> String {
    format!(
        "statistic,value\nt_stat,{}\np_value,{}\ncv_1pct,{}\ncv_5pct,{}\ncv_10pct,{}\nlags_used,{}\nnobs,{}\n",
        r.t_stat, r.p_value, r.critical.pct1, r.critical.pct5, r.critical.pct10, r.lags_used, r.nobs
    )
}

pub fn fit_text(m: &FittedModel) -> String {
    let diff = m.spec().diff();
    let total = m.data().warmup().len() + m.data().len();
    let mut out = String::new();
    let _ = writeln!(out, "model: {}", m.spec());
    let _ = writeln!(
        out,
        "differencing: d={}, D={}, s={}",
        diff.d(),
        diff.seasonal_d(),
        diff.period()
    );
    let _ = writeln!(
        out,
        "sample: {}..{}, {} observations ({} after differencing)\n",
        m.start(),
        m.origin(),
        total,
        m.data().len()
    );
    let _ = writeln!(out, "{:<10}  coefficient   t-statistic", "term");
    let t_of = |target| {
        m.t_stats()
            .iter()
            .find(|(term, _)| *term == target)
            .and_then(|(_, t)| *t)
    };
    for (term, value) in m.coefficients() {
        let _ = writeln!(out, "{:<10}  {:>11.3}   {:>11}", term.to_string(), value, opt3(t_of(*term)));
    }
    if m.spec().constant() {
        let _ = writeln!(out, "{:<10}  {:>11.3}   {:>11}", "C", m.delta(), opt3(m.delta_t_stat()));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "sigma2          {:>12.3}", m.sigma2());
    let _ = writeln!(out, "log likelihood  {:>12.3}", m.loglik());
    let _ = writeln!(out, "AIC             {:>12.3}", m.aic());
    let _ = writeln!(out, "BIC             {:>12.3}", m.bic());
    let _ = writeln!(out, "adj R2          {:>12.3}", m.adj_r2());
    let _ = writeln!(out, "converged       {:>12}", if m.converged() { "yes" } else { "no" });
    out
}

pub fn fit_csv(m: &FittedModel) -> String {
    let mut out = String::from("term,coefficient,t_stat\n");
    let t_of = |target| {
        m.t_stats()
            .iter()
            .find(|(term, _)| *term == target)
            .and_then(|(_, t)| *t)
    };
    for (term, value) in m.coefficients() {
        let t = t_of(*term).map_or(String::new(), |t| t.to_string());
        let _ = writeln!(out, "{term},{value},{t}");
    }
    if m.spec().constant() {
        let t = m.delta_t_stat().map_or(String::new(), |t| t.to_string());
        let _ = writeln!(out, "C,{},{t}", m.delta());
    }
    out
}

pub fn leaderboard_text(b: &Leaderboard) -> String {
    let labels: Vec<String> = b.rows.iter().map(|r| r.spec.to_string()).collect();
    let width = labels.iter().map(String::len).max().unwrap_or(5).max(5);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "rank  {:<width$}   n        AIC        BIC     adj R2  note",
        "model"
    );
    for (i, (row, label)) in b.rows.iter().zip(&labels).enumerate() {
        let note = match (&row.failure, row.converged) {
            (Some(reason), _) => reason.clone(),
            (None, false) => "did not converge".into(),
            (None, true) => String::new(),
        };
        let _ = writeln!(
            out,
            "{:>4}  {:<width$}  {:>2}  {:>9}  {:>9}  {:>9}  {}",
            i + 1,
            label,
            row.n_params,
            opt3(row.aic),
            opt3(row.bic),
            opt3(row.adj_r2),
            note
        );
    }
    out
}

pub fn leaderboard_csv(b: &Leaderboard) -> String {
    let mut out = String::from("rank,model,n_params,converged,aic,bic,adj_r2,failure\n");
    for (i, row) in b.rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            i + 1,
            csv_field(&row.spec.to_string()),
            row.n_params,
            row.converged,
            row.aic.map_or(String::new(), |v| v.to_string()),
            row.bic.map_or(String::new(), |v| v.to_string()),
            row.adj_r2.map_or(String::new(), |v| v.to_string()),
            csv_field(row.failure.as_deref().unwrap_or("")),
        );
    }
    out
}

pub fn diagnostics_text(d: &DiagnosticsReport) -> String {
    let adjusted_for = d
        .residual_correlogram
        .q_prob
        .iter()
        .take_while(|p| p.is_none())
        .count();
    let band = d.residual_correlogram.band;
    let outside = d
        .residual_correlogram
        .ac
        .iter()
        .filter(|r| r.abs() > band)
        .count();
    let max_t = d
        .lm_rows
        .iter()
        .map(|r| r.t_stat.abs())
        .fold(0.0_f64, f64::max);
    let verdict = if d.adequate {
        "residuals pass: all correlations inside the band, all LM |t| < 2".to_string()
    } else {
        format!(
            "misspecification indicated: {outside} correlation(s) outside the band, max LM |t| = {max_t:.3}"
        )
    };
    format!(
        "residual correlogram (Q probabilities adjusted for {} estimated coefficients)\n{}\n\
         serial-correlation LM test\n{}\n{}\n",
        adjusted_for,
        correlogram_text(&d.residual_correlogram),
        lm_table(&d.lm_rows),
        verdict
    )
}

pub fn lm_table(rows: &[boxjenkins::diagnostics::LmRow]) -> String {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(8).max(8);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  Coefficient   Std. Error  t-Statistic    Prob.",
        "Variable"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:>11.3}  {:>11.3}  {:>11.3}  {:>7.3}",
            r.name, r.coefficient, r.std_error, r.t_stat, r.p_value
        );
    }
    out
}

pub fn forecast_text(fc: &ForecastResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "forecast origin: {}, horizon: {}\n", fc.origin, fc.horizon);
    let _ = writeln!(out, "period     forecast");
    for (i, value) in fc.points.iter().enumerate() {
        let period = fc.period_at(i).expect("horizon validated by forecast");
        let _ = writeln!(out, "{period}  {value:>11.3}");
    }
    out
}

pub fn forecast_csv(fc: &ForecastResult) -> String {
    let mut out = String::from("period,forecast\n");
    for (i, value) in fc.points.iter().enumerate() {
        let period = fc.period_at(i).expect("horizon validated by forecast");
        let _ = writeln!(out, "{period},{value}");
    }
    out
}

pub fn accuracy_text(a: &AccuracyReport) -> String {
    let mape = match a.mape {
        Some(v) => format!("{v:.3}%"),
        None => "n/a (an actual value is zero)".into(),
    };
    format!(
        "RMSE     {:.3}\nMAD      {:.3}\nMAPE     {}\nTheil U  {:.3}\n",
        a.rmse, a.mad, mape, a.theil_u
    )
}

pub fn accuracy_csv(a: &AccuracyReport) -> String {
    format!(
        "measure,value\nrmse,{}\nmad,{}\nmape,{}\ntheil_u,{}\n",
        a.rmse,
        a.mad,
        a.mape.map_or(String::new(), |v| v.to_string()),
        a.theil_u
    )
}

pub fn pivot_text(p: &SeasonalPivot) -> String {
    let mut out = String::new();
    let _ = write!(out, "year");
    for name in MONTHS {
        let _ = write!(out, "  {name:>9}");
    }
    let _ = writeln!(out);
    for (year, row) in p.years().zip(p.rows()) {
        let _ = write!(out, "{year:>4}");
        for cell in row {
            match cell {
                Some(v) => {
                    let _ = write!(out, "  {v:>9.3}");
                }
                None => {
                    let _ = write!(out, "  {:>9}", "");
                }
            }
        }
        let _ = writeln!(out);
    }
    let _ = write!(out, "mean");
    for mean in p.column_means() {
        match mean {
            Some(v) => {
                let _ = write!(out, "  {v:>9.3}");
            }
            None => {
                let _ = write!(out, "  {:>9}", "");
            }
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "peak month: {}   trough month: {}",
        MONTHS[p.peak_month() as usize - 1],
        MONTHS[p.trough_month() as usize - 1]
    );
    out
}

pub fn pivot_csv(p: &SeasonalPivot) -> String {
    let mut out = String::from("year");
    for name in MONTHS {
        out.push(',');
        out.push_str(&name.to_lowercase());
    }
    out.push('\n');
    for (year, row) in p.years().zip(p.rows()) {
        let _ = write!(out, "{year}");
        for cell in row {
            out.push(',');
            if let Some(v) = cell {
                let _ = write!(out, "{v}");
            }
        }
        out.push('\n');
    }
    out
}

pub fn series_summary_text(ts: &TimeSeries) -> String {
    let values = ts.values();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    format!(
        "observations  {}\nrange         {}..{}\nfrequency     {}\nmean          {:.3}\nmin           {:.3}\nmax           {:.3}\n",
        values.len(),
        ts.start(),
        ts.last_period(),
        ts.frequency(),
        mean,
        min,
        max
    )
}

pub fn series_summary_json(ts: &TimeSeries) -> serde_json::Value {
    let values = ts.values();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    serde_json::json!({
        "start": ts.start().to_string(),
        "end": ts.last_period().to_string(),
        "frequency": ts.frequency(),
        "observations": values.len(),
        "mean": mean,
        "min": min,
        "max": max,
    })
}

fn differencing_label(kind: Differencing) -> &'static str {
    match kind {
        Differencing::None => "levels",
        Differencing::Regular => "regular difference",
        Differencing::Seasonal => "seasonal difference",
    }
}

pub fn unit_root_text(decision: &DifferencingDecision) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<20}  ADF t-stat   p-value   5% rejection   significant ACF lags",
        "transformation"
    );
    for c in &decision.candidates {
        let _ = writeln!(
            out,
            "{:<20}  {:>10.3}  {:>8.3}  {:>13}  {:>21}",
            differencing_label(c.kind),
            c.adf.t_stat,
            c.adf.p_value,
            if c.adf.rejects_at_5pct() { "yes" } else { "no" },
            c.significant_lags
        );
    }
    let _ = writeln!(
        out,
        "recommendation: {}",
        differencing_label(decision.recommendation)
    );
    out
}
